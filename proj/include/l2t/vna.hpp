#pragma once

// Finite von Neumann algebras in concrete block form
//
//   A = M_{n_1}(C) (+) ... (+) M_{n_K}(C),   tau(x) = sum_k w_k tr(x_k)
//
// together with the group algebra C[G] of a finite group realized through a
// numerical Wedderburn decomposition of its left regular representation.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "l2t/linalg.hpp"

namespace l2t {

struct AlgebraBlock {
  int dim = 1;
  double weight = 1.0;
  bool operator==(const AlgebraBlock&) const = default;
};

class AlgebraElement;

class Algebra {
 public:
  /// Throws ValidationError unless every dim >= 1 and weight > 0.
  explicit Algebra(std::vector<AlgebraBlock> blocks);

  std::span<const AlgebraBlock> blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  int block_dim(std::size_t k) const { return blocks_[k].dim; }
  double weight(std::size_t k) const { return blocks_[k].weight; }

  /// tau(1) = sum_k w_k n_k.
  double unit_trace() const;
  /// Same blocks, every weight multiplied by lambda > 0.
  Algebra scaled(double lambda) const;

  AlgebraElement identity() const;
  AlgebraElement zero() const;
  AlgebraElement matrix_unit(std::size_t k, int i, int j) const;
  /// Matrix units E^k_{ij} ordered by (k, i, j); they span A.
  std::vector<AlgebraElement> matrix_units() const;

  bool operator==(const Algebra& other) const { return blocks_ == other.blocks_; }

 private:
  std::vector<AlgebraBlock> blocks_;
};

using AlgebraPtr = std::shared_ptr<const Algebra>;

class AlgebraElement {
 public:
  AlgebraElement() = default;
  explicit AlgebraElement(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {}

  std::size_t block_count() const { return blocks_.size(); }
  const Matrix& block(std::size_t k) const { return blocks_[k]; }
  Matrix& block(std::size_t k) { return blocks_[k]; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  AlgebraElement adjoint() const;
  bool conforms_to(const Algebra& algebra) const;

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator*(Complex s, const AlgebraElement& a);

 private:
  std::vector<Matrix> blocks_;
};

/// tau(x) = sum_k w_k tr(x_k). Throws ShapeMismatch.
Complex trace(const Algebra& algebra, const AlgebraElement& x);

AlgebraElement random_element(const Algebra& algebra, Rng& rng);

/// Multiplication table of a finite group on indices 0..order-1.
class GroupTable {
 public:
  /// Validates closure, associativity, identity and inverses exhaustively.
  /// Throws NonAssociativeTable on any failure.
  GroupTable(std::vector<std::vector<int>> product, int identity);

  int order() const { return order_; }
  int identity() const { return identity_; }
  int mul(int a, int b) const { return product_[static_cast<std::size_t>(a) * order_ + b]; }
  int inverse(int a) const { return inverse_[a]; }

  static GroupTable trivial();
  static GroupTable cyclic(int n);
  /// S_3 with index 0 = e, 1 = (123), 2 = (132), 3 = (12), 4 = (13), 5 = (23).
  static GroupTable symmetric3();
  /// Direct product of two tables; element (a, b) has index a * |H| + b.
  static GroupTable product_of(const GroupTable& g, const GroupTable& h);

 private:
  int order_ = 0;
  int identity_ = 0;
  std::vector<int> product_;
  std::vector<int> inverse_;
};

struct WedderburnOptions {
  /// Eigenvalues of the random commutant element closer than this (relative
  /// to the spectral scale) are clustered together.
  double cluster_gap = 1e-6;
  std::uint64_t seed = 0x5eed5eedULL;
  int max_attempts = 8;
  int max_order = 256;
};

struct GroupAlgebra {
  AlgebraPtr algebra;
  /// Unitary U on C^|G| with U L_g U^* = (+)_k rho_k(g) (x) I_{n_k}.
  Matrix change_of_basis;
  /// Image of every group element in block form, indexed like the table.
  std::vector<AlgebraElement> element_images;
};

/// Left translation L_g e_h = e_{gh} on C^|G|.
Matrix left_translation(const GroupTable& table, int g);
/// Right translation R_g e_h = e_{h g^-1}; commutes with every L_g.
Matrix right_translation(const GroupTable& table, int g);
/// A small set of elements generating the whole group (greedy).
std::vector<int> generating_set(const GroupTable& table);

/// Block decomposition of C[G] with weights n_k / |G|, so that tau(g) = a_e.
/// Throws NonAssociativeTable, DecompositionFailure, ValidationError (order
/// above the configured limit).
GroupAlgebra build_group_algebra(const GroupTable& table, const WedderburnOptions& options = {});

namespace detail {

/// Splits a unitary *-representation (given by the images of a spanning set
/// of the algebra) into irreducible invariant subspaces. `hermitian_sample`
/// must be a generic Hermitian element of the commutant. Returns orthonormal
/// bases, one per eigenvalue cluster.
std::vector<Matrix> eigen_clusters(const Matrix& hermitian_sample, double cluster_gap);

/// Solves X_j S = S Y_j for all j and returns the unitary solution (unique up
/// to phase when the representations are irreducible and equivalent).
/// Returns an empty matrix if no invertible intertwiner exists.
Matrix unitary_intertwiner(std::span<const Matrix> targets, std::span<const Matrix> sources);

}  // namespace detail
}  // namespace l2t
