#pragma once

// Finitely generated Hilbertian modules in isotypic normal form. The carrier
// is (+)_k C^{n_k} (x) C^{m_k}; inside block k the coordinate of e_a (x) f_b is
// offset_k + a * m_k + b. User coordinates are related to canonical ones by
// the unitary `basis_map` (canonical = basis_map * user).

#include <optional>
#include <span>
#include <vector>

#include "l2t/block_op.hpp"
#include "l2t/vna.hpp"

namespace l2t {

class HilbertianModule {
 public:
  /// Module with the given multiplicities, identity basis map and identity
  /// reference gram.
  HilbertianModule(AlgebraPtr algebra, std::vector<int> multiplicities);

  /// Free module l2(A)^rank, i.e. m_k = rank * n_k.
  static HilbertianModule free(AlgebraPtr algebra, int rank = 1);

  /// Normalizes a raw *-representation to isotypic form. `spanning` must span
  /// A and `images[i]` is the d x d image of `spanning[i]`. Throws
  /// ValidationError if the images do not define a unital *-representation.
  static HilbertianModule from_action(AlgebraPtr algebra, std::span<const AlgebraElement> spanning,
                                      std::span<const Matrix> images);

  /// Same module with another reference gram (validated: self-adjoint and
  /// positive definite blockwise). Throws NotAdmissible.
  HilbertianModule with_reference(BlockOp gram) const;

  const Algebra& algebra() const { return *algebra_; }
  const AlgebraPtr& algebra_ptr() const { return algebra_; }
  std::span<const int> multiplicities() const { return mult_; }
  int multiplicity(std::size_t k) const { return mult_[k]; }
  Eigen::Index carrier_dim() const { return dim_; }
  Eigen::Index block_offset(std::size_t k) const { return offsets_[k]; }
  const Matrix& basis_map() const { return basis_map_; }
  const BlockOp& reference_gram() const { return reference_; }

  BlockOp identity() const { return BlockOp::identity(mult_); }
  BlockOp zero() const { return BlockOp::zero(mult_, mult_); }
  bool is_zero() const { return dim_ == 0; }

  /// Action of x on the carrier, canonical coordinates.
  Matrix action(const AlgebraElement& x) const;
  /// Action of x in user coordinates.
  Matrix action_user(const AlgebraElement& x) const;

  /// Dense canonical matrix of an endomorphism.
  Matrix expand(const BlockOp& f) const;
  /// Dense user-coordinate matrix of an endomorphism.
  Matrix to_user(const BlockOp& f) const;
  /// Recovers B_k from a dense canonical matrix; throws NotInCommutant if the
  /// matrix does not commute with the action (relative tolerance).
  BlockOp compress(const Matrix& canonical, double rel_tol = 1e-10) const;
  BlockOp from_user(const Matrix& user, double rel_tol = 1e-10) const;

  bool compatible(const HilbertianModule& other) const { return *algebra_ == *other.algebra_; }

 private:
  HilbertianModule() = default;
  void layout();

  AlgebraPtr algebra_;
  std::vector<int> mult_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index dim_ = 0;
  Matrix basis_map_;
  BlockOp reference_;

  friend HilbertianModule direct_sum(const HilbertianModule& m, const HilbertianModule& n);
};

/// Dense canonical matrix of an A-linear map source -> target.
Matrix expand_morphism(const HilbertianModule& source, const HilbertianModule& target, const BlockOp& f);
/// Recovers an A-linear map from its dense canonical matrix. Throws
/// NotInCommutant.
BlockOp compress_morphism(const HilbertianModule& source, const HilbertianModule& target, const Matrix& canonical,
                          double rel_tol = 1e-10);
/// Checks that f has the block shape of a map source -> target. Throws
/// ShapeMismatch.
void check_morphism_shape(const HilbertianModule& source, const HilbertianModule& target, const BlockOp& f);

/// Basis of the commutant: the matrix units of each M_{m_k}. Size sum m_k^2.
std::vector<BlockOp> commutant_basis(const HilbertianModule& m);

/// Tr_tau(f) = sum_k w_k tr(B_k). Throws NotInCommutant for a wrongly shaped f.
Complex canonical_trace(const HilbertianModule& m, const BlockOp& f);

/// The trace computed through the free-module description: on l2(A)^r an
/// A-linear endomorphism is right multiplication by an r x r matrix (a_ij)
/// over A, and the trace is sum_i tau(a_ii). Throws ValidationError unless m
/// is free.
Complex free_module_trace(const HilbertianModule& m, const BlockOp& f);
/// The matrix (a_ij) over A for an endomorphism of a free module.
std::vector<std::vector<AlgebraElement>> free_module_entries(const HilbertianModule& m, const BlockOp& f);
/// Right multiplication by a on l2(A)^1.
BlockOp right_multiplication(const HilbertianModule& free_rank_one, const AlgebraElement& a);

double von_neumann_dimension(const HilbertianModule& m);

struct AdmissibilityReport {
  bool invertible = false;
  bool self_adjoint = false;
  bool positive = false;
  bool commutes = false;
  double condition = 0.0;
  double commutator_residual = 0.0;
  /// A with <v, w>_G = <A v, w>_reference, in block form; empty unless
  /// `commutes`.
  std::optional<BlockOp> transition;
  bool admissible() const { return invertible && self_adjoint && positive && commutes; }
};

/// Checks conditions (alpha)-(delta) for a dense gram in user coordinates.
AdmissibilityReport check_admissible(const HilbertianModule& m, const Matrix& gram_user);
/// Same for a gram already in block form (commutation holds by construction).
AdmissibilityReport check_admissible(const HilbertianModule& m, const BlockOp& gram);

/// Throws NotAdmissible unless `gram` is a positive definite element of the
/// commutant with condition number below 1e12.
void require_admissible(const HilbertianModule& m, const BlockOp& gram);

/// Transition operator A = R^-1 G between the reference R and G.
BlockOp transition_operator(const BlockOp& reference, const BlockOp& gram);

/// Principal square root of G1^-1 G2; an isometry from (M, G2) to (M, G1),
/// i.e. B^* G1 B = G2.
BlockOp isometry_between(const BlockOp& gram1, const BlockOp& gram2);

/// The involution on B(M) induced by a second product with transition A:
/// f -> A^-1 f^* A (adjoint of the first product taken as conjugate transpose).
BlockOp induced_involution(const BlockOp& transition, const BlockOp& f);

/// M (+) N. Throws AlgebraMismatch.
HilbertianModule direct_sum(const HilbertianModule& m, const HilbertianModule& n);
/// [[a, b], [c, d]] on M (+) N with a: M->M, b: N->M, c: M->N, d: N->N; empty
/// BlockOps stand for zero.
BlockOp block_operator(const HilbertianModule& m, const HilbertianModule& n, const BlockOp& a, const BlockOp& b,
                       const BlockOp& c, const BlockOp& d);

/// Random elements for property tests.
BlockOp random_commutant(const HilbertianModule& m, Rng& rng);
BlockOp random_positive(const HilbertianModule& m, Rng& rng, double lo = 0.5, double hi = 2.0);
BlockOp random_unitary(const HilbertianModule& m, Rng& rng);
BlockOp random_morphism(const HilbertianModule& source, const HilbertianModule& target, Rng& rng);

}  // namespace l2t
