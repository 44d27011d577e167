#pragma once

// A-linear maps between modules in isotypic form. A map between carriers
// (+)_k C^{n_k} (x) C^{m_k} and (+)_k C^{n_k} (x) C^{m'_k} that commutes with
// the action is (+)_k I_{n_k} (x) B_k, so only the m'_k x m_k blocks B_k are
// stored.

#include <span>
#include <vector>

#include "l2t/linalg.hpp"

namespace l2t {

class BlockOp {
 public:
  BlockOp() = default;
  explicit BlockOp(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {}

  static BlockOp identity(std::span<const int> mult);
  static BlockOp zero(std::span<const int> rows, std::span<const int> cols);
  static BlockOp scalar(std::span<const int> mult, Complex s);

  std::size_t size() const { return blocks_.size(); }
  const Matrix& operator[](std::size_t k) const { return blocks_[k]; }
  Matrix& operator[](std::size_t k) { return blocks_[k]; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  std::vector<int> row_mult() const;
  std::vector<int> col_mult() const;

  BlockOp adjoint() const;
  BlockOp transpose() const;
  /// Blockwise inverse; throws NonInvertible when a block has condition
  /// number above `max_condition`.
  BlockOp inverse(double max_condition = 1e12) const;

  friend BlockOp operator+(const BlockOp& a, const BlockOp& b);
  friend BlockOp operator-(const BlockOp& a, const BlockOp& b);
  friend BlockOp operator*(const BlockOp& a, const BlockOp& b);
  friend BlockOp operator*(Complex s, const BlockOp& a);

 private:
  std::vector<Matrix> blocks_;
};

double max_abs(const BlockOp& f);
double spectral_norm(const BlockOp& f);
BlockOp hermitian_part(const BlockOp& f);

/// Applies a scalar function to a Hermitian BlockOp through its spectrum.
template <class F>
BlockOp hermitian_apply(const BlockOp& h, F&& f) {
  std::vector<Matrix> out;
  for (const auto& b : h.blocks()) out.push_back(linalg::hermitian_function(b, f));
  return BlockOp(std::move(out));
}

BlockOp positive_sqrt(const BlockOp& h);
BlockOp positive_inverse_sqrt(const BlockOp& h);

/// Adjoint of f: M -> N with respect to grams G_M and G_N, i.e. G_M^-1 f^* G_N.
BlockOp gram_adjoint(const BlockOp& f, const BlockOp& gram_source, const BlockOp& gram_target);

/// Assembles a block matrix of maps; entries[r][c] maps column summand c to
/// row summand r. Summand multiplicities are passed explicitly so that empty
/// blocks keep their shape.
BlockOp block_matrix(const std::vector<std::vector<BlockOp>>& entries, std::span<const std::vector<int>> row_mults,
                     std::span<const std::vector<int>> col_mults);
/// Extracts the (r, c) entry of a block matrix over the given summands.
BlockOp sub_block(const BlockOp& f, std::span<const std::vector<int>> row_mults,
                  std::span<const std::vector<int>> col_mults, std::size_t r, std::size_t c);

}  // namespace l2t
