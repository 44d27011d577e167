#include "l2t/block_op.hpp"

#include <string>

#include "l2t/errors.hpp"

namespace l2t {

BlockOp BlockOp::identity(std::span<const int> mult) {
  std::vector<Matrix> out;
  for (int m : mult) out.push_back(Matrix::Identity(m, m));
  return BlockOp(std::move(out));
}

BlockOp BlockOp::zero(std::span<const int> rows, std::span<const int> cols) {
  require(rows.size() == cols.size(), ErrorKind::ShapeMismatch, "block counts differ");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < rows.size(); ++k) out.push_back(Matrix::Zero(rows[k], cols[k]));
  return BlockOp(std::move(out));
}

BlockOp BlockOp::scalar(std::span<const int> mult, Complex s) { return s * identity(mult); }

std::vector<int> BlockOp::row_mult() const {
  std::vector<int> out;
  for (const auto& b : blocks_) out.push_back(static_cast<int>(b.rows()));
  return out;
}

std::vector<int> BlockOp::col_mult() const {
  std::vector<int> out;
  for (const auto& b : blocks_) out.push_back(static_cast<int>(b.cols()));
  return out;
}

BlockOp BlockOp::adjoint() const {
  std::vector<Matrix> out;
  for (const auto& b : blocks_) out.push_back(b.adjoint());
  return BlockOp(std::move(out));
}

BlockOp BlockOp::transpose() const {
  std::vector<Matrix> out;
  for (const auto& b : blocks_) out.push_back(b.transpose());
  return BlockOp(std::move(out));
}

BlockOp BlockOp::inverse(double max_condition) const {
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    require(b.rows() == b.cols(), ErrorKind::ShapeMismatch, "inverse of a non-square block");
    double cond = linalg::condition_number(b);
    require(cond < max_condition, ErrorKind::NonInvertible,
            "block " + std::to_string(k) + " has condition number " + std::to_string(cond));
    out.push_back(b.size() == 0 ? b : Matrix(b.partialPivLu().inverse()));
  }
  return BlockOp(std::move(out));
}

namespace {
void check_same_shape(const BlockOp& a, const BlockOp& b) {
  require(a.size() == b.size(), ErrorKind::ShapeMismatch, "operators differ in block count");
  for (std::size_t k = 0; k < a.size(); ++k)
    require(a[k].rows() == b[k].rows() && a[k].cols() == b[k].cols(), ErrorKind::ShapeMismatch,
            "operators differ in block " + std::to_string(k) + " shape");
}
}  // namespace

BlockOp operator+(const BlockOp& a, const BlockOp& b) {
  check_same_shape(a, b);
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < a.size(); ++k) out.push_back(a[k] + b[k]);
  return BlockOp(std::move(out));
}

BlockOp operator-(const BlockOp& a, const BlockOp& b) {
  check_same_shape(a, b);
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < a.size(); ++k) out.push_back(a[k] - b[k]);
  return BlockOp(std::move(out));
}

BlockOp operator*(const BlockOp& a, const BlockOp& b) {
  require(a.size() == b.size(), ErrorKind::ShapeMismatch, "operators differ in block count");
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < a.size(); ++k) {
    require(a[k].cols() == b[k].rows(), ErrorKind::ShapeMismatch,
            "composition shape mismatch in block " + std::to_string(k));
    out.push_back(a[k] * b[k]);
  }
  return BlockOp(std::move(out));
}

BlockOp operator*(Complex s, const BlockOp& a) {
  std::vector<Matrix> out;
  for (const auto& b : a.blocks()) out.push_back(s * b);
  return BlockOp(std::move(out));
}

double max_abs(const BlockOp& f) {
  double m = 0.0;
  for (const auto& b : f.blocks()) m = std::max(m, linalg::max_abs(b));
  return m;
}

double spectral_norm(const BlockOp& f) {
  double m = 0.0;
  for (const auto& b : f.blocks()) m = std::max(m, linalg::spectral_norm(b));
  return m;
}

BlockOp hermitian_part(const BlockOp& f) { return 0.5 * (f + f.adjoint()); }

BlockOp positive_sqrt(const BlockOp& h) {
  return hermitian_apply(h, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

BlockOp positive_inverse_sqrt(const BlockOp& h) {
  return hermitian_apply(h, [](double x) { return 1.0 / std::sqrt(x); });
}

BlockOp gram_adjoint(const BlockOp& f, const BlockOp& gram_source, const BlockOp& gram_target) {
  return gram_source.inverse() * f.adjoint() * gram_target;
}

BlockOp block_matrix(const std::vector<std::vector<BlockOp>>& entries, std::span<const std::vector<int>> row_mults,
                     std::span<const std::vector<int>> col_mults) {
  require(entries.size() == row_mults.size(), ErrorKind::ShapeMismatch, "block matrix row count");
  std::size_t blocks = !row_mults.empty() ? row_mults.front().size()
                                          : (!col_mults.empty() ? col_mults.front().size() : 0);
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < blocks; ++k) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& m : row_mults) rows += m[k];
    for (const auto& m : col_mults) cols += m[k];
    Matrix b = Matrix::Zero(rows, cols);
    Eigen::Index r0 = 0;
    for (std::size_t r = 0; r < row_mults.size(); ++r) {
      require(entries[r].size() == col_mults.size(), ErrorKind::ShapeMismatch, "block matrix column count");
      Eigen::Index c0 = 0;
      for (std::size_t c = 0; c < col_mults.size(); ++c) {
        const auto& e = entries[r][c];
        if (e.size() != 0) {
          require(e[k].rows() == row_mults[r][k] && e[k].cols() == col_mults[c][k], ErrorKind::ShapeMismatch,
                  "block matrix entry shape");
          b.block(r0, c0, row_mults[r][k], col_mults[c][k]) = e[k];
        }
        c0 += col_mults[c][k];
      }
      r0 += row_mults[r][k];
    }
    out.push_back(std::move(b));
  }
  return BlockOp(std::move(out));
}

BlockOp sub_block(const BlockOp& f, std::span<const std::vector<int>> row_mults,
                  std::span<const std::vector<int>> col_mults, std::size_t r, std::size_t c) {
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < f.size(); ++k) {
    Eigen::Index r0 = 0, c0 = 0;
    for (std::size_t i = 0; i < r; ++i) r0 += row_mults[i][k];
    for (std::size_t j = 0; j < c; ++j) c0 += col_mults[j][k];
    out.push_back(f[k].block(r0, c0, row_mults[r][k], col_mults[c][k]));
  }
  return BlockOp(std::move(out));
}

}  // namespace l2t
