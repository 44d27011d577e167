#include "l2t/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "l2t/errors.hpp"

namespace l2t {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonAssociativeTable: return "NonAssociativeTable";
    case ErrorKind::DecompositionFailure: return "DecompositionFailure";
    case ErrorKind::NotInCommutant: return "NotInCommutant";
    case ErrorKind::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorKind::NegativeSpectrum: return "NegativeSpectrum";
    case ErrorKind::KernelDetected: return "KernelDetected";
    case ErrorKind::DivergentIntegral: return "DivergentIntegral";
    case ErrorKind::IndeterminateConvergence: return "IndeterminateConvergence";
    case ErrorKind::PathLeavesGL: return "PathLeavesGL";
    case ErrorKind::NonInvertible: return "NonInvertible";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::NotIso: return "NotIso";
    case ErrorKind::NotExact: return "NotExact";
    case ErrorKind::NotDExact: return "NotDExact";
    case ErrorKind::DuplicateDegree: return "DuplicateDegree";
    case ErrorKind::IllConditionedKernel: return "IllConditionedKernel";
    case ErrorKind::NotDeterminantClass: return "NotDeterminantClass";
    case ErrorKind::BackendUnsupported: return "BackendUnsupported";
    case ErrorKind::RelationViolation: return "RelationViolation";
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::InvalidSubdivision: return "InvalidSubdivision";
    case ErrorKind::NotHermitianSymbol: return "NotHermitianSymbol";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

bool is_refusal(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotUnimodular:
    case ErrorKind::NotDeterminantClass:
    case ErrorKind::DivergentIntegral:
    case ErrorKind::IndeterminateConvergence:
    case ErrorKind::KernelDetected:
    case ErrorKind::NotDExact:
    case ErrorKind::IllConditionedKernel:
    case ErrorKind::PathLeavesGL:
      return true;
    default:
      return false;
  }
}

namespace linalg {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double condition_number(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

HermitianEigen hermitian_eigen(const Matrix& h) {
  if (h.size() == 0) return {RealVector(0), Matrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix positive_sqrt(const Matrix& h) {
  return hermitian_function(h, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

Matrix positive_inverse_sqrt(const Matrix& h) {
  return hermitian_function(h, [](double x) { return 1.0 / std::sqrt(x); });
}

double log_abs_det(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::PartialPivLU<Matrix> lu(m);
  const Matrix& u = lu.matrixLU();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) acc += std::log(std::abs(u(i, i)));
  return acc;
}

namespace {
struct Svd {
  RealVector s;
  Matrix u, v;
};
Svd full_svd(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}
int rank_of(const RealVector& s, double rel_tol, double scale) {
  if (s.size() == 0 || s(0) == 0.0) return 0;
  double cut = rel_tol * std::max(s(0), scale);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}
}  // namespace

Matrix null_space(const Matrix& m, double rel_tol, double scale) {
  if (m.cols() == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  auto svd = full_svd(m);
  int r = rank_of(svd.s, rel_tol, scale);
  return svd.v.rightCols(m.cols() - r);
}

Matrix range_basis(const Matrix& m, double rel_tol, double scale) {
  if (m.rows() == 0) return Matrix(0, 0);
  if (m.cols() == 0) return Matrix(m.rows(), 0);
  auto svd = full_svd(m);
  int r = rank_of(svd.s, rel_tol, scale);
  return svd.u.leftCols(r);
}

int numerical_rank(const Matrix& m, double rel_tol, double scale) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return rank_of(svd.singularValues(), rel_tol, scale);
}

double subspace_gap(const Matrix& q1, const Matrix& q2) {
  if (q1.cols() != q2.cols()) return 1.0;
  if (q1.cols() == 0) return 0.0;
  Matrix residual = q1 - q2 * (q2.adjoint() * q1);
  return spectral_norm(residual);
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = Complex(g(rng), g(rng));
  return out;
}

Matrix random_hermitian(Eigen::Index n, Rng& rng) { return hermitian_part(random_matrix(n, n, rng)); }

Matrix random_unitary(Eigen::Index n, Rng& rng) {
  if (n == 0) return Matrix(0, 0);
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, rng));
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

Matrix random_positive(Eigen::Index n, Rng& rng, double lo, double hi) {
  if (n == 0) return Matrix(0, 0);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix q = random_unitary(n, rng);
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) d(i, i) = u(rng);
  return hermitian_part(q * d * q.adjoint());
}

}  // namespace linalg
}  // namespace l2t
