#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace l2t {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Deterministic generator used for every randomized construction in the
/// library. Seeds are always explicit inputs.
using Rng = std::mt19937_64;

namespace linalg {

Matrix kron(const Matrix& a, const Matrix& b);
Matrix hermitian_part(const Matrix& m);

double max_abs(const Matrix& m);
double spectral_norm(const Matrix& m);
/// Ratio of largest to smallest singular value; +inf for singular input.
double condition_number(const Matrix& m);

/// Eigen-decomposition of a Hermitian matrix (input is symmetrized first).
struct HermitianEigen {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns
};
HermitianEigen hermitian_eigen(const Matrix& h);

/// f(H) for Hermitian H via its spectral decomposition.
template <class F>
Matrix hermitian_function(const Matrix& h, F&& f) {
  auto e = hermitian_eigen(h);
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    out += f(e.values(i)) * e.vectors.col(i) * e.vectors.col(i).adjoint();
  return out;
}

Matrix positive_sqrt(const Matrix& h);
Matrix positive_inverse_sqrt(const Matrix& h);

/// log|det m| through an LU factorization.
double log_abs_det(const Matrix& m);

/// Orthonormal basis (columns) of the null space, singular values below
/// rel_tol * max(largest, scale) are treated as zero. Pass the norm of the
/// whole operator as scale when m is one block of it.
Matrix null_space(const Matrix& m, double rel_tol = 1e-10, double scale = 0.0);
/// Orthonormal basis of the column space.
Matrix range_basis(const Matrix& m, double rel_tol = 1e-10, double scale = 0.0);
int numerical_rank(const Matrix& m, double rel_tol = 1e-10, double scale = 0.0);

/// sin of the largest principal angle between the spans of two orthonormal
/// column sets of equal width.
double subspace_gap(const Matrix& q1, const Matrix& q2);

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);
Matrix random_hermitian(Eigen::Index n, Rng& rng);
Matrix random_unitary(Eigen::Index n, Rng& rng);
/// Random Hermitian positive definite with spectrum in [lo, hi].
Matrix random_positive(Eigen::Index n, Rng& rng, double lo = 0.5, double hi = 2.0);

}  // namespace linalg
}  // namespace l2t
