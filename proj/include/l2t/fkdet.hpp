#pragma once

// Fuglede-Kadison determinants of commutant operators: spectral route through
// the spectral density, and the path route that telescopes Tr_tau log along a
// path in GL(M) starting at the identity.

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "l2t/hilbertian.hpp"

namespace l2t {

struct SpectralAtom {
  double lambda = 0.0;
  double weight = 0.0;
};

struct SpectralDensity {
  /// Finite-dimensional backends: sorted atoms with weights w_k * multiplicity.
  std::vector<SpectralAtom> atoms;
  /// Abelian backend: sampled (lambda, phi(lambda)) pairs.
  std::vector<std::pair<double, double>> sampled_cdf;
  double total_mass = 0.0;

  /// phi(lambda) = dim_tau of the spectral projection onto [0, lambda].
  double cdf(double lambda) const;
};

enum class DetMethod { spectral, path, polar };
std::string_view to_string(DetMethod m);
DetMethod parse_det_method(std::string_view s);

enum class Verdict { pass, divergent, indeterminate };
std::string_view to_string(Verdict v);

struct Convergence {
  Verdict verdict = Verdict::pass;
  double error_estimate = 0.0;
  std::string note;
};

struct DeterminantResult {
  double value = 1.0;
  double log_value = 0.0;
  DetMethod method = DetMethod::spectral;
  Convergence convergence;
  /// Number of telescoping factors (path routes only).
  int steps = 0;
};

struct FkOptions {
  /// Eigenvalues at or below kernel_tol * spectral norm count as zero.
  double kernel_tol = 1e-12;
  /// Tolerance for the self-adjointness and negativity checks.
  double symmetry_tol = 1e-10;
  double max_condition = 1e12;
  /// Telescoping factors must satisfy ||A_a^-1 A_b - I|| < step_bound.
  double step_bound = 0.5;
  /// Initial parameter step of the adaptive subdivision.
  double initial_step = 0.125;
};

/// Spectral density of T, which must be self-adjoint and nonnegative with
/// respect to `gram`. Throws NotSelfAdjoint, NegativeSpectrum.
SpectralDensity spectral_density(const HilbertianModule& m, const BlockOp& t, const BlockOp& gram,
                                 const FkOptions& options = {});

/// log Det = integral of log lambda against the spectral density. Throws
/// KernelDetected when an atom sits at (numerical) zero.
DeterminantResult fk_det_spectral(const HilbertianModule& m, const BlockOp& t, const BlockOp& gram,
                                  const FkOptions& options = {});
DeterminantResult fk_det_spectral(const HilbertianModule& m, const BlockOp& t, const FkOptions& options = {});

/// Path to integrate along: t in [t0, t1] -> invertible operator.
using OperatorPath = std::function<BlockOp(double)>;

/// log Det(path(t1)) - log Det(path(t0)) by adaptive telescoping. Throws
/// PathLeavesGL.
double fk_log_det_along(const HilbertianModule& m, const OperatorPath& path, double t0, double t1,
                        const FkOptions& options = {}, int* steps = nullptr);

/// Straight path A_t = (1 - t) I + t A.
OperatorPath straight_path(const HilbertianModule& m, const BlockOp& a);
/// Polar path on [0, 2]: rotate the unitary part U of A = U|A| from I by
/// spectral interpolation, then scale |A| linearly from I.
OperatorPath polar_path(const BlockOp& a);
/// Whether the straight path from I to A meets a singular operator (A has a
/// real eigenvalue <= 0).
bool straight_path_singular(const BlockOp& a, double tol = 1e-12);

/// Path route. With method == path the straight path is used unless it is
/// singular, in which case the polar path is taken; method == polar forces
/// the polar path. Throws NonInvertible, PathLeavesGL.
DeterminantResult fk_det_path(const HilbertianModule& m, const BlockOp& a, DetMethod method = DetMethod::path,
                              const FkOptions& options = {});

/// Det(A) for invertible A: sqrt of the spectral determinant of A^# A where
/// the adjoint is taken with respect to `gram`, or the path route. Throws
/// NonInvertible.
DeterminantResult fk_det(const HilbertianModule& m, const BlockOp& a, const BlockOp& gram,
                         DetMethod method = DetMethod::spectral, const FkOptions& options = {});
DeterminantResult fk_det(const HilbertianModule& m, const BlockOp& a, DetMethod method = DetMethod::spectral,
                         const FkOptions& options = {});

namespace detail {
/// Re tr log(I + y) by its power series; requires ||y|| < 1.
double re_trace_log1p(const Matrix& y);
}  // namespace detail

}  // namespace l2t
