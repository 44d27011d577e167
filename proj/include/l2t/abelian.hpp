#pragma once

// N(Z^n) for n <= 2 through matrix-valued symbols on the torus. An operator on
// l2(Z^n)^m that commutes with the group is a Laurent polynomial matrix F;
// tau(F) is the trace of the constant coefficient, and everything spectral is
// computed from the eigenvalues of F(theta) sampled on nested uniform grids.
// theta runs over [0, 1)^n and t_j acts as exp(2 pi i theta_j).

#include <map>
#include <string>
#include <vector>

#include "l2t/chain.hpp"
#include "l2t/fkdet.hpp"
#include "l2t/linalg.hpp"

namespace l2t {

struct LaurentMatrix {
  int rank = 1;
  int size = 1;
  /// Exponent (length rank) -> size x size coefficient.
  std::map<std::vector<int>, Matrix> coefficients;

  static LaurentMatrix zero(int rank, int size);
  static LaurentMatrix identity(int rank, int size);
  static LaurentMatrix constant(int rank, const Matrix& c);
  /// c * t^exponent on l2(Z^n)^1.
  static LaurentMatrix monomial(const std::vector<int>& exponent, Complex c = 1.0);

  Matrix evaluate(const std::vector<double>& theta) const;
  /// Conjugate transpose with negated exponents.
  LaurentMatrix adjoint() const;
  /// Drops coefficients with max |entry| <= tol.
  LaurentMatrix pruned(double tol = 0.0) const;
  bool is_zero() const { return pruned().coefficients.empty(); }
};

LaurentMatrix operator+(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix operator-(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix operator*(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix operator*(Complex s, const LaurentMatrix& a);
/// Block matrix of Laurent matrices (rows of blocks, all of one rank).
LaurentMatrix block(const std::vector<std::vector<LaurentMatrix>>& blocks);

/// Uniform grid with `resolution` points per axis; refined() doubles it, so
/// every grid contains the ones it was refined from.
struct TorusGrid {
  int rank = 1;
  int resolution = 4096;

  /// 2^12 points for n = 1, 2^6 per axis for n = 2. Throws BackendUnsupported
  /// for n outside {1, 2}.
  static TorusGrid default_for(int rank);
  TorusGrid refined() const { return {rank, 2 * resolution}; }
  std::size_t size() const;
  std::vector<double> point(std::size_t index) const;
  bool contains(const TorusGrid& coarser) const;
};

/// tr of the constant coefficient.
Complex laurent_trace(const LaurentMatrix& f);
/// The same trace as the grid average of tr F(theta).
Complex laurent_trace_quadrature(const LaurentMatrix& f, const TorusGrid& grid);

struct AbelianOptions {
  /// 0 selects TorusGrid::default_for(rank).
  int resolution = 0;
  /// Excision levels, relative to the largest eigenvalue on the grid.
  std::vector<double> excision = {1e-2, 1e-3, 1e-4};
  /// Successive excised integrals closer than this pass outright.
  double pass_tol = 1e-4;
  /// A geometric decrease of the differences by at least this ratio is
  /// extrapolated and passes.
  double min_ratio = 1.5;
  /// Differences of at least divergence_slope * ln 10 per decade diverge.
  double divergence_slope = 0.9;
  double hermitian_tol = 1e-10;
  /// Pointwise kernel threshold, relative to the largest eigenvalue.
  double kernel_tol = 1e-10;
};

struct AbelianSpectralDensity {
  SpectralDensity density;
  /// sup |phi_N - phi_2N| over the sampled lambdas.
  double refinement_change = 0.0;
  int resolution = 0;
};

/// Sampled CDF of the eigenvalues of F(theta) with total mass `size`.
/// Throws NotHermitianSymbol, NegativeSpectrum.
AbelianSpectralDensity abelian_spectral_density(const LaurentMatrix& f, const AbelianOptions& options = {},
                                                int cdf_points = 256);

/// int log max(lambda, eps) dphi for every excision level, each extrapolated
/// over the grids N, 2N, 4N, and the resulting verdict. The first three
/// levels decide the verdict; on a pass, further decades are appended while
/// they still change the value and the grid resolves them.
struct ConvergenceStudy {
  std::vector<double> excision;
  /// Absolute excision thresholds (relative level times the largest eigenvalue).
  std::vector<double> thresholds;
  std::vector<double> integrals;
  std::vector<double> grid_errors;
  double log_value = 0.0;
  Convergence convergence;
  int resolution = 0;
};

ConvergenceStudy abelian_log_det_study(const LaurentMatrix& f, const AbelianOptions& options = {});

/// Det of a positive symbol: exp int log det F(theta) dtheta. Throws
/// DivergentIntegral, IndeterminateConvergence, NotHermitianSymbol,
/// NegativeSpectrum.
DeterminantResult abelian_fk_det(const LaurentMatrix& f, const AbelianOptions& options = {});
/// Det(A) = Det(A^* A)^{1/2} for any square symbol.
DeterminantResult abelian_fk_det_operator(const LaurentMatrix& a, const AbelianOptions& options = {});

/// Chain complex of free N(Z^n)-modules l2(Z^n)^{sizes[i]}; maps[j] connects
/// degrees j and j+1 as in HilbertianChainComplex. Maps may be rectangular:
/// only their coefficients are used, not the `size` field.
struct AbelianChainComplex {
  int rank = 1;
  std::vector<int> sizes;
  std::vector<LaurentMatrix> maps;
  Convention convention = Convention::chain;

  int top_degree() const { return static_cast<int>(sizes.size()) - 1; }
  /// Throws ShapeMismatch, ValidationError (d^2 != 0 as Laurent matrices).
  void validate() const;
  /// Delta_i = d^* d + d d^* in degree i.
  LaurentMatrix laplacian(int i) const;
};

struct AbelianDegree {
  int degree = 0;
  /// Generic nullity of Delta_i(theta); equals the L2 Betti number.
  double betti = 0.0;
  ConvergenceStudy log_det;
};

struct AbelianTorsionReport {
  int rank = 1;
  Convention convention = Convention::chain;
  std::vector<AbelianDegree> degrees;
  double log_coordinate = 0.0;
  double coordinate = 1.0;
  int resolution = 0;
};

/// L2 Betti numbers from the generic pointwise nullity of the Laplacian
/// symbols. Throws IllConditionedKernel when the nullity is not constant at
/// generic points.
std::vector<double> abelian_betti(const AbelianChainComplex& c, const AbelianOptions& options = {});

/// Verdicts of the Laplacian determinants, degree by degree. Never throws on
/// divergence.
std::vector<ClassVerdict> abelian_class_check(const AbelianChainComplex& c, const AbelianOptions& options = {});

/// Torsion of an L2-acyclic complex through the Laplacian determinants.
/// Throws BackendUnsupported when some Betti number is positive and
/// NotDeterminantClass when a determinant does not pass.
AbelianTorsionReport abelian_torsion(const AbelianChainComplex& c, const AbelianOptions& options = {});

}  // namespace l2t
