#include "l2t/abelian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "l2t/errors.hpp"

namespace l2t {

LaurentMatrix LaurentMatrix::zero(int rank, int size) {
  LaurentMatrix out;
  out.rank = rank;
  out.size = size;
  return out;
}

LaurentMatrix LaurentMatrix::identity(int rank, int size) {
  return constant(rank, Matrix::Identity(size, size));
}

LaurentMatrix LaurentMatrix::constant(int rank, const Matrix& c) {
  require(c.rows() == c.cols(), ErrorKind::ShapeMismatch, "Laurent coefficients must be square");
  LaurentMatrix out = zero(rank, static_cast<int>(c.rows()));
  out.coefficients[std::vector<int>(rank, 0)] = c;
  return out;
}

LaurentMatrix LaurentMatrix::monomial(const std::vector<int>& exponent, Complex c) {
  LaurentMatrix out = zero(static_cast<int>(exponent.size()), 1);
  out.coefficients[exponent] = Matrix::Constant(1, 1, c);
  return out;
}

Matrix LaurentMatrix::evaluate(const std::vector<double>& theta) const {
  require(static_cast<int>(theta.size()) == rank, ErrorKind::ShapeMismatch, "torus point of the wrong rank");
  Matrix out = Matrix::Zero(size, size);
  for (const auto& [k, c] : coefficients) {
    double phase = 0.0;
    for (int j = 0; j < rank; ++j) phase += k[j] * theta[j];
    out += std::polar(1.0, 2.0 * std::numbers::pi * phase) * c;
  }
  return out;
}

LaurentMatrix LaurentMatrix::adjoint() const {
  LaurentMatrix out = zero(rank, size);
  for (const auto& [k, c] : coefficients) {
    std::vector<int> neg(k);
    for (int& e : neg) e = -e;
    out.coefficients[neg] = c.adjoint();
  }
  return out;
}

LaurentMatrix LaurentMatrix::pruned(double tol) const {
  LaurentMatrix out = zero(rank, size);
  for (const auto& [k, c] : coefficients)
    if (c.size() > 0 && c.cwiseAbs().maxCoeff() > tol) out.coefficients[k] = c;
  return out;
}

namespace {

void require_same_rank(const LaurentMatrix& a, const LaurentMatrix& b) {
  require(a.rank == b.rank, ErrorKind::ShapeMismatch, "Laurent matrices over tori of different rank");
}

}  // namespace

LaurentMatrix operator+(const LaurentMatrix& a, const LaurentMatrix& b) {
  require_same_rank(a, b);
  require(a.size == b.size, ErrorKind::ShapeMismatch, "sum of Laurent matrices of different size");
  LaurentMatrix out = a;
  for (const auto& [k, c] : b.coefficients) {
    auto [it, fresh] = out.coefficients.try_emplace(k, c);
    if (!fresh) it->second += c;
  }
  return out.pruned();
}

LaurentMatrix operator-(const LaurentMatrix& a, const LaurentMatrix& b) { return a + Complex(-1.0) * b; }

LaurentMatrix operator*(Complex s, const LaurentMatrix& a) {
  LaurentMatrix out = a;
  for (auto& [k, c] : out.coefficients) c *= s;
  return out.pruned();
}

LaurentMatrix operator*(const LaurentMatrix& a, const LaurentMatrix& b) {
  require_same_rank(a, b);
  require(a.size == b.size, ErrorKind::ShapeMismatch, "product of Laurent matrices of different size");
  LaurentMatrix out = LaurentMatrix::zero(a.rank, a.size);
  for (const auto& [ka, ca] : a.coefficients)
    for (const auto& [kb, cb] : b.coefficients) {
      std::vector<int> k(ka);
      for (int j = 0; j < a.rank; ++j) k[j] += kb[j];
      auto [it, fresh] = out.coefficients.try_emplace(k, ca * cb);
      if (!fresh) it->second += ca * cb;
    }
  return out.pruned();
}

LaurentMatrix block(const std::vector<std::vector<LaurentMatrix>>& blocks) {
  require(!blocks.empty() && !blocks[0].empty(), ErrorKind::ShapeMismatch, "empty block matrix");
  int rank = blocks[0][0].rank;
  std::vector<int> heights, widths;
  for (const auto& row : blocks) {
    require(row.size() == blocks[0].size(), ErrorKind::ShapeMismatch, "ragged block matrix");
    heights.push_back(row[0].size);
  }
  for (const auto& b : blocks[0]) widths.push_back(b.size);
  int total = 0;
  for (int h : heights) total += h;
  int total_w = 0;
  for (int w : widths) total_w += w;
  require(total == total_w, ErrorKind::ShapeMismatch, "block matrix is not square");
  LaurentMatrix out = LaurentMatrix::zero(rank, total);
  int r0 = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    int c0 = 0;
    for (std::size_t j = 0; j < blocks[i].size(); ++j) {
      const auto& b = blocks[i][j];
      require(b.rank == rank, ErrorKind::ShapeMismatch, "block matrix mixes torus ranks");
      require(b.size == heights[i] && b.size == widths[j], ErrorKind::ShapeMismatch, "block sizes do not line up");
      for (const auto& [k, c] : b.coefficients) {
        auto [it, fresh] = out.coefficients.try_emplace(k, Matrix::Zero(total, total));
        it->second.block(r0, c0, c.rows(), c.cols()) += c;
      }
      c0 += widths[j];
    }
    r0 += heights[i];
  }
  return out.pruned();
}

TorusGrid TorusGrid::default_for(int rank) {
  require(rank == 1 || rank == 2, ErrorKind::BackendUnsupported,
          "torus quadrature supports rank 1 and 2, got " + std::to_string(rank));
  return {rank, rank == 1 ? 1 << 12 : 1 << 6};
}

std::size_t TorusGrid::size() const {
  std::size_t n = 1;
  for (int j = 0; j < rank; ++j) n *= static_cast<std::size_t>(resolution);
  return n;
}

std::vector<double> TorusGrid::point(std::size_t index) const {
  std::vector<double> theta(rank);
  for (int j = rank - 1; j >= 0; --j) {
    theta[j] = static_cast<double>(index % resolution) / resolution;
    index /= resolution;
  }
  return theta;
}

bool TorusGrid::contains(const TorusGrid& coarser) const {
  return rank == coarser.rank && coarser.resolution > 0 && resolution % coarser.resolution == 0;
}

Complex laurent_trace(const LaurentMatrix& f) {
  auto it = f.coefficients.find(std::vector<int>(f.rank, 0));
  return it == f.coefficients.end() ? Complex(0.0) : it->second.trace();
}

Complex laurent_trace_quadrature(const LaurentMatrix& f, const TorusGrid& grid) {
  require(grid.rank == f.rank, ErrorKind::ShapeMismatch, "grid rank differs from the symbol's");
  Complex acc = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) acc += f.evaluate(grid.point(p)).trace();
  return acc / static_cast<double>(grid.size());
}

namespace {

TorusGrid base_grid(int rank, const AbelianOptions& options) {
  TorusGrid g = TorusGrid::default_for(rank);
  if (options.resolution > 0) g.resolution = options.resolution;
  return g;
}

// Eigenvalues of F(theta) at every point of the grid, ascending per point,
// stored point after point.
std::vector<double> sample_eigenvalues(const LaurentMatrix& f, const TorusGrid& grid, const AbelianOptions& options) {
  require(grid.rank == f.rank, ErrorKind::ShapeMismatch, "grid rank differs from the symbol's");
  std::vector<double> out;
  out.reserve(grid.size() * f.size);
  double largest = 0.0, smallest = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    Matrix m = f.evaluate(grid.point(p));
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > options.hermitian_tol * scale)
      fail(ErrorKind::NotHermitianSymbol, "symbol is not Hermitian at theta index " + std::to_string(p));
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (m + m.adjoint())), Eigen::EigenvaluesOnly);
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) out.push_back(es.eigenvalues()(j));
    if (f.size > 0) {
      largest = std::max(largest, es.eigenvalues()(f.size - 1));
      smallest = std::min(smallest, es.eigenvalues()(0));
    }
  }
  if (smallest < -options.hermitian_tol * std::max(1.0, largest))
    fail(ErrorKind::NegativeSpectrum, "symbol has eigenvalue " + std::to_string(smallest) + " on the grid");
  return out;
}

// Points of the grid with resolution fine/stride, as indices into the fine grid.
template <class F>
void for_each_coarse(const TorusGrid& fine, int stride, F&& visit) {
  if (fine.rank == 1) {
    for (int i = 0; i < fine.resolution; i += stride) visit(static_cast<std::size_t>(i));
  } else {
    for (int i = 0; i < fine.resolution; i += stride)
      for (int j = 0; j < fine.resolution; j += stride)
        visit(static_cast<std::size_t>(i) * fine.resolution + j);
  }
}

ConvergenceStudy log_det_study(const LaurentMatrix& f, const AbelianOptions& options, int discard) {
  require(options.excision.size() == 3, ErrorKind::ValidationError, "three excision levels are required");
  TorusGrid base = base_grid(f.rank, options);
  TorusGrid fine = base.refined().refined();
  std::vector<double> eig = sample_eigenvalues(f, fine, options);
  const int m = f.size;
  double largest = eig.empty() ? 0.0 : *std::max_element(eig.begin(), eig.end());
  double scale = largest > 0.0 ? largest : 1.0;

  // Excised integral at an absolute cut, extrapolated over N, 2N, 4N
  // (trapezoid error ~ h^2 on the kinked integrand), with its grid error.
  auto excised = [&](double cut) {
    double by_stride[3];
    for (int s = 0; s < 3; ++s) {
      int stride = 1 << (2 - s);
      double acc = 0.0;
      std::size_t count = 0;
      for_each_coarse(fine, stride, [&](std::size_t p) {
        for (int j = discard; j < m; ++j) acc += std::log(std::max(eig[p * m + j], cut));
        ++count;
      });
      by_stride[s] = acc / static_cast<double>(count);
    }
    return std::pair{by_stride[2] + (by_stride[2] - by_stride[1]) / 3.0, std::abs(by_stride[2] - by_stride[1])};
  };

  ConvergenceStudy study;
  study.resolution = base.resolution;
  auto record = [&](double level) {
    auto [value, error] = excised(level * scale);
    study.excision.push_back(level);
    study.thresholds.push_back(level * scale);
    study.integrals.push_back(value);
    study.grid_errors.push_back(error);
  };
  for (double level : options.excision) record(level);

  const auto v = study.integrals;
  double grid_error = *std::max_element(study.grid_errors.begin(), study.grid_errors.end());
  double d1 = v[0] - v[1], d2 = v[1] - v[2];
  double decade = options.divergence_slope * std::log(10.0);
  Convergence& c = study.convergence;
  if (d1 >= decade && d2 >= decade) {
    c.verdict = Verdict::divergent;
    c.error_estimate = std::numeric_limits<double>::infinity();
    c.note = "excised integral drops by " + std::to_string(d2 / std::log(10.0)) + " ln 10 per decade";
    study.log_value = v[2];
    return study;
  }
  bool geometric = d2 > 0.0 && d1 >= options.min_ratio * d2;
  if (std::abs(d2) < options.pass_tol || geometric) {
    c.verdict = Verdict::pass;
    c.note = geometric && std::abs(d2) >= options.pass_tol
                 ? "excised integrals decrease geometrically (ratio " + std::to_string(d1 / d2) + "); extrapolated"
                 : "excised integrals agree";
    // The verdict rests on the three levels above. For the value, keep going
    // down by decades until the integrals settle or the grid no longer
    // resolves the excision window.
    double level = options.excision.back();
    for (int extra = 0; extra < 10; ++extra) {
      level /= 10.0;
      auto [value, error] = excised(level * scale);
      double d = study.integrals.back() - value;
      if (d > 1e-13 && error > 0.1 * d) break;
      study.excision.push_back(level);
      study.thresholds.push_back(level * scale);
      study.integrals.push_back(value);
      study.grid_errors.push_back(error);
      if (d <= 1e-13) break;
    }
    const auto& w = study.integrals;
    std::size_t n = w.size();
    double e1 = w[n - 3] - w[n - 2], e2 = w[n - 2] - w[n - 1];
    double tail = 0.0, residual = std::abs(e2);
    if (e2 > 1e-13 && e1 >= options.min_ratio * e2) {
      tail = e2 / (e1 / e2 - 1.0);
      residual = tail;
    }
    study.log_value = w[n - 1] - tail;
    c.error_estimate = residual + grid_error;
    return study;
  }
  c.verdict = Verdict::indeterminate;
  c.error_estimate = std::abs(d2);
  c.note = "excised integrals differ by " + std::to_string(d1) + ", " + std::to_string(d2) +
           " without a clear rate";
  study.log_value = v[2];
  return study;
}

DeterminantResult from_study(const ConvergenceStudy& s, double power) {
  if (s.convergence.verdict == Verdict::divergent) fail(ErrorKind::DivergentIntegral, s.convergence.note);
  if (s.convergence.verdict == Verdict::indeterminate) fail(ErrorKind::IndeterminateConvergence, s.convergence.note);
  DeterminantResult r;
  r.log_value = power * s.log_value;
  r.value = std::exp(r.log_value);
  r.method = DetMethod::spectral;
  r.convergence = s.convergence;
  r.convergence.error_estimate *= power;
  return r;
}

// Fixed points away from every rational grid.
std::vector<std::vector<double>> generic_points(int rank) {
  std::vector<std::vector<double>> out;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0), silver = std::sqrt(2.0) - 1.0;
  for (int k = 1; k <= 7; ++k) {
    std::vector<double> p{std::fmod(k * golden, 1.0)};
    if (rank == 2) p.push_back(std::fmod(k * silver + 0.1234, 1.0));
    out.push_back(p);
  }
  return out;
}

int generic_nullity(const LaurentMatrix& lap, const AbelianOptions& options) {
  if (lap.size == 0) return 0;
  auto points = generic_points(lap.rank);
  std::vector<RealVector> spectra;
  double largest = 0.0;
  for (const auto& p : points) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(lap.evaluate(p), Eigen::EigenvaluesOnly);
    spectra.push_back(es.eigenvalues());
    largest = std::max(largest, es.eigenvalues().maxCoeff());
  }
  double cut = options.kernel_tol * std::max(largest, 1e-300);
  int nullity = -1;
  for (const auto& s : spectra) {
    int k = static_cast<int>((s.array() <= cut).count());
    if (nullity >= 0 && k != nullity)
      fail(ErrorKind::IllConditionedKernel, "pointwise kernel rank of the Laplacian symbol is not constant (" +
                                                std::to_string(nullity) + " vs " + std::to_string(k) + ")");
    nullity = k;
  }
  return nullity;
}

}  // namespace

AbelianSpectralDensity abelian_spectral_density(const LaurentMatrix& f, const AbelianOptions& options,
                                                int cdf_points) {
  TorusGrid grid = base_grid(f.rank, options);
  std::vector<double> coarse = sample_eigenvalues(f, grid, options);
  std::vector<double> fine = sample_eigenvalues(f, grid.refined(), options);
  std::sort(coarse.begin(), coarse.end());
  std::sort(fine.begin(), fine.end());
  double wc = 1.0 / static_cast<double>(grid.size()), wf = wc / std::pow(2.0, f.rank);
  auto phi = [](const std::vector<double>& sorted, double w, double lambda) {
    return w * static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), lambda) - sorted.begin());
  };

  AbelianSpectralDensity out;
  out.resolution = grid.resolution;
  out.density.total_mass = f.size;
  if (coarse.empty()) return out;
  int n = std::max(2, cdf_points);
  for (int q = 0; q < n; ++q) {
    double lambda = coarse[static_cast<std::size_t>(q) * (coarse.size() - 1) / (n - 1)];
    if (!out.density.sampled_cdf.empty() && lambda <= out.density.sampled_cdf.back().first) continue;
    double value = phi(coarse, wc, lambda);
    out.density.sampled_cdf.emplace_back(lambda, value);
    out.refinement_change = std::max(out.refinement_change, std::abs(value - phi(fine, wf, lambda)));
  }
  return out;
}

ConvergenceStudy abelian_log_det_study(const LaurentMatrix& f, const AbelianOptions& options) {
  return log_det_study(f, options, 0);
}

DeterminantResult abelian_fk_det(const LaurentMatrix& f, const AbelianOptions& options) {
  return from_study(log_det_study(f, options, 0), 1.0);
}

DeterminantResult abelian_fk_det_operator(const LaurentMatrix& a, const AbelianOptions& options) {
  return from_study(log_det_study(a.adjoint() * a, options, 0), 0.5);
}

namespace {

// The map leaving degree i and the one arriving, or zero matrices at the ends
// (as maps of the right shape only through `size`).
struct Neighbours {
  const LaurentMatrix* out = nullptr;
  const LaurentMatrix* in = nullptr;
};

Neighbours neighbours(const AbelianChainComplex& c, int i) {
  Neighbours n;
  if (c.convention == Convention::chain) {
    if (i >= 1) n.out = &c.maps[i - 1];
    if (i < c.top_degree()) n.in = &c.maps[i];
  } else {
    if (i < c.top_degree()) n.out = &c.maps[i];
    if (i >= 1) n.in = &c.maps[i - 1];
  }
  return n;
}

}  // namespace

void AbelianChainComplex::validate() const {
  TorusGrid::default_for(rank);
  require(maps.size() + 1 == sizes.size(), ErrorKind::ShapeMismatch, "need one map between neighbouring degrees");
  for (std::size_t j = 0; j < maps.size(); ++j) {
    const auto& f = maps[j];
    int rows = convention == Convention::chain ? sizes[j] : sizes[j + 1];
    int cols = convention == Convention::chain ? sizes[j + 1] : sizes[j];
    require(f.rank == rank, ErrorKind::ShapeMismatch, "map " + std::to_string(j) + " lives on another torus");
    for (const auto& [k, c] : f.coefficients)
      require(c.rows() == rows && c.cols() == cols, ErrorKind::ShapeMismatch,
              "map " + std::to_string(j) + " has coefficients of the wrong shape");
  }
  // d^2 = 0, with maps of any shape: multiply coefficientwise.
  for (std::size_t j = 0; j + 1 < maps.size(); ++j) {
    const auto& first = convention == Convention::chain ? maps[j + 1] : maps[j];
    const auto& second = convention == Convention::chain ? maps[j] : maps[j + 1];
    std::map<std::vector<int>, Matrix> acc;
    for (const auto& [ka, ca] : second.coefficients)
      for (const auto& [kb, cb] : first.coefficients) {
        std::vector<int> k(ka);
        for (int r = 0; r < rank; ++r) k[r] += kb[r];
        auto [it, fresh] = acc.try_emplace(k, ca * cb);
        if (!fresh) it->second += ca * cb;
      }
    for (const auto& [k, c] : acc)
      require(c.size() == 0 || c.cwiseAbs().maxCoeff() <= 1e-10, ErrorKind::ValidationError,
              "d^2 != 0 between degrees " + std::to_string(j) + " and " + std::to_string(j + 2));
  }
}

LaurentMatrix AbelianChainComplex::laplacian(int i) const {
  require(i >= 0 && i <= top_degree(), ErrorKind::ShapeMismatch, "degree out of range");
  LaurentMatrix out = LaurentMatrix::zero(rank, sizes[i]);
  // Rectangular products written out, since LaurentMatrix products are square.
  auto gram = [&](const LaurentMatrix& f, bool adjoint_first) {
    LaurentMatrix g = LaurentMatrix::zero(rank, sizes[i]);
    LaurentMatrix fa = f.adjoint();
    const LaurentMatrix& a = adjoint_first ? fa : f;
    const LaurentMatrix& b = adjoint_first ? f : fa;
    for (const auto& [ka, ca] : a.coefficients)
      for (const auto& [kb, cb] : b.coefficients) {
        std::vector<int> k(ka);
        for (int r = 0; r < rank; ++r) k[r] += kb[r];
        auto [it, fresh] = g.coefficients.try_emplace(k, ca * cb);
        if (!fresh) it->second += ca * cb;
      }
    return g.pruned();
  };
  Neighbours n = neighbours(*this, i);
  if (n.out) out = out + gram(*n.out, true);
  if (n.in) out = out + gram(*n.in, false);
  return out.pruned(1e-14);
}

std::vector<double> abelian_betti(const AbelianChainComplex& c, const AbelianOptions& options) {
  c.validate();
  std::vector<double> out;
  for (int i = 0; i <= c.top_degree(); ++i) out.push_back(generic_nullity(c.laplacian(i), options));
  return out;
}

std::vector<ClassVerdict> abelian_class_check(const AbelianChainComplex& c, const AbelianOptions& options) {
  c.validate();
  std::vector<ClassVerdict> out;
  for (int i = 0; i <= c.top_degree(); ++i) {
    LaurentMatrix lap = c.laplacian(i);
    int nullity = generic_nullity(lap, options);
    ClassVerdict v;
    v.degree = i;
    if (nullity == lap.size) {
      v.note = "Laplacian vanishes identically";
    } else {
      auto study = log_det_study(lap, options, nullity);
      v.verdict = study.convergence.verdict;
      v.margin = study.convergence.error_estimate;
      v.note = study.convergence.note;
    }
    out.push_back(std::move(v));
  }
  return out;
}

AbelianTorsionReport abelian_torsion(const AbelianChainComplex& c, const AbelianOptions& options) {
  c.validate();
  AbelianTorsionReport report;
  report.rank = c.rank;
  report.convention = c.convention;
  report.resolution = base_grid(c.rank, options).resolution;
  for (int i = 0; i <= c.top_degree(); ++i) {
    LaurentMatrix lap = c.laplacian(i);
    int nullity = generic_nullity(lap, options);
    require(nullity == 0, ErrorKind::BackendUnsupported,
            "degree " + std::to_string(i) + " has L2 Betti number " + std::to_string(nullity) +
                "; the abelian backend computes torsion of L2-acyclic complexes only");
    AbelianDegree d{i, 0.0, log_det_study(lap, options, 0)};
    require(d.log_det.convergence.verdict == Verdict::pass, ErrorKind::NotDeterminantClass,
            "degree " + std::to_string(i) + ": " + d.log_det.convergence.note);
    double sign = i % 2 == 0 ? 1.0 : -1.0;
    if (c.convention == Convention::cochain) sign = -sign;
    report.log_coordinate += sign * i / 2.0 * d.log_det.log_value;
    report.degrees.push_back(std::move(d));
  }
  report.coordinate = std::exp(report.log_coordinate);
  return report;
}

}  // namespace l2t
