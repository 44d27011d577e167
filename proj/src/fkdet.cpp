#include "l2t/fkdet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "l2t/errors.hpp"

namespace l2t {

std::string_view to_string(DetMethod m) {
  switch (m) {
    case DetMethod::spectral: return "spectral";
    case DetMethod::path: return "path";
    case DetMethod::polar: return "polar";
  }
  return "spectral";
}

DetMethod parse_det_method(std::string_view s) {
  if (s == "spectral") return DetMethod::spectral;
  if (s == "path") return DetMethod::path;
  if (s == "polar") return DetMethod::polar;
  fail(ErrorKind::ValidationError, "unknown determinant method '" + std::string(s) + "'");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "Pass";
    case Verdict::divergent: return "Divergent";
    case Verdict::indeterminate: return "Indeterminate";
  }
  return "Pass";
}

double SpectralDensity::cdf(double lambda) const {
  if (!atoms.empty() || sampled_cdf.empty()) {
    double acc = 0.0;
    for (const auto& a : atoms)
      if (a.lambda <= lambda) acc += a.weight;
    return acc;
  }
  auto it = std::upper_bound(sampled_cdf.begin(), sampled_cdf.end(), lambda,
                             [](double x, const std::pair<double, double>& p) { return x < p.first; });
  if (it == sampled_cdf.begin()) return 0.0;
  return std::prev(it)->second;
}

SpectralDensity spectral_density(const HilbertianModule& m, const BlockOp& t, const BlockOp& gram,
                                 const FkOptions& options) {
  check_morphism_shape(m, m, t);
  check_morphism_shape(m, m, gram);
  std::vector<SpectralAtom> raw;
  double norm = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k].size() == 0) continue;
    // T is G-self-adjoint iff G^{1/2} T G^{-1/2} is Hermitian.
    Matrix h = linalg::positive_sqrt(gram[k]);
    Matrix hinv = linalg::positive_inverse_sqrt(gram[k]);
    Matrix s = h * t[k] * hinv;
    double scale = std::max(linalg::max_abs(s), 1e-300);
    require(linalg::max_abs(s - s.adjoint()) <= options.symmetry_tol * scale, ErrorKind::NotSelfAdjoint,
            "operator is not self-adjoint with respect to the gram (block " + std::to_string(k) + ")");
    auto e = linalg::hermitian_eigen(s);
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
      raw.push_back({e.values(i), m.algebra().weight(k)});
      norm = std::max(norm, std::abs(e.values(i)));
    }
  }
  SpectralDensity out;
  out.total_mass = von_neumann_dimension(m);
  std::sort(raw.begin(), raw.end(), [](const SpectralAtom& a, const SpectralAtom& b) { return a.lambda < b.lambda; });
  for (const auto& a : raw) {
    require(a.lambda >= -options.symmetry_tol * norm, ErrorKind::NegativeSpectrum,
            "eigenvalue " + std::to_string(a.lambda) + " is negative");
    double lambda = std::max(a.lambda, 0.0);
    if (!out.atoms.empty() && std::abs(out.atoms.back().lambda - lambda) <= 1e-12 * std::max(norm, 1e-300))
      out.atoms.back().weight += a.weight;
    else
      out.atoms.push_back({lambda, a.weight});
  }
  return out;
}

DeterminantResult fk_det_spectral(const HilbertianModule& m, const BlockOp& t, const BlockOp& gram,
                                  const FkOptions& options) {
  auto density = spectral_density(m, t, gram, options);
  DeterminantResult r;
  r.method = DetMethod::spectral;
  double norm = density.atoms.empty() ? 0.0 : density.atoms.back().lambda;
  double acc = 0.0;
  for (const auto& a : density.atoms) {
    require(a.lambda > options.kernel_tol * norm, ErrorKind::KernelDetected,
            "spectrum has an atom at " + std::to_string(a.lambda) + " of weight " + std::to_string(a.weight) +
                " (kernel threshold " + std::to_string(options.kernel_tol * norm) + ")");
    acc += a.weight * std::log(a.lambda);
  }
  r.log_value = acc;
  r.value = std::exp(acc);
  r.convergence.note = "finite spectrum";
  return r;
}

DeterminantResult fk_det_spectral(const HilbertianModule& m, const BlockOp& t, const FkOptions& options) {
  return fk_det_spectral(m, t, m.reference_gram(), options);
}

namespace detail {

double re_trace_log1p(const Matrix& y) {
  if (y.size() == 0) return 0.0;
  double norm = linalg::spectral_norm(y);
  require(norm < 1.0, ErrorKind::ValidationError, "logarithm series outside its disc of convergence");
  double acc = 0.0;
  Matrix power = y;
  double bound = norm;
  for (int n = 1; n < 400; ++n) {
    double sign = n % 2 == 1 ? 1.0 : -1.0;
    acc += sign * power.trace().real() / n;
    bound *= norm;
    if (bound * static_cast<double>(y.rows()) < 1e-18) break;
    power = power * y;
  }
  return acc;
}

}  // namespace detail

namespace {

double max_condition(const BlockOp& a) {
  double c = 1.0;
  for (const auto& b : a.blocks()) c = std::max(c, linalg::condition_number(b));
  return c;
}

double min_singular_value(const BlockOp& a) {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& b : a.blocks()) {
    if (b.size() == 0) continue;
    Eigen::JacobiSVD<Matrix> svd(b);
    s = std::min(s, svd.singularValues()(svd.singularValues().size() - 1));
  }
  return s;
}

constexpr int kMaxPathSteps = 1 << 20;

}  // namespace

double fk_log_det_along(const HilbertianModule& m, const OperatorPath& path, double t0, double t1,
                        const FkOptions& options, int* steps) {
  const double span = t1 - t0;
  const double min_step = std::ldexp(std::abs(span), -60);
  double t = t0;
  double h = options.initial_step * span;
  BlockOp current = path(t0);
  check_morphism_shape(m, m, current);
  // Invertibility is judged against the size of the endpoints, so that paths
  // of scalars approaching zero are caught as well.
  const double scale = std::max(spectral_norm(current), spectral_norm(path(t1)));
  const double floor = scale / options.max_condition;
  auto invertible = [&](const BlockOp& a) { return min_singular_value(a) > floor; };
  require(invertible(current), ErrorKind::PathLeavesGL, "path starts at a non-invertible operator");
  double acc = 0.0;
  int accepted = 0;
  while (span > 0.0 && t < t1) {
    h = std::min(h, t1 - t);
    BlockOp next = path(t + h);
    bool ok = invertible(next);
    std::vector<Matrix> factors;
    if (ok) {
      for (std::size_t k = 0; k < next.size(); ++k) {
        if (next[k].size() == 0) {
          factors.emplace_back();
          continue;
        }
        Matrix y = current[k].partialPivLu().solve(next[k]) - Matrix::Identity(next[k].rows(), next[k].cols());
        if (linalg::spectral_norm(y) >= options.step_bound) {
          ok = false;
          break;
        }
        factors.push_back(std::move(y));
      }
    }
    if (!ok) {
      h *= 0.5;
      require(h >= min_step, ErrorKind::PathLeavesGL,
              "path meets a non-invertible operator near t = " + std::to_string(t));
      continue;
    }
    for (std::size_t k = 0; k < factors.size(); ++k)
      if (factors[k].size() > 0) acc += m.algebra().weight(k) * detail::re_trace_log1p(factors[k]);
    t = (t1 - t - h <= 0.0) ? t1 : t + h;
    current = std::move(next);
    ++accepted;
    require(accepted < kMaxPathSteps, ErrorKind::PathLeavesGL,
            "path needs more than " + std::to_string(kMaxPathSteps) + " telescoping factors near t = " +
                std::to_string(t));
    h *= 2.0;
  }
  if (steps) *steps = accepted;
  return acc;
}

OperatorPath straight_path(const HilbertianModule& m, const BlockOp& a) {
  BlockOp id = m.identity();
  return [id, a](double t) { return (1.0 - t) * id + Complex(t) * a; };
}

OperatorPath polar_path(const BlockOp& a) {
  std::vector<Matrix> z, p, u;
  std::vector<Eigen::VectorXd> theta;
  for (const auto& b : a.blocks()) {
    if (b.size() == 0) {
      z.emplace_back(b);
      p.emplace_back(b);
      u.emplace_back(b);
      theta.emplace_back();
      continue;
    }
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix unitary = svd.matrixU() * svd.matrixV().adjoint();
    Matrix positive = svd.matrixV() * svd.singularValues().cast<Complex>().asDiagonal() * svd.matrixV().adjoint();
    Eigen::ComplexSchur<Matrix> schur(unitary);
    Eigen::VectorXd angles(b.rows());
    for (Eigen::Index i = 0; i < b.rows(); ++i) angles(i) = std::arg(schur.matrixT()(i, i));
    z.push_back(schur.matrixU());
    p.push_back(std::move(positive));
    u.push_back(std::move(unitary));
    theta.push_back(std::move(angles));
  }
  return [z, p, u, theta](double t) {
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < z.size(); ++k) {
      const Eigen::Index n = p[k].rows();
      if (n == 0) {
        out.emplace_back(p[k]);
        continue;
      }
      if (t <= 1.0) {
        Eigen::VectorXcd phases(n);
        for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::polar(1.0, t * theta[k](i));
        out.push_back(z[k] * phases.asDiagonal() * z[k].adjoint());
      } else {
        Matrix id = Matrix::Identity(n, n);
        out.push_back(u[k] * (id + (t - 1.0) * (p[k] - id)));
      }
    }
    return BlockOp(std::move(out));
  };
}

bool straight_path_singular(const BlockOp& a, double tol) {
  for (const auto& b : a.blocks()) {
    if (b.size() == 0) continue;
    Eigen::ComplexEigenSolver<Matrix> es(b, false);
    double scale = std::max(linalg::spectral_norm(b), 1e-300);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      Complex l = es.eigenvalues()(i);
      if (std::abs(l.imag()) <= tol * scale && l.real() <= tol * scale) return true;
    }
  }
  return false;
}

DeterminantResult fk_det_path(const HilbertianModule& m, const BlockOp& a, DetMethod method,
                              const FkOptions& options) {
  check_morphism_shape(m, m, a);
  double cond = max_condition(a);
  require(cond < options.max_condition, ErrorKind::NonInvertible,
          "operator condition number " + std::to_string(cond) + " exceeds " + std::to_string(options.max_condition));
  DeterminantResult r;
  bool polar = method == DetMethod::polar || straight_path_singular(a);
  r.method = polar ? DetMethod::polar : DetMethod::path;
  if (polar)
    r.log_value = fk_log_det_along(m, polar_path(a), 0.0, 2.0, options, &r.steps);
  else
    r.log_value = fk_log_det_along(m, straight_path(m, a), 0.0, 1.0, options, &r.steps);
  r.value = std::exp(r.log_value);
  r.convergence.note = polar ? "polar path" : "straight path";
  return r;
}

DeterminantResult fk_det(const HilbertianModule& m, const BlockOp& a, const BlockOp& gram, DetMethod method,
                         const FkOptions& options) {
  check_morphism_shape(m, m, a);
  double cond = max_condition(a);
  require(cond < options.max_condition, ErrorKind::NonInvertible,
          "operator condition number " + std::to_string(cond) + " exceeds " + std::to_string(options.max_condition));
  if (method != DetMethod::spectral) return fk_det_path(m, a, method, options);
  BlockOp ata = gram_adjoint(a, gram, gram) * a;
  auto r = fk_det_spectral(m, ata, gram, options);
  r.log_value *= 0.5;
  r.value = std::exp(r.log_value);
  return r;
}

DeterminantResult fk_det(const HilbertianModule& m, const BlockOp& a, DetMethod method, const FkOptions& options) {
  return fk_det(m, a, m.reference_gram(), method, options);
}

}  // namespace l2t
