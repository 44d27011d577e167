#include "l2t/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "l2t/errors.hpp"

namespace l2t {

std::string_view to_string(Convention c) { return c == Convention::chain ? "chain" : "cochain"; }

Convention parse_convention(std::string_view s) {
  if (s == "chain") return Convention::chain;
  if (s == "cochain") return Convention::cochain;
  fail(ErrorKind::ValidationError, "unknown convention '" + std::string(s) + "'");
}

namespace {

std::vector<int> mult_vector(const HilbertianModule& m) {
  return {m.multiplicities().begin(), m.multiplicities().end()};
}

}  // namespace

HilbertianChainComplex::HilbertianChainComplex(std::vector<HilbertianModule> modules, std::vector<BlockOp> maps,
                                               Convention convention)
    : modules_(std::move(modules)), maps_(std::move(maps)), convention_(convention) {
  require(!modules_.empty(), ErrorKind::ValidationError, "a complex needs at least one module");
  require(maps_.size() + 1 == modules_.size(), ErrorKind::ShapeMismatch,
          "expected " + std::to_string(modules_.size() - 1) + " differentials, got " + std::to_string(maps_.size()));
  for (const auto& m : modules_)
    require(m.compatible(modules_.front()), ErrorKind::AlgebraMismatch, "modules over different algebras");
  for (std::size_t j = 0; j < maps_.size(); ++j) {
    const auto& lo = modules_[j];
    const auto& hi = modules_[j + 1];
    try {
      if (convention_ == Convention::chain)
        check_morphism_shape(hi, lo, maps_[j]);
      else
        check_morphism_shape(lo, hi, maps_[j]);
    } catch (const Error& err) {
      fail(ErrorKind::ShapeMismatch, "differential " + std::to_string(j) + ": " + err.what());
    }
  }
}

std::optional<int> HilbertianChainComplex::out_target(int i) const {
  int t = convention_ == Convention::chain ? i - 1 : i + 1;
  if (t < 0 || t > top_degree()) return std::nullopt;
  return t;
}

BlockOp HilbertianChainComplex::out_map(int i) const {
  auto t = out_target(i);
  if (!t) return BlockOp::zero(std::vector<int>(module(i).multiplicities().size(), 0), module(i).multiplicities());
  return maps_[std::min(i, *t)];
}

std::optional<int> HilbertianChainComplex::in_source(int i) const {
  int s = convention_ == Convention::chain ? i + 1 : i - 1;
  if (s < 0 || s > top_degree()) return std::nullopt;
  return s;
}

BlockOp HilbertianChainComplex::in_map(int i) const {
  auto s = in_source(i);
  if (!s) return BlockOp::zero(module(i).multiplicities(), std::vector<int>(module(i).multiplicities().size(), 0));
  return maps_[std::min(i, *s)];
}

HilbertianChainComplex HilbertianChainComplex::with_grams(const std::vector<BlockOp>& grams) const {
  require(grams.size() == modules_.size(), ErrorKind::ShapeMismatch, "one gram per degree expected");
  std::vector<HilbertianModule> mods;
  for (std::size_t i = 0; i < grams.size(); ++i) mods.push_back(modules_[i].with_reference(grams[i]));
  return HilbertianChainComplex(std::move(mods), maps_, convention_);
}

HilbertianChainComplex direct_sum(const HilbertianChainComplex& a, const HilbertianChainComplex& b) {
  require(a.top_degree() == b.top_degree(), ErrorKind::ValidationError, "complexes of different length");
  require(a.convention() == b.convention(), ErrorKind::ValidationError, "complexes with different conventions");
  std::vector<HilbertianModule> mods;
  for (int i = 0; i <= a.top_degree(); ++i) mods.push_back(direct_sum(a.module(i), b.module(i)));
  std::vector<BlockOp> maps;
  for (int j = 0; j < a.top_degree(); ++j) {
    int src = a.convention() == Convention::chain ? j + 1 : j;
    int dst = a.convention() == Convention::chain ? j : j + 1;
    std::vector<std::vector<int>> rows{mult_vector(a.module(dst)), mult_vector(b.module(dst))};
    std::vector<std::vector<int>> cols{mult_vector(a.module(src)), mult_vector(b.module(src))};
    maps.push_back(block_matrix({{a.map(j), {}}, {{}, b.map(j)}}, rows, cols));
  }
  return HilbertianChainComplex(std::move(mods), std::move(maps), a.convention());
}

ComplexReport validate_complex(const HilbertianChainComplex& c, double tol) {
  ComplexReport report;
  for (int j = 0; j + 1 < c.top_degree(); ++j) {
    // Composite of consecutive differentials in the direction of the complex.
    BlockOp comp = c.convention() == Convention::chain ? c.map(j) * c.map(j + 1) : c.map(j + 1) * c.map(j);
    // Relative to the larger differential, so a numerically zero factor does
    // not inflate the ratio.
    double norm = std::max(spectral_norm(c.map(j)), spectral_norm(c.map(j + 1)));
    double residual = norm > 0.0 ? spectral_norm(comp) / (norm * norm) : 0.0;
    report.max_square_residual = std::max(report.max_square_residual, residual);
    if (residual > tol) {
      report.valid = false;
      report.problems.push_back("d^2 != 0 between degrees " + std::to_string(j) + " and " + std::to_string(j + 2) +
                                " (residual " + std::to_string(residual) + ")");
    }
  }
  for (int i = 0; i <= c.top_degree(); ++i) {
    bool ok = check_admissible(c.module(i), c.module(i).reference_gram()).admissible();
    report.gram_admissible.push_back(ok);
    if (!ok) {
      report.valid = false;
      report.problems.push_back("gram in degree " + std::to_string(i) + " is not admissible");
    }
  }
  return report;
}

namespace {

void require_valid(const HilbertianChainComplex& c) {
  auto report = validate_complex(c);
  if (!report.valid) fail(ErrorKind::ValidationError, "invalid complex: " + report.problems.front());
}

std::vector<SpectralAtom> merge_atoms(std::vector<SpectralAtom> atoms) {
  std::sort(atoms.begin(), atoms.end(), [](auto& a, auto& b) { return a.lambda < b.lambda; });
  std::vector<SpectralAtom> out;
  for (const auto& a : atoms) {
    if (!out.empty() && std::abs(a.lambda - out.back().lambda) <= 1e-12 * std::max(1.0, a.lambda))
      out.back().weight += a.weight;
    else
      out.push_back(a);
  }
  return out;
}

// Basis of the subspace spanned by the columns of q, orthonormal for the
// product g.
Matrix gram_orthonormalize(const Matrix& q, const Matrix& g) {
  if (q.cols() == 0) return q;
  Matrix inner = q.adjoint() * g * q;
  return q * linalg::positive_inverse_sqrt(inner);
}

}  // namespace

HodgeData hodge(const HilbertianChainComplex& c, const HodgeOptions& options) {
  require_valid(c);
  const Algebra& alg = c.algebra();
  HodgeData data;
  for (int i = 0; i <= c.top_degree(); ++i) {
    const HilbertianModule& m = c.module(i);
    const BlockOp& g = m.reference_gram();
    BlockOp lap = m.zero();
    if (auto t = c.out_target(i)) {
      BlockOp d = c.out_map(i);
      lap = lap + gram_adjoint(d, g, c.module(*t).reference_gram()) * d;
    }
    if (auto s = c.in_source(i)) {
      BlockOp e = c.in_map(i);
      lap = lap + e * gram_adjoint(e, c.module(*s).reference_gram(), g);
    }

    // Delta is self-adjoint for g, so G^{1/2} Delta G^{-1/2} is Hermitian.
    std::vector<linalg::HermitianEigen> eig;
    std::vector<Matrix> inv_sqrt;
    double norm = 0.0;
    for (std::size_t k = 0; k < lap.size(); ++k) {
      Matrix s = linalg::positive_sqrt(g[k]);
      Matrix si = linalg::positive_inverse_sqrt(g[k]);
      eig.push_back(linalg::hermitian_eigen(Matrix(s * lap[k] * si)));
      inv_sqrt.push_back(si);
      if (eig.back().values.size() > 0) norm = std::max(norm, eig.back().values.cwiseAbs().maxCoeff());
    }
    double threshold = options.kernel_tol * norm;
    double largest_zero = 0.0, smallest_positive = std::numeric_limits<double>::infinity();
    for (const auto& e : eig)
      for (Eigen::Index j = 0; j < e.values.size(); ++j) {
        double v = e.values(j);
        if (std::abs(v) <= threshold)
          largest_zero = std::max(largest_zero, std::abs(v));
        else
          smallest_positive = std::min(smallest_positive, v);
      }
    require(smallest_positive > 0.0, ErrorKind::ValidationError,
            "Laplacian in degree " + std::to_string(i) + " has negative spectrum");
    if (std::isfinite(smallest_positive) && largest_zero > 0.0)
      require(smallest_positive >= options.min_gap_ratio * largest_zero, ErrorKind::IllConditionedKernel,
              "degree " + std::to_string(i) + ": harmonic eigenvalue " + std::to_string(largest_zero) +
                  " too close to positive eigenvalue " + std::to_string(smallest_positive));

    std::vector<Matrix> basis, proj;
    std::vector<int> harmonic_mult;
    std::vector<SpectralAtom> atoms;
    double betti = 0.0;
    for (std::size_t k = 0; k < eig.size(); ++k) {
      const auto& e = eig[k];
      std::vector<Eigen::Index> zero_cols;
      for (Eigen::Index j = 0; j < e.values.size(); ++j) {
        if (std::abs(e.values(j)) <= threshold)
          zero_cols.push_back(j);
        else
          atoms.push_back({e.values(j), alg.weight(k)});
      }
      Matrix v(e.vectors.rows(), static_cast<Eigen::Index>(zero_cols.size()));
      for (std::size_t j = 0; j < zero_cols.size(); ++j) v.col(j) = e.vectors.col(zero_cols[j]);
      Matrix b = inv_sqrt[k] * v;
      proj.push_back(b * b.adjoint() * g[k]);
      basis.push_back(std::move(b));
      harmonic_mult.push_back(static_cast<int>(zero_cols.size()));
      betti += alg.weight(k) * static_cast<double>(zero_cols.size());
    }
    HodgeDegree hd{i, lap, BlockOp(std::move(proj)), BlockOp(std::move(basis)),
                   HilbertianModule(m.algebra_ptr(), harmonic_mult), {}};
    hd.betti = betti;
    hd.positive.atoms = merge_atoms(std::move(atoms));
    for (const auto& a : hd.positive.atoms) {
      hd.positive.total_mass += a.weight;
      hd.log_det_positive += a.weight * std::log(a.lambda);
    }
    hd.gap_margin = std::isfinite(smallest_positive) ? smallest_positive / norm : 1.0;
    data.degrees.push_back(std::move(hd));
  }
  return data;
}

std::vector<ClassVerdict> determinant_class_check(const HilbertianChainComplex& c, const HodgeOptions& options) {
  HodgeData h = hodge(c, options);
  std::vector<ClassVerdict> out;
  for (const auto& d : h.degrees) {
    ClassVerdict v;
    v.degree = d.degree;
    v.margin = d.gap_margin;
    v.note = d.positive.atoms.empty() ? "no positive spectrum"
                                      : "finite spectrum; smallest positive eigenvalue " +
                                            std::to_string(d.positive.atoms.front().lambda);
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

void require_determinant_class(const HilbertianChainComplex& c, const HodgeOptions& options) {
  for (const auto& v : determinant_class_check(c, options))
    require(v.verdict == Verdict::pass, ErrorKind::NotDeterminantClass,
            "degree " + std::to_string(v.degree) + ": " + v.note);
}

GradedDetLineElement harmonic_element(const HodgeData& h, double log_coordinate) {
  GradedDetLineElement out;
  for (const auto& d : h.degrees) out.entries.push_back({d.degree, d.harmonic, 1.0});
  out.scalar = std::exp(log_coordinate);
  return out;
}

// Basis of the closure of im(f) inside the target, orthonormal for `gram`.
// `scale` is the size of the largest differential of the complex, so that a
// differential that is numerically zero throughout has rank 0.
BlockOp image_basis(const BlockOp& f, const BlockOp& gram, double scale) {
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < f.size(); ++k)
    out.push_back(gram_orthonormalize(linalg::range_basis(f[k], 1e-10, scale), gram[k]));
  return BlockOp(std::move(out));
}

BlockOp kernel_basis(const BlockOp& f, const BlockOp& gram, double scale) {
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < f.size(); ++k) {
    Matrix n = f[k].rows() == 0 ? Matrix(Matrix::Identity(f[k].cols(), f[k].cols()))
                                : linalg::null_space(f[k], 1e-10, scale);
    out.push_back(gram_orthonormalize(n, gram[k]));
  }
  return BlockOp(std::move(out));
}

HilbertianModule span_module(const HilbertianModule& ambient, const BlockOp& basis) {
  return HilbertianModule(ambient.algebra_ptr(), basis.col_mult());
}

}  // namespace

GradedDetLineElement phi_via_exact_sequences(const HilbertianChainComplex& c, const HodgeOptions& options) {
  require_determinant_class(c, options);
  HodgeData h = hodge(c, options);
  double log_coordinate = 0.0;
  double scale = 0.0;
  for (const auto& f : c.maps()) scale = std::max(scale, spectral_norm(f));
  for (int i = 0; i <= c.top_degree(); ++i) {
    const HilbertianModule& ci = c.module(i);
    const BlockOp& g = ci.reference_gram();
    BlockOp z = kernel_basis(c.out_map(i), g, scale);
    BlockOp b = image_basis(c.in_map(i), g, scale);
    const HodgeDegree& hd = h.degrees[i];
    HilbertianModule zm = span_module(ci, z), bm = span_module(ci, b);

    // 0 -> B_i -> Z_i -> H_i -> 0, everything with the induced products.
    ExactSequence harmonic_seq{bm, zm, hd.harmonic, z.adjoint() * g * b, hd.harmonic_basis.adjoint() * g * z};
    double c_harmonic =
        exact_sequence_iso(harmonic_seq, DetLineElement{bm, 1.0, ""}, DetLineElement{hd.harmonic, 1.0, ""})
            .coefficient;

    // 0 -> Z_i -> C_i -> B_t -> 0 with beta the differential in coordinates of
    // an orthonormal basis of its image.
    double c_boundary = 1.0;
    if (auto t = c.out_target(i)) {
      const BlockOp& gt = c.module(*t).reference_gram();
      BlockOp d = c.out_map(i);
      BlockOp bt = image_basis(d, gt, scale);
      HilbertianModule btm = span_module(c.module(*t), bt);
      ExactSequence boundary_seq{zm, ci, btm, z, bt.adjoint() * gt * d};
      c_boundary =
          exact_sequence_iso(boundary_seq, DetLineElement{zm, 1.0, ""}, DetLineElement{btm, 1.0, ""}).coefficient;
    }
    // Without an outgoing differential Z_i = C_i and z is orthonormal for the
    // chosen product, so that sequence contributes 1.
    // alpha_i = (c_boundary c_harmonic)^{-1} [B_i] [H_i] [B_t]; the B factors
    // cancel between neighbouring degrees.
    double sign = i % 2 == 0 ? 1.0 : -1.0;
    log_coordinate -= sign * (std::log(c_boundary) + std::log(c_harmonic));
  }
  return harmonic_element(h, log_coordinate);
}

GradedDetLineElement phi_via_laplacians(const HilbertianChainComplex& c, const HodgeOptions& options) {
  require_determinant_class(c, options);
  HodgeData h = hodge(c, options);
  double log_coordinate = 0.0;
  for (const auto& d : h.degrees) {
    int i = d.degree;
    double sign = i % 2 == 0 ? 1.0 : -1.0;
    if (c.convention() == Convention::cochain) sign = -sign;
    log_coordinate += sign * i / 2.0 * d.log_det_positive;
  }
  return harmonic_element(h, log_coordinate);
}

namespace {

// Ein(x) = int_0^x (1 - e^{-u}) du/u, by its series near 0.
double ein(double x) {
  if (x > 1.0) return -std::expint(-x) + std::log(x) + std::numbers::egamma;
  double term = 1.0, acc = 0.0;
  for (int k = 1; k < 60; ++k) {
    term *= -x / k;
    acc -= term / k;
    if (std::abs(term) < 1e-18 * std::abs(acc)) break;
  }
  return acc;
}

}  // namespace

std::pair<double, double> mellin_zeta_prime(const std::vector<SpectralAtom>& spectrum) {
  constexpr double t_min = 1e-6, t_max = 50.0;
  constexpr int n = 4000;  // Simpson intervals per piece
  auto theta = [&](double t) {
    double acc = 0.0;
    for (const auto& a : spectrum) acc += a.weight * std::exp(-a.lambda * t);
    return acc;
  };
  // Closed forms outside [t_min, t_max]:
  //   int_0^{t_min} (theta - theta0) dt/t = -sum w Ein(mu t_min),
  //   int_{t_max}^inf theta dt/t = sum w E1(mu t_max).
  double theta0 = 0.0, head = 0.0, tail = 0.0;
  for (const auto& a : spectrum) {
    theta0 += a.weight;
    head -= a.weight * ein(a.lambda * t_min);
    tail -= a.weight * std::expint(-a.lambda * t_max);
  }
  auto simpson = [&](double u0, double u1, int intervals, auto&& f) {
    double h = (u1 - u0) / intervals, acc = f(u0) + f(u1);
    for (int j = 1; j < intervals; ++j) acc += (j % 2 == 1 ? 4.0 : 2.0) * f(u0 + j * h);
    return acc * h / 3.0;
  };
  auto small_f = [&](double u) { return theta(std::exp(u)) - theta0; };
  auto large_f = [&](double u) { return theta(std::exp(u)); };
  double small = simpson(std::log(t_min), 0.0, n, small_f);
  double large = simpson(0.0, std::log(t_max), n, large_f);
  double coarse = simpson(std::log(t_min), 0.0, n / 2, small_f) + simpson(0.0, std::log(t_max), n / 2, large_f);
  return {small + head + large + tail + std::numbers::egamma * theta0, std::abs(small + large - coarse)};
}

ZetaReport zeta_suite(const HilbertianChainComplex& c, const ZetaGrid& grid, const HodgeOptions& options) {
  HodgeData h = hodge(c, options);
  ZetaReport report;
  double log_product = 0.0;
  for (const auto& d : h.degrees) {
    ZetaDegree z;
    z.degree = d.degree;
    const auto& atoms = d.positive.atoms;
    for (double t : grid.t) {
      double acc = 0.0;
      for (const auto& a : atoms) acc += a.weight * std::exp(-a.lambda * t);
      z.theta.emplace_back(t, acc);
    }
    for (double s : grid.s)
      for (double lambda : grid.lambda) {
        double acc = 0.0;
        for (const auto& a : atoms) acc += a.weight * std::pow(a.lambda + lambda, -s);
        z.zeta.push_back({s, lambda, acc});
      }
    // d/ds sum w (mu + lambda)^{-s} at s = 0 is -sum w log(mu + lambda); the
    // limit lambda -> 0 exists since every mu is positive.
    z.zeta_prime = -d.log_det_positive;
    if (grid.mellin) {
      auto [value, bound] = mellin_zeta_prime(atoms);
      z.zeta_prime_mellin = value;
      z.mellin_error_estimate = bound;
    }
    double sign = d.degree % 2 == 0 ? 1.0 : -1.0;
    report.zeta_prime += sign * d.degree * z.zeta_prime;
    log_product += -sign * d.degree / 2.0 * d.log_det_positive;
    report.degrees.push_back(std::move(z));
  }
  report.factor = std::exp(0.5 * report.zeta_prime);
  report.laplacian_product = std::exp(log_product);
  report.relative_mismatch = std::abs(report.factor - report.laplacian_product) / report.laplacian_product;
  return report;
}

}  // namespace l2t
