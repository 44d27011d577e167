#include "l2t/hilbertian.hpp"

#include <cmath>
#include <string>

#include "l2t/errors.hpp"

namespace l2t {

HilbertianModule::HilbertianModule(AlgebraPtr algebra, std::vector<int> multiplicities)
    : algebra_(std::move(algebra)), mult_(std::move(multiplicities)) {
  require(algebra_ != nullptr, ErrorKind::ValidationError, "module without algebra");
  require(mult_.size() == algebra_->block_count(), ErrorKind::ShapeMismatch,
          "expected " + std::to_string(algebra_->block_count()) + " multiplicities, got " +
              std::to_string(mult_.size()));
  for (int m : mult_) require(m >= 0, ErrorKind::ValidationError, "negative multiplicity");
  layout();
  basis_map_ = Matrix::Identity(dim_, dim_);
  reference_ = identity();
}

void HilbertianModule::layout() {
  offsets_.clear();
  dim_ = 0;
  for (std::size_t k = 0; k < mult_.size(); ++k) {
    offsets_.push_back(dim_);
    dim_ += static_cast<Eigen::Index>(algebra_->block_dim(k)) * mult_[k];
  }
}

HilbertianModule HilbertianModule::free(AlgebraPtr algebra, int rank) {
  std::vector<int> mult;
  for (const auto& b : algebra->blocks()) mult.push_back(rank * b.dim);
  return HilbertianModule(std::move(algebra), std::move(mult));
}

namespace {

Vector flatten(const AlgebraElement& x) {
  Eigen::Index n = 0;
  for (const auto& b : x.blocks()) n += b.size();
  Vector v(n);
  Eigen::Index i = 0;
  for (const auto& b : x.blocks())
    for (Eigen::Index c = 0; c < b.cols(); ++c)
      for (Eigen::Index r = 0; r < b.rows(); ++r) v(i++) = b(r, c);
  return v;
}

}  // namespace

HilbertianModule HilbertianModule::from_action(AlgebraPtr algebra, std::span<const AlgebraElement> spanning,
                                               std::span<const Matrix> images) {
  require(spanning.size() == images.size() && !images.empty(), ErrorKind::ValidationError,
          "need one image per spanning element");
  const Eigen::Index d = images.front().rows();
  for (const auto& img : images)
    require(img.rows() == d && img.cols() == d, ErrorKind::ShapeMismatch, "action images must be square of equal size");
  for (const auto& x : spanning)
    require(x.conforms_to(*algebra), ErrorKind::ShapeMismatch, "spanning element does not match the algebra");

  // Express every matrix unit as a combination of the spanning set.
  Matrix coords(flatten(spanning.front()).size(), static_cast<Eigen::Index>(spanning.size()));
  for (std::size_t s = 0; s < spanning.size(); ++s) coords.col(static_cast<Eigen::Index>(s)) = flatten(spanning[s]);
  Eigen::CompleteOrthogonalDecomposition<Matrix> solver(coords);
  require(solver.rank() == coords.rows(), ErrorKind::ValidationError, "action generators do not span the algebra");

  double scale = 1.0;
  for (const auto& img : images) scale = std::max(scale, linalg::max_abs(img));
  const double tol = 1e-8 * scale;

  const std::size_t blocks = algebra->block_count();
  std::vector<std::vector<Matrix>> unit_images(blocks);  // unit_images[k][i * n + j] = R(E^k_ij)
  for (std::size_t k = 0; k < blocks; ++k) {
    const int n = algebra->block_dim(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vector c = solver.solve(flatten(algebra->matrix_unit(k, i, j)));
        Matrix r = Matrix::Zero(d, d);
        for (std::size_t s = 0; s < images.size(); ++s) r += c(static_cast<Eigen::Index>(s)) * images[s];
        unit_images[k].push_back(std::move(r));
      }
  }

  // *-representation checks: R(E_ij)^* = R(E_ji), R(E_ij) R(E_jl) = R(E_il),
  // orthogonality of distinct blocks, and unitality.
  Matrix unit = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < blocks; ++k) {
    const int n = algebra->block_dim(k);
    auto at = [&](int i, int j) -> const Matrix& { return unit_images[k][static_cast<std::size_t>(i * n + j)]; };
    for (int i = 0; i < n; ++i) {
      unit += at(i, i);
      for (int j = 0; j < n; ++j) {
        require(linalg::max_abs(at(i, j).adjoint() - at(j, i)) < tol, ErrorKind::ValidationError,
                "action is not a *-representation (adjoint relation fails in block " + std::to_string(k) + ")");
        for (int l = 0; l < n; ++l)
          require(linalg::max_abs(at(i, j) * at(j, l) - at(i, l)) < tol, ErrorKind::ValidationError,
                  "action is not multiplicative on block " + std::to_string(k));
      }
    }
    for (std::size_t k2 = k + 1; k2 < blocks; ++k2)
      require(linalg::max_abs(at(0, 0) * unit_images[k2][0]) < tol, ErrorKind::ValidationError,
              "images of distinct blocks are not orthogonal");
  }
  require(linalg::max_abs(unit - Matrix::Identity(d, d)) < tol, ErrorKind::ValidationError,
          "action does not send 1 to the identity");

  HilbertianModule out;
  out.algebra_ = std::move(algebra);
  std::vector<Matrix> mult_bases;
  for (std::size_t k = 0; k < blocks; ++k) {
    const Matrix& e00 = unit_images[k][0];
    int m = static_cast<int>(std::lround(e00.trace().real()));
    Matrix w = linalg::range_basis(e00, 1e-8);
    require(w.cols() == m, ErrorKind::ValidationError, "projection rank does not match its trace");
    out.mult_.push_back(m);
    mult_bases.push_back(std::move(w));
  }
  out.layout();
  require(out.dim_ == d, ErrorKind::ValidationError, "isotypic dimensions do not add up to the carrier dimension");
  Matrix v(d, d);
  for (std::size_t k = 0; k < blocks; ++k) {
    const int n = out.algebra_->block_dim(k);
    const int m = out.mult_[k];
    for (int a = 0; a < n; ++a) {
      Matrix col = unit_images[k][static_cast<std::size_t>(a * n)] * mult_bases[k];
      for (int b = 0; b < m; ++b) v.col(out.offsets_[k] + a * m + b) = col.col(b);
    }
  }
  require(linalg::max_abs(v.adjoint() * v - Matrix::Identity(d, d)) < 1e-8, ErrorKind::ValidationError,
          "isotypic basis is not orthonormal");
  out.basis_map_ = v.adjoint();
  out.reference_ = out.identity();
  return out;
}

HilbertianModule HilbertianModule::with_reference(BlockOp gram) const {
  require_admissible(*this, gram);
  HilbertianModule out = *this;
  out.reference_ = hermitian_part(gram);
  return out;
}

Matrix HilbertianModule::action(const AlgebraElement& x) const {
  require(x.conforms_to(*algebra_), ErrorKind::ShapeMismatch, "element does not match the module's algebra");
  Matrix out = Matrix::Zero(dim_, dim_);
  for (std::size_t k = 0; k < mult_.size(); ++k) {
    Eigen::Index size = static_cast<Eigen::Index>(algebra_->block_dim(k)) * mult_[k];
    if (size == 0) continue;
    out.block(offsets_[k], offsets_[k], size, size) = linalg::kron(x.block(k), Matrix::Identity(mult_[k], mult_[k]));
  }
  return out;
}

Matrix HilbertianModule::action_user(const AlgebraElement& x) const {
  return basis_map_.adjoint() * action(x) * basis_map_;
}

Matrix expand_morphism(const HilbertianModule& source, const HilbertianModule& target, const BlockOp& f) {
  check_morphism_shape(source, target, f);
  Matrix out = Matrix::Zero(target.carrier_dim(), source.carrier_dim());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const int n = source.algebra().block_dim(k);
    if (f[k].size() == 0) continue;
    out.block(target.block_offset(k), source.block_offset(k), n * f[k].rows(), n * f[k].cols()) =
        linalg::kron(Matrix::Identity(n, n), f[k]);
  }
  return out;
}

BlockOp compress_morphism(const HilbertianModule& source, const HilbertianModule& target, const Matrix& canonical,
                          double rel_tol) {
  require(source.compatible(target), ErrorKind::AlgebraMismatch, "modules over different algebras");
  require(canonical.rows() == target.carrier_dim() && canonical.cols() == source.carrier_dim(),
          ErrorKind::ShapeMismatch, "matrix shape does not match the modules");
  std::vector<Matrix> blocks;
  for (std::size_t k = 0; k < source.algebra().block_count(); ++k)
    blocks.push_back(canonical.block(target.block_offset(k), source.block_offset(k), target.multiplicity(k),
                                     source.multiplicity(k)));
  BlockOp f(std::move(blocks));
  double residual = linalg::max_abs(canonical - expand_morphism(source, target, f));
  require(residual <= rel_tol * std::max(1.0, linalg::max_abs(canonical)), ErrorKind::NotInCommutant,
          "operator does not commute with the action (residual " + std::to_string(residual) + ")");
  return f;
}

void check_morphism_shape(const HilbertianModule& source, const HilbertianModule& target, const BlockOp& f) {
  require(source.compatible(target), ErrorKind::AlgebraMismatch, "modules over different algebras");
  require(f.size() == source.algebra().block_count(), ErrorKind::ShapeMismatch,
          "operator has the wrong number of blocks");
  for (std::size_t k = 0; k < f.size(); ++k)
    require(f[k].rows() == target.multiplicity(k) && f[k].cols() == source.multiplicity(k), ErrorKind::ShapeMismatch,
            "operator block " + std::to_string(k) + " has the wrong shape");
}

Matrix HilbertianModule::expand(const BlockOp& f) const { return expand_morphism(*this, *this, f); }

Matrix HilbertianModule::to_user(const BlockOp& f) const { return basis_map_.adjoint() * expand(f) * basis_map_; }

BlockOp HilbertianModule::compress(const Matrix& canonical, double rel_tol) const {
  return compress_morphism(*this, *this, canonical, rel_tol);
}

BlockOp HilbertianModule::from_user(const Matrix& user, double rel_tol) const {
  require(user.rows() == dim_ && user.cols() == dim_, ErrorKind::ShapeMismatch,
          "operator must be " + std::to_string(dim_) + " x " + std::to_string(dim_));
  return compress(basis_map_ * user * basis_map_.adjoint(), rel_tol);
}

std::vector<BlockOp> commutant_basis(const HilbertianModule& m) {
  std::vector<BlockOp> out;
  for (std::size_t k = 0; k < m.multiplicities().size(); ++k)
    for (int i = 0; i < m.multiplicity(k); ++i)
      for (int j = 0; j < m.multiplicity(k); ++j) {
        BlockOp e = m.zero();
        e[k](i, j) = 1.0;
        out.push_back(std::move(e));
      }
  return out;
}

Complex canonical_trace(const HilbertianModule& m, const BlockOp& f) {
  try {
    check_morphism_shape(m, m, f);
  } catch (const Error& e) {
    fail(ErrorKind::NotInCommutant, e.what());
  }
  Complex acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += m.algebra().weight(k) * f[k].trace();
  return acc;
}

namespace {
int free_rank(const HilbertianModule& m) {
  const auto& alg = m.algebra();
  int rank = m.multiplicity(0) / alg.block_dim(0);
  for (std::size_t k = 0; k < alg.block_count(); ++k)
    require(m.multiplicity(k) == rank * alg.block_dim(k), ErrorKind::ValidationError, "module is not free");
  require(m.basis_map().isIdentity(1e-14), ErrorKind::ValidationError, "free-module formulas need canonical coordinates");
  return rank;
}
}  // namespace

std::vector<std::vector<AlgebraElement>> free_module_entries(const HilbertianModule& m, const BlockOp& f) {
  check_morphism_shape(m, m, f);
  const int r = free_rank(m);
  const auto& alg = m.algebra();
  // f(xi)_j = sum_i xi_i a_ij, so the (j, i) sub-block of B_k is (a_ij)_k^T.
  std::vector<std::vector<AlgebraElement>> a(r, std::vector<AlgebraElement>(r));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      std::vector<Matrix> blocks;
      for (std::size_t k = 0; k < alg.block_count(); ++k) {
        const int n = alg.block_dim(k);
        blocks.push_back(f[k].block(j * n, i * n, n, n).transpose());
      }
      a[i][j] = AlgebraElement(std::move(blocks));
    }
  return a;
}

Complex free_module_trace(const HilbertianModule& m, const BlockOp& f) {
  auto a = free_module_entries(m, f);
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += trace(m.algebra(), a[i][i]);
  return acc;
}

BlockOp right_multiplication(const HilbertianModule& free_rank_one, const AlgebraElement& a) {
  require(free_rank(free_rank_one) == 1, ErrorKind::ValidationError, "right multiplication needs l2(A) itself");
  require(a.conforms_to(free_rank_one.algebra()), ErrorKind::ShapeMismatch, "element does not match the algebra");
  std::vector<Matrix> blocks;
  for (const auto& b : a.blocks()) blocks.push_back(b.transpose());
  return BlockOp(std::move(blocks));
}

double von_neumann_dimension(const HilbertianModule& m) {
  double acc = 0.0;
  for (std::size_t k = 0; k < m.multiplicities().size(); ++k) acc += m.algebra().weight(k) * m.multiplicity(k);
  return acc;
}

namespace {
void fill_spectral_checks(AdmissibilityReport& r, const BlockOp& gram) {
  double norm = std::max(spectral_norm(gram), 1e-300);
  double herm = max_abs(gram - gram.adjoint());
  r.self_adjoint = herm <= 1e-10 * norm;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, smin = lo, smax = 0.0;
  for (const auto& b : gram.blocks()) {
    if (b.size() == 0) continue;
    auto e = linalg::hermitian_eigen(b);
    lo = std::min(lo, e.values(0));
    hi = std::max(hi, e.values(e.values.size() - 1));
    Eigen::JacobiSVD<Matrix> svd(b);
    smax = std::max(smax, svd.singularValues()(0));
    smin = std::min(smin, svd.singularValues()(svd.singularValues().size() - 1));
  }
  if (hi == 0.0 && std::isinf(lo)) {  // zero module
    r.positive = r.invertible = true;
    r.condition = 1.0;
    return;
  }
  r.positive = lo > 1e-10 * hi;
  r.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  r.invertible = r.condition < 1e12;
}
}  // namespace

AdmissibilityReport check_admissible(const HilbertianModule& m, const BlockOp& gram) {
  check_morphism_shape(m, m, gram);
  AdmissibilityReport r;
  r.commutes = true;
  fill_spectral_checks(r, gram);
  if (r.invertible) r.transition = transition_operator(m.reference_gram(), gram);
  return r;
}

AdmissibilityReport check_admissible(const HilbertianModule& m, const Matrix& gram_user) {
  require(gram_user.rows() == m.carrier_dim() && gram_user.cols() == m.carrier_dim(), ErrorKind::ShapeMismatch,
          "gram must be " + std::to_string(m.carrier_dim()) + " x " + std::to_string(m.carrier_dim()));
  AdmissibilityReport r;
  Matrix canonical = m.basis_map() * gram_user * m.basis_map().adjoint();
  double norm = std::max(linalg::max_abs(canonical), 1e-300);
  r.self_adjoint = linalg::max_abs(canonical - canonical.adjoint()) <= 1e-10 * norm;
  if (canonical.size() > 0) {
    auto e = linalg::hermitian_eigen(canonical);
    r.positive = e.values(0) > 1e-10 * e.values(e.values.size() - 1);
  } else {
    r.positive = true;
  }
  r.condition = linalg::condition_number(canonical);
  r.invertible = r.condition < 1e12;
  std::vector<Matrix> blocks;
  for (std::size_t k = 0; k < m.multiplicities().size(); ++k)
    blocks.push_back(canonical.block(m.block_offset(k), m.block_offset(k), m.multiplicity(k), m.multiplicity(k)));
  BlockOp compressed(std::move(blocks));
  r.commutator_residual = linalg::max_abs(canonical - m.expand(compressed)) / norm;
  r.commutes = r.commutator_residual <= 1e-10;
  if (r.commutes && r.invertible) r.transition = transition_operator(m.reference_gram(), compressed);
  return r;
}

void require_admissible(const HilbertianModule& m, const BlockOp& gram) {
  try {
    check_morphism_shape(m, m, gram);
  } catch (const Error& e) {
    fail(ErrorKind::NotAdmissible, e.what());
  }
  AdmissibilityReport r;
  fill_spectral_checks(r, gram);
  require(r.self_adjoint, ErrorKind::NotAdmissible, "gram is not self-adjoint");
  require(r.positive, ErrorKind::NotAdmissible, "gram is not positive definite");
  require(r.invertible, ErrorKind::NotAdmissible, "gram condition number " + std::to_string(r.condition));
}

BlockOp transition_operator(const BlockOp& reference, const BlockOp& gram) { return reference.inverse() * gram; }

BlockOp isometry_between(const BlockOp& gram1, const BlockOp& gram2) {
  BlockOp h = positive_sqrt(gram1);
  BlockOp hinv = positive_inverse_sqrt(gram1);
  BlockOp s = positive_sqrt(hermitian_part(hinv * gram2 * hinv));
  return hinv * s * h;
}

BlockOp induced_involution(const BlockOp& transition, const BlockOp& f) {
  return transition.inverse() * f.adjoint() * transition;
}

HilbertianModule direct_sum(const HilbertianModule& m, const HilbertianModule& n) {
  require(m.compatible(n), ErrorKind::AlgebraMismatch, "direct sum of modules over different algebras");
  HilbertianModule out;
  out.algebra_ = m.algebra_;
  for (std::size_t k = 0; k < m.mult_.size(); ++k) out.mult_.push_back(m.mult_[k] + n.mult_[k]);
  out.layout();
  // Canonical coordinates of M (+) N interleave the two multiplicity spaces.
  Matrix perm = Matrix::Zero(out.dim_, out.dim_);
  for (std::size_t k = 0; k < out.mult_.size(); ++k) {
    const int dim = out.algebra_->block_dim(k);
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < m.mult_[k]; ++b)
        perm(out.offsets_[k] + a * out.mult_[k] + b, m.offsets_[k] + a * m.mult_[k] + b) = 1.0;
      for (int b = 0; b < n.mult_[k]; ++b)
        perm(out.offsets_[k] + a * out.mult_[k] + m.mult_[k] + b, m.dim_ + n.offsets_[k] + a * n.mult_[k] + b) = 1.0;
    }
  }
  Matrix diag = Matrix::Zero(out.dim_, out.dim_);
  diag.topLeftCorner(m.dim_, m.dim_) = m.basis_map_;
  diag.bottomRightCorner(n.dim_, n.dim_) = n.basis_map_;
  out.basis_map_ = perm * diag;
  out.reference_ = block_operator(m, n, m.reference_, {}, {}, n.reference_);
  return out;
}

BlockOp block_operator(const HilbertianModule& m, const HilbertianModule& n, const BlockOp& a, const BlockOp& b,
                       const BlockOp& c, const BlockOp& d) {
  std::vector<std::vector<int>> mults{std::vector<int>(m.multiplicities().begin(), m.multiplicities().end()),
                                      std::vector<int>(n.multiplicities().begin(), n.multiplicities().end())};
  return block_matrix({{a, b}, {c, d}}, mults, mults);
}

BlockOp random_commutant(const HilbertianModule& m, Rng& rng) { return random_morphism(m, m, rng); }

BlockOp random_positive(const HilbertianModule& m, Rng& rng, double lo, double hi) {
  std::vector<Matrix> blocks;
  for (int mk : m.multiplicities()) blocks.push_back(linalg::random_positive(mk, rng, lo, hi));
  return BlockOp(std::move(blocks));
}

BlockOp random_unitary(const HilbertianModule& m, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int mk : m.multiplicities()) blocks.push_back(linalg::random_unitary(mk, rng));
  return BlockOp(std::move(blocks));
}

BlockOp random_morphism(const HilbertianModule& source, const HilbertianModule& target, Rng& rng) {
  std::vector<Matrix> blocks;
  for (std::size_t k = 0; k < source.multiplicities().size(); ++k)
    blocks.push_back(linalg::random_matrix(target.multiplicity(k), source.multiplicity(k), rng));
  return BlockOp(std::move(blocks));
}

}  // namespace l2t
