#include "l2t/vna.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "l2t/errors.hpp"

namespace l2t {

Algebra::Algebra(std::vector<AlgebraBlock> blocks) : blocks_(std::move(blocks)) {
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    require(blocks_[k].dim >= 1, ErrorKind::ValidationError,
            "algebra block " + std::to_string(k) + " has dimension < 1");
    require(blocks_[k].weight > 0.0 && std::isfinite(blocks_[k].weight), ErrorKind::ValidationError,
            "algebra block " + std::to_string(k) + " has non-positive trace weight");
  }
  require(!blocks_.empty(), ErrorKind::ValidationError, "algebra needs at least one block");
}

double Algebra::unit_trace() const {
  double acc = 0.0;
  for (const auto& b : blocks_) acc += b.weight * b.dim;
  return acc;
}

Algebra Algebra::scaled(double lambda) const {
  auto blocks = blocks_;
  for (auto& b : blocks) b.weight *= lambda;
  return Algebra(std::move(blocks));
}

AlgebraElement Algebra::identity() const {
  std::vector<Matrix> out;
  for (const auto& b : blocks_) out.push_back(Matrix::Identity(b.dim, b.dim));
  return AlgebraElement(std::move(out));
}

AlgebraElement Algebra::zero() const {
  std::vector<Matrix> out;
  for (const auto& b : blocks_) out.push_back(Matrix::Zero(b.dim, b.dim));
  return AlgebraElement(std::move(out));
}

AlgebraElement Algebra::matrix_unit(std::size_t k, int i, int j) const {
  auto e = zero();
  e.block(k)(i, j) = 1.0;
  return e;
}

std::vector<AlgebraElement> Algebra::matrix_units() const {
  std::vector<AlgebraElement> out;
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    for (int i = 0; i < blocks_[k].dim; ++i)
      for (int j = 0; j < blocks_[k].dim; ++j) out.push_back(matrix_unit(k, i, j));
  return out;
}

AlgebraElement AlgebraElement::adjoint() const {
  std::vector<Matrix> out;
  for (const auto& b : blocks_) out.push_back(b.adjoint());
  return AlgebraElement(std::move(out));
}

bool AlgebraElement::conforms_to(const Algebra& algebra) const {
  if (blocks_.size() != algebra.block_count()) return false;
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    if (blocks_[k].rows() != algebra.block_dim(k) || blocks_[k].cols() != algebra.block_dim(k)) return false;
  return true;
}

namespace {
void check_same_shape(const AlgebraElement& a, const AlgebraElement& b) {
  require(a.block_count() == b.block_count(), ErrorKind::ShapeMismatch, "algebra elements differ in block count");
  for (std::size_t k = 0; k < a.block_count(); ++k)
    require(a.block(k).rows() == b.block(k).rows(), ErrorKind::ShapeMismatch, "algebra elements differ in block size");
}
}  // namespace

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  check_same_shape(a, b);
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < a.block_count(); ++k) out.push_back(a.block(k) + b.block(k));
  return AlgebraElement(std::move(out));
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  check_same_shape(a, b);
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < a.block_count(); ++k) out.push_back(a.block(k) - b.block(k));
  return AlgebraElement(std::move(out));
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  check_same_shape(a, b);
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < a.block_count(); ++k) out.push_back(a.block(k) * b.block(k));
  return AlgebraElement(std::move(out));
}

AlgebraElement operator*(Complex s, const AlgebraElement& a) {
  std::vector<Matrix> out;
  for (const auto& b : a.blocks()) out.push_back(s * b);
  return AlgebraElement(std::move(out));
}

Complex trace(const Algebra& algebra, const AlgebraElement& x) {
  require(x.conforms_to(algebra), ErrorKind::ShapeMismatch, "element does not match the algebra's block shape");
  Complex acc = 0.0;
  for (std::size_t k = 0; k < algebra.block_count(); ++k) acc += algebra.weight(k) * x.block(k).trace();
  return acc;
}

AlgebraElement random_element(const Algebra& algebra, Rng& rng) {
  std::vector<Matrix> out;
  for (const auto& b : algebra.blocks()) out.push_back(linalg::random_matrix(b.dim, b.dim, rng));
  return AlgebraElement(std::move(out));
}

// ---------------------------------------------------------------------------
// Group tables

GroupTable::GroupTable(std::vector<std::vector<int>> product, int identity) : identity_(identity) {
  order_ = static_cast<int>(product.size());
  require(order_ >= 1, ErrorKind::NonAssociativeTable, "empty group table");
  require(identity >= 0 && identity < order_, ErrorKind::NonAssociativeTable, "identity index out of range");
  product_.resize(static_cast<std::size_t>(order_) * order_);
  for (int a = 0; a < order_; ++a) {
    require(static_cast<int>(product[a].size()) == order_, ErrorKind::NonAssociativeTable,
            "row " + std::to_string(a) + " of the product table has the wrong length");
    for (int b = 0; b < order_; ++b) {
      int c = product[a][b];
      require(c >= 0 && c < order_, ErrorKind::NonAssociativeTable, "product table entry out of range");
      product_[static_cast<std::size_t>(a) * order_ + b] = c;
    }
  }
  for (int a = 0; a < order_; ++a)
    require(mul(identity_, a) == a && mul(a, identity_) == a, ErrorKind::NonAssociativeTable,
            "identity law fails at element " + std::to_string(a));
  for (int a = 0; a < order_; ++a)
    for (int b = 0; b < order_; ++b)
      for (int c = 0; c < order_; ++c)
        require(mul(mul(a, b), c) == mul(a, mul(b, c)), ErrorKind::NonAssociativeTable,
                "associativity fails at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                    std::to_string(c) + ")");
  inverse_.assign(order_, -1);
  for (int a = 0; a < order_; ++a) {
    for (int b = 0; b < order_; ++b)
      if (mul(a, b) == identity_ && mul(b, a) == identity_) inverse_[a] = b;
    require(inverse_[a] >= 0, ErrorKind::NonAssociativeTable, "element " + std::to_string(a) + " has no inverse");
  }
}

GroupTable GroupTable::trivial() { return GroupTable({{0}}, 0); }

GroupTable GroupTable::cyclic(int n) {
  require(n >= 1, ErrorKind::ValidationError, "cyclic group order must be positive");
  std::vector<std::vector<int>> p(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) p[a][b] = (a + b) % n;
  return GroupTable(std::move(p), 0);
}

GroupTable GroupTable::symmetric3() {
  // Permutations of {0,1,2} as images (p(0), p(1), p(2)); product is composition a∘b.
  const std::vector<std::array<int, 3>> perms = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}};
  auto index_of = [&](const std::array<int, 3>& p) {
    return static_cast<int>(std::find(perms.begin(), perms.end(), p) - perms.begin());
  };
  std::vector<std::vector<int>> table(6, std::vector<int>(6));
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int i = 0; i < 3; ++i) c[i] = perms[a][perms[b][i]];
      table[a][b] = index_of(c);
    }
  return GroupTable(std::move(table), 0);
}

GroupTable GroupTable::product_of(const GroupTable& g, const GroupTable& h) {
  int n = g.order() * h.order();
  std::vector<std::vector<int>> p(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      p[a][b] = g.mul(a / h.order(), b / h.order()) * h.order() + h.mul(a % h.order(), b % h.order());
  return GroupTable(std::move(p), g.identity() * h.order() + h.identity());
}

Matrix left_translation(const GroupTable& table, int g) {
  Matrix m = Matrix::Zero(table.order(), table.order());
  for (int h = 0; h < table.order(); ++h) m(table.mul(g, h), h) = 1.0;
  return m;
}

Matrix right_translation(const GroupTable& table, int g) {
  Matrix m = Matrix::Zero(table.order(), table.order());
  int ginv = table.inverse(g);
  for (int h = 0; h < table.order(); ++h) m(table.mul(h, ginv), h) = 1.0;
  return m;
}

std::vector<int> generating_set(const GroupTable& table) {
  std::vector<char> in_subgroup(table.order(), 0);
  in_subgroup[table.identity()] = 1;
  std::vector<int> gens;
  auto close = [&] {
    bool grew = true;
    while (grew) {
      grew = false;
      for (int a = 0; a < table.order(); ++a) {
        if (!in_subgroup[a]) continue;
        for (int g : gens) {
          int c = table.mul(a, g);
          if (!in_subgroup[c]) in_subgroup[c] = 1, grew = true;
        }
      }
    }
  };
  for (int g = 0; g < table.order(); ++g) {
    if (in_subgroup[g]) continue;
    gens.push_back(g);
    close();
  }
  return gens;
}

// ---------------------------------------------------------------------------
// Wedderburn decomposition

namespace detail {

std::vector<Matrix> eigen_clusters(const Matrix& hermitian_sample, double cluster_gap) {
  auto eig = linalg::hermitian_eigen(hermitian_sample);
  const Eigen::Index n = eig.values.size();
  std::vector<Matrix> clusters;
  if (n == 0) return clusters;
  double scale = std::max(std::abs(eig.values(0)), std::abs(eig.values(n - 1)));
  if (scale == 0.0) scale = 1.0;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || eig.values(i) - eig.values(i - 1) > cluster_gap * scale) {
      clusters.push_back(eig.vectors.middleCols(start, i - start));
      start = i;
    }
  }
  return clusters;
}

Matrix unitary_intertwiner(std::span<const Matrix> targets, std::span<const Matrix> sources) {
  if (targets.empty() || targets.size() != sources.size()) return {};
  const Eigen::Index n = targets.front().rows();
  if (sources.front().rows() != n) return {};
  const Eigen::Index n2 = n * n;
  Matrix system(n2 * static_cast<Eigen::Index>(targets.size()), n2);
  Matrix id = Matrix::Identity(n, n);
  for (std::size_t j = 0; j < targets.size(); ++j)
    system.middleRows(static_cast<Eigen::Index>(j) * n2, n2) =
        linalg::kron(id, targets[j]) - linalg::kron(sources[j].transpose(), id);
  Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double scale = std::max(1.0, s(0));
  if (s(n2 - 1) > 1e-7 * scale) return {};
  Vector v = svd.matrixV().col(n2 - 1);
  Matrix intertwiner = Eigen::Map<Matrix>(v.data(), n, n);
  double c = (intertwiner.adjoint() * intertwiner).trace().real() / static_cast<double>(n);
  if (c <= 0.0) return {};
  intertwiner /= std::sqrt(c);
  if (linalg::max_abs(intertwiner.adjoint() * intertwiner - id) > 1e-6) return {};
  return intertwiner;
}

}  // namespace detail

namespace {

struct IrreducibleClass {
  std::vector<Complex> character;
  std::vector<Matrix> copies;  // orthonormal bases of the invariant subspaces
};

std::vector<double> sort_key(const std::vector<Complex>& character, int dim) {
  std::vector<double> key{static_cast<double>(dim)};
  for (const auto& c : character) {
    if (std::abs(c) < 1e-9) {
      key.push_back(-1.0);
      continue;
    }
    double a = std::arg(c);
    if (a < -1e-9) a += 2.0 * std::numbers::pi;
    key.push_back(std::round(std::max(a, 0.0) * 1e6) / 1e6);
  }
  return key;
}

std::optional<GroupAlgebra> try_decompose(const GroupTable& table, const std::vector<int>& gens,
                                          const WedderburnOptions& options, Rng& rng) {
  const int order = table.order();
  std::normal_distribution<double> g(0.0, 1.0);

  // Generic Hermitian element of the commutant span{R_g}.
  Matrix sample = Matrix::Zero(order, order);
  for (int e = 0; e < order; ++e) {
    Complex c(g(rng), g(rng));
    int einv = table.inverse(e);
    for (int h = 0; h < order; ++h) {
      sample(table.mul(h, einv), h) += c;
      sample(h, table.mul(h, einv)) += std::conj(c);
    }
  }
  auto clusters = detail::eigen_clusters(sample, options.cluster_gap);

  // Characters of each cluster; L_g is a permutation so Q^* L_g Q is cheap.
  auto restricted = [&](const Matrix& q, int elem) {
    Matrix lq(q.rows(), q.cols());
    for (int h = 0; h < order; ++h) lq.row(table.mul(elem, h)) = q.row(h);
    return Matrix(q.adjoint() * lq);
  };

  std::vector<IrreducibleClass> classes;
  for (const auto& q : clusters) {
    std::vector<Complex> chi(order);
    double norm = 0.0;
    for (int e = 0; e < order; ++e) {
      chi[e] = restricted(q, e).trace();
      norm += std::norm(chi[e]);
    }
    norm /= order;
    if (std::abs(norm - 1.0) > 1e-6) return std::nullopt;  // cluster is not irreducible
    bool placed = false;
    for (auto& cls : classes) {
      double diff = 0.0;
      for (int e = 0; e < order; ++e) diff = std::max(diff, std::abs(cls.character[e] - chi[e]));
      if (diff < 1e-6) {
        cls.copies.push_back(q);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({chi, {q}});
  }
  for (const auto& cls : classes)
    if (static_cast<Eigen::Index>(cls.copies.size()) != cls.copies.front().cols()) return std::nullopt;

  std::sort(classes.begin(), classes.end(), [](const IrreducibleClass& a, const IrreducibleClass& b) {
    return sort_key(a.character, static_cast<int>(a.copies.front().cols())) <
           sort_key(b.character, static_cast<int>(b.copies.front().cols()));
  });

  std::vector<AlgebraBlock> blocks;
  Matrix v = Matrix::Zero(order, order);
  std::vector<std::vector<Matrix>> irreps;  // irreps[k][elem]
  int offset = 0;
  for (const auto& cls : classes) {
    const int n = static_cast<int>(cls.copies.front().cols());
    blocks.push_back({n, static_cast<double>(n) / order});
    std::vector<Matrix> rho(order);
    for (int e = 0; e < order; ++e) rho[e] = restricted(cls.copies.front(), e);
    std::vector<Matrix> targets;
    for (int e : gens) targets.push_back(rho[e]);
    for (int b = 0; b < n; ++b) {
      Matrix q = cls.copies[b];
      if (b > 0) {
        std::vector<Matrix> sources;
        for (int e : gens) sources.push_back(restricted(q, e));
        Matrix s = detail::unitary_intertwiner(targets, sources);
        if (s.size() == 0) return std::nullopt;
        q = q * s.adjoint();
      }
      for (int a = 0; a < n; ++a) v.col(offset + a * n + b) = q.col(a);
    }
    offset += n * n;
    irreps.push_back(std::move(rho));
  }

  GroupAlgebra out;
  out.algebra = std::make_shared<const Algebra>(std::move(blocks));
  out.change_of_basis = v.adjoint();
  for (int e = 0; e < order; ++e) {
    std::vector<Matrix> img;
    for (const auto& rho : irreps) img.push_back(rho[e]);
    out.element_images.emplace_back(std::move(img));
  }
  return out;
}

}  // namespace

GroupAlgebra build_group_algebra(const GroupTable& table, const WedderburnOptions& options) {
  require(table.order() <= options.max_order, ErrorKind::ValidationError,
          "group order " + std::to_string(table.order()) + " exceeds the configured limit " +
              std::to_string(options.max_order));
  Rng rng(options.seed);
  auto gens = generating_set(table);
  if (gens.empty()) gens.push_back(table.identity());
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    if (auto result = try_decompose(table, gens, options, rng)) return std::move(*result);
  }
  fail(ErrorKind::DecompositionFailure, "could not separate isotypic components after " +
                                            std::to_string(options.max_attempts) + " random commutant samples");
}

}  // namespace l2t
