#pragma once

#include <string>
#include <vector>

#include "l2t/chain.hpp"
#include "l2t/hilbertian.hpp"
#include "l2t/vna.hpp"

namespace l2t::test {

struct AlgebraFixture {
  std::string name;
  AlgebraPtr algebra;
  int group_order;  // 1 for C
};

inline std::vector<AlgebraFixture> algebra_fixtures() {
  static const std::vector<AlgebraFixture> fixtures = [] {
    std::vector<AlgebraFixture> out;
    out.push_back({"C", build_group_algebra(GroupTable::trivial()).algebra, 1});
    out.push_back({"C[Z/2]", build_group_algebra(GroupTable::cyclic(2)).algebra, 2});
    out.push_back({"C[Z/3]", build_group_algebra(GroupTable::cyclic(3)).algebra, 3});
    out.push_back({"C[S3]", build_group_algebra(GroupTable::symmetric3()).algebra, 6});
    return out;
  }();
  return fixtures;
}

/// Module with multiplicities drawn from [lo, hi] per block.
inline HilbertianModule random_module(const AlgebraPtr& algebra, Rng& rng, int lo = 1, int hi = 3) {
  std::uniform_int_distribution<int> d(lo, hi);
  std::vector<int> mult;
  for (std::size_t k = 0; k < algebra->block_count(); ++k) mult.push_back(d(rng));
  return HilbertianModule(algebra, mult);
}

/// Random invertible operator with condition number bounded by a few hundred.
inline BlockOp random_invertible(const HilbertianModule& m, Rng& rng) {
  std::vector<Matrix> blocks;
  for (int mk : m.multiplicities()) {
    Matrix b = linalg::random_matrix(mk, mk, rng) + 3.0 * Matrix::Identity(mk, mk);
    blocks.push_back(std::move(b));
  }
  return BlockOp(std::move(blocks));
}

/// Random complex of length n + 1 with homology: degree i splits as
/// U_i (+) H_i (+) V_i where the differential maps V_i isomorphically onto the
/// U part of its target; the splitting is then hidden by a random change of
/// basis per degree, and every degree gets a random product.
inline HilbertianChainComplex random_complex(const AlgebraPtr& algebra, Rng& rng, int n, Convention convention,
                                             bool random_grams = true) {
  std::uniform_int_distribution<int> d(0, 2);
  const std::size_t blocks = algebra->block_count();
  auto target = [&](int i) { return convention == Convention::chain ? i - 1 : i + 1; };
  auto inside = [&](int i) { return i >= 0 && i <= n; };
  std::vector<std::vector<int>> u(n + 1, std::vector<int>(blocks)), h = u, v = u;
  for (int i = 0; i <= n; ++i)
    for (std::size_t k = 0; k < blocks; ++k) {
      h[i][k] = d(rng);
      // U_i is hit from the source degree, which must exist.
      int source = convention == Convention::chain ? i + 1 : i - 1;
      u[i][k] = inside(source) ? d(rng) : 0;
    }
  for (int i = 0; i <= n; ++i)
    for (std::size_t k = 0; k < blocks; ++k) v[i][k] = inside(target(i)) ? u[target(i)][k] : 0;

  std::vector<HilbertianModule> modules;
  std::vector<BlockOp> change;
  for (int i = 0; i <= n; ++i) {
    std::vector<int> mult(blocks);
    for (std::size_t k = 0; k < blocks; ++k) mult[k] = u[i][k] + h[i][k] + v[i][k];
    HilbertianModule m(algebra, mult);
    change.push_back(random_invertible(m, rng));
    if (random_grams) m = m.with_reference(random_positive(m, rng, 0.3, 3.0));
    modules.push_back(m);
  }
  std::vector<BlockOp> maps;
  for (int j = 0; j < n; ++j) {
    int src = convention == Convention::chain ? j + 1 : j;
    int dst = convention == Convention::chain ? j : j + 1;
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < blocks; ++k) {
      int uk = u[dst][k];
      Matrix b = Matrix::Zero(modules[dst].multiplicity(k), modules[src].multiplicity(k));
      if (uk > 0) {
        Matrix iso = linalg::random_matrix(uk, uk, rng) + 2.0 * Matrix::Identity(uk, uk);
        b.block(0, u[src][k] + h[src][k], uk, uk) = iso;
      }
      out.push_back(change[dst][k] * b * change[src][k].inverse());
    }
    maps.emplace_back(std::move(out));
  }
  return HilbertianChainComplex(std::move(modules), std::move(maps), convention);
}

inline double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace l2t::test
