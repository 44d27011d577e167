#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "l2t/chain.hpp"
#include "l2t/errors.hpp"

using namespace l2t;
using test::relative;

namespace {

AlgebraPtr complex_numbers() { return std::make_shared<const Algebra>(std::vector<AlgebraBlock>{{1, 1.0}}); }

BlockOp scalar_map(Complex s) { return BlockOp({Matrix::Constant(1, 1, s)}); }

HilbertianChainComplex circle(Convention conv) {
  HilbertianModule c(complex_numbers(), {1});
  return HilbertianChainComplex({c, c}, {scalar_map(-2.0)}, conv);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::ValidationError;
}

// Complex with all differentials zero.
HilbertianChainComplex zero_complex(const AlgebraPtr& alg, Rng& rng, int n, Convention conv) {
  std::vector<HilbertianModule> mods;
  for (int i = 0; i <= n; ++i) mods.push_back(test::random_module(alg, rng, 0, 2));
  std::vector<BlockOp> maps;
  for (int j = 0; j < n; ++j) {
    const auto& src = conv == Convention::chain ? mods[j + 1] : mods[j];
    const auto& dst = conv == Convention::chain ? mods[j] : mods[j + 1];
    maps.push_back(BlockOp::zero(dst.multiplicities(), src.multiplicities()));
  }
  return HilbertianChainComplex(mods, maps, conv);
}

}  // namespace

TEST_CASE("complex construction checks shapes") {
  HilbertianModule c1(complex_numbers(), {1}), c2(complex_numbers(), {2});
  CHECK(kind_of([&] { HilbertianChainComplex({c1, c2}, {scalar_map(1.0)}, Convention::chain); }) ==
        ErrorKind::ShapeMismatch);
  CHECK(kind_of([&] { HilbertianChainComplex({c1, c1}, {}, Convention::chain); }) == ErrorKind::ShapeMismatch);
  auto z2 = test::algebra_fixtures()[1].algebra;
  CHECK(kind_of([&] {
          HilbertianChainComplex({c1, HilbertianModule::free(z2)}, {BlockOp()}, Convention::chain);
        }) == ErrorKind::AlgebraMismatch);
  CHECK(parse_convention("cochain") == Convention::cochain);
  CHECK(kind_of([] { parse_convention("both"); }) == ErrorKind::ValidationError);
}

TEST_CASE("validation reports") {
  Rng rng(3);
  auto alg = test::algebra_fixtures()[3].algebra;
  CHECK(validate_complex(zero_complex(alg, rng, 3, Convention::chain)).valid);

  // Two-term complex with an invertible differential.
  auto m = test::random_module(alg, rng);
  HilbertianChainComplex two({m, m}, {test::random_invertible(m, rng)}, Convention::chain);
  CHECK(validate_complex(two).valid);

  // Random differentials do not square to zero.
  HilbertianChainComplex bad({m, m, m}, {random_commutant(m, rng), random_commutant(m, rng)}, Convention::chain);
  auto report = validate_complex(bad);
  CHECK_FALSE(report.valid);
  CHECK(report.max_square_residual > 1e-3);
  CHECK(kind_of([&] { hodge(bad); }) == ErrorKind::ValidationError);

  for (const auto& fx : test::algebra_fixtures())
    for (auto conv : {Convention::chain, Convention::cochain}) {
      auto c = test::random_complex(fx.algebra, rng, 3, conv);
      auto r = validate_complex(c);
      CHECK(r.valid);
      CHECK(r.max_square_residual < 1e-12);
    }
}

TEST_CASE("hodge data examples") {
  Rng rng(5);
  auto alg = test::algebra_fixtures()[2].algebra;
  auto zc = zero_complex(alg, rng, 2, Convention::chain);
  auto hz = hodge(zc);
  for (int i = 0; i <= 2; ++i) {
    CHECK(max_abs(hz.degrees[i].laplacian) == 0.0);
    CHECK(hz.degrees[i].betti == doctest::Approx(von_neumann_dimension(zc.module(i))));
    CHECK(max_abs(hz.degrees[i].projector - zc.module(i).identity()) < 1e-12);
  }

  auto m = test::random_module(alg, rng);
  HilbertianChainComplex id({m, m}, {m.identity()}, Convention::chain);
  auto hi = hodge(id);
  for (const auto& d : hi.degrees) {
    CHECK(d.betti == 0.0);
    CHECK(max_abs(d.laplacian - m.identity()) < 1e-14);
  }

  for (auto conv : {Convention::chain, Convention::cochain}) {
    auto h = hodge(circle(conv));
    for (const auto& d : h.degrees) {
      CHECK(d.betti == 0.0);
      CHECK(d.laplacian[0](0, 0).real() == doctest::Approx(4.0));
      CHECK(d.log_det_positive == doctest::Approx(std::log(4.0)));
    }
  }
}

TEST_CASE("hodge consistency on random complexes") {
  Rng rng(7);
  for (const auto& fx : test::algebra_fixtures()) {
    CAPTURE(fx.name);
    for (auto conv : {Convention::chain, Convention::cochain}) {
      for (int trial = 0; trial < 5; ++trial) {
        auto c = test::random_complex(fx.algebra, rng, 3, conv);
        auto h = hodge(c);
        for (int i = 0; i <= c.top_degree(); ++i) {
          const auto& d = h.degrees[i];
          const auto& g = c.module(i).reference_gram();
          CHECK(max_abs(d.projector * d.projector - d.projector) < 1e-9);
          CHECK(max_abs(d.laplacian * d.projector) < 1e-9 * std::max(1.0, spectral_norm(d.laplacian)));
          // The projector is orthogonal for the chosen product.
          CHECK(max_abs(g * d.projector - (g * d.projector).adjoint()) < 1e-9);
          // Harmonic basis is orthonormal: the induced product is the identity.
          CHECK(max_abs(d.harmonic_basis.adjoint() * g * d.harmonic_basis - d.harmonic.identity()) < 1e-9);
          // dim C_i = b_i + dim im(out) + dim im(in), computed independently.
          double rank_out = 0.0, rank_in = 0.0;
          BlockOp out = c.out_map(i), in = c.in_map(i);
          for (std::size_t k = 0; k < out.size(); ++k) {
            rank_out += fx.algebra->weight(k) * linalg::numerical_rank(out[k]);
            rank_in += fx.algebra->weight(k) * linalg::numerical_rank(in[k]);
          }
          CHECK(std::abs(d.betti + rank_out + rank_in - von_neumann_dimension(c.module(i))) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("betti numbers do not depend on the products") {
  Rng rng(11);
  auto alg = test::algebra_fixtures()[3].algebra;
  auto c = test::random_complex(alg, rng, 3, Convention::chain);
  auto h1 = hodge(c);
  std::vector<BlockOp> grams;
  for (const auto& m : c.modules()) grams.push_back(random_positive(m, rng, 0.1, 10.0));
  auto h2 = hodge(c.with_grams(grams));
  for (int i = 0; i <= 3; ++i) CHECK(h1.degrees[i].betti == doctest::Approx(h2.degrees[i].betti));
}

TEST_CASE("ill-conditioned kernels are refused") {
  HilbertianModule c3(complex_numbers(), {3});
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = std::sqrt(5e-11);
  d(2, 2) = std::sqrt(2e-10);
  HilbertianChainComplex c({c3, c3}, {BlockOp({d})}, Convention::chain);
  CHECK(kind_of([&] { hodge(c); }) == ErrorKind::IllConditionedKernel);
  CHECK(kind_of([&] { phi_via_laplacians(c); }) == ErrorKind::IllConditionedKernel);
  // A clean gap is fine.
  d(1, 1) = 0.0;
  d(2, 2) = 1e-3;
  HilbertianChainComplex ok({c3, c3}, {BlockOp({d})}, Convention::chain);
  CHECK(hodge(ok).degrees[1].betti == doctest::Approx(1.0));
}

TEST_CASE("determinant class verdicts") {
  Rng rng(13);
  for (const auto& fx : test::algebra_fixtures()) {
    auto c = test::random_complex(fx.algebra, rng, 3, Convention::cochain);
    for (const auto& v : determinant_class_check(c)) {
      CHECK(v.verdict == Verdict::pass);
      CHECK(v.margin > 0.0);
    }
    // Adding an acyclic summand 0 -> M -> M -> 0 keeps the verdict.
    auto m = test::random_module(fx.algebra, rng);
    std::vector<HilbertianModule> mods{m, m};
    HilbertianModule empty(fx.algebra, std::vector<int>(fx.algebra->block_count(), 0));
    mods.push_back(empty);
    mods.push_back(empty);
    std::vector<BlockOp> maps{test::random_invertible(m, rng), BlockOp::zero(empty.multiplicities(), m.multiplicities()),
                              BlockOp::zero(empty.multiplicities(), empty.multiplicities())};
    auto sum = direct_sum(c, HilbertianChainComplex(mods, maps, Convention::cochain));
    for (const auto& v : determinant_class_check(sum)) CHECK(v.verdict == Verdict::pass);
  }
}

TEST_CASE("torsion isomorphism examples") {
  Rng rng(17);
  auto alg = test::algebra_fixtures()[3].algebra;
  for (auto conv : {Convention::chain, Convention::cochain}) {
    auto zc = zero_complex(alg, rng, 3, conv);
    CHECK(phi_via_laplacians(zc).combined() == doctest::Approx(1.0));
    CHECK(phi_via_exact_sequences(zc).combined() == doctest::Approx(1.0));
  }
  // Circle with boundary -2: Det(Delta_1^+)^{-1/2} = 1/2 in the chain
  // convention; reading the same map as a coboundary inverts it.
  CHECK(phi_via_laplacians(circle(Convention::chain)).scalar == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(phi_via_exact_sequences(circle(Convention::chain)).scalar == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(phi_via_laplacians(circle(Convention::cochain)).scalar == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(phi_via_exact_sequences(circle(Convention::cochain)).scalar == doctest::Approx(2.0).epsilon(1e-12));

  // Acyclic 0 -> M -> M -> 0: the coordinate is Det(f)^{-1} (chain, f in
  // degree 1 -> 0) with the identity products.
  for (const auto& fx : test::algebra_fixtures()) {
    auto m = test::random_module(fx.algebra, rng);
    auto f = test::random_invertible(m, rng);
    HilbertianChainComplex c({m, m}, {f}, Convention::chain);
    double det = fk_det(m, f).value;
    CHECK(relative(phi_via_laplacians(c).combined(), 1.0 / det) < 1e-10);
    CHECK(relative(phi_via_exact_sequences(c).combined(), 1.0 / det) < 1e-9);
    HilbertianChainComplex cc({m, m}, {f}, Convention::cochain);
    CHECK(relative(phi_via_exact_sequences(cc).combined(), det) < 1e-9);
  }
}

TEST_CASE("route equivalence on random complexes") {
  Rng rng(19);
  for (const auto& fx : test::algebra_fixtures()) {
    CAPTURE(fx.name);
    for (auto conv : {Convention::chain, Convention::cochain}) {
      for (int trial = 0; trial < 8; ++trial) {
        auto c = test::random_complex(fx.algebra, rng, 2 + trial % 3, conv);
        double lap = phi_via_laplacians(c).log_combined();
        double seq = phi_via_exact_sequences(c).log_combined();
        CHECK(std::abs(lap - seq) < 1e-8 * std::max(1.0, std::abs(lap)));
      }
    }
  }
}

TEST_CASE("torsion isomorphism is multiplicative under direct sums") {
  Rng rng(23);
  for (const auto& fx : test::algebra_fixtures()) {
    auto a = test::random_complex(fx.algebra, rng, 3, Convention::chain);
    auto b = test::random_complex(fx.algebra, rng, 3, Convention::chain);
    double sum = phi_via_exact_sequences(direct_sum(a, b)).log_combined();
    double parts = phi_via_exact_sequences(a).log_combined() + phi_via_exact_sequences(b).log_combined();
    CHECK(std::abs(sum - parts) < 1e-8 * std::max(1.0, std::abs(parts)));
  }
}

TEST_CASE("torsion isomorphism is natural for unitary changes of basis") {
  Rng rng(29);
  for (const auto& fx : test::algebra_fixtures()) {
    auto c = test::random_complex(fx.algebra, rng, 3, Convention::cochain);
    // u_i unitary for the chosen product g_i: u = g^{-1/2} w g^{1/2}.
    std::vector<BlockOp> u, u_inv;
    for (const auto& m : c.modules()) {
      const auto& g = m.reference_gram();
      auto w = random_unitary(m, rng);
      u.push_back(positive_inverse_sqrt(g) * w * positive_sqrt(g));
      u_inv.push_back(u.back().inverse());
    }
    std::vector<BlockOp> maps;
    for (int j = 0; j < c.top_degree(); ++j) maps.push_back(u[j + 1] * c.map(j) * u_inv[j]);
    HilbertianChainComplex moved(c.modules(), maps, Convention::cochain);
    CHECK(std::abs(phi_via_exact_sequences(moved).log_combined() - phi_via_exact_sequences(c).log_combined()) <
          1e-9);
  }
}

TEST_CASE("rescaling a product moves the coordinate as predicted") {
  // Scaling the product on C_i by s^2 multiplies the element of det(C_i) by
  // Det(s^2)^{-1/2} = s^{-dim C_i} and the harmonic reference in degree i
  // by s^{-b_i}; both enter with the sign (-1)^i.
  Rng rng(31);
  for (const auto& fx : test::algebra_fixtures()) {
    auto c = test::random_complex(fx.algebra, rng, 3, Convention::chain);
    auto h = hodge(c);
    for (int i = 0; i <= 3; ++i) {
      const double s = 1.7;
      std::vector<BlockOp> grams;
      for (const auto& m : c.modules()) grams.push_back(m.reference_gram());
      grams[i] = Complex(s * s) * grams[i];
      double before = phi_via_exact_sequences(c).log_combined();
      double after = phi_via_exact_sequences(c.with_grams(grams)).log_combined();
      double sign = i % 2 == 0 ? 1.0 : -1.0;
      double predicted = sign * (h.degrees[i].betti - von_neumann_dimension(c.module(i))) * std::log(s);
      CHECK(std::abs((after - before) - predicted) < 1e-8);
    }
  }
}

TEST_CASE("zeta suite") {
  // Circle read as a cochain complex: Delta_1^+ has spectrum {4}.
  auto z = zeta_suite(circle(Convention::cochain));
  CHECK(z.degrees[1].zeta_prime == doctest::Approx(-std::log(4.0)));
  CHECK(z.zeta_prime == doctest::Approx(std::log(4.0)));
  CHECK(z.factor == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(z.relative_mismatch < 1e-14);
  // theta(t) = e^{-4t} and zeta(s, lambda) = (4 + lambda)^{-s}.
  for (const auto& [t, theta] : z.degrees[1].theta) CHECK(theta == doctest::Approx(std::exp(-4.0 * t)));
  for (const auto& v : z.degrees[1].zeta) CHECK(v.value == doctest::Approx(std::pow(4.0 + v.lambda, -v.s)));

  Rng rng(37);
  auto zc = zero_complex(test::algebra_fixtures()[1].algebra, rng, 2, Convention::cochain);
  auto zz = zeta_suite(zc);
  CHECK(zz.zeta_prime == 0.0);
  CHECK(zz.factor == 1.0);

  auto s3 = test::algebra_fixtures()[3].algebra;
  for (int trial = 0; trial < 5; ++trial) {
    auto c = test::random_complex(s3, rng, 3, Convention::cochain);
    auto r = zeta_suite(c);
    CHECK(r.relative_mismatch < 1e-9);
    // The factor equals the Laplacian formula for cochain complexes.
    CHECK(relative(r.factor, phi_via_laplacians(c).scalar) < 1e-9);
    for (const auto& d : r.degrees) {
      REQUIRE(d.zeta_prime_mellin.has_value());
      CHECK(std::abs(*d.zeta_prime_mellin - d.zeta_prime) < 1e-4 * std::max(1.0, std::abs(d.zeta_prime)));
    }
  }
}

TEST_CASE("Mellin integral of a single eigenvalue") {
  for (double mu : {1e-3, 0.1, 1.0, 37.0, 1e4, 1.4e5, 1e6}) {
    auto [value, bound] = mellin_zeta_prime({{mu, 1.0}});
    CHECK(std::abs(value + std::log(mu)) < 1e-4 * std::max(1.0, std::abs(std::log(mu))));
    CHECK(bound < 1e-3);
  }
}
