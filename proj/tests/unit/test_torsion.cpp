#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "l2t/errors.hpp"
#include "l2t/torsion.hpp"

using namespace l2t;
using test::relative;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::ValidationError;
}

Complex unit(double angle) { return std::polar(1.0, angle); }

// Torsion of a complex with one cell per dimension over A = C with scalar
// boundaries, straight from the definition: each nonzero d_i contributes
// |d_i|^{(-1)^i} (chain convention) and zero maps contribute nothing.
double one_cell_torsion(const std::vector<Complex>& boundaries) {
  double acc = 1.0;
  for (std::size_t q = 1; q <= boundaries.size(); ++q) {
    double d = std::abs(boundaries[q - 1]);
    if (d > 1e-12) acc *= std::pow(d, q % 2 == 0 ? 1.0 : -1.0);
  }
  return acc;
}

GroupTable z2xz3() { return GroupTable::product_of(GroupTable::cyclic(2), GroupTable::cyclic(3)); }

TorsionOptions cochain() {
  TorsionOptions o;
  o.convention = Convention::cochain;
  return o;
}

}  // namespace

TEST_CASE("words and group rings") {
  std::vector<std::string> g{"a", "b"};
  CHECK(parse_word("", g).letters.empty());
  CHECK(parse_word("1", g).letters.empty());
  CHECK(parse_word("a b^-1 b", g) == parse_word("a", g));
  CHECK(parse_word("ab", g) == parse_word("a*b", g));
  CHECK(parse_word("a^3 a^-3", g).letters.empty());
  CHECK(format_word(parse_word("a b^-2", g), g) == "a b^-2");
  CHECK(inverse(parse_word("a b", g)) == parse_word("b^-1 a^-1", g));
  CHECK(kind_of([&] { parse_word("c", g); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { parse_word("a^x", g); }) == ErrorKind::ParseError);
  std::vector<std::string> long_names{"x1", "x2"};
  CHECK(parse_word("x1 x2^2", long_names).letters.size() == 2);
  CHECK(kind_of([&] { parse_word("x1x2", long_names); }) == ErrorKind::ParseError);

  auto a = GroupRingElement::of(1, parse_word("a", g));
  auto one = GroupRingElement::of(1, {});
  CHECK((a + -a).is_zero());
  CHECK((a + one + a).augmentation() == 3);
  CHECK(parse_word("b", g) * (a + -one) == GroupRingElement::of(1, parse_word("b a", g)) + -GroupRingElement::of(1, parse_word("b", g)));
}

TEST_CASE("fixture complexes") {
  CHECK(fixtures::interval().euler_characteristic() == 1);
  CHECK(fixtures::circle(4).euler_characteristic() == 0);
  CHECK(fixtures::torus().euler_characteristic() == 0);
  CHECK(fixtures::klein_bottle().euler_characteristic() == 0);
  CHECK(fixtures::projective_plane().euler_characteristic() == 1);
  CHECK(fixtures::lens(5).euler_characteristic() == 0);
  for (const char* name : {"interval", "circle", "circle:3", "torus", "klein", "rp2", "lens:4"})
    CHECK_NOTHROW(fixtures::complex_by_name(name).validate());
  CHECK(kind_of([] { fixtures::complex_by_name("sphere"); }) == ErrorKind::ValidationError);
}

TEST_CASE("assembly examples") {
  // Circle with t acting by -1 on C: d = t - 1 = -2.
  auto rho = fixtures::scalar_representation({-1.0});
  auto c = assemble_coefficients(fixtures::circle(), rho);
  CHECK(c.map(0)[0](0, 0) == Complex(-2.0));
  auto cc = assemble_coefficients(fixtures::circle(), rho, Convention::cochain);
  CHECK(cc.map(0)[0](0, 0) == Complex(-2.0));

  // Regular representation of Z/n on l2(Z/n): b0 = b1 = 1/n.
  for (int n : {2, 3, 5}) {
    auto reg = fixtures::regular_representation(GroupTable::cyclic(n), {1});
    auto h = hodge(assemble_coefficients(fixtures::circle(), reg));
    CHECK(h.degrees[0].betti == doctest::Approx(1.0 / n));
    CHECK(h.degrees[1].betti == doctest::Approx(1.0 / n));
  }

  // Trivial action on l2(A): rational Betti numbers of the spaces.
  struct Case {
    const char* name;
    std::vector<double> betti;
  };
  std::vector<Case> cases{{"interval", {1, 0}},    {"circle:3", {1, 1}}, {"torus", {1, 2, 1}},
                          {"klein", {1, 1, 0}},    {"rp2", {1, 0, 0}},   {"lens:4", {1, 0, 0, 1}}};
  for (const auto& fx : test::algebra_fixtures()) {
    for (const auto& cs : cases) {
      CAPTURE(cs.name);
      auto k = fixtures::complex_by_name(cs.name);
      auto rho = fixtures::trivial_representation(fx.algebra, static_cast<int>(k.generators.size()));
      auto h = hodge(assemble_coefficients(k, rho));
      for (std::size_t q = 0; q < cs.betti.size(); ++q)
        CHECK(h.degrees[q].betti == doctest::Approx(cs.betti[q] * fx.algebra->unit_trace()));
    }
  }
}

TEST_CASE("relations are checked through the representation") {
  // S3 is not abelian, so a and b cannot both act by right multiplication
  // on the torus.
  auto rho = fixtures::regular_representation(GroupTable::symmetric3(), {1, 3});
  CHECK(kind_of([&] { assemble_coefficients(fixtures::torus(), rho); }) == ErrorKind::RelationViolation);
  // t of order 2 is not allowed on L(3, 1).
  auto z2 = fixtures::regular_representation(GroupTable::cyclic(2), {1});
  CHECK(kind_of([&] { assemble_coefficients(fixtures::lens(3), z2); }) == ErrorKind::RelationViolation);
  CHECK(kind_of([&] { assemble_coefficients(fixtures::torus(), z2); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("unimodularity") {
  auto shift = fixtures::regular_representation(GroupTable::cyclic(4), {1});
  auto r1 = check_unimodular(shift);
  CHECK(r1.unimodular);
  CHECK(r1.generators[0].unitary);
  CHECK(r1.generators[0].det == doctest::Approx(1.0));

  auto two = fixtures::scalar_representation({2.0});
  auto r2 = check_unimodular(two);
  CHECK_FALSE(r2.unimodular);
  CHECK(r2.generators[0].det == doctest::Approx(2.0));
  CHECK(kind_of([&] { torsion(fixtures::circle(), two); }) == ErrorKind::NotUnimodular);

  auto cc = std::make_shared<const Algebra>(std::vector<AlgebraBlock>{{1, 0.5}, {1, 0.5}});
  GroupRepresentation skew{HilbertianModule::free(cc), {BlockOp({Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 0.5)})},
                           Side::right};
  auto r3 = check_unimodular(skew);
  CHECK(r3.unimodular);
  CHECK_FALSE(r3.generators[0].unitary);
  CHECK(r3.generators[0].det == doctest::Approx(1.0));
}

TEST_CASE("torsion of one-cell complexes against the classical formula") {
  // Circle: 1 / |rho(t) - 1|.
  for (double angle : {std::numbers::pi, 1.0, 2.5}) {
    Complex z = unit(angle);
    auto r = torsion(fixtures::circle(), fixtures::scalar_representation({z}));
    CHECK(relative(r.coordinate, one_cell_torsion({z - 1.0})) < 1e-12);
    CHECK(relative(r.coordinate, 1.0 / std::abs(z - 1.0)) < 1e-12);
    CHECK(r.route_discrepancy < 1e-9);
  }
  auto half = torsion(fixtures::circle(), fixtures::scalar_representation({-1.0}));
  CHECK(half.coordinate == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(half.euler_characteristic == 0);

  // RP2 with t = -1: d1 = -2, d2 = 0.
  auto rp2 = torsion(fixtures::projective_plane(), fixtures::scalar_representation({-1.0}));
  CHECK(relative(rp2.coordinate, one_cell_torsion({-2.0, 0.0})) < 1e-12);
  CHECK(rp2.betti[2] == doctest::Approx(1.0));

  // Lens with a primitive character: |z - 1|^-2.
  for (int n : {3, 5}) {
    Complex z = unit(2.0 * std::numbers::pi / n);
    Complex norm = 0.0;
    for (int j = 0; j < n; ++j) norm += std::pow(z, j);
    auto r = torsion(fixtures::lens(n), fixtures::scalar_representation({z}));
    CHECK(relative(r.coordinate, one_cell_torsion({z - 1.0, norm, z - 1.0})) < 1e-10);
  }
}

TEST_CASE("interval torsion") {
  // Delta_1^+ = {2}, Delta_0^+ = {2}: coordinate 2^{-1/2}.
  auto rho = fixtures::trivial_representation(std::make_shared<const Algebra>(std::vector<AlgebraBlock>{{1, 1.0}}), 0);
  auto r = torsion(fixtures::interval(), rho);
  CHECK(r.euler_characteristic == 1);
  CHECK(r.betti[0] == doctest::Approx(1.0));
  CHECK(r.coordinate == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-14));
  CHECK(r.exact_sequence_coordinate == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-12));
}

TEST_CASE("lens torsion with the regular representation") {
  // Decompose l2(Z/n) into characters t -> z^j with trace weight 1/n each;
  // every character contributes its classical torsion to the power 1/n.
  for (int n : {2, 3, 5, 6}) {
    CAPTURE(n);
    double log_oracle = 0.0;
    for (int j = 0; j < n; ++j) {
      Complex z = unit(2.0 * std::numbers::pi * j / n);
      Complex norm = 0.0;
      for (int m = 0; m < n; ++m) norm += std::pow(z, m);
      log_oracle += std::log(one_cell_torsion({z - 1.0, norm, z - 1.0})) / n;
    }
    auto reg = fixtures::regular_representation(GroupTable::cyclic(n), {1});
    auto r = torsion(fixtures::lens(n), reg);
    CHECK(std::abs(r.log_coordinate - log_oracle) < 1e-9);
    // The character product telescopes to n^{-1/n}.
    CHECK(relative(r.coordinate, std::pow(n, -1.0 / n)) < 1e-9);
    CHECK(r.route_discrepancy < 1e-8);
    CHECK(r.betti[0] == doctest::Approx(1.0 / n));
    CHECK(r.betti[3] == doctest::Approx(1.0 / n));
  }
}

TEST_CASE("homology and cohomology coordinates are reciprocal for unitary representations") {
  struct Case {
    CellComplex k;
    GroupRepresentation rho;
  };
  std::vector<Case> cases{
      {fixtures::torus(), fixtures::regular_representation(z2xz3(), {3, 1})},
      {fixtures::torus(), fixtures::scalar_representation({unit(0.7), unit(-1.9)})},
      {fixtures::klein_bottle(), fixtures::regular_representation(z2xz3(), {3, 1})},
      {fixtures::klein_bottle(), fixtures::scalar_representation({-1.0, unit(0.4)})},
      {fixtures::projective_plane(), fixtures::regular_representation(GroupTable::cyclic(2), {1})},
      {fixtures::projective_plane(), fixtures::scalar_representation({-1.0})},
      {fixtures::lens(4), fixtures::regular_representation(GroupTable::cyclic(4), {1})},
  };
  for (const auto& cs : cases) {
    auto hom = torsion(cs.k, cs.rho);
    auto coh = torsion(cs.k, cs.rho, cochain());
    CHECK(std::abs(hom.log_coordinate + coh.log_coordinate) < 1e-8);
    for (std::size_t q = 0; q < hom.betti.size(); ++q) CHECK(hom.betti[q] == doctest::Approx(coh.betti[q]));
  }
}

TEST_CASE("lift independence") {
  auto cc = std::make_shared<const Algebra>(std::vector<AlgebraBlock>{{1, 0.5}, {1, 0.5}});
  GroupRepresentation skew{HilbertianModule::free(cc), {BlockOp({Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 0.5)})},
                           Side::right};
  Word t{{{0, 1}}};
  for (auto conv : {Convention::chain, Convention::cochain}) {
    TorsionOptions opt;
    opt.convention = conv;
    auto k = fixtures::circle(2);
    double base = torsion(k, skew, opt).log_coordinate;
    for (int q : {0, 1})
      for (int i : {0, 1}) {
        CHECK(std::abs(torsion(relift(k, q, i, t), skew, opt).log_coordinate - base) < 1e-9);
        CHECK(std::abs(torsion(relift(k, q, i, inverse(t) * inverse(t)), skew, opt).log_coordinate - base) < 1e-9);
      }

    auto reg = fixtures::regular_representation(z2xz3(), {3, 1});
    auto torus = fixtures::torus();
    double tb = torsion(torus, reg, opt).log_coordinate;
    Word ab{{{0, 1}, {1, 1}}};
    for (int q : {0, 1, 2})
      CHECK(std::abs(torsion(relift(torus, q, 0, ab), reg, opt).log_coordinate - tb) < 1e-9);
  }

  // Negative control: with t acting by 3 a new lift of a q-cell moves the
  // coordinate by Det(rho(t))^{(-1)^q}.
  auto three = fixtures::scalar_representation({3.0});
  TorsionOptions loose;
  loose.require_unimodular = false;
  auto k = fixtures::circle(2);
  double base = torsion(k, three, loose).log_coordinate;
  CHECK(torsion(relift(k, 1, 0, t), three, loose).log_coordinate - base == doctest::Approx(-std::log(3.0)));
  CHECK(torsion(relift(k, 0, 1, t), three, loose).log_coordinate - base == doctest::Approx(std::log(3.0)));
}

TEST_CASE("metric independence when chi = 0") {
  Rng rng(61);
  auto reg = fixtures::regular_representation(GroupTable::product_of(GroupTable::cyclic(2), GroupTable::cyclic(2)),
                                              {2, 1});
  for (auto conv : {Convention::chain, Convention::cochain}) {
    TorsionOptions opt;
    opt.convention = conv;
    for (int trial = 0; trial < 5; ++trial) {
      auto moved = reg;
      moved.module = reg.module.with_reference(random_positive(reg.module, rng, 0.2, 5.0));
      auto before = torsion(fixtures::torus(), reg, opt);
      auto after = torsion(fixtures::torus(), moved, opt);
      // Compare against the same reference on H_* through the identity map.
      auto target = assemble_coefficients(fixtures::torus(), moved, conv);
      std::vector<BlockOp> id;
      for (const auto& m : target.modules()) id.push_back(m.identity());
      double shift = homology_transport(before.hodge, after.hodge, target, id);
      CHECK(std::abs(before.log_coordinate + shift - after.log_coordinate) < 1e-8);
      CHECK(before.module_reference_hash != after.module_reference_hash);
    }
  }

  // Acyclic unimodular case: the number itself is invariant.
  auto cc = std::make_shared<const Algebra>(std::vector<AlgebraBlock>{{1, 0.5}, {1, 0.5}});
  GroupRepresentation skew{HilbertianModule::free(cc), {BlockOp({Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 0.5)})},
                           Side::right};
  double base = torsion(fixtures::circle(3), skew).coordinate;
  for (int trial = 0; trial < 5; ++trial) {
    auto moved = skew;
    moved.module = skew.module.with_reference(random_positive(skew.module, rng, 0.2, 5.0));
    CHECK(relative(torsion(fixtures::circle(3), moved).coordinate, base) < 1e-8);
  }

  // chi = 1: scaling the product by s^2 leaves the Laplacians alone, but
  // in a common reference the element moves by s^chi.
  auto one = std::make_shared<const Algebra>(std::vector<AlgebraBlock>{{1, 1.0}});
  auto triv = fixtures::trivial_representation(one, 0);
  auto scaled = triv;
  scaled.module = triv.module.with_reference(BlockOp::scalar(triv.module.multiplicities(), 4.0));
  auto before = torsion(fixtures::interval(), triv);
  auto after = torsion(fixtures::interval(), scaled);
  auto target = assemble_coefficients(fixtures::interval(), scaled);
  std::vector<BlockOp> id;
  for (const auto& m : target.modules()) id.push_back(m.identity());
  double mismatch = before.log_coordinate + homology_transport(before.hodge, after.hodge, target, id) -
                    after.log_coordinate;
  CHECK(mismatch == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("elementary subdivision") {
  auto interval = fixtures::interval();
  auto s = elementary_subdivide(interval, fixtures::interval_split());
  CHECK(s.complex.cell_count(0) == 3);
  CHECK(s.complex.cell_count(1) == 2);
  CHECK(s.complex.euler_characteristic() == 1);

  auto circle = fixtures::circle();
  auto sc = elementary_subdivide(circle, fixtures::circle_split(), {fixtures::scalar_representation({unit(1.3)})});
  CHECK(sc.complex.cell_count(1) == 2);
  // psi is a chain map through a representation.
  auto rho = fixtures::regular_representation(GroupTable::cyclic(3), {1});
  auto c = assemble_coefficients(circle, rho);
  auto cp = assemble_coefficients(sc.complex, rho);
  auto psi = coefficient_chain_map(circle, sc, rho.module, Convention::chain);
  CHECK(max_abs(cp.map(0) * psi[1] - psi[0] * c.map(0)) < 1e-12);

  auto bad = fixtures::circle_split();
  bad.plus_boundary[1] = GroupRingElement::of(2, {});
  bad.minus_boundary[1] = GroupRingElement::of(-2, {});
  CHECK(kind_of([&] { elementary_subdivide(circle, bad); }) == ErrorKind::InvalidSubdivision);
  auto bad2 = fixtures::circle_split();
  bad2.minus_boundary[0] = GroupRingElement::of(1, {});
  CHECK(kind_of([&] { elementary_subdivide(circle, bad2); }) == ErrorKind::InvalidSubdivision);

  // A separator whose boundary breaks d^2 = 0 only through the group.
  auto probe = fixtures::regular_representation(z2xz3(), {3, 1});
  auto bad3 = fixtures::torus_split();
  bad3.separator_boundary = {GroupRingElement::of(1, Word{{{0, 1}, {1, 2}}}) + GroupRingElement::of(-1, {})};
  CHECK_NOTHROW(elementary_subdivide(fixtures::torus(), fixtures::torus_split(), {probe}));
  CHECK(kind_of([&] { elementary_subdivide(fixtures::torus(), bad3, {probe}); }) == ErrorKind::InvalidSubdivision);
}

TEST_CASE("combinatorial invariance under subdivision") {
  auto one = std::make_shared<const Algebra>(std::vector<AlgebraBlock>{{1, 1.0}});
  auto interval = fixtures::interval();
  auto si = elementary_subdivide(interval, fixtures::interval_split());
  auto ri = invariance_check(interval, si, fixtures::trivial_representation(one, 0));
  CHECK(ri.relative_discrepancy < 1e-9);
  // 2^{-1/2} pushed by |Det psi_0| = 2/sqrt(6) gives 3^{-1/2}.
  CHECK(ri.subdivided.coordinate == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(std::exp(ri.homology_log_dets[0]) == doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-12));

  auto circle = fixtures::circle();
  auto sc = elementary_subdivide(circle, fixtures::circle_split());
  auto torus = fixtures::torus();
  auto st = elementary_subdivide(torus, fixtures::torus_split());
  for (auto conv : {Convention::chain, Convention::cochain}) {
    TorsionOptions opt;
    opt.convention = conv;
    CHECK(invariance_check(circle, sc, fixtures::scalar_representation({-1.0}), opt).relative_discrepancy < 1e-9);
    for (int n : {2, 3, 4}) {
      auto r = invariance_check(circle, sc, fixtures::regular_representation(GroupTable::cyclic(n), {1}), opt);
      CHECK(r.relative_discrepancy < 1e-8);
    }
    CHECK(invariance_check(torus, st, fixtures::regular_representation(z2xz3(), {3, 1}), opt).relative_discrepancy <
          1e-8);
    CHECK(invariance_check(torus, st, fixtures::trivial_representation(one, 2), opt).relative_discrepancy < 1e-8);
    // A second subdivision of the already subdivided circle.
    auto again = fixtures::circle_split();
    SubdivisionData d2;
    d2.dimension = 1;
    d2.cell = 0;
    d2.separator_label = "m2";
    // Split e+ (from v to m) at m2; the 0-cells are now (v, m, m2).
    d2.plus_boundary = {GroupRingElement::of(-1, {}), {}, GroupRingElement::of(1, {})};
    d2.minus_boundary = {{}, GroupRingElement::of(1, {}), GroupRingElement::of(-1, {})};
    auto s2 = elementary_subdivide(sc.complex, d2);
    auto rho = fixtures::regular_representation(GroupTable::cyclic(3), {1});
    CHECK(invariance_check(sc.complex, s2, rho, opt).relative_discrepancy < 1e-8);
  }
}
