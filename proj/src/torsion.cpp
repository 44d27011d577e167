#include "l2t/torsion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "l2t/errors.hpp"

namespace l2t {

// ---------------------------------------------------------------------------
// Words and group rings

Word reduce(Word w) {
  std::vector<std::pair<int, int>> out;
  for (auto [g, e] : w.letters) {
    if (e == 0) continue;
    if (!out.empty() && out.back().first == g) {
      out.back().second += e;
      if (out.back().second == 0) out.pop_back();
    } else {
      out.emplace_back(g, e);
    }
  }
  return Word{std::move(out)};
}

Word operator*(const Word& a, const Word& b) {
  Word w = a;
  w.letters.insert(w.letters.end(), b.letters.begin(), b.letters.end());
  return reduce(std::move(w));
}

Word inverse(const Word& w) {
  Word out;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) out.letters.emplace_back(it->first, -it->second);
  return out;
}

namespace {

int generator_index(std::string_view name, const std::vector<std::string>& generators) {
  for (std::size_t i = 0; i < generators.size(); ++i)
    if (generators[i] == name) return static_cast<int>(i);
  return -1;
}

int parse_exponent(std::string_view text, std::string_view token) {
  int value = 0;
  const char* begin = text.data();
  if (!text.empty() && text.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    fail(ErrorKind::ParseError, "bad exponent in '" + std::string(token) + "'");
  return value;
}

}  // namespace

Word parse_word(std::string_view text, const std::vector<std::string>& generators) {
  bool single_chars = !generators.empty() && std::all_of(generators.begin(), generators.end(),
                                                         [](const std::string& g) { return g.size() == 1; });
  Word w;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '*') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '*') ++j;
    std::string_view token = text.substr(i, j - i);
    i = j;
    std::string_view name = token;
    int exponent = 1;
    if (auto caret = token.find('^'); caret != std::string_view::npos) {
      name = token.substr(0, caret);
      exponent = parse_exponent(token.substr(caret + 1), token);
    }
    if (name == "1" && generator_index("1", generators) < 0) continue;
    if (int g = generator_index(name, generators); g >= 0) {
      w.letters.emplace_back(g, exponent);
      continue;
    }
    if (single_chars && !name.empty()) {
      // Juxtaposed single-letter generators; the exponent binds to the last.
      for (std::size_t c = 0; c < name.size(); ++c) {
        int g = generator_index(name.substr(c, 1), generators);
        if (g < 0) fail(ErrorKind::ParseError, "unknown generator in word '" + std::string(text) + "'");
        w.letters.emplace_back(g, c + 1 == name.size() ? exponent : 1);
      }
      continue;
    }
    fail(ErrorKind::ParseError, "unknown generator '" + std::string(name) + "'");
  }
  return reduce(std::move(w));
}

std::string format_word(const Word& w, const std::vector<std::string>& generators) {
  std::string out;
  for (auto [g, e] : w.letters) {
    if (!out.empty()) out += ' ';
    out += g >= 0 && g < static_cast<int>(generators.size()) ? generators[g] : "g" + std::to_string(g);
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

GroupRingElement GroupRingElement::of(long coefficient, Word w) {
  return normalize(GroupRingElement{{{coefficient, reduce(std::move(w))}}});
}

long GroupRingElement::augmentation() const {
  long acc = 0;
  for (const auto& t : terms) acc += t.coefficient;
  return acc;
}

bool GroupRingElement::operator==(const GroupRingElement& other) const {
  auto a = normalize(*this), b = normalize(other);
  if (a.terms.size() != b.terms.size()) return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i)
    if (a.terms[i].coefficient != b.terms[i].coefficient || !(a.terms[i].word == b.terms[i].word)) return false;
  return true;
}

GroupRingElement normalize(GroupRingElement a) {
  std::map<Word, long> merged;
  for (auto& t : a.terms) merged[reduce(t.word)] += t.coefficient;
  GroupRingElement out;
  for (auto& [w, c] : merged)
    if (c != 0) out.terms.push_back({c, w});
  return out;
}

GroupRingElement operator+(const GroupRingElement& a, const GroupRingElement& b) {
  GroupRingElement out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return normalize(std::move(out));
}

GroupRingElement operator-(const GroupRingElement& a) {
  GroupRingElement out = a;
  for (auto& t : out.terms) t.coefficient = -t.coefficient;
  return out;
}

GroupRingElement operator*(const Word& g, const GroupRingElement& a) {
  GroupRingElement out;
  for (const auto& t : a.terms) out.terms.push_back({t.coefficient, g * t.word});
  return normalize(std::move(out));
}

GroupRingElement operator*(const GroupRingElement& a, const Word& g) {
  GroupRingElement out;
  for (const auto& t : a.terms) out.terms.push_back({t.coefficient, t.word * g});
  return normalize(std::move(out));
}

// ---------------------------------------------------------------------------
// Cell complexes

int CellComplex::euler_characteristic() const {
  int chi = 0;
  for (int q = 0; q <= dimension(); ++q) chi += (q % 2 == 0 ? 1 : -1) * cell_count(q);
  return chi;
}

void CellComplex::validate() const {
  require(!cells.empty(), ErrorKind::ValidationError, "cell complex without cells");
  require(static_cast<int>(boundaries.size()) == dimension(), ErrorKind::ValidationError,
          "expected one boundary matrix per positive dimension");
  for (int q = 1; q <= dimension(); ++q) {
    const auto& b = boundaries[q - 1];
    require(static_cast<int>(b.size()) == cell_count(q - 1), ErrorKind::ValidationError,
            "boundary " + std::to_string(q) + " has the wrong number of rows");
    for (const auto& row : b)
      require(static_cast<int>(row.size()) == cell_count(q), ErrorKind::ValidationError,
              "boundary " + std::to_string(q) + " has the wrong number of columns");
    for (const auto& row : b)
      for (const auto& entry : row)
        for (const auto& t : entry.terms)
          for (auto [g, e] : t.word.letters)
            require(g >= 0 && g < static_cast<int>(generators.size()), ErrorKind::ValidationError,
                    "word uses an undeclared generator");
  }
}

std::string_view to_string(Side s) { return s == Side::right ? "right" : "left"; }

Side parse_side(std::string_view s) {
  if (s == "right") return Side::right;
  if (s == "left") return Side::left;
  fail(ErrorKind::ValidationError, "unknown side '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Representations

namespace {

// R(g)^e for a single generator.
BlockOp right_letter(const GroupRepresentation& rho, int g, int e) {
  require(g >= 0 && g < static_cast<int>(rho.generator_images.size()), ErrorKind::ValidationError,
          "representation has no image for generator " + std::to_string(g));
  BlockOp base = rho.generator_images[g];
  // For a left representation the images are L(g) = R(g)^-1.
  bool invert = (e < 0) != (rho.side == Side::left);
  if (invert) base = base.inverse();
  BlockOp out = rho.module.identity();
  for (int i = 0; i < std::abs(e); ++i) out = base * out;
  return out;
}

}  // namespace

BlockOp right_action(const GroupRepresentation& rho, const Word& w) {
  BlockOp out = rho.module.identity();
  // v (w x) = (v w) x, so R(w x) = R(x) R(w).
  for (auto [g, e] : w.letters) out = right_letter(rho, g, e) * out;
  return out;
}

BlockOp left_action(const GroupRepresentation& rho, const Word& w) {
  BlockOp out = rho.module.identity();
  // L(g) = R(g)^-1 = R(g^-1).
  for (auto [g, e] : w.letters) out = out * right_letter(rho, g, -e);
  return out;
}

BlockOp right_action(const GroupRepresentation& rho, const GroupRingElement& a) {
  BlockOp out = rho.module.zero();
  for (const auto& t : a.terms) out = out + Complex(static_cast<double>(t.coefficient)) * right_action(rho, t.word);
  return out;
}

BlockOp left_action(const GroupRepresentation& rho, const GroupRingElement& a) {
  BlockOp out = rho.module.zero();
  for (const auto& t : a.terms) out = out + Complex(static_cast<double>(t.coefficient)) * left_action(rho, t.word);
  return out;
}

namespace {

HilbertianModule power(const HilbertianModule& m, int n) {
  if (n == 0) return HilbertianModule(m.algebra_ptr(), std::vector<int>(m.multiplicities().size(), 0));
  HilbertianModule out = m;
  for (int i = 1; i < n; ++i) out = direct_sum(out, m);
  return out;
}

std::vector<int> scaled_mult(const HilbertianModule& m, int n) {
  std::vector<int> out;
  for (int mk : m.multiplicities()) out.push_back(n * mk);
  return out;
}

// Block matrix whose (r, c) entry is entry(r, c) on copies of m.
template <class F>
BlockOp copies_matrix(const HilbertianModule& m, int rows, int cols, F&& entry) {
  if (rows == 0 || cols == 0) return BlockOp::zero(scaled_mult(m, rows), scaled_mult(m, cols));
  std::vector<int> mult(m.multiplicities().begin(), m.multiplicities().end());
  std::vector<std::vector<int>> row_mults(rows, mult), col_mults(cols, mult);
  std::vector<std::vector<BlockOp>> entries(rows, std::vector<BlockOp>(cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) entries[r][c] = entry(r, c);
  return block_matrix(entries, row_mults, col_mults);
}

}  // namespace

HilbertianChainComplex assemble_coefficients(const CellComplex& k, const GroupRepresentation& rho,
                                             Convention convention) {
  k.validate();
  require(rho.generator_images.size() == k.generators.size(), ErrorKind::ShapeMismatch,
          "representation has " + std::to_string(rho.generator_images.size()) + " generator images, complex has " +
              std::to_string(k.generators.size()) + " generators");
  for (const auto& img : rho.generator_images) check_morphism_shape(rho.module, rho.module, img);

  std::vector<HilbertianModule> modules;
  for (int q = 0; q <= k.dimension(); ++q) modules.push_back(power(rho.module, k.cell_count(q)));
  std::vector<BlockOp> maps;
  for (int q = 1; q <= k.dimension(); ++q) {
    const auto& b = k.boundaries[q - 1];
    int lower = k.cell_count(q - 1), upper = k.cell_count(q);
    auto nonzero_or_empty = [](const GroupRingElement& a, auto&& act) { return a.is_zero() ? BlockOp() : act(a); };
    if (convention == Convention::chain) {
      maps.push_back(copies_matrix(rho.module, lower, upper, [&](int j, int i) {
        return nonzero_or_empty(b[j][i], [&](const GroupRingElement& a) { return right_action(rho, a); });
      }));
    } else {
      maps.push_back(copies_matrix(rho.module, upper, lower, [&](int i, int j) {
        return nonzero_or_empty(b[j][i], [&](const GroupRingElement& a) { return left_action(rho, a); });
      }));
    }
  }
  HilbertianChainComplex c(std::move(modules), std::move(maps), convention);
  auto report = validate_complex(c, 1e-9);
  require(report.max_square_residual <= 1e-9, ErrorKind::RelationViolation,
          "d^2 != 0 through the representation (relative residual " + std::to_string(report.max_square_residual) +
              "); the generator images violate a relation of the group");
  return c;
}

UnimodularityReport check_unimodular(const GroupRepresentation& rho, const std::vector<std::string>& names,
                                     double tol) {
  UnimodularityReport report;
  const BlockOp& g = rho.module.reference_gram();
  for (std::size_t i = 0; i < rho.generator_images.size(); ++i) {
    const BlockOp& img = rho.generator_images[i];
    GeneratorDeterminant d;
    d.name = i < names.size() ? names[i] : "g" + std::to_string(i);
    d.unitary = max_abs(img.adjoint() * g * img - g) <= 1e-10 * std::max(max_abs(g), 1e-300);
    d.det = fk_det(rho.module, img).value;
    d.pass = d.unitary || std::abs(d.det - 1.0) <= tol;
    report.unimodular = report.unimodular && d.pass;
    report.generators.push_back(std::move(d));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Torsion

TorsionReport torsion(const CellComplex& k, const GroupRepresentation& rho, const TorsionOptions& options) {
  k.validate();
  TorsionReport report;
  report.unimodularity = check_unimodular(rho, k.generators, options.unimodular_tol);
  if (options.require_unimodular && !report.unimodularity.unimodular) {
    std::string bad;
    for (const auto& g : report.unimodularity.generators)
      if (!g.pass) bad += (bad.empty() ? "" : ", ") + g.name + " (Det = " + std::to_string(g.det) + ")";
    fail(ErrorKind::NotUnimodular, "Det_tau != 1 for " + bad);
  }
  auto c = assemble_coefficients(k, rho, options.convention);
  report.euler_characteristic = k.euler_characteristic();
  report.convention = options.convention;
  report.verdicts = determinant_class_check(c, options.hodge);
  auto lap = phi_via_laplacians(c, options.hodge);
  auto seq = phi_via_exact_sequences(c, options.hodge);
  report.hodge = hodge(c, options.hodge);
  for (const auto& d : report.hodge.degrees) {
    report.betti.push_back(d.betti);
    report.harmonic_hashes.push_back(gram_hash(d.harmonic_basis));
  }
  report.log_coordinate = lap.log_combined();
  report.coordinate = lap.combined();
  report.exact_sequence_coordinate = seq.combined();
  report.route_discrepancy = std::abs(report.exact_sequence_coordinate - report.coordinate) / report.coordinate;
  report.module_reference_hash = gram_hash(rho.module.reference_gram());
  std::ostringstream prov;
  prov << "lifts as listed in the complex; " << to_string(options.convention) << " convention; " << to_string(rho.side)
       << " generator images; chi = " << report.euler_characteristic;
  report.provenance = prov.str();
  return report;
}

CellComplex relift(const CellComplex& k, int q, int index, const Word& g) {
  k.validate();
  require(q >= 0 && q <= k.dimension() && index >= 0 && index < k.cell_count(q), ErrorKind::ValidationError,
          "no such cell");
  CellComplex out = k;
  if (q >= 1)
    for (auto& row : out.boundaries[q - 1]) row[index] = g * row[index];
  if (q < k.dimension())
    for (auto& entry : out.boundaries[q][index]) entry = entry * inverse(g);
  return out;
}

// ---------------------------------------------------------------------------
// Subdivision

namespace {

std::vector<std::vector<long>> augmented(const GroupRingMatrix& b) {
  std::vector<std::vector<long>> out;
  for (const auto& row : b) {
    std::vector<long> r;
    for (const auto& e : row) r.push_back(e.augmentation());
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

Subdivision elementary_subdivide(const CellComplex& k, const SubdivisionData& data,
                                 const std::vector<GroupRepresentation>& probes) {
  k.validate();
  const int q = data.dimension;
  auto invalid = [](const std::string& msg) { fail(ErrorKind::InvalidSubdivision, msg); };
  if (q < 1 || q > k.dimension()) invalid("cannot split a cell of dimension " + std::to_string(q));
  if (data.cell < 0 || data.cell >= k.cell_count(q)) invalid("no " + std::to_string(q) + "-cell " +
                                                             std::to_string(data.cell));
  const int lower = k.cell_count(q - 1);
  if (static_cast<int>(data.plus_boundary.size()) != lower + 1 ||
      static_cast<int>(data.minus_boundary.size()) != lower + 1)
    invalid("boundaries of e+ and e- need " + std::to_string(lower + 1) + " entries");
  if (static_cast<int>(data.separator_boundary.size()) != k.cell_count(q - 2))
    invalid("boundary of e0 needs " + std::to_string(k.cell_count(q - 2)) + " entries");

  // The quotient by psi(C(K)) is e+ -> e0 (up to orientation of e0).
  const auto& plus0 = data.plus_boundary[lower];
  if (plus0.terms.size() != 1 || std::abs(plus0.terms[0].coefficient) != 1 || !plus0.terms[0].word.letters.empty())
    invalid("e0 must appear in the boundary of e+ with coefficient +1 or -1");
  if (!(data.minus_boundary[lower] == -plus0)) invalid("e0 must cancel between the boundaries of e+ and e-");
  for (int j = 0; j < lower; ++j)
    if (!(data.plus_boundary[j] + data.minus_boundary[j] == k.boundaries[q - 1][j][data.cell]))
      invalid("boundary of e+ plus boundary of e- differs from the boundary of e at cell " + k.cells[q - 1][j]);

  Subdivision s;
  CellComplex& kp = s.complex;
  kp = k;
  kp.cells[q][data.cell] = data.plus_label;
  kp.cells[q].push_back(data.minus_label);
  kp.cells[q - 1].push_back(data.separator_label);
  // d_q: new row for e0, column e replaced by e+, column e- appended.
  auto& dq = kp.boundaries[q - 1];
  dq.push_back(std::vector<GroupRingElement>(k.cell_count(q)));
  for (int j = 0; j <= lower; ++j) {
    dq[j][data.cell] = data.plus_boundary[j];
    dq[j].push_back(data.minus_boundary[j]);
  }
  if (q >= 2)
    for (int j = 0; j < k.cell_count(q - 2); ++j) kp.boundaries[q - 2][j].push_back(data.separator_boundary[j]);
  if (q < k.dimension()) kp.boundaries[q].push_back(kp.boundaries[q][data.cell]);
  kp.validate();

  // d'^2 = 0 must survive the augmentation Z[pi] -> Z.
  for (int p = 2; p <= kp.dimension(); ++p) {
    auto a = augmented(kp.boundaries[p - 2]), b = augmented(kp.boundaries[p - 1]);
    const std::size_t cols = b.empty() ? 0 : b[0].size();
    for (std::size_t r = 0; r < a.size(); ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        long acc = 0;
        for (std::size_t m = 0; m < b.size(); ++m) acc += a[r][m] * b[m][c];
        if (acc != 0) invalid("d^2 != 0 after subdivision (augmented entry " + std::to_string(acc) + ")");
      }
  }
  for (const auto& probe : probes) {
    try {
      assemble_coefficients(kp, probe);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::RelationViolation) invalid(std::string("d^2 != 0 through a probe: ") + err.what());
      throw;
    }
  }

  for (int p = 0; p <= k.dimension(); ++p) {
    std::vector<std::vector<int>> m(kp.cell_count(p), std::vector<int>(k.cell_count(p), 0));
    for (int i = 0; i < k.cell_count(p); ++i) m[i][i] = 1;
    if (p == q) m[kp.cell_count(p) - 1][data.cell] = 1;
    s.chain_map.push_back(std::move(m));
  }
  return s;
}

std::vector<BlockOp> coefficient_chain_map(const CellComplex& k, const Subdivision& s, const HilbertianModule& m,
                                           Convention convention) {
  std::vector<BlockOp> out;
  for (int p = 0; p <= k.dimension(); ++p) {
    const auto& psi = s.chain_map[p];
    int rows = s.complex.cell_count(p), cols = k.cell_count(p);
    auto entry = [&](int r, int c) {
      return psi[r][c] == 0 ? BlockOp() : BlockOp::scalar(m.multiplicities(), static_cast<double>(psi[r][c]));
    };
    if (convention == Convention::chain)
      out.push_back(copies_matrix(m, rows, cols, entry));
    else
      out.push_back(copies_matrix(m, cols, rows, [&](int c, int r) { return entry(r, c); }));
  }
  return out;
}

double homology_transport(const HodgeData& from, const HodgeData& to, const HilbertianChainComplex& target,
                          const std::vector<BlockOp>& f, std::vector<double>* per_degree) {
  require(from.degrees.size() == to.degrees.size() && f.size() == to.degrees.size(), ErrorKind::ValidationError,
          "complexes of different length");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& x = from.degrees[i];
    const auto& y = to.degrees[i];
    require(std::equal(x.harmonic.multiplicities().begin(), x.harmonic.multiplicities().end(),
                       y.harmonic.multiplicities().begin(), y.harmonic.multiplicities().end()),
            ErrorKind::ValidationError, "homology of different size in degree " + std::to_string(i));
    BlockOp t = y.harmonic_basis.adjoint() * target.module(static_cast<int>(i)).reference_gram() * f[i] *
                x.harmonic_basis;
    double log_det = 0.0;
    try {
      log_det = fk_det(x.harmonic, t).log_value;
    } catch (const Error& err) {
      fail(ErrorKind::ValidationError, "the chain map is not an isomorphism on homology in degree " +
                                           std::to_string(i) + ": " + err.what());
    }
    if (per_degree) per_degree->push_back(log_det);
    acc += (i % 2 == 0 ? 1.0 : -1.0) * log_det;
  }
  return acc;
}

InvarianceReport invariance_check(const CellComplex& k, const Subdivision& s, const GroupRepresentation& rho,
                                  const TorsionOptions& options) {
  InvarianceReport report;
  report.original = torsion(k, rho, options);
  report.subdivided = torsion(s.complex, rho, options);
  auto f = coefficient_chain_map(k, s, rho.module, options.convention);
  double log_transport = 0.0;
  if (options.convention == Convention::chain) {
    auto target = assemble_coefficients(s.complex, rho, options.convention);
    log_transport = homology_transport(report.original.hodge, report.subdivided.hodge, target, f,
                                       &report.homology_log_dets);
  } else {
    // psi^* runs from C^*(K') to C^*(K); the element of K' is pulled back.
    auto target = assemble_coefficients(k, rho, options.convention);
    log_transport = -homology_transport(report.subdivided.hodge, report.original.hodge, target, f,
                                        &report.homology_log_dets);
  }
  report.pushed_coordinate = std::exp(report.original.log_coordinate + log_transport);
  report.relative_discrepancy =
      std::abs(report.pushed_coordinate - report.subdivided.coordinate) / report.subdivided.coordinate;
  return report;
}

// ---------------------------------------------------------------------------
// Fixtures

namespace fixtures {

namespace {

GroupRingElement ring(const std::vector<std::pair<long, std::string>>& terms, const std::vector<std::string>& gens) {
  GroupRingElement out;
  for (const auto& [c, w] : terms) out.terms.push_back({c, parse_word(w, gens)});
  return normalize(std::move(out));
}

}  // namespace

CellComplex interval() {
  CellComplex k;
  k.cells = {{"v0", "v1"}, {"e"}};
  k.boundaries = {{{GroupRingElement::of(-1, {})}, {GroupRingElement::of(1, {})}}};
  return k;
}

CellComplex circle(int edges) {
  require(edges >= 1, ErrorKind::ValidationError, "a circle needs at least one edge");
  CellComplex k;
  k.generators = {"t"};
  k.cells.resize(2);
  for (int j = 0; j < edges; ++j) {
    k.cells[0].push_back("v" + std::to_string(j));
    k.cells[1].push_back("e" + std::to_string(j));
  }
  GroupRingMatrix d(edges, std::vector<GroupRingElement>(edges));
  for (int j = 0; j < edges; ++j) {
    // e_j runs from v_j to v_{j+1}; the last edge ends at t v_0.
    d[j][j] = d[j][j] + GroupRingElement::of(-1, {});
    int end = (j + 1) % edges;
    Word w = j + 1 == edges ? Word{{{0, 1}}} : Word{};
    d[end][j] = d[end][j] + GroupRingElement::of(1, w);
  }
  k.boundaries = {d};
  return k;
}

CellComplex torus() {
  CellComplex k;
  k.generators = {"a", "b"};
  k.cells = {{"v"}, {"a", "b"}, {"f"}};
  const auto& g = k.generators;
  k.boundaries = {{{ring({{1, "a"}, {-1, ""}}, g), ring({{1, "b"}, {-1, ""}}, g)}},
                  {{ring({{1, ""}, {-1, "b"}}, g)}, {ring({{1, "a"}, {-1, ""}}, g)}}};
  return k;
}

CellComplex klein_bottle() {
  // One face attached along a b a b^-1.
  CellComplex k;
  k.generators = {"a", "b"};
  k.cells = {{"v"}, {"a", "b"}, {"f"}};
  const auto& g = k.generators;
  k.boundaries = {{{ring({{1, "a"}, {-1, ""}}, g), ring({{1, "b"}, {-1, ""}}, g)}},
                  {{ring({{1, ""}, {1, "a b"}}, g)}, {ring({{1, "a"}, {-1, ""}}, g)}}};
  return k;
}

CellComplex projective_plane() {
  CellComplex k;
  k.generators = {"t"};
  k.cells = {{"v"}, {"e"}, {"f"}};
  const auto& g = k.generators;
  k.boundaries = {{{ring({{1, "t"}, {-1, ""}}, g)}}, {{ring({{1, ""}, {1, "t"}}, g)}}};
  return k;
}

CellComplex lens(int n) {
  require(n >= 2, ErrorKind::ValidationError, "lens complex needs n >= 2");
  CellComplex k;
  k.generators = {"t"};
  k.cells = {{"v"}, {"e"}, {"f"}, {"c"}};
  GroupRingElement norm;
  for (int j = 0; j < n; ++j) norm.terms.push_back({1, Word{{{0, j}}}});
  norm = normalize(norm);
  const auto& g = k.generators;
  auto t_minus_1 = ring({{1, "t"}, {-1, ""}}, g);
  k.boundaries = {{{t_minus_1}}, {{norm}}, {{t_minus_1}}};
  return k;
}

SubdivisionData interval_split() {
  SubdivisionData d;
  d.dimension = 1;
  d.separator_label = "m";
  // Over (v0, v1, m): e+ = [v0, m], e- = [m, v1].
  d.plus_boundary = {GroupRingElement::of(-1, {}), {}, GroupRingElement::of(1, {})};
  d.minus_boundary = {{}, GroupRingElement::of(1, {}), GroupRingElement::of(-1, {})};
  return d;
}

SubdivisionData circle_split() {
  SubdivisionData d;
  d.dimension = 1;
  d.separator_label = "m";
  // Over (v, m): e+ runs from v to m, e- from m to t v.
  d.plus_boundary = {GroupRingElement::of(-1, {}), GroupRingElement::of(1, {})};
  d.minus_boundary = {GroupRingElement::of(1, Word{{{0, 1}}}), GroupRingElement::of(-1, {})};
  return d;
}

SubdivisionData torus_split() {
  // The diagonal c from v to (a b) v cuts f into two triangles.
  SubdivisionData d;
  d.dimension = 2;
  d.plus_label = "f+";
  d.minus_label = "f-";
  d.separator_label = "c";
  std::vector<std::string> g{"a", "b"};
  d.plus_boundary = {ring({{1, ""}}, g), ring({{1, "a"}}, g), ring({{-1, ""}}, g)};
  d.minus_boundary = {ring({{-1, "b"}}, g), ring({{-1, ""}}, g), ring({{1, ""}}, g)};
  d.separator_boundary = {ring({{1, "a b"}, {-1, ""}}, g)};
  return d;
}

std::vector<std::string> complex_names() {
  return {"interval", "circle", "circle:<k>", "torus", "klein", "rp2", "lens:<n>"};
}

namespace {

int suffix_number(std::string_view name, std::string_view prefix) {
  std::string_view rest = name.substr(prefix.size());
  int value = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
  require(ec == std::errc() && ptr == rest.data() + rest.size(), ErrorKind::ValidationError,
          "bad fixture parameter in '" + std::string(name) + "'");
  return value;
}

}  // namespace

CellComplex complex_by_name(std::string_view name) {
  if (name == "interval") return interval();
  if (name == "circle") return circle(1);
  if (name.starts_with("circle:")) return circle(suffix_number(name, "circle:"));
  if (name == "torus") return torus();
  if (name == "klein") return klein_bottle();
  if (name == "rp2") return projective_plane();
  if (name.starts_with("lens:")) return lens(suffix_number(name, "lens:"));
  fail(ErrorKind::ValidationError, "unknown complex fixture '" + std::string(name) + "'");
}

SubdivisionData subdivision_by_name(std::string_view name) {
  if (name == "interval") return interval_split();
  if (name == "circle") return circle_split();
  if (name == "torus") return torus_split();
  fail(ErrorKind::ValidationError, "no subdivision fixture for '" + std::string(name) + "'");
}

GroupRepresentation scalar_representation(const std::vector<Complex>& values) {
  auto alg = std::make_shared<const Algebra>(std::vector<AlgebraBlock>{{1, 1.0}});
  GroupRepresentation rho{HilbertianModule::free(alg), {}, Side::right};
  for (Complex v : values) rho.generator_images.push_back(BlockOp({Matrix::Constant(1, 1, v)}));
  return rho;
}

GroupRepresentation regular_representation(const GroupTable& table, const std::vector<int>& generator_elements) {
  auto ga = build_group_algebra(table);
  GroupRepresentation rho{HilbertianModule::free(ga.algebra), {}, Side::right};
  for (int g : generator_elements) {
    require(g >= 0 && g < table.order(), ErrorKind::ValidationError, "group element out of range");
    rho.generator_images.push_back(right_multiplication(rho.module, ga.element_images[g]));
  }
  return rho;
}

GroupRepresentation trivial_representation(const AlgebraPtr& algebra, int generators) {
  GroupRepresentation rho{HilbertianModule::free(algebra), {}, Side::right};
  for (int i = 0; i < generators; ++i) rho.generator_images.push_back(rho.module.identity());
  return rho;
}

}  // namespace fixtures

}  // namespace l2t
