#include "l2t/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "l2t/errors.hpp"

namespace l2t::io {

namespace {

constexpr std::string_view fixture_prefix = "fixture:";

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  fail(ErrorKind::ParseError, (where.empty() ? "" : where + ": ") + what);
}

// Message of a nested error without its kind prefix.
std::string detail(const Error& e) {
  std::string w = e.what();
  auto colon = w.find(": ");
  return colon == std::string::npos ? w : w.substr(colon + 2);
}

const Json& field(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) parse_fail(where, "missing field \"" + key + "\"");
  return *it;
}

void allow_only(const Json& j, std::initializer_list<std::string_view> keys, const std::string& where) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  for (const auto& [k, v] : j.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      fail(ErrorKind::ValidationError, where + ": unknown field \"" + k + "\"");
}

template <class T>
T get(const Json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    parse_fail(where, e.what());
  }
}

std::optional<std::string> fixture_name(const Json& j) {
  if (!j.is_string()) return std::nullopt;
  std::string s = j.get<std::string>();
  if (!s.starts_with(fixture_prefix)) return std::nullopt;
  return s.substr(fixture_prefix.size());
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int to_int(const std::string& s, const std::string& where) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) parse_fail(where, "expected an integer, got \"" + s + "\"");
  return v;
}

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    parse_fail(where, "expected a number, got \"" + s + "\"");
  }
}

Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  parse_fail(where, "expected a number or an [re, im] pair");
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

GroupRingElement ring_from_json(const Json& j, const std::vector<std::string>& gens, const std::string& where) {
  if (!j.is_array()) parse_fail(where, "expected a list of [coefficient, word] pairs");
  GroupRingElement out;
  for (std::size_t t = 0; t < j.size(); ++t) {
    const Json& term = j[t];
    std::string w = where + "[" + std::to_string(t) + "]";
    if (!term.is_array() || term.size() != 2 || !term[1].is_string())
      parse_fail(w, "expected [signed integer, word]");
    long c = 0;
    if (term[0].is_number_integer()) {
      c = term[0].get<long>();
    } else if (term[0].is_string()) {
      std::string s = term[0].get<std::string>();
      if (!s.empty() && s[0] == '+') s = s.substr(1);
      c = to_int(s, w);
    } else {
      parse_fail(w, "coefficient must be an integer or a signed integer string");
    }
    try {
      out.terms.push_back({c, parse_word(term[1].get<std::string>(), gens)});
    } catch (const Error& e) {
      parse_fail(w, detail(e));
    }
  }
  return normalize(std::move(out));
}

Json ring_to_json(const GroupRingElement& a, const std::vector<std::string>& gens) {
  Json out = Json::array();
  for (const auto& t : a.terms)
    out.push_back(Json::array({(t.coefficient > 0 ? "+" : "") + std::to_string(t.coefficient),
                               format_word(t.word, gens)}));
  return out;
}

std::string pointer(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

}  // namespace

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json load_document(const std::string& path_or_fixture) {
  if (path_or_fixture.starts_with(fixture_prefix)) return Json(path_or_fixture);
  std::ifstream in(path_or_fixture);
  if (!in) fail(ErrorKind::ParseError, path_or_fixture + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::ParseError, path_or_fixture + ": " + e.what());
  }
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) parse_fail(where, "expected a matrix (array of rows)");
  Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[r];
    std::string w = pointer(where, r);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) parse_fail(w, "ragged matrix row");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[c], pointer(w, c));
  }
  return m;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

GroupTable group_by_name(const std::string& name) {
  if (name == "S3") return GroupTable::symmetric3();
  if (name == "1" || name == "trivial") return GroupTable::trivial();
  auto factors = split(name, 'x');
  std::optional<GroupTable> out;
  for (const auto& f : factors) {
    if (!f.starts_with("Z/")) fail(ErrorKind::ValidationError, "unknown group \"" + name + "\"");
    GroupTable g = GroupTable::cyclic(to_int(f.substr(2), "group " + name));
    out = out ? GroupTable::product_of(*out, g) : g;
  }
  return *out;
}

AlgebraDocument algebra_from_json(const Json& j, const std::string& where) {
  AlgebraDocument doc;
  auto from_table = [&](GroupTable t) {
    doc.group = build_group_algebra(t);
    doc.algebra = doc.group->algebra;
    doc.table = std::move(t);
  };
  if (j.is_string()) {
    std::string name = j.get<std::string>();
    if (name.starts_with(fixture_prefix)) name = name.substr(fixture_prefix.size());
    if (name == "C") {
      doc.algebra = std::make_shared<const Algebra>(std::vector<AlgebraBlock>{{1, 1.0}});
    } else if (name == "C+C") {
      doc.algebra = std::make_shared<const Algebra>(std::vector<AlgebraBlock>{{1, 0.5}, {1, 0.5}});
    } else if (name.starts_with("C[") && name.ends_with("]")) {
      from_table(group_by_name(name.substr(2, name.size() - 3)));
    } else {
      fail(ErrorKind::ValidationError, where + ": unknown algebra fixture \"" + name + "\"");
    }
    return doc;
  }
  allow_only(j, {"blocks", "group_table"}, where);
  if (j.contains("blocks")) {
    std::vector<AlgebraBlock> blocks;
    const Json& b = j["blocks"];
    if (!b.is_array()) parse_fail(where + ".blocks", "expected [[n, w], ...]");
    for (std::size_t k = 0; k < b.size(); ++k) {
      std::string w = pointer(where + ".blocks", k);
      if (!b[k].is_array() || b[k].size() != 2) parse_fail(w, "expected [n, w]");
      blocks.push_back({get<int>(b[k][0], w), get<double>(b[k][1], w)});
    }
    doc.algebra = std::make_shared<const Algebra>(std::move(blocks));
    return doc;
  }
  const Json& t = field(j, "group_table", where);
  std::string w = where + ".group_table";
  allow_only(t, {"order", "product", "identity"}, w);
  int order = get<int>(field(t, "order", w), w + ".order");
  auto product = get<std::vector<std::vector<int>>>(field(t, "product", w), w + ".product");
  if (static_cast<int>(product.size()) != order) fail(ErrorKind::ValidationError, w + ": product table has wrong size");
  from_table(GroupTable(std::move(product), get<int>(field(t, "identity", w), w + ".identity")));
  return doc;
}

HilbertianModule module_from_json(const Json& j, const AlgebraDocument* inherited, const std::string& where) {
  allow_only(j, {"algebra", "multiplicities", "reference_gram", "action_generators", "generator_elements"}, where);
  AlgebraDocument own;
  const AlgebraDocument* alg = inherited;
  if (j.contains("algebra")) {
    own = algebra_from_json(j["algebra"], where + ".algebra");
    alg = &own;
  }
  if (!alg) parse_fail(where, "missing field \"algebra\"");

  std::optional<HilbertianModule> m;
  if (j.contains("multiplicities")) {
    auto mult = get<std::vector<int>>(j["multiplicities"], where + ".multiplicities");
    require(mult.size() == alg->algebra->block_count(), ErrorKind::ShapeMismatch,
            where + ": need one multiplicity per block (" + std::to_string(alg->algebra->block_count()) + ")");
    m = HilbertianModule(alg->algebra, mult);
  } else {
    const Json& gens = field(j, "action_generators", where);
    if (!gens.is_array() || gens.empty()) parse_fail(where + ".action_generators", "expected a list of matrices");
    std::vector<Matrix> images;
    for (std::size_t i = 0; i < gens.size(); ++i)
      images.push_back(matrix_from_json(gens[i], pointer(where + ".action_generators", i)));
    std::vector<AlgebraElement> spanning;
    std::vector<Matrix> spanning_images;
    if (alg->table) {
      const GroupTable& t = *alg->table;
      std::vector<int> elements;
      if (j.contains("generator_elements")) {
        elements = get<std::vector<int>>(j["generator_elements"], where + ".generator_elements");
      } else {
        for (int g = 0; g < t.order(); ++g) elements.push_back(g);
      }
      require(elements.size() == images.size(), ErrorKind::ShapeMismatch,
              where + ": one image per generator element is required");
      // Close up under products: image(g h) = image(g) image(h).
      Eigen::Index d = images[0].rows();
      std::map<int, Matrix> known{{t.identity(), Matrix::Identity(d, d)}};
      std::vector<int> frontier{t.identity()};
      while (!frontier.empty()) {
        std::vector<int> next;
        for (int h : frontier)
          for (std::size_t i = 0; i < elements.size(); ++i) {
            require(elements[i] >= 0 && elements[i] < t.order(), ErrorKind::ValidationError,
                    where + ": generator element out of range");
            int gh = t.mul(elements[i], h);
            if (known.count(gh)) continue;
            known.emplace(gh, images[i] * known.at(h));
            next.push_back(gh);
          }
        frontier = std::move(next);
      }
      require(static_cast<int>(known.size()) == t.order(), ErrorKind::ValidationError,
              where + ": generator elements do not generate the group");
      for (const auto& [g, img] : known) {
        spanning.push_back(alg->group->element_images[g]);
        spanning_images.push_back(img);
      }
    } else {
      spanning = alg->algebra->matrix_units();
      require(spanning.size() == images.size(), ErrorKind::ShapeMismatch,
              where + ": one image per matrix unit is required");
      spanning_images = images;
    }
    m = HilbertianModule::from_action(alg->algebra, spanning, spanning_images);
  }
  if (j.contains("reference_gram")) {
    BlockOp g = operator_from_json(j["reference_gram"], *m, *m, where + ".reference_gram");
    m = m->with_reference(std::move(g));
  }
  return *m;
}

Json to_json(const HilbertianModule& m) {
  Json blocks = Json::array();
  for (const auto& b : m.algebra().blocks()) blocks.push_back(Json::array({b.dim, b.weight}));
  return {{"algebra", {{"blocks", blocks}}},
          {"multiplicities", std::vector<int>(m.multiplicities().begin(), m.multiplicities().end())},
          {"reference_gram", to_json(m.reference_gram())},
          {"reference_hash", hex_hash(gram_hash(m.reference_gram()))}};
}

BlockOp operator_from_json(const Json& j, const HilbertianModule& source, const HilbertianModule& target,
                           const std::string& where) {
  if (j.is_object()) {
    allow_only(j, {"blocks"}, where);
    const Json& b = field(j, "blocks", where);
    if (!b.is_array()) parse_fail(where + ".blocks", "expected a list of matrices");
    std::vector<Matrix> blocks;
    for (std::size_t k = 0; k < b.size(); ++k) blocks.push_back(matrix_from_json(b[k], pointer(where + ".blocks", k)));
    BlockOp f(std::move(blocks));
    try {
      check_morphism_shape(source, target, f);
    } catch (const Error& e) {
      fail(ErrorKind::ShapeMismatch, where + ": " + detail(e));
    }
    return f;
  }
  Matrix user = matrix_from_json(j, where);
  require(user.rows() == target.carrier_dim() && user.cols() == source.carrier_dim(), ErrorKind::ShapeMismatch,
          where + ": expected a " + std::to_string(target.carrier_dim()) + " x " +
              std::to_string(source.carrier_dim()) + " matrix");
  try {
    return compress_morphism(source, target, target.basis_map() * user * source.basis_map().adjoint());
  } catch (const Error& e) {
    fail(e.kind(), where + ": " + detail(e));
  }
}

Json to_json(const BlockOp& f) {
  Json blocks = Json::array();
  for (std::size_t k = 0; k < f.size(); ++k) blocks.push_back(to_json(f[k]));
  return {{"blocks", blocks}};
}

HilbertianChainComplex complex_from_json(const Json& j) {
  const std::string where = "complex";
  allow_only(j, {"algebra", "modules", "boundaries", "convention", "grams"}, where);
  AlgebraDocument alg = algebra_from_json(field(j, "algebra", where), "complex.algebra");
  Convention conv = Convention::chain;
  if (j.contains("convention")) {
    try {
      conv = parse_convention(get<std::string>(j["convention"], where + ".convention"));
    } catch (const Error& e) {
      parse_fail(where + ".convention", detail(e));
    }
  }
  const Json& mods = field(j, "modules", where);
  if (!mods.is_array() || mods.empty()) parse_fail(where + ".modules", "expected a non-empty list");
  std::vector<HilbertianModule> modules;
  for (std::size_t i = 0; i < mods.size(); ++i) {
    std::string w = pointer(where + ".modules", i);
    if (mods[i].is_array()) {
      auto mult = get<std::vector<int>>(mods[i], w);
      require(mult.size() == alg.algebra->block_count(), ErrorKind::ShapeMismatch,
              w + ": need one multiplicity per block");
      modules.emplace_back(alg.algebra, mult);
    } else {
      modules.push_back(module_from_json(mods[i], &alg, w));
    }
  }
  if (j.contains("grams")) {
    const Json& g = j["grams"];
    if (!g.is_array() || g.size() != modules.size()) parse_fail(where + ".grams", "expected one gram per degree");
    for (std::size_t i = 0; i < modules.size(); ++i)
      if (!g[i].is_null())
        modules[i] = modules[i].with_reference(
            operator_from_json(g[i], modules[i], modules[i], pointer(where + ".grams", i)));
  }
  const Json& bs = field(j, "boundaries", where);
  if (!bs.is_array() || bs.size() + 1 != modules.size())
    parse_fail(where + ".boundaries", "expected one map between neighbouring degrees");
  std::vector<BlockOp> maps;
  for (std::size_t q = 0; q < bs.size(); ++q) {
    const auto& lower = modules[q];
    const auto& upper = modules[q + 1];
    const auto& source = conv == Convention::chain ? upper : lower;
    const auto& target = conv == Convention::chain ? lower : upper;
    maps.push_back(operator_from_json(bs[q], source, target, pointer(where + ".boundaries", q)));
  }
  return HilbertianChainComplex(std::move(modules), std::move(maps), conv);
}

Json to_json(const HilbertianChainComplex& c) {
  Json modules = Json::array(), maps = Json::array(), grams = Json::array();
  for (const auto& m : c.modules()) {
    modules.push_back(std::vector<int>(m.multiplicities().begin(), m.multiplicities().end()));
    grams.push_back(to_json(m.reference_gram()));
  }
  for (const auto& f : c.maps()) maps.push_back(to_json(f));
  Json blocks = Json::array();
  for (const auto& b : c.algebra().blocks()) blocks.push_back(Json::array({b.dim, b.weight}));
  return {{"algebra", {{"blocks", blocks}}},
          {"modules", modules},
          {"boundaries", maps},
          {"grams", grams},
          {"convention", std::string(to_string(c.convention()))}};
}

bool is_symbol(const Json& j) { return j.is_object() && j.contains("coefficients"); }

LaurentMatrix symbol_from_json(const Json& j, bool square, const std::string& where) {
  allow_only(j, {"rank", "size", "coefficients"}, where);
  int rank = get<int>(field(j, "rank", where), where + ".rank");
  require(rank >= 1, ErrorKind::ValidationError, where + ": rank must be positive");
  LaurentMatrix f = LaurentMatrix::zero(rank, j.contains("size") ? get<int>(j["size"], where + ".size") : 0);
  const Json& cs = field(j, "coefficients", where);
  if (!cs.is_array()) parse_fail(where + ".coefficients", "expected a list");
  Eigen::Index rows = -1, cols = -1;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    std::string w = pointer(where + ".coefficients", i);
    allow_only(cs[i], {"exponent", "matrix"}, w);
    auto e = get<std::vector<int>>(field(cs[i], "exponent", w), w + ".exponent");
    require(static_cast<int>(e.size()) == rank, ErrorKind::ShapeMismatch, w + ": exponent length differs from rank");
    Matrix c = matrix_from_json(field(cs[i], "matrix", w), w + ".matrix");
    if (rows < 0) {
      rows = c.rows();
      cols = c.cols();
    }
    require(c.rows() == rows && c.cols() == cols, ErrorKind::ShapeMismatch, w + ": coefficient shapes differ");
    auto [it, fresh] = f.coefficients.try_emplace(e, c);
    if (!fresh) it->second += c;
  }
  if (square) {
    require(rows == cols, ErrorKind::ShapeMismatch, where + ": symbol must be square");
    if (rows >= 0) {
      require(!j.contains("size") || f.size == rows, ErrorKind::ShapeMismatch, where + ": size differs from coefficients");
      f.size = static_cast<int>(rows);
    }
  }
  return f;
}

Json to_json(const LaurentMatrix& f) {
  Json cs = Json::array();
  for (const auto& [k, c] : f.coefficients) cs.push_back({{"exponent", k}, {"matrix", to_json(c)}});
  return {{"rank", f.rank}, {"size", f.size}, {"coefficients", cs}};
}

bool is_abelian_complex(const Json& j) { return j.is_object() && j.contains("torus_rank"); }

AbelianChainComplex abelian_complex_from_json(const Json& j) {
  const std::string where = "complex";
  allow_only(j, {"torus_rank", "sizes", "boundaries", "convention"}, where);
  AbelianChainComplex c;
  c.rank = get<int>(field(j, "torus_rank", where), where + ".torus_rank");
  c.sizes = get<std::vector<int>>(field(j, "sizes", where), where + ".sizes");
  if (j.contains("convention")) {
    try {
      c.convention = parse_convention(get<std::string>(j["convention"], where + ".convention"));
    } catch (const Error& e) {
      parse_fail(where + ".convention", detail(e));
    }
  }
  const Json& bs = field(j, "boundaries", where);
  if (!bs.is_array()) parse_fail(where + ".boundaries", "expected a list of symbols");
  for (std::size_t q = 0; q < bs.size(); ++q) {
    Json sym = bs[q];
    if (sym.is_object() && !sym.contains("rank")) sym["rank"] = c.rank;
    c.maps.push_back(symbol_from_json(sym, false, pointer(where + ".boundaries", q)));
  }
  c.validate();
  return c;
}

bool is_cell_complex(const Json& j) {
  return (j.is_object() && j.contains("cells")) ||
         (fixture_name(j) && !fixture_name(j)->starts_with("scalar") && !fixture_name(j)->starts_with("regular") &&
          !fixture_name(j)->starts_with("trivial"));
}

CellComplex cell_complex_from_json(const Json& j) {
  if (auto name = fixture_name(j)) {
    try {
      return fixtures::complex_by_name(*name);
    } catch (const Error& e) {
      fail(ErrorKind::ValidationError, "cell complex fixture: " + detail(e));
    }
  }
  const std::string where = "cell_complex";
  allow_only(j, {"generators", "cells", "boundaries"}, where);
  CellComplex k;
  if (j.contains("generators")) k.generators = get<std::vector<std::string>>(j["generators"], where + ".generators");
  const Json& cells = field(j, "cells", where);
  if (!cells.is_object()) parse_fail(where + ".cells", "expected {\"0\": [...], ...}");
  int top = -1;
  for (const auto& [key, v] : cells.items()) top = std::max(top, to_int(key, where + ".cells"));
  k.cells.resize(top + 1);
  for (const auto& [key, v] : cells.items())
    k.cells[to_int(key, where + ".cells")] = get<std::vector<std::string>>(v, where + ".cells." + key);
  const Json& bs = j.contains("boundaries") ? j["boundaries"] : Json::object();
  if (!bs.is_object()) parse_fail(where + ".boundaries", "expected {\"1\": matrix, ...}");
  for (int q = 1; q <= top; ++q) {
    int rows = k.cell_count(q - 1), cols = k.cell_count(q);
    GroupRingMatrix d(rows, std::vector<GroupRingElement>(cols));
    std::string key = std::to_string(q);
    if (bs.contains(key)) {
      const Json& m = bs[key];
      std::string w = where + ".boundaries." + key;
      if (!m.is_array() || static_cast<int>(m.size()) != rows)
        parse_fail(w, "expected " + std::to_string(rows) + " rows (one per " + std::to_string(q - 1) + "-cell)");
      for (int r = 0; r < rows; ++r) {
        if (!m[r].is_array() || static_cast<int>(m[r].size()) != cols)
          parse_fail(pointer(w, r), "expected " + std::to_string(cols) + " entries");
        for (int c = 0; c < cols; ++c)
          d[r][c] = ring_from_json(m[r][c], k.generators, pointer(pointer(w, r), c));
      }
    }
    k.boundaries.push_back(std::move(d));
  }
  for (const auto& [key, v] : bs.items())
    if (to_int(key, where + ".boundaries") < 1 || to_int(key, where + ".boundaries") > top)
      fail(ErrorKind::ValidationError, where + ".boundaries: no cells in dimension " + key);
  k.validate();
  return k;
}

Json to_json(const CellComplex& k) {
  Json cells = Json::object(), bs = Json::object();
  for (int q = 0; q <= k.dimension(); ++q) cells[std::to_string(q)] = k.cells[q];
  for (int q = 1; q <= k.dimension(); ++q) {
    Json m = Json::array();
    for (const auto& row : k.boundaries[q - 1]) {
      Json r = Json::array();
      for (const auto& e : row) r.push_back(ring_to_json(e, k.generators));
      m.push_back(std::move(r));
    }
    bs[std::to_string(q)] = std::move(m);
  }
  return {{"generators", k.generators}, {"cells", cells}, {"boundaries", bs}};
}

GroupRepresentation representation_from_json(const Json& j, int generator_count) {
  if (auto name = fixture_name(j)) {
    auto parts = split(*name, ':');
    const std::string where = "representation fixture \"" + *name + "\"";
    if (parts[0] == "scalar" && parts.size() == 2) {
      std::vector<Complex> values;
      for (const auto& v : split(parts[1], ',')) values.emplace_back(to_double(v, where), 0.0);
      return fixtures::scalar_representation(values);
    }
    if (parts[0] == "regular" && parts.size() == 3) {
      std::vector<int> elements;
      for (const auto& v : split(parts[2], ',')) elements.push_back(to_int(v, where));
      return fixtures::regular_representation(group_by_name(parts[1]), elements);
    }
    if (parts[0] == "trivial" && parts.size() <= 2) {
      AlgebraDocument alg = algebra_from_json(Json(parts.size() == 2 ? parts[1] : "C"), where);
      return fixtures::trivial_representation(alg.algebra, generator_count);
    }
    fail(ErrorKind::ValidationError, "unknown " + where);
  }
  const std::string where = "representation";
  allow_only(j, {"module", "generator_images", "side"}, where);
  GroupRepresentation rho{module_from_json(field(j, "module", where), nullptr, where + ".module"), {}, Side::right};
  if (j.contains("side")) {
    try {
      rho.side = parse_side(get<std::string>(j["side"], where + ".side"));
    } catch (const Error& e) {
      parse_fail(where + ".side", detail(e));
    }
  }
  const Json& imgs = field(j, "generator_images", where);
  if (!imgs.is_array()) parse_fail(where + ".generator_images", "expected a list of matrices");
  for (std::size_t i = 0; i < imgs.size(); ++i)
    rho.generator_images.push_back(
        operator_from_json(imgs[i], rho.module, rho.module, pointer(where + ".generator_images", i)));
  return rho;
}

SubdivisionData subdivision_from_json(const Json& j, const CellComplex& k) {
  if (auto name = fixture_name(j)) {
    try {
      return fixtures::subdivision_by_name(*name);
    } catch (const Error& e) {
      fail(ErrorKind::ValidationError, "subdivision fixture: " + detail(e));
    }
  }
  const std::string where = "subdivision";
  allow_only(j,
             {"dimension", "cell", "plus_boundary", "minus_boundary", "separator_boundary", "plus_label",
              "minus_label", "separator_label"},
             where);
  SubdivisionData d;
  d.dimension = get<int>(field(j, "dimension", where), where + ".dimension");
  d.cell = get<int>(field(j, "cell", where), where + ".cell");
  auto list = [&](const std::string& key, std::vector<GroupRingElement>& out) {
    if (!j.contains(key)) return;
    const Json& l = j[key];
    if (!l.is_array()) parse_fail(where + "." + key, "expected a list of group ring elements");
    for (std::size_t i = 0; i < l.size(); ++i)
      out.push_back(ring_from_json(l[i], k.generators, pointer(where + "." + key, i)));
  };
  list("plus_boundary", d.plus_boundary);
  list("minus_boundary", d.minus_boundary);
  list("separator_boundary", d.separator_boundary);
  if (j.contains("plus_label")) d.plus_label = get<std::string>(j["plus_label"], where + ".plus_label");
  if (j.contains("minus_label")) d.minus_label = get<std::string>(j["minus_label"], where + ".minus_label");
  if (j.contains("separator_label"))
    d.separator_label = get<std::string>(j["separator_label"], where + ".separator_label");
  return d;
}

Json report(const DeterminantResult& r) {
  return {{"value", r.value},
          {"log_value", r.log_value},
          {"method", std::string(to_string(r.method))},
          {"convergence",
           {{"verdict", std::string(to_string(r.convergence.verdict))},
            {"error_estimate", r.convergence.error_estimate},
            {"note", r.convergence.note}}},
          {"steps", r.steps}};
}

Json report(const ConvergenceStudy& s) {
  Json levels = Json::array();
  for (std::size_t i = 0; i < s.integrals.size(); ++i)
    levels.push_back({{"excision", s.excision[i]},
                      {"threshold", s.thresholds[i]},
                      {"integral", s.integrals[i]},
                      {"grid_error", s.grid_errors[i]}});
  return {{"log_value", s.log_value},
          {"verdict", std::string(to_string(s.convergence.verdict))},
          {"error_estimate", s.convergence.error_estimate},
          {"note", s.convergence.note},
          {"levels", levels},
          {"grid_resolution", s.resolution}};
}

Json report(const SpectralDensity& d) {
  Json atoms = Json::array(), cdf = Json::array();
  for (const auto& a : d.atoms) atoms.push_back({{"lambda", a.lambda}, {"weight", a.weight}});
  for (const auto& [l, p] : d.sampled_cdf) cdf.push_back(Json::array({l, p}));
  Json out{{"total_mass", d.total_mass}};
  if (!d.atoms.empty()) out["atoms"] = atoms;
  if (!d.sampled_cdf.empty()) out["cdf"] = cdf;
  return out;
}

Json report(const AbelianSpectralDensity& d) {
  Json out = report(d.density);
  out["refinement_change"] = d.refinement_change;
  out["grid_resolution"] = d.resolution;
  return out;
}

Json report(const std::vector<ClassVerdict>& verdicts) {
  Json out = Json::array();
  for (const auto& v : verdicts)
    out.push_back({{"degree", v.degree},
                   {"verdict", std::string(to_string(v.verdict))},
                   {"margin", v.margin},
                   {"note", v.note}});
  return out;
}

Json report(const UnimodularityReport& r) {
  Json gens = Json::array();
  for (const auto& g : r.generators)
    gens.push_back({{"name", g.name}, {"det", g.det}, {"unitary", g.unitary}, {"pass", g.pass}});
  return {{"unimodular", r.unimodular}, {"generators", gens}};
}

Json report(const TorsionReport& r) {
  Json hashes = Json::array();
  for (auto h : r.harmonic_hashes) hashes.push_back(hex_hash(h));
  return {{"euler_characteristic", r.euler_characteristic},
          {"convention", std::string(to_string(r.convention))},
          {"betti", r.betti},
          {"verdicts", report(r.verdicts)},
          {"unimodularity", report(r.unimodularity)},
          {"coordinate", r.coordinate},
          {"log_coordinate", r.log_coordinate},
          {"exact_sequence_coordinate", r.exact_sequence_coordinate},
          {"route_discrepancy", r.route_discrepancy},
          {"module_reference_hash", hex_hash(r.module_reference_hash)},
          {"harmonic_hashes", hashes},
          {"provenance", r.provenance}};
}

Json report(const InvarianceReport& r) {
  return {{"original", report(r.original)},
          {"subdivided", report(r.subdivided)},
          {"homology_log_dets", r.homology_log_dets},
          {"pushed_coordinate", r.pushed_coordinate},
          {"relative_discrepancy", r.relative_discrepancy}};
}

Json report(const ZetaReport& r) {
  Json degrees = Json::array();
  for (const auto& d : r.degrees) {
    Json theta = Json::array(), zeta = Json::array();
    for (const auto& [t, v] : d.theta) theta.push_back(Json::array({t, v}));
    for (const auto& z : d.zeta) zeta.push_back({{"s", z.s}, {"lambda", z.lambda}, {"value", z.value}});
    Json entry{{"degree", d.degree}, {"theta", theta}, {"zeta", zeta}, {"zeta_prime", d.zeta_prime}};
    if (d.zeta_prime_mellin) {
      entry["zeta_prime_mellin"] = *d.zeta_prime_mellin;
      entry["mellin_error_estimate"] = d.mellin_error_estimate;
    }
    degrees.push_back(std::move(entry));
  }
  return {{"degrees", degrees},
          {"zeta_prime", r.zeta_prime},
          {"factor", r.factor},
          {"laplacian_product", r.laplacian_product},
          {"relative_mismatch", r.relative_mismatch}};
}

Json report(const AbelianTorsionReport& r) {
  Json degrees = Json::array();
  for (const auto& d : r.degrees)
    degrees.push_back({{"degree", d.degree}, {"betti", d.betti}, {"log_det_laplacian", report(d.log_det)}});
  return {{"torus_rank", r.rank},
          {"convention", std::string(to_string(r.convention))},
          {"degrees", degrees},
          {"coordinate", r.coordinate},
          {"log_coordinate", r.log_coordinate},
          {"grid_resolution", r.resolution}};
}

Json envelope(const std::string& kind, Json body) {
  return {{"format_version", format_version}, {"kind", kind}, {"result", std::move(body)}};
}

}  // namespace l2t::io
