#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "l2t/commands.hpp"
#include "l2t/errors.hpp"

namespace py = pybind11;
using namespace l2t;

namespace {

commands::Options make_options(const std::string& method, int grid, double kernel_tol, const std::string& convention) {
  commands::Options o;
  o.method = method;
  o.grid = grid;
  o.kernel_tol = kernel_tol;
  o.convention = convention;
  return o;
}

std::vector<io::Json> parse_all(const std::vector<std::string>& texts) {
  std::vector<io::Json> out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    try {
      out.push_back(io::Json::parse(texts[i]));
    } catch (const io::Json::parse_error& e) {
      fail(ErrorKind::ParseError, "document " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "L2 torsion, Fuglede-Kadison determinants and L2 Betti numbers";

  static py::exception<Error> base(m, "L2TError");
  static py::exception<Error> validation(m, "ValidationError", base.ptr());
  static py::exception<Error> refusal(m, "MathematicalRefusal", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const auto& type = is_refusal(e.kind()) ? refusal : validation;
      py::object instance = py::reinterpret_borrow<py::object>(type.ptr())(e.what());
      instance.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(type.ptr(), instance.ptr());
    }
  });

  m.attr("format_version") = io::format_version;
  m.def("commands", &commands::names, "Names accepted by run().");

  m.def(
      "run",
      [](const std::string& name, const std::vector<std::string>& documents, const std::string& method, int grid,
         double kernel_tol, const std::string& convention) {
        auto docs = parse_all(documents);
        auto options = make_options(method, grid, kernel_tol, convention);
        io::Json out;
        {
          py::gil_scoped_release release;
          out = io::envelope(name, commands::run(name, docs, options));
        }
        return out.dump();
      },
      py::arg("name"), py::arg("documents"), py::arg("method") = "spectral", py::arg("grid") = 0,
      py::arg("kernel_tol") = 0.0, py::arg("convention") = "",
      "Runs one pipeline on JSON documents (as text) and returns the report envelope as JSON text.");

  m.def(
      "fixture_suite",
      [](int grid) {
        auto suite = commands::fixture_suite(make_options("spectral", grid, 0.0, ""));
        return io::envelope("fixtures", suite).dump();
      },
      py::arg("grid") = 0, "Runs the built-in fixture suite; returns the envelope as JSON text.");

  m.def(
      "load_document", [](const std::string& path) { return io::load_document(path).dump(); }, py::arg("path"),
      "Reads a JSON file (or wraps fixture:<name>) and returns it as JSON text.");

  m.def(
      "fk_det_blocks",
      [](const std::vector<std::pair<int, double>>& algebra, const std::vector<Matrix>& blocks,
         const std::string& method) {
        std::vector<AlgebraBlock> ab;
        for (const auto& [n, w] : algebra) ab.push_back({n, w});
        auto alg = std::make_shared<const Algebra>(std::move(ab));
        std::vector<int> mult;
        for (const auto& b : blocks) mult.push_back(static_cast<int>(b.rows()));
        HilbertianModule mod(alg, mult);
        auto r = fk_det(mod, BlockOp(blocks), parse_det_method(method));
        return py::make_tuple(r.value, r.log_value, std::string(to_string(r.convergence.verdict)));
      },
      py::arg("algebra"), py::arg("blocks"), py::arg("method") = "spectral",
      "Det_tau of an operator given by one square block per algebra block [(n_k, w_k), ...]. "
      "Returns (value, log_value, verdict).");

  m.def(
      "mahler_measure",
      [](const std::vector<Complex>& coefficients, int grid) {
        auto f = LaurentMatrix::zero(1, 1);
        for (std::size_t k = 0; k < coefficients.size(); ++k)
          f = f + LaurentMatrix::monomial({static_cast<int>(k)}, coefficients[k]);
        AbelianOptions o;
        o.resolution = grid;
        auto r = abelian_fk_det_operator(f, o);
        return py::make_tuple(r.value, std::string(to_string(r.convergence.verdict)));
      },
      py::arg("coefficients"), py::arg("grid") = 0,
      "FK determinant of sum c_k t^k on l2(Z), i.e. the Mahler measure. Returns (value, verdict).");
}
