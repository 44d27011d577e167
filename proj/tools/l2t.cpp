// Command-line front end. Every subcommand reads JSON documents (or
// "fixture:<name>" strings), runs one pipeline and prints either a flat text
// report or a versioned JSON envelope. Exit status: 0 success, 1 invalid
// input, 2 mathematical refusal.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "l2t/commands.hpp"
#include "l2t/errors.hpp"

using namespace l2t;
using io::Json;

namespace {

// One line per leaf: dotted paths, arrays without objects inline.
void print_text(const Json& j, const std::string& path, std::ostream& os) {
  auto flat = [](const Json& a) {
    return std::none_of(a.begin(), a.end(), [](const Json& e) { return e.is_object(); });
  };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) print_text(v, path.empty() ? k : path + "." + k, os);
  } else if (j.is_array() && !flat(j)) {
    for (std::size_t i = 0; i < j.size(); ++i) print_text(j[i], path + "[" + std::to_string(i) + "]", os);
  } else {
    os << path << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

int run_suite(const commands::Options& o, bool structured) {
  Json suite = commands::fixture_suite(o);
  if (structured) {
    std::cout << io::envelope("fixtures", suite).dump(2) << "\n";
  } else {
    for (const auto& c : suite["cases"]) {
      std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << " (deviation "
                << c["deviation"].dump() << ", tol " << c["tolerance"].dump() << ")";
      if (c.contains("error")) std::cout << " " << c["error"].get<std::string>();
      std::cout << "\n";
    }
  }
  return suite["all_pass"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L2 torsion, Fuglede-Kadison determinants and L2 Betti numbers of Hilbertian complexes"};
  app.fallthrough();
  commands::Options o;
  std::string format = "text";
  bool suite = false;
  app.add_option("--method", o.method, "Determinant route")
      ->check(CLI::IsMember({"spectral", "path", "polar"}))
      ->capture_default_str();
  app.add_option("--grid", o.grid, "Torus grid resolution per axis (abelian backend)")->check(CLI::PositiveNumber);
  app.add_option("--kernel-tol", o.kernel_tol, "Relative kernel threshold")->check(CLI::PositiveNumber);
  app.add_option("--convention", o.convention, "chain or cochain")->check(CLI::IsMember({"chain", "cochain"}));
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  app.add_flag("--fixtures", suite, "Run the built-in fixture suite");

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"det", "FK determinant of an operator over a module, or of a symbol"},
      {"betti", "L2 Betti numbers"},
      {"torsion", "L2 torsion report"},
      {"invariance", "Torsion of K against an elementary subdivision K'"},
      {"zeta", "Heat traces, zeta functions and zeta'(0)"},
      {"classcheck", "Determinant-class verdicts per degree"},
  };
  std::vector<std::string> inputs;
  for (const auto& [name, help] : subs)
    app.add_subcommand(name, help)->add_option("inputs", inputs, "Documents (paths or fixture:<name>)")->required();
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  const bool structured = format == "structured";
  if (suite) return run_suite(o, structured);
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 1;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    std::vector<Json> docs;
    for (const auto& in : inputs) docs.push_back(io::load_document(in));
    Json out = io::envelope(name, commands::run(name, docs, o));
    if (structured)
      std::cout << out.dump(2) << "\n";
    else
      print_text(out["result"], "", std::cout);
    return 0;
  } catch (const Error& e) {
    const bool refusal = is_refusal(e.kind());
    if (structured)
      std::cout << io::envelope("error", {{"error", std::string(to_string(e.kind()))},
                                          {"message", e.what()},
                                          {"refusal", refusal}})
                       .dump(2)
                << "\n";
    std::cerr << e.what() << "\n";
    return refusal ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "ParseError: " << e.what() << "\n";
    return 1;
  }
}
