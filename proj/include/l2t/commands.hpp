#pragma once

// The pipelines behind the command-line tool and the Python module. Each
// takes already loaded documents (see io.hpp) and returns a report body;
// errors propagate as l2t::Error.

#include <string>
#include <vector>

#include "l2t/io.hpp"

namespace l2t::commands {

using io::Json;

struct Options {
  /// spectral, path or polar.
  std::string method = "spectral";
  /// Torus grid resolution per axis; 0 selects the backend default.
  int grid = 0;
  /// Relative kernel threshold; 0 keeps each backend's default.
  double kernel_tol = 0.0;
  /// Empty means chain for cell complexes and the document's own convention
  /// otherwise. A flag that contradicts a document is a ValidationError.
  std::string convention;

  /// Throws ValidationError for an unknown method or convention, a negative
  /// grid or a negative tolerance.
  void validate() const;
};

/// det <module> <operator> | det <symbol>
Json det(const std::vector<Json>& docs, const Options& options = {});
/// betti <complex> | betti <cell complex> <representation>
Json betti(const std::vector<Json>& docs, const Options& options = {});
/// torsion <complex> | torsion <cell complex> <representation>
Json torsion(const std::vector<Json>& docs, const Options& options = {});
/// invariance <cell complex> <representation> [<subdivision>]; a fixture
/// complex defaults to the subdivision fixture of the same name.
Json invariance(const std::vector<Json>& docs, const Options& options = {});
/// zeta <complex> | zeta <cell complex> <representation>
Json zeta(const std::vector<Json>& docs, const Options& options = {});
/// classcheck <complex> | classcheck <cell complex> <representation>
Json classcheck(const std::vector<Json>& docs, const Options& options = {});

/// Dispatches on the subcommand name. Throws ValidationError for unknown names.
Json run(const std::string& name, const std::vector<Json>& docs, const Options& options = {});
std::vector<std::string> names();

/// Built-in fixture suite: {"cases": [{"name", "deviation", "tolerance",
/// "pass", "error"?}], "all_pass"}.
Json fixture_suite(const Options& options = {});

}  // namespace l2t::commands
