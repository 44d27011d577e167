#pragma once

// JSON documents in and out. Complex matrices are nested arrays of rows whose
// entries are [re, im] pairs (plain numbers are read as real). Any document
// may instead be the string "fixture:<name>" naming a built-in object.
// Reports carry "format_version" and the hashes of the products they were
// computed against.

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "l2t/abelian.hpp"
#include "l2t/chain.hpp"
#include "l2t/detline.hpp"
#include "l2t/fkdet.hpp"
#include "l2t/torsion.hpp"
#include "l2t/vna.hpp"

namespace l2t::io {

using Json = nlohmann::json;

inline constexpr int format_version = 1;

/// Reads a JSON file, or wraps "fixture:..." into a JSON string. Throws
/// ParseError with the file name and position.
Json load_document(const std::string& path_or_fixture);

Matrix matrix_from_json(const Json& j, const std::string& where = "");
Json to_json(const Matrix& m);

/// Algebra plus, for group algebras, the table and block decomposition.
struct AlgebraDocument {
  AlgebraPtr algebra;
  std::optional<GroupTable> table;
  std::optional<GroupAlgebra> group;
};

/// {"blocks": [[n, w], ...]}, {"group_table": {"order", "product",
/// "identity"}}, or a fixture name: C, C+C, C[Z/n], C[Z/nxZ/m], C[S3].
AlgebraDocument algebra_from_json(const Json& j, const std::string& where = "algebra");
/// Group table fixtures: Z/n, Z/nxZ/m, S3.
GroupTable group_by_name(const std::string& name);

/// {"algebra", "multiplicities", "reference_gram"?} or {"algebra",
/// "action_generators", "generator_elements"?, "reference_gram"?}. With a
/// group algebra the action generators are images of the listed group
/// elements (default: all elements in table order) and are closed up under
/// products; otherwise they are images of the matrix units in (k, i, j)
/// order. `inherited` supplies the algebra when the document omits it.
HilbertianModule module_from_json(const Json& j, const AlgebraDocument* inherited = nullptr,
                                  const std::string& where = "module");
Json to_json(const HilbertianModule& m);

/// {"blocks": [matrices]} in canonical form, or a dense matrix in user
/// coordinates of source and target.
BlockOp operator_from_json(const Json& j, const HilbertianModule& source, const HilbertianModule& target,
                           const std::string& where = "operator");
Json to_json(const BlockOp& f);

/// {"algebra", "modules": [module or multiplicities], "boundaries": [maps],
/// "convention", "grams"?}.
HilbertianChainComplex complex_from_json(const Json& j);
Json to_json(const HilbertianChainComplex& c);

/// Symbol document {"rank", "size", "coefficients": [{"exponent", "matrix"}]}.
/// Rectangular coefficients are allowed when `square` is false.
LaurentMatrix symbol_from_json(const Json& j, bool square = true, const std::string& where = "symbol");
Json to_json(const LaurentMatrix& f);
bool is_symbol(const Json& j);

/// {"torus_rank", "sizes", "boundaries": [symbols], "convention"}.
AbelianChainComplex abelian_complex_from_json(const Json& j);
bool is_abelian_complex(const Json& j);

/// {"generators", "cells": {"0": [...]}, "boundaries": {"1": [[[["+1", "t"],
/// ["-1", ""]], ...], ...]}} or "fixture:<complex name>".
CellComplex cell_complex_from_json(const Json& j);
Json to_json(const CellComplex& k);
bool is_cell_complex(const Json& j);

/// {"module", "generator_images": [matrices], "side"} or one of
/// "fixture:scalar:<v>[,<v>...]", "fixture:regular:<group>:<element>[,...]",
/// "fixture:trivial[:<algebra>]". Trivial representations take the
/// generator count from the complex.
GroupRepresentation representation_from_json(const Json& j, int generator_count);

/// {"dimension", "cell", "plus_boundary", "minus_boundary",
/// "separator_boundary", labels?} with entries as in cell complexes, or
/// "fixture:<name>".
SubdivisionData subdivision_from_json(const Json& j, const CellComplex& k);

Json report(const DeterminantResult& r);
Json report(const ConvergenceStudy& s);
Json report(const AbelianSpectralDensity& d);
Json report(const SpectralDensity& d);
Json report(const TorsionReport& r);
Json report(const InvarianceReport& r);
Json report(const ZetaReport& r);
Json report(const AbelianTorsionReport& r);
Json report(const std::vector<ClassVerdict>& verdicts);
Json report(const UnimodularityReport& r);

/// Adds "format_version" and "kind" around a report body.
Json envelope(const std::string& kind, Json body);

std::string hex_hash(std::uint64_t h);

}  // namespace l2t::io
