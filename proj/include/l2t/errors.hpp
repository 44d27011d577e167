#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace l2t {

enum class ErrorKind {
  // vna-core / hilbertian
  ShapeMismatch,
  NonAssociativeTable,
  DecompositionFailure,
  NotInCommutant,
  AlgebraMismatch,
  // fk-det
  NotSelfAdjoint,
  NegativeSpectrum,
  KernelDetected,
  DivergentIntegral,
  IndeterminateConvergence,
  PathLeavesGL,
  NonInvertible,
  // det-line
  NotAdmissible,
  NotIso,
  NotExact,
  NotDExact,
  DuplicateDegree,
  // chain-complex
  IllConditionedKernel,
  NotDeterminantClass,
  BackendUnsupported,
  // l2-torsion
  RelationViolation,
  NotUnimodular,
  InvalidSubdivision,
  // abelian
  NotHermitianSymbol,
  // documents / cli
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorKind kind);

/// Mathematical refusals are results in their own right: the input was well
/// formed but violates a standing hypothesis (unimodularity, determinant
/// class, convergence of the log-integral).
bool is_refusal(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace l2t
