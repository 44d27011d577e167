#pragma once

// Determinant lines. An element of det(M) is stored as a positive coordinate
// against the symbol of the module's reference gram; symbols of two products
// are related by [G2] = Det(G1^-1 G2)^{-1/2} [G1].

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "l2t/fkdet.hpp"
#include "l2t/hilbertian.hpp"

namespace l2t {

struct DetLineElement {
  HilbertianModule module;
  double coefficient = 1.0;
  std::string provenance;
};

/// FNV-1a hash over the shapes and entries of a gram; used to tag reported
/// coordinates with their reference data.
std::uint64_t gram_hash(const BlockOp& gram);

/// Symbol of the product G as an element of det(M): Det(R^-1 G)^{-1/2}.
/// Throws NotAdmissible.
DetLineElement element_from_product(const HilbertianModule& m, const BlockOp& gram, const FkOptions& options = {});

/// Same for a positive injective (D-admissible) gram. In finite dimension the
/// log-integral always converges, so only zero modes are refused. Throws
/// KernelDetected, NotAdmissible (not self-adjoint or not positive).
DetLineElement element_from_D_admissible(const HilbertianModule& m, const BlockOp& gram,
                                         const FkOptions& options = {});

/// The same element expressed against another reference gram of the module.
DetLineElement rereference(const DetLineElement& e, const BlockOp& new_reference, const FkOptions& options = {});

/// f_*: det(M) -> det(N) for an A-linear isomorphism f: M -> N; the result is
/// expressed against N's reference. Throws NotIso, AlgebraMismatch.
DetLineElement pushforward(const BlockOp& f, const DetLineElement& e, const HilbertianModule& target,
                           const FkOptions& options = {});

/// det(M) (x) det(N) -> det(M (+) N). Throws AlgebraMismatch.
DetLineElement tensor_sum(const DetLineElement& em, const DetLineElement& en);

/// Short exact sequence 0 -> M' -alpha-> M -beta-> M'' -> 0.
struct ExactSequence {
  HilbertianModule sub;       // M'
  HilbertianModule middle;    // M
  HilbertianModule quotient;  // M''
  BlockOp alpha;
  BlockOp beta;
};

/// The gram r^* G' r + beta^* G'' beta on M built from a splitting s of beta
/// (beta s = 1) and the retraction r with r alpha = 1, r s = 0. Without an
/// explicit splitting the orthogonal complement of im(alpha) with respect to
/// M's reference is used.
BlockOp sequence_gram(const ExactSequence& seq, const BlockOp& gram_sub, const BlockOp& gram_quotient,
                      const std::optional<BlockOp>& splitting = std::nullopt);

/// Default splitting s: M'' -> M onto the reference-orthogonal complement of
/// im(alpha).
BlockOp orthogonal_splitting(const ExactSequence& seq);

/// Checks exactness: alpha injective, im(alpha) = ker(beta) up to a subspace
/// gap of 1e-8, beta surjective. Throws NotExact; a beta that is injective on
/// the complement of im(alpha) but not onto raises NotDExact (in finite
/// dimension dense image means onto).
void check_exact(const ExactSequence& seq);

/// det(M') (x) det(M'') -> det(M). Throws NotExact, NotDExact.
DetLineElement exact_sequence_iso(const ExactSequence& seq, const DetLineElement& e_sub,
                                  const DetLineElement& e_quotient,
                                  const std::optional<BlockOp>& splitting = std::nullopt,
                                  const FkOptions& options = {});

struct GradedEntry {
  int degree = 0;
  HilbertianModule module;
  double coefficient = 1.0;
};

/// Element of the graded line (x)_i det(M_i)^{(-1)^i}.
struct GradedDetLineElement {
  std::vector<GradedEntry> entries;
  /// Coordinate of the element against the product of the entries'
  /// references when it is not a pure tensor of the listed factors.
  double scalar = 1.0;

  /// scalar * prod_i c_i^{(-1)^i}
  double combined() const;
  double log_combined() const;
  /// Same factors with every degree moved by `shift`.
  GradedDetLineElement shifted(int shift) const;
};

/// Throws DuplicateDegree.
GradedDetLineElement graded_assemble(const std::vector<std::pair<int, DetLineElement>>& elements);

}  // namespace l2t
