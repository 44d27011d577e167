#include "l2t/detline.hpp"

#include <cmath>
#include <cstring>
#include <set>
#include <string>

#include "l2t/errors.hpp"

namespace l2t {

std::uint64_t gram_hash(const BlockOp& gram) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& b : gram.blocks()) {
    std::int64_t shape[2] = {b.rows(), b.cols()};
    mix(shape, sizeof shape);
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index i = 0; i < b.rows(); ++i) {
        // Normalize -0.0 so equal grams hash equally.
        double parts[2] = {b(i, j).real() + 0.0, b(i, j).imag() + 0.0};
        mix(parts, sizeof parts);
      }
  }
  return h;
}

namespace {

void require_positive(double c, const char* where) {
  require(std::isfinite(c) && c > 0.0, ErrorKind::ValidationError,
          std::string("non-positive determinant-line coefficient in ") + where);
}

// log Det(R^-1 G) for positive R, G; R^-1 G is self-adjoint for the
// R-product, so the spectral route applies.
double log_transition_det(const HilbertianModule& m, const BlockOp& reference, const BlockOp& gram,
                          const FkOptions& options) {
  return fk_det_spectral(m, transition_operator(reference, gram), reference, options).log_value;
}

}  // namespace

DetLineElement element_from_product(const HilbertianModule& m, const BlockOp& gram, const FkOptions& options) {
  require_admissible(m, gram);
  DetLineElement e{m, std::exp(-0.5 * log_transition_det(m, m.reference_gram(), hermitian_part(gram), options)),
                   "product"};
  require_positive(e.coefficient, "element_from_product");
  return e;
}

DetLineElement element_from_D_admissible(const HilbertianModule& m, const BlockOp& gram, const FkOptions& options) {
  try {
    check_morphism_shape(m, m, gram);
  } catch (const Error& err) {
    fail(ErrorKind::NotAdmissible, err.what());
  }
  require(max_abs(gram - gram.adjoint()) <= 1e-10 * std::max(max_abs(gram), 1e-300), ErrorKind::NotAdmissible,
          "gram is not self-adjoint");
  // Spectral determinant refuses zero modes with KernelDetected and negative
  // spectrum with NegativeSpectrum; the latter is reported as NotAdmissible.
  DeterminantResult det;
  try {
    det = fk_det_spectral(m, transition_operator(m.reference_gram(), hermitian_part(gram)), m.reference_gram(),
                          options);
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::NegativeSpectrum) fail(ErrorKind::NotAdmissible, err.what());
    throw;
  }
  DetLineElement e{m, std::exp(-0.5 * det.log_value), "D-admissible product"};
  require_positive(e.coefficient, "element_from_D_admissible");
  return e;
}

DetLineElement rereference(const DetLineElement& e, const BlockOp& new_reference, const FkOptions& options) {
  require_admissible(e.module, new_reference);
  // [R_old] = Det(R_new^-1 R_old)^{-1/2} [R_new]
  double log_det = log_transition_det(e.module, new_reference, e.module.reference_gram(), options);
  DetLineElement out{e.module.with_reference(new_reference), e.coefficient * std::exp(-0.5 * log_det), e.provenance};
  require_positive(out.coefficient, "rereference");
  return out;
}

DetLineElement pushforward(const BlockOp& f, const DetLineElement& e, const HilbertianModule& target,
                           const FkOptions& options) {
  require(e.module.compatible(target), ErrorKind::AlgebraMismatch, "pushforward between different algebras");
  try {
    check_morphism_shape(e.module, target, f);
  } catch (const Error& err) {
    fail(ErrorKind::NotIso, err.what());
  }
  BlockOp finv;
  try {
    finv = f.inverse(options.max_condition);
  } catch (const Error& err) {
    fail(ErrorKind::NotIso, err.what());
  }
  // The product transported along f: <v, w>' = <f^-1 v, f^-1 w>.
  BlockOp transported = hermitian_part(finv.adjoint() * e.module.reference_gram() * finv);
  double log_det = log_transition_det(target, target.reference_gram(), transported, options);
  DetLineElement out{target, e.coefficient * std::exp(-0.5 * log_det), "pushforward of " + e.provenance};
  require_positive(out.coefficient, "pushforward");
  return out;
}

DetLineElement tensor_sum(const DetLineElement& em, const DetLineElement& en) {
  require(em.module.compatible(en.module), ErrorKind::AlgebraMismatch, "direct sum over different algebras");
  DetLineElement out{direct_sum(em.module, en.module), em.coefficient * en.coefficient,
                     "sum(" + em.provenance + ", " + en.provenance + ")"};
  require_positive(out.coefficient, "tensor_sum");
  return out;
}

void check_exact(const ExactSequence& seq) {
  try {
    check_morphism_shape(seq.sub, seq.middle, seq.alpha);
    check_morphism_shape(seq.middle, seq.quotient, seq.beta);
  } catch (const Error& err) {
    fail(ErrorKind::NotExact, err.what());
  }
  double scale_a = spectral_norm(seq.alpha), scale_b = spectral_norm(seq.beta);
  for (std::size_t k = 0; k < seq.alpha.size(); ++k) {
    const Matrix& a = seq.alpha[k];
    const Matrix& b = seq.beta[k];
    const std::string where = " in block " + std::to_string(k);
    int rank_a = linalg::numerical_rank(a, 1e-10, scale_a);
    require(rank_a == a.cols(), ErrorKind::NotExact, "alpha is not injective" + where);
    Matrix kernel_b = linalg::null_space(b, 1e-10, scale_b);
    require(kernel_b.cols() == rank_a, ErrorKind::NotExact, "dim im(alpha) != dim ker(beta)" + where);
    if (rank_a > 0) {
      double gap = linalg::subspace_gap(linalg::range_basis(a, 1e-10, scale_a), kernel_b);
      require(gap < 1e-8, ErrorKind::NotExact, "im(alpha) and ker(beta) differ (gap " + std::to_string(gap) + ")" +
                                                   where);
    }
    require(linalg::numerical_rank(b, 1e-10, scale_b) == b.rows(), ErrorKind::NotDExact,
            "beta is not onto; in finite dimension the induced map has no dense image" + where);
  }
}

BlockOp orthogonal_splitting(const ExactSequence& seq) {
  std::vector<Matrix> blocks;
  const BlockOp& r = seq.middle.reference_gram();
  for (std::size_t k = 0; k < seq.alpha.size(); ++k) {
    const Matrix& a = seq.alpha[k];
    const Matrix& b = seq.beta[k];
    Matrix w = a.cols() == 0 ? Matrix(Matrix::Identity(a.rows(), a.rows()))
                             : linalg::null_space(Matrix(a.adjoint() * r[k]));
    if (b.rows() == 0) {
      blocks.push_back(Matrix::Zero(a.rows(), 0));
      continue;
    }
    Matrix bw = b * w;
    blocks.push_back(w * bw.partialPivLu().inverse());
  }
  return BlockOp(std::move(blocks));
}

BlockOp sequence_gram(const ExactSequence& seq, const BlockOp& gram_sub, const BlockOp& gram_quotient,
                      const std::optional<BlockOp>& splitting) {
  BlockOp s = splitting ? *splitting : orthogonal_splitting(seq);
  check_morphism_shape(seq.quotient, seq.middle, s);
  require(max_abs(seq.beta * s - seq.quotient.identity()) < 1e-8, ErrorKind::ValidationError,
          "splitting is not a right inverse of beta");
  std::vector<Matrix> r_blocks;
  for (std::size_t k = 0; k < seq.alpha.size(); ++k) {
    const Matrix& a = seq.alpha[k];
    Matrix complement = Matrix::Identity(a.rows(), a.rows()) - s[k] * seq.beta[k];
    if (a.cols() == 0) {
      r_blocks.push_back(Matrix::Zero(0, a.rows()));
      continue;
    }
    r_blocks.push_back((a.adjoint() * a).ldlt().solve(a.adjoint() * complement));
  }
  BlockOp r(std::move(r_blocks));
  return hermitian_part(r.adjoint() * gram_sub * r + seq.beta.adjoint() * gram_quotient * seq.beta);
}

DetLineElement exact_sequence_iso(const ExactSequence& seq, const DetLineElement& e_sub,
                                  const DetLineElement& e_quotient, const std::optional<BlockOp>& splitting,
                                  const FkOptions& options) {
  check_exact(seq);
  BlockOp g = sequence_gram(seq, e_sub.module.reference_gram(), e_quotient.module.reference_gram(), splitting);
  double log_det = log_transition_det(seq.middle, seq.middle.reference_gram(), g, options);
  DetLineElement out{seq.middle, e_sub.coefficient * e_quotient.coefficient * std::exp(-0.5 * log_det),
                     "exact sequence"};
  require_positive(out.coefficient, "exact_sequence_iso");
  return out;
}

double GradedDetLineElement::log_combined() const {
  double acc = std::log(scalar);
  for (const auto& e : entries) acc += (e.degree % 2 == 0 ? 1.0 : -1.0) * std::log(e.coefficient);
  return acc;
}

double GradedDetLineElement::combined() const { return std::exp(log_combined()); }

GradedDetLineElement GradedDetLineElement::shifted(int shift) const {
  GradedDetLineElement out = *this;
  for (auto& e : out.entries) e.degree += shift;
  if (shift % 2 != 0) out.scalar = 1.0 / scalar;
  return out;
}

GradedDetLineElement graded_assemble(const std::vector<std::pair<int, DetLineElement>>& elements) {
  GradedDetLineElement out;
  std::set<int> seen;
  for (const auto& [degree, e] : elements) {
    require(seen.insert(degree).second, ErrorKind::DuplicateDegree,
            "degree " + std::to_string(degree) + " appears twice");
    require_positive(e.coefficient, "graded_assemble");
    out.entries.push_back({degree, e.module, e.coefficient});
  }
  return out;
}

}  // namespace l2t
