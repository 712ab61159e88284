#pragma once

// The sentence gadget G in (Z/qZ)^{n x L}, n = (hq)^t, L = ht. Row idx is the
// concatenation of the V rows named by the base-(hq) digits of idx, most
// significant digit first. G is never materialized.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsenle/core.hpp"
#include "sparsenle/word_codec.hpp"

namespace sparsenle {

using SentenceIndex = std::uint64_t;

struct ReductionParams {
  std::uint64_t q = 2;
  unsigned h = 1;
  unsigned t = 1;
  unsigned k = 0;
  std::uint64_t n = 0;       // (hq)^t
  unsigned L = 0;            // ht
  std::uint64_t psi_den = 1; // (ht)^2

  /// Derives n, L and psi; throws TooLarge if n does not fit in 63 bits.
  static ReductionParams make(std::uint64_t q, unsigned h, unsigned t, unsigned k);

  std::uint64_t alphabet() const { return static_cast<std::uint64_t>(h) * q; }
  WordParams word_params() const { return WordParams{h, q, k, psi_den}; }

  /// k > h + 2: decoding can run at all.
  bool functional_gate() const { return k > h + 2; }
  /// 4h(log2 h + log2 q + 2 log2(ht)).
  double uniformity_threshold() const;
  bool uniformity_gate() const;
  /// floor(sqrt(n)) / 2, the concrete stand-in for k = o(sqrt(n)).
  std::uint64_t sparsity_limit() const;
  bool sparsity_gate() const { return k <= sparsity_limit(); }
  bool distributional_gates() const {
    return functional_gate() && uniformity_gate() && sparsity_gate();
  }
};

/// k-sparse coefficient vector: strictly increasing support and unit values.
struct SparseVector {
  std::vector<SentenceIndex> indices;
  ResidueVector values;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
  friend auto operator<=>(const SparseVector&, const SparseVector&) = default;
};

/// Throws IndexOutOfRange / NotAUnit / DimensionMismatch on a malformed vector.
void validate_sparse(const SparseVector& a, std::uint64_t n, std::uint64_t q);

/// Inner product a^T x for a dense x of length n.
std::uint64_t sparse_dot(const SparseVector& a, const ResidueVector& x, std::uint64_t q);

std::vector<WordIndex> sentence_digits(SentenceIndex idx, const ReductionParams& params);
SentenceIndex sentence_from_digits(const std::vector<WordIndex>& digits,
                                   const ReductionParams& params);

ResidueVector g_row(SentenceIndex idx, const ReductionParams& params);

/// a^T G.
ResidueVector sparse_times_g(const SparseVector& a, const ReductionParams& params);

/// (G s)_idx, the idx-th entry of G s.
std::uint64_t g_row_dot(SentenceIndex idx, const ResidueVector& s, const ReductionParams& params);

/// Distribution of the k unit values placed on the support.
class SupportDistribution {
 public:
  enum class Kind { Ones, UniformUnits, Table };

  static SupportDistribution ones();
  static SupportDistribution uniform_units();
  /// Weighted table of fixed-length unit vectors.
  static SupportDistribution table(std::vector<std::pair<std::uint64_t, ResidueVector>> rows);
  /// "ones" | "uniform-units" | "file:path" (lines "weight v1 ... vk", '#' comments).
  static SupportDistribution parse(std::string_view spec);

  ResidueVector sample(unsigned k, std::uint64_t q, Rng& rng) const;

  Kind kind() const noexcept { return kind_; }
  const std::string& describe() const noexcept { return description_; }

 private:
  Kind kind_ = Kind::Ones;
  std::string description_ = "ones";
  std::vector<std::pair<std::uint64_t, ResidueVector>> rows_;
  std::uint64_t total_weight_ = 0;
};

/// Per column psi, multiplier m of every digit becomes rho_psi^{-1} m.
std::vector<SentenceIndex> word_shift(const std::vector<SentenceIndex>& columns,
                                      const ResidueVector& rho, const ReductionParams& params);

/// Row indices of G forming the identity I_L, in basis order.
std::vector<SentenceIndex> identity_row_indices(const ReductionParams& params);

class SentenceCodec {
 public:
  explicit SentenceCodec(ReductionParams params);

  const ReductionParams& params() const noexcept { return params_; }
  const WordCodec& word_codec() const noexcept { return words_; }

  /// Decodes b in (Z/qZ)^L to a k-sparse a with a^T G = b^T, or FAIL
  /// (nullopt) on a word rejection or a support collision.
  std::optional<SparseVector> decode_sentence(const ResidueVector& b,
                                              const SupportDistribution& values,
                                              Rng& rng) const;

  /// Column tuples before the shift; nullopt on a word rejection.
  std::optional<std::vector<SentenceIndex>> decode_columns(const ResidueVector& b,
                                                           Rng& rng) const;

 private:
  ReductionParams params_;
  WordCodec words_;
};

/// Distribution of support sizes, restricted to [k_min, k_max].
class SupportSizeDistribution {
 public:
  static SupportSizeDistribution point(unsigned k);
  static SupportSizeDistribution uniform(unsigned k_min, unsigned k_max);
  /// Binomial(trials, num/den) conditioned on landing in [k_min, k_max].
  static SupportSizeDistribution binomial(unsigned trials, std::uint64_t num, std::uint64_t den,
                                          unsigned k_min, unsigned k_max);

  unsigned sample(Rng& rng) const;
  unsigned k_min() const noexcept { return k_min_; }
  unsigned k_max() const noexcept { return k_max_; }

 private:
  enum class Kind { Uniform, Binomial };
  Kind kind_ = Kind::Uniform;
  unsigned k_min_ = 0;
  unsigned k_max_ = 0;
  unsigned trials_ = 0;
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

/// Sentence decoding with a support size drawn per call.
class VariableSentenceCodec {
 public:
  /// Throws UnsupportedSupportSize unless k_min > h + 2 and, when not
  /// relaxed, k_min passes the uniformity gate and k_max the sparsity gate.
  VariableSentenceCodec(std::uint64_t q, unsigned h, unsigned t, SupportSizeDistribution sizes,
                        bool relax_gates = false);

  std::optional<SparseVector> decode(const ResidueVector& b, const SupportDistribution& values,
                                     Rng& rng) const;

  const SentenceCodec& codec_for(unsigned k) const;

 private:
  SupportSizeDistribution sizes_;
  std::map<unsigned, SentenceCodec> codecs_;
};

}  // namespace sparsenle
