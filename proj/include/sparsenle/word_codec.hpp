#pragma once

// The word gadget V: the hq x h matrix whose rows are all multiples m * e_d of
// the standard basis of (Z/qZ)^h. Row index xi = m*h + d, so rows 0..h-1 are
// the zero rows. Preimage_V(b) is the set of k-tuples of row indices whose
// rows sum to b.

#include <cstdint>
#include <optional>
#include <vector>

#include "sparsenle/core.hpp"

namespace sparsenle {

using WordIndex = std::uint64_t;
using WordTuple = std::vector<WordIndex>;

struct WordParams {
  unsigned h = 1;
  std::uint64_t q = 2;
  unsigned k = 0;
  /// psi = 1 / psi_den is the slack of the rejection step.
  std::uint64_t psi_den = 1;

  /// Word parameters inside a sentence of t words: psi = (ht)^-2.
  static WordParams for_sentence(unsigned h, std::uint64_t q, unsigned k, unsigned t);

  std::uint64_t alphabet() const { return static_cast<std::uint64_t>(h) * q; }
  bool sampling_precondition() const { return k > h + 2; }
  /// 4h(log2 h + log2 q + log2 psi_den).
  double uniformity_threshold() const;
  bool uniformity_bound_holds() const;
};

struct WordDigit {
  std::uint64_t multiplier;
  unsigned coordinate;
};

WordDigit split_word_index(WordIndex xi, unsigned h, std::uint64_t q);
WordIndex join_word_index(std::uint64_t multiplier, unsigned coordinate, unsigned h);

/// Row xi of V, i.e. m * e_d for xi = m*h + d.
ResidueVector v_row(WordIndex xi, unsigned h, std::uint64_t q);

/// Sum of the V rows named by a tuple.
ResidueVector word_tuple_sum(const WordTuple& tuple, unsigned h, std::uint64_t q);

unsigned hamming_weight(const ResidueVector& b);

/// Counts, samples and decodes against Preimage_V. The DP table
/// f(weight, r) for r <= k is built once at construction; the object is
/// immutable afterwards and safe to share across threads.
class WordCodec {
 public:
  explicit WordCodec(WordParams params);

  const WordParams& params() const noexcept { return params_; }

  /// |Preimage_V(b)| for any b of the given Hamming weight.
  const BigUint& count_preimages(unsigned weight) const;

  /// f(weight, r): number of r-tuples summing to a fixed vector of that weight.
  const BigUint& count_table(unsigned weight, unsigned r) const;

  /// Uniform element of Preimage_V(b). Requires k > h + 2.
  ///
  /// Same three-case loop as the unweighted sampler below, but cases 2 and 3
  /// pick the next row with probability proportional to the number of
  /// completions it leaves, f(|A'|, k - r - 1). Uniform next-row draws are
  /// not uniform over Preimage_V(b): at h = q = 2, k = 6 the path
  /// probabilities of individual tuples range over [0.48, 1.94] times 1/|P|.
  WordTuple sample_preimage(const ResidueVector& b, Rng& rng) const;

  /// The three-case loop with uniform draws in cases 2 and 3. Always lands
  /// in Preimage_V(b) but is biased; kept for comparison only.
  WordTuple sample_preimage_unweighted(const ResidueVector& b, Rng& rng) const;

  /// Rejection-calibrated decoding: accepts with probability
  /// |Preimage_V(b)| q^h / ((1 + psi)(hq)^k), then samples a uniform preimage.
  /// Over uniform b the accepted output is uniform on [hq]^k.
  std::optional<WordTuple> decode_word(const ResidueVector& b, Rng& rng) const;

  const BigUint& acceptance_numerator(unsigned weight) const;
  const BigUint& acceptance_denominator() const noexcept { return accept_den_; }

  /// count(weight) * q^h / (hq)^k for each weight 0..h.
  std::vector<BigRational> uniformity_ratios() const;

 private:
  void check_word(const ResidueVector& b) const;

  // Exact Bernoulli(num / den) whose first 64-bit digit of num / den is
  // precomputed, so a single draw settles it except with probability 2^-64.
  struct LazyBernoulli {
    std::uint64_t digit = 0;
    BigUint remainder;  // (num * 2^64) mod den
    BigUint den;
    bool always = false;
    bool never = true;
    static LazyBernoulli make(const BigUint& num, const BigUint& den);
    bool operator()(Rng& rng) const;
  };
  // Next-row law at |A| = weight with `remaining` rows left: keep |A|, else
  // shrink it, else grow it.
  struct Step {
    LazyBernoulli keep;
    LazyBernoulli shrink;  // conditional on not keep
  };

  WordParams params_;
  std::vector<std::vector<BigUint>> table_;  // [weight][r]
  std::vector<std::vector<Step>> steps_;     // [weight][remaining]
  std::vector<BigUint> accept_num_;          // [weight]
  BigUint accept_den_;
};

/// Convenience: f(weight, k) without keeping the codec around.
BigUint count_preimages(const WordParams& params, unsigned weight);

struct UniformityMargin {
  std::vector<BigRational> ratios;  // per weight
  BigRational min;
  BigRational max;
  BigRational psi;
  bool within_bound = false;  // all ratios in [1 - psi, 1 + psi]
};

UniformityMargin uniformity_margin(const WordCodec& codec);

}  // namespace sparsenle
