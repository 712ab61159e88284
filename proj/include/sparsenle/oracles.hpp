#pragma once

// Desk-scale checks: exhaustive preimage enumeration, brute-force secret
// search, the collision ("folklore") distinguisher and Pearson chi-square.

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "sparsenle/core.hpp"
#include "sparsenle/nle_model.hpp"
#include "sparsenle/reduction.hpp"
#include "sparsenle/word_codec.hpp"

namespace sparsenle {

inline constexpr std::uint64_t kEnumerationLimit = 10'000'000;

/// Every k-tuple in [hq]^k whose V rows sum to b, lexicographic order.
/// Throws TooLarge if (hq)^k > 10^7.
std::vector<WordTuple> enumerate_preimage(const ResidueVector& b, unsigned h, std::uint64_t q,
                                          unsigned k);

struct BruteForceHit {
  ResidueVector secret;
  BigRational objective;
};

/// All s in (Z/qZ)^dim with objective(inst, s, mu) <= max_weight, in
/// lexicographic order of s. Throws TooLarge if q^dim > 10^7.
std::vector<BruteForceHit> brute_force_search(const Instance& inst, const BigRational& max_weight,
                                              const WeightFn& mu);

/// Smallest objective over all of (Z/qZ)^dim, with one minimizer (the first
/// in lexicographic order).
BruteForceHit brute_force_minimum(const Instance& inst, const WeightFn& mu);

/// Refuter for tiny instances: APPROXIMATELY SATISFIABLE iff some secret
/// reaches objective <= delta.
SparseRefuter brute_force_refuter(BigRational delta, WeightFn mu);

struct ChiSquareReport {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  double max_deviation_sigma = 0.0;  // max |obs - exp| / sqrt(exp)

  nlohmann::ordered_json to_json() const;
};

/// Pearson statistic against `expected`; p from the regularized upper
/// incomplete gamma. Throws UnderpoweredCells if any expected count < 5,
/// DimensionMismatch if the lists differ in length.
ChiSquareReport chi_square_uniform(const std::vector<double>& counts,
                                   const std::vector<double>& expected);

/// Against equal expected counts summing to the observed total.
ChiSquareReport chi_square_uniform(const std::vector<std::uint64_t>& counts);

enum class DecisionVerdict { Planted, Null };

std::string_view to_string(DecisionVerdict verdict);

struct FolkloreResult {
  DecisionVerdict verdict = DecisionVerdict::Null;
  std::size_t groups_with_collisions = 0;
  std::size_t pairs = 0;
  std::vector<std::uint64_t> difference_counts;  // histogram of y_i - y_j over Z/qZ
  double zero_fraction = 0.0;
  /// Total variation distance of the difference histogram from uniform.
  double bias = 0.0;
  ChiSquareReport test;

  nlohmann::ordered_json to_json() const;
};

/// Groups samples by identical coefficient vector (support and values), pairs
/// consecutive members of each group, and tests the label differences against
/// Unif(Z/qZ). PLANTED when p < alpha. Throws NoCollisions if no pair exists.
FolkloreResult folklore_distinguisher(const Instance& sparse, double alpha = 0.01);

}  // namespace sparsenle
