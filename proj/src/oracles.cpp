#include "sparsenle/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/special_functions/gamma.hpp>

namespace sparsenle {

using json = nlohmann::ordered_json;

namespace {

std::uint64_t guarded_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t v = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (v > kEnumerationLimit / std::max<std::uint64_t>(base, 1)) {
      throw Error(ErrorCode::TooLarge, "search space exceeds 10^7 states");
    }
    v *= base;
  }
  if (v > kEnumerationLimit) throw Error(ErrorCode::TooLarge, "search space exceeds 10^7 states");
  return v;
}

// Odometer over (Z/baseZ)^len, last coordinate fastest. Returns false after the last state.
bool advance(std::vector<std::uint64_t>& digits, std::uint64_t base) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < base) return true;
    digits[i] = 0;
  }
  return false;
}

// Calls fn(s, histogram of residuals) for every s in lexicographic order.
template <class Fn>
void scan_secrets(const Instance& inst, Fn&& fn) {
  guarded_pow(inst.q, inst.dim);
  const std::uint64_t q = inst.q;
  ResidueVector s(inst.dim, 0);
  std::vector<std::uint64_t> hist(q);
  do {
    std::fill(hist.begin(), hist.end(), 0);
    for (auto r : residuals(inst, s)) ++hist[r];
    fn(s, hist);
  } while (advance(s, q));
}

std::vector<BigRational> weight_table(const WeightFn& mu, std::uint64_t q) {
  std::vector<BigRational> table(q);
  for (std::uint64_t x = 0; x < q; ++x) table[x] = mu(x, q);
  return table;
}

BigRational weighted_average(const std::vector<std::uint64_t>& hist,
                             const std::vector<BigRational>& table, std::size_t m) {
  if (m == 0) return BigRational(0);
  BigRational total(0);
  for (std::size_t x = 0; x < hist.size(); ++x) {
    if (hist[x]) total += table[x] * BigRational(hist[x]);
  }
  return total / BigRational(static_cast<std::uint64_t>(m));
}

}  // namespace

std::vector<WordTuple> enumerate_preimage(const ResidueVector& b, unsigned h, std::uint64_t q,
                                          unsigned k) {
  if (b.size() != h) throw Error(ErrorCode::DimensionMismatch, "target must have length h");
  const std::uint64_t base = static_cast<std::uint64_t>(h) * q;
  guarded_pow(base, k);
  std::vector<WordTuple> out;
  WordTuple tuple(k, 0);
  do {
    if (word_tuple_sum(tuple, h, q) == b) out.push_back(tuple);
  } while (advance(tuple, base));
  return out;
}

std::vector<BruteForceHit> brute_force_search(const Instance& inst, const BigRational& max_weight,
                                              const WeightFn& mu) {
  const auto table = weight_table(mu, inst.q);
  std::vector<BruteForceHit> hits;
  scan_secrets(inst, [&](const ResidueVector& s, const std::vector<std::uint64_t>& hist) {
    BigRational obj = weighted_average(hist, table, inst.size());
    if (obj <= max_weight) hits.push_back({s, std::move(obj)});
  });
  return hits;
}

BruteForceHit brute_force_minimum(const Instance& inst, const WeightFn& mu) {
  const auto table = weight_table(mu, inst.q);
  std::optional<BruteForceHit> best;
  scan_secrets(inst, [&](const ResidueVector& s, const std::vector<std::uint64_t>& hist) {
    BigRational obj = weighted_average(hist, table, inst.size());
    if (!best || obj < best->objective) best = BruteForceHit{s, std::move(obj)};
  });
  return *best;
}

SparseRefuter brute_force_refuter(BigRational delta, WeightFn mu) {
  return [delta = std::move(delta), mu](const Instance& inst) {
    return brute_force_minimum(inst, mu).objective <= delta ? Verdict::ApproximatelySatisfiable
                                                            : Verdict::Unsatisfiable;
  };
}

// ---------------------------------------------------------------------------

json ChiSquareReport::to_json() const {
  json j;
  j["statistic"] = statistic;
  j["dof"] = dof;
  j["p_value"] = p_value;
  j["max_deviation_sigma"] = max_deviation_sigma;
  return j;
}

ChiSquareReport chi_square_uniform(const std::vector<double>& counts,
                                   const std::vector<double>& expected) {
  if (counts.size() != expected.size() || counts.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "counts and expected must be nonempty and equal length");
  }
  ChiSquareReport r;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (expected[i] < 5.0) {
      throw Error(ErrorCode::UnderpoweredCells,
                  "expected count " + std::to_string(expected[i]) + " < 5 in cell " + std::to_string(i));
    }
    const double d = counts[i] - expected[i];
    r.statistic += d * d / expected[i];
    r.max_deviation_sigma = std::max(r.max_deviation_sigma, std::abs(d) / std::sqrt(expected[i]));
  }
  r.dof = counts.size() - 1;
  r.p_value = r.dof == 0 ? 1.0 : boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic);
  return r;
}

ChiSquareReport chi_square_uniform(const std::vector<std::uint64_t>& counts) {
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  std::vector<double> obs(counts.begin(), counts.end());
  std::vector<double> exp(counts.size(), counts.empty() ? 0.0 : total / counts.size());
  return chi_square_uniform(obs, exp);
}

// ---------------------------------------------------------------------------

std::string_view to_string(DecisionVerdict verdict) {
  return verdict == DecisionVerdict::Planted ? "PLANTED" : "NULL";
}

json FolkloreResult::to_json() const {
  json j;
  j["verdict"] = std::string(to_string(verdict));
  j["groups_with_collisions"] = groups_with_collisions;
  j["pairs"] = pairs;
  j["difference_counts"] = difference_counts;
  j["zero_fraction"] = zero_fraction;
  j["bias"] = bias;
  j["test"] = test.to_json();
  return j;
}

FolkloreResult folklore_distinguisher(const Instance& sparse, double alpha) {
  if (sparse.kind != InstanceKind::Sparse) {
    throw Error(ErrorCode::DimensionMismatch, "folklore distinguisher needs a sparse instance");
  }
  std::map<SparseVector, std::vector<std::uint64_t>> groups;
  for (const auto& s : sparse.sparse) groups[s.a].push_back(s.y);

  FolkloreResult r;
  r.difference_counts.assign(sparse.q, 0);
  for (const auto& [a, labels] : groups) {
    if (labels.size() < 2) continue;
    ++r.groups_with_collisions;
    for (std::size_t i = 0; i + 1 < labels.size(); i += 2) {
      ++r.difference_counts[mod_sub(labels[i], labels[i + 1], sparse.q)];
      ++r.pairs;
    }
  }
  if (r.pairs == 0) throw Error(ErrorCode::NoCollisions, "no two samples share a coefficient vector");

  const double pairs = static_cast<double>(r.pairs);
  r.zero_fraction = r.difference_counts[0] / pairs;
  for (auto c : r.difference_counts) r.bias += std::abs(c / pairs - 1.0 / sparse.q);
  r.bias *= 0.5;
  r.test = chi_square_uniform(r.difference_counts);
  r.verdict = r.test.p_value < alpha ? DecisionVerdict::Planted : DecisionVerdict::Null;
  return r;
}

}  // namespace sparsenle
