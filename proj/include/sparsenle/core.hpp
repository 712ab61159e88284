#pragma once

// Residue arithmetic over Z/qZ, exact big numbers, and the seedable
// randomness every other module draws from.

#include <algorithm>
#include <array>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace sparsenle {

using BigUint = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

enum class ErrorCode {
  NotAUnit,
  InvalidProbability,
  InvalidRange,
  IndexOutOfRange,
  InvalidWeight,
  PreconditionViolated,
  ParameterBoundViolated,
  UnsupportedSupportSize,
  DimensionMismatch,
  InsufficientSamples,
  InconsistentSecret,
  Infeasible,
  TooLarge,
  NoCollisions,
  UnderpoweredCells,
  WrongSupportDistribution,
  Parse,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Z/qZ

using ResidueVector = std::vector<std::uint64_t>;

inline std::uint64_t mod_add(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  const std::uint64_t s = a + b;  // a, b < q <= 2^63
  return s >= q ? s - q : s;
}
inline std::uint64_t mod_sub(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return a >= b ? a - b : a + (q - b);
}
inline std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t q) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % q);
}

bool is_unit(std::uint64_t x, std::uint64_t q);

/// Inverse of x modulo q; throws NotAUnit when gcd(x, q) != 1.
std::uint64_t mod_inverse(std::uint64_t x, std::uint64_t q);

/// Inner product of two residue vectors mod q.
std::uint64_t dot_mod(const ResidueVector& a, const ResidueVector& b, std::uint64_t q);

class Residue {
 public:
  Residue(std::uint64_t value, std::uint64_t modulus);

  std::uint64_t value() const noexcept { return value_; }
  std::uint64_t modulus() const noexcept { return modulus_; }

  friend Residue operator+(Residue a, Residue b);
  friend Residue operator-(Residue a, Residue b);
  friend Residue operator*(Residue a, Residue b);
  friend bool operator==(Residue a, Residue b) = default;

 private:
  std::uint64_t value_;
  std::uint64_t modulus_;
};

Residue unit_inverse(Residue x);

// ---------------------------------------------------------------------------
// Randomness

/// xoshiro256** with SplitMix64 seeding. A stream is identified by its key;
/// substreams derive their key from (parent key, label, index) and never from
/// the parent's draw position, so per-sample streams are scheduling-free.
class Rng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::string_view kIdentifier = "xoshiro256starstar-splitmix64-v1";

  explicit Rng(std::uint64_t seed);

  Rng substream(std::string_view label, std::uint64_t index = 0) const;

  std::uint64_t next() noexcept;
  result_type operator()() noexcept { return next(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  Rng(std::uint64_t seed, std::uint64_t key);

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t draws_ = 0;
};

/// Uniform integer in [0, bound), by rejection (no modulo bias).
std::uint64_t uniform_index(std::uint64_t bound, Rng& rng);

/// Uniform big integer in [0, bound), by rejection on 64-bit blocks.
BigUint uniform_below(const BigUint& bound, Rng& rng);

/// True with probability exactly accept_num / accept_den.
bool exact_bernoulli(const BigUint& accept_num, const BigUint& accept_den, Rng& rng);

/// Uniform k-subset of {0, ..., n-1}, returned sorted (Floyd's algorithm).
std::vector<std::uint64_t> random_k_subset(std::uint64_t n, std::uint64_t k, Rng& rng);

/// Uniform unit of Z/qZ.
std::uint64_t uniform_unit(std::uint64_t q, Rng& rng);

double standard_normal(Rng& rng);

/// Uniform double in [0, 1) with 53 random bits.
double uniform_real(Rng& rng);

template <class T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = uniform_index(i, rng);
    std::swap(items[i - 1], items[j]);
  }
}

template <class T>
std::vector<T> random_permutation(std::vector<T> items, Rng& rng) {
  shuffle_in_place(items, rng);
  return items;
}

// ---------------------------------------------------------------------------
// Misc

/// Runs fn(i) for i in [0, count) on up to `threads` workers with static
/// contiguous chunks. fn must only write state owned by index i. The first
/// exception thrown by any worker is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::exception_ptr> failures(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, w, &fn, &failures] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

/// base^exp as an exact integer.
BigUint big_pow(std::uint64_t base, unsigned exp);

/// base^exp as a machine word; throws TooLarge at or above 2^63.
std::uint64_t checked_pow(std::uint64_t base, unsigned exp);

std::string to_string(const BigRational& r);

}  // namespace sparsenle
