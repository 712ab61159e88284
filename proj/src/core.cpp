#include "sparsenle/core.hpp"

#include <numeric>
#include <set>
#include <tuple>

namespace sparsenle {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotAUnit: return "NotAUnit";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ParameterBoundViolated: return "ParameterBoundViolated";
    case ErrorCode::UnsupportedSupportSize: return "UnsupportedSupportSize";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::InconsistentSecret: return "InconsistentSecret";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NoCollisions: return "NoCollisions";
    case ErrorCode::UnderpoweredCells: return "UnderpoweredCells";
    case ErrorCode::WrongSupportDistribution: return "WrongSupportDistribution";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

bool is_unit(std::uint64_t x, std::uint64_t q) { return std::gcd(x % q, q) == 1; }

std::uint64_t mod_inverse(std::uint64_t x, std::uint64_t q) {
  if (q < 2) throw Error(ErrorCode::InvalidRange, "modulus must be >= 2");
  // Extended Euclid on signed 128-bit to avoid overflow for q near 2^63.
  __int128 r0 = static_cast<__int128>(q), r1 = static_cast<__int128>(x % q);
  __int128 t0 = 0, t1 = 1;
  while (r1 != 0) {
    const __int128 quot = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - quot * r1);
    std::tie(t0, t1) = std::make_pair(t1, t0 - quot * t1);
  }
  if (r0 != 1) {
    throw Error(ErrorCode::NotAUnit,
                std::to_string(x) + " is not invertible mod " + std::to_string(q));
  }
  if (t0 < 0) t0 += q;
  return static_cast<std::uint64_t>(t0);
}

std::uint64_t dot_mod(const ResidueVector& a, const ResidueVector& b, std::uint64_t q) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "dot product of vectors of different length");
  }
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc = mod_add(acc, mod_mul(a[i], b[i], q), q);
  return acc;
}

Residue::Residue(std::uint64_t value, std::uint64_t modulus) : value_(0), modulus_(modulus) {
  if (modulus < 2) throw Error(ErrorCode::InvalidRange, "modulus must be >= 2");
  value_ = value % modulus;
}

namespace {
void require_same_modulus(Residue a, Residue b) {
  if (a.modulus() != b.modulus()) {
    throw Error(ErrorCode::DimensionMismatch, "residues with different moduli");
  }
}
}  // namespace

Residue operator+(Residue a, Residue b) {
  require_same_modulus(a, b);
  return {mod_add(a.value_, b.value_, a.modulus_), a.modulus_};
}
Residue operator-(Residue a, Residue b) {
  require_same_modulus(a, b);
  return {mod_sub(a.value_, b.value_, a.modulus_), a.modulus_};
}
Residue operator*(Residue a, Residue b) {
  require_same_modulus(a, b);
  return {mod_mul(a.value_, b.value_, a.modulus_), a.modulus_};
}

Residue unit_inverse(Residue x) { return {mod_inverse(x.value(), x.modulus()), x.modulus()}; }

// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t x) { return splitmix64(x); }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : Rng(seed, mix(seed)) {}

Rng::Rng(std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key) {
  std::uint64_t x = key;
  for (auto& word : state_) word = splitmix64(x);
}

Rng Rng::substream(std::string_view label, std::uint64_t index) const {
  const std::uint64_t k = mix(mix(key_ ^ fnv1a(label)) ^ mix(index ^ 0xD1B54A32D192ED03ULL));
  return Rng(seed_, k);
}

std::uint64_t Rng::next() noexcept {
  ++draws_;
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

std::uint64_t uniform_index(std::uint64_t bound, Rng& rng) {
  if (bound == 0) throw Error(ErrorCode::InvalidRange, "uniform_index bound must be >= 1");
  // Values below `threshold` would bias the low residues.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = rng.next();
    if (x >= threshold) return x % bound;
  }
}

BigUint uniform_below(const BigUint& bound, Rng& rng) {
  if (bound <= 0) throw Error(ErrorCode::InvalidRange, "uniform_below bound must be >= 1");
  if (bound == 1) return 0;
  const BigUint top = bound - 1;
  const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(top)) + 1;
  const unsigned words = (bits + 63) / 64;
  const unsigned spare = words * 64 - bits;
  for (;;) {
    BigUint x = 0;
    for (unsigned w = 0; w < words; ++w) {
      std::uint64_t block = rng.next();
      if (w == 0 && spare > 0) block >>= spare;
      x <<= 64;
      x |= block;
    }
    if (x < bound) return x;
  }
}

bool exact_bernoulli(const BigUint& accept_num, const BigUint& accept_den, Rng& rng) {
  if (accept_den <= 0) throw Error(ErrorCode::InvalidProbability, "denominator must be > 0");
  if (accept_num < 0 || accept_num > accept_den) {
    throw Error(ErrorCode::InvalidProbability, "numerator exceeds denominator");
  }
  if (accept_num == 0) return false;
  if (accept_num == accept_den) return true;
  return uniform_below(accept_den, rng) < accept_num;
}

std::vector<std::uint64_t> random_k_subset(std::uint64_t n, std::uint64_t k, Rng& rng) {
  if (k > n) throw Error(ErrorCode::InvalidRange, "subset size exceeds population");
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = uniform_index(j + 1, rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

std::uint64_t uniform_unit(std::uint64_t q, Rng& rng) {
  if (q < 2) throw Error(ErrorCode::InvalidRange, "modulus must be >= 2");
  for (;;) {
    const std::uint64_t x = uniform_index(q, rng);
    if (is_unit(x, q)) return x;
  }
}

double uniform_real(Rng& rng) {
  return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

BigUint big_pow(std::uint64_t base, unsigned exp) {
  return boost::multiprecision::pow(BigUint(base), exp);
}

std::uint64_t checked_pow(std::uint64_t base, unsigned exp) {
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 63;
  std::uint64_t acc = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && acc > (kLimit - 1) / base) {
      throw Error(ErrorCode::TooLarge, std::to_string(base) + "^" + std::to_string(exp) +
                                           " does not fit in 63 bits");
    }
    acc *= base;
  }
  return acc;
}

std::string to_string(const BigRational& r) {
  const BigUint num = boost::multiprecision::numerator(r);
  const BigUint den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace sparsenle
