#include "sparsenle/word_codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sparsenle {

WordParams WordParams::for_sentence(unsigned h, std::uint64_t q, unsigned k, unsigned t) {
  const std::uint64_t ht = static_cast<std::uint64_t>(h) * t;
  return WordParams{h, q, k, ht * ht};
}

double WordParams::uniformity_threshold() const {
  return 4.0 * h *
         (std::log2(static_cast<double>(h)) + std::log2(static_cast<double>(q)) +
          std::log2(static_cast<double>(psi_den)));
}

bool WordParams::uniformity_bound_holds() const {
  return static_cast<double>(k) + 1e-9 >= uniformity_threshold();
}

WordDigit split_word_index(WordIndex xi, unsigned h, std::uint64_t q) {
  if (h == 0 || xi >= static_cast<std::uint64_t>(h) * q) {
    throw Error(ErrorCode::IndexOutOfRange, "word index " + std::to_string(xi) +
                                                " outside [0, " + std::to_string(h * q) + ")");
  }
  return {xi / h, static_cast<unsigned>(xi % h)};
}

WordIndex join_word_index(std::uint64_t multiplier, unsigned coordinate, unsigned h) {
  return multiplier * h + coordinate;
}

ResidueVector v_row(WordIndex xi, unsigned h, std::uint64_t q) {
  const auto [m, d] = split_word_index(xi, h, q);
  ResidueVector row(h, 0);
  row[d] = m;
  return row;
}

ResidueVector word_tuple_sum(const WordTuple& tuple, unsigned h, std::uint64_t q) {
  ResidueVector sum(h, 0);
  for (WordIndex xi : tuple) {
    const auto [m, d] = split_word_index(xi, h, q);
    sum[d] = mod_add(sum[d], m, q);
  }
  return sum;
}

unsigned hamming_weight(const ResidueVector& b) {
  return static_cast<unsigned>(std::count_if(b.begin(), b.end(), [](auto x) { return x != 0; }));
}

WordCodec::WordCodec(WordParams params) : params_(params) {
  const unsigned h = params_.h;
  const std::uint64_t q = params_.q;
  const unsigned k = params_.k;
  if (h == 0) throw Error(ErrorCode::InvalidRange, "word length h must be >= 1");
  if (q < 2) throw Error(ErrorCode::InvalidRange, "modulus q must be >= 2");
  if (params_.psi_den == 0) throw Error(ErrorCode::InvalidRange, "psi denominator must be >= 1");

  // f(t, r) = t f(t-1, r-1) + (h + t(q-2)) f(t, r-1) + (h-t)(q-1) f(t+1, r-1)
  table_.assign(h + 1, std::vector<BigUint>(k + 1, 0));
  table_[0][0] = 1;
  for (unsigned r = 1; r <= k; ++r) {
    for (unsigned t = 0; t <= h; ++t) {
      BigUint v = BigUint(h + static_cast<std::uint64_t>(t) * (q - 2)) * table_[t][r - 1];
      if (t > 0) v += BigUint(t) * table_[t - 1][r - 1];
      if (t < h) v += BigUint(static_cast<std::uint64_t>(h - t)) * (q - 1) * table_[t + 1][r - 1];
      table_[t][r] = std::move(v);
    }
  }

  steps_.assign(h + 1, std::vector<Step>(k + 1));
  for (unsigned t = 0; t <= h; ++t) {
    for (unsigned rem = 1; rem <= k; ++rem) {
      const BigUint keep = BigUint(h + static_cast<std::uint64_t>(t) * (q - 2)) * table_[t][rem - 1];
      const BigUint shrink = t > 0 ? BigUint(t) * table_[t - 1][rem - 1] : BigUint(0);
      const BigUint& total = table_[t][rem];
      if (total == 0) continue;
      steps_[t][rem].keep = LazyBernoulli::make(keep, total);
      if (total > keep) steps_[t][rem].shrink = LazyBernoulli::make(shrink, total - keep);
    }
  }

  const BigUint qh = big_pow(q, h);
  accept_den_ = big_pow(params_.alphabet(), k) * (BigUint(params_.psi_den) + 1);
  accept_num_.reserve(h + 1);
  for (unsigned t = 0; t <= h; ++t) accept_num_.push_back(table_[t][k] * qh * params_.psi_den);
}

const BigUint& WordCodec::count_table(unsigned weight, unsigned r) const {
  if (weight > params_.h) {
    throw Error(ErrorCode::InvalidWeight,
                "weight " + std::to_string(weight) + " exceeds h = " + std::to_string(params_.h));
  }
  if (r > params_.k) throw Error(ErrorCode::InvalidRange, "tuple length exceeds k");
  return table_[weight][r];
}

const BigUint& WordCodec::count_preimages(unsigned weight) const {
  return count_table(weight, params_.k);
}

const BigUint& WordCodec::acceptance_numerator(unsigned weight) const {
  if (weight > params_.h) throw Error(ErrorCode::InvalidWeight, "weight exceeds h");
  return accept_num_[weight];
}

void WordCodec::check_word(const ResidueVector& b) const {
  if (b.size() != params_.h) {
    throw Error(ErrorCode::DimensionMismatch,
                "word has length " + std::to_string(b.size()) + ", expected " +
                    std::to_string(params_.h));
  }
  for (auto x : b) {
    if (x >= params_.q) throw Error(ErrorCode::InvalidRange, "word entry not reduced mod q");
  }
}

WordCodec::LazyBernoulli WordCodec::LazyBernoulli::make(const BigUint& num, const BigUint& den) {
  LazyBernoulli b;
  b.never = num == 0;
  b.always = num == den;
  if (b.never || b.always) return b;
  const BigUint shifted = num << 64;
  b.digit = static_cast<std::uint64_t>(shifted / den);
  b.remainder = shifted % den;
  b.den = den;
  return b;
}

bool WordCodec::LazyBernoulli::operator()(Rng& rng) const {
  if (never) return false;
  if (always) return true;
  // Compare a uniform U in [0, 1) with num / den one base-2^64 digit at a time.
  std::uint64_t x = rng.next();
  if (x != digit) return x < digit;
  BigUint r = remainder;
  for (;;) {
    r <<= 64;
    const auto d = static_cast<std::uint64_t>(r / den);
    r %= den;
    x = rng.next();
    if (x != d) return x < d;
  }
}

WordTuple WordCodec::sample_preimage(const ResidueVector& b, Rng& rng) const {
  const unsigned h = params_.h;
  const std::uint64_t q = params_.q;
  const unsigned k = params_.k;
  check_word(b);
  if (!params_.sampling_precondition()) {
    throw Error(ErrorCode::PreconditionViolated,
                "preimage sampling needs k > h + 2 (k = " + std::to_string(k) +
                    ", h = " + std::to_string(h) + ")");
  }

  WordTuple xi(k, 0);
  ResidueVector beta(h, 0);
  // With k > h + 2 the first step is case 3 whether A_0 is [h] or the true
  // difference set, so the true one is used throughout.
  std::vector<unsigned> diff, same;
  for (unsigned d = 0; d < h; ++d) (b[d] != 0 ? diff : same).push_back(d);

  for (unsigned r = 0; r < k; ++r) {
    const unsigned remaining = k - r;
    if (diff.size() == remaining) {
      WordTuple tail;
      tail.reserve(remaining);
      for (unsigned d : diff) tail.push_back(join_word_index(mod_sub(b[d], beta[d], q), d, h));
      shuffle_in_place(tail, rng);
      std::copy(tail.begin(), tail.end(), xi.begin() + r);
      break;
    }
    const Step& step = steps_[diff.size()][remaining];
    const std::uint64_t a = diff.size();
    WordIndex pick;
    if (step.keep(rng)) {
      // A zero row, or a nonzero multiple on a differing coordinate that
      // does not close the gap (q > 2 only).
      const std::uint64_t c = uniform_index(h + a * (q - 2), rng);
      if (c < h) {
        pick = c;
      } else {
        const std::uint64_t off = c - h;
        const unsigned d = diff[off / (q - 2)];
        const std::uint64_t need = mod_sub(b[d], beta[d], q);
        std::uint64_t m = 1 + off % (q - 2);
        if (m >= need) ++m;
        pick = join_word_index(m, d, h);
      }
    } else if (step.shrink(rng)) {
      const unsigned d = diff[uniform_index(a, rng)];
      pick = join_word_index(mod_sub(b[d], beta[d], q), d, h);
    } else {
      const std::uint64_t off = uniform_index(same.size() * (q - 1), rng);
      pick = join_word_index(1 + off % (q - 1), same[off / (q - 1)], h);
    }
    xi[r] = pick;
    const auto [m, d] = split_word_index(pick, h, q);
    beta[d] = mod_add(beta[d], m, q);
    diff.clear();
    same.clear();
    for (unsigned j = 0; j < h; ++j) (beta[j] != b[j] ? diff : same).push_back(j);
  }

  if (word_tuple_sum(xi, h, q) != b) {
    throw Error(ErrorCode::PreconditionViolated, "preimage sampler produced a tuple off target");
  }
  return xi;
}

WordTuple WordCodec::sample_preimage_unweighted(const ResidueVector& b, Rng& rng) const {
  const unsigned h = params_.h;
  const std::uint64_t q = params_.q;
  const unsigned k = params_.k;
  check_word(b);
  if (!params_.sampling_precondition()) {
    throw Error(ErrorCode::PreconditionViolated,
                "preimage sampling needs k > h + 2 (k = " + std::to_string(k) +
                    ", h = " + std::to_string(h) + ")");
  }

  WordTuple xi(k, 0);
  ResidueVector beta(h, 0);
  // The difference set starts as all of [h]; from r = 1 on it is {d : beta_d != b_d}.
  std::vector<unsigned> diff(h);
  for (unsigned d = 0; d < h; ++d) diff[d] = d;

  for (unsigned r = 0; r <= k; ++r) {
    const std::size_t remaining = k - r;
    if (diff.size() == remaining) {
      // Exactly one unit vector per differing coordinate completes the sum.
      WordTuple tail;
      tail.reserve(remaining);
      for (unsigned d : diff) tail.push_back(join_word_index(mod_sub(b[d], beta[d], q), d, h));
      shuffle_in_place(tail, rng);
      std::copy(tail.begin(), tail.end(), xi.begin() + r);
      break;
    }
    WordIndex pick;
    if (diff.size() + 1 == remaining) {
      // Zero rows, or any nonzero multiple on a coordinate that still differs.
      const std::uint64_t choices = h + diff.size() * (q - 1);
      const std::uint64_t c = uniform_index(choices, rng);
      if (c < h) {
        pick = c;
      } else {
        const std::uint64_t off = c - h;
        pick = join_word_index(1 + off % (q - 1), diff[off / (q - 1)], h);
      }
    } else {
      pick = uniform_index(params_.alphabet(), rng);
    }
    xi[r] = pick;
    const auto [m, d] = split_word_index(pick, h, q);
    beta[d] = mod_add(beta[d], m, q);
    diff.clear();
    for (unsigned j = 0; j < h; ++j) {
      if (beta[j] != b[j]) diff.push_back(j);
    }
  }

  if (word_tuple_sum(xi, h, q) != b) {
    throw Error(ErrorCode::PreconditionViolated, "preimage sampler produced a tuple off target");
  }
  return xi;
}

std::optional<WordTuple> WordCodec::decode_word(const ResidueVector& b, Rng& rng) const {
  check_word(b);
  if (!params_.sampling_precondition()) {
    throw Error(ErrorCode::PreconditionViolated, "word decoding needs k > h + 2");
  }
  const BigUint& num = accept_num_[hamming_weight(b)];
  if (num > accept_den_) {
    throw Error(ErrorCode::ParameterBoundViolated,
                "preimage count exceeds (1 + psi)(hq)^k / q^h; k too small for this psi");
  }
  if (!exact_bernoulli(num, accept_den_, rng)) return std::nullopt;
  return sample_preimage(b, rng);
}

std::vector<BigRational> WordCodec::uniformity_ratios() const {
  const BigUint qh = big_pow(params_.q, params_.h);
  const BigUint total = big_pow(params_.alphabet(), params_.k);
  std::vector<BigRational> ratios;
  ratios.reserve(params_.h + 1);
  for (unsigned t = 0; t <= params_.h; ++t) {
    ratios.emplace_back(BigRational(table_[t][params_.k] * qh, total));
  }
  return ratios;
}

BigUint count_preimages(const WordParams& params, unsigned weight) {
  return WordCodec(params).count_preimages(weight);
}

UniformityMargin uniformity_margin(const WordCodec& codec) {
  UniformityMargin margin;
  margin.ratios = codec.uniformity_ratios();
  margin.min = *std::min_element(margin.ratios.begin(), margin.ratios.end());
  margin.max = *std::max_element(margin.ratios.begin(), margin.ratios.end());
  margin.psi = BigRational(BigUint(1), BigUint(codec.params().psi_den));
  margin.within_bound = margin.min >= 1 - margin.psi && margin.max <= 1 + margin.psi;
  return margin;
}

}  // namespace sparsenle
