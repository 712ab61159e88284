#include "sparsenle/sentence_codec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace sparsenle {

ReductionParams ReductionParams::make(std::uint64_t q, unsigned h, unsigned t, unsigned k) {
  if (q < 2) throw Error(ErrorCode::InvalidRange, "modulus q must be >= 2");
  if (h == 0 || t == 0) throw Error(ErrorCode::InvalidRange, "h and t must be >= 1");
  ReductionParams p;
  p.q = q;
  p.h = h;
  p.t = t;
  p.k = k;
  p.n = checked_pow(p.alphabet(), t);
  p.L = h * t;
  p.psi_den = static_cast<std::uint64_t>(p.L) * p.L;
  return p;
}

double ReductionParams::uniformity_threshold() const {
  return 4.0 * h *
         (std::log2(static_cast<double>(h)) + std::log2(static_cast<double>(q)) +
          2.0 * std::log2(static_cast<double>(L)));
}

bool ReductionParams::uniformity_gate() const {
  return static_cast<double>(k) + 1e-9 >= uniformity_threshold();
}

std::uint64_t ReductionParams::sparsity_limit() const {
  auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (root * root > n) --root;
  while ((root + 1) * (root + 1) <= n) ++root;
  return root / 2;
}

void validate_sparse(const SparseVector& a, std::uint64_t n, std::uint64_t q) {
  if (a.indices.size() != a.values.size()) {
    throw Error(ErrorCode::DimensionMismatch, "support and value lists differ in length");
  }
  for (std::size_t i = 0; i < a.indices.size(); ++i) {
    if (a.indices[i] >= n) throw Error(ErrorCode::IndexOutOfRange, "support index >= n");
    if (i > 0 && a.indices[i] <= a.indices[i - 1]) {
      throw Error(ErrorCode::InvalidRange, "support indices must be strictly increasing");
    }
    if (a.values[i] >= q || !is_unit(a.values[i], q)) {
      throw Error(ErrorCode::NotAUnit, "support value is not a unit mod q");
    }
  }
}

std::uint64_t sparse_dot(const SparseVector& a, const ResidueVector& x, std::uint64_t q) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < a.indices.size(); ++i) {
    if (a.indices[i] >= x.size()) throw Error(ErrorCode::DimensionMismatch, "index past vector");
    acc = mod_add(acc, mod_mul(a.values[i], x[a.indices[i]], q), q);
  }
  return acc;
}

std::vector<WordIndex> sentence_digits(SentenceIndex idx, const ReductionParams& params) {
  if (idx >= params.n) {
    throw Error(ErrorCode::IndexOutOfRange,
                "sentence index " + std::to_string(idx) + " >= n = " + std::to_string(params.n));
  }
  const std::uint64_t base = params.alphabet();
  std::vector<WordIndex> digits(params.t);
  for (unsigned j = params.t; j-- > 0;) {
    digits[j] = idx % base;
    idx /= base;
  }
  return digits;
}

SentenceIndex sentence_from_digits(const std::vector<WordIndex>& digits,
                                   const ReductionParams& params) {
  if (digits.size() != params.t) throw Error(ErrorCode::DimensionMismatch, "need t digits");
  const std::uint64_t base = params.alphabet();
  SentenceIndex idx = 0;
  for (WordIndex d : digits) {
    if (d >= base) throw Error(ErrorCode::IndexOutOfRange, "digit >= hq");
    idx = idx * base + d;
  }
  return idx;
}

ResidueVector g_row(SentenceIndex idx, const ReductionParams& params) {
  ResidueVector row(params.L, 0);
  const auto digits = sentence_digits(idx, params);
  for (unsigned j = 0; j < params.t; ++j) {
    const auto [m, d] = split_word_index(digits[j], params.h, params.q);
    row[j * params.h + d] = m;
  }
  return row;
}

std::uint64_t g_row_dot(SentenceIndex idx, const ResidueVector& s, const ReductionParams& params) {
  if (s.size() != params.L) throw Error(ErrorCode::DimensionMismatch, "secret must have length L");
  const auto digits = sentence_digits(idx, params);
  std::uint64_t acc = 0;
  for (unsigned j = 0; j < params.t; ++j) {
    const auto [m, d] = split_word_index(digits[j], params.h, params.q);
    acc = mod_add(acc, mod_mul(m, s[j * params.h + d], params.q), params.q);
  }
  return acc;
}

ResidueVector sparse_times_g(const SparseVector& a, const ReductionParams& params) {
  ResidueVector out(params.L, 0);
  for (std::size_t i = 0; i < a.indices.size(); ++i) {
    const auto digits = sentence_digits(a.indices[i], params);
    for (unsigned j = 0; j < params.t; ++j) {
      const auto [m, d] = split_word_index(digits[j], params.h, params.q);
      auto& slot = out[j * params.h + d];
      slot = mod_add(slot, mod_mul(a.values[i], m, params.q), params.q);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

SupportDistribution SupportDistribution::ones() { return {}; }

SupportDistribution SupportDistribution::uniform_units() {
  SupportDistribution d;
  d.kind_ = Kind::UniformUnits;
  d.description_ = "uniform-units";
  return d;
}

SupportDistribution SupportDistribution::table(
    std::vector<std::pair<std::uint64_t, ResidueVector>> rows) {
  SupportDistribution d;
  d.kind_ = Kind::Table;
  d.description_ = "table";
  for (const auto& [w, v] : rows) d.total_weight_ += w;
  if (rows.empty() || d.total_weight_ == 0) {
    throw Error(ErrorCode::InvalidRange, "support table needs positive total weight");
  }
  d.rows_ = std::move(rows);
  return d;
}

SupportDistribution SupportDistribution::parse(std::string_view spec) {
  if (spec == "ones") return ones();
  if (spec == "uniform-units") return uniform_units();
  if (spec.substr(0, 5) == "file:") {
    const std::string path(spec.substr(5));
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Parse, "cannot open support table " + path);
    std::vector<std::pair<std::uint64_t, ResidueVector>> rows;
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream fields(line);
      std::uint64_t weight;
      if (!(fields >> weight)) continue;
      ResidueVector values;
      for (std::uint64_t v; fields >> v;) values.push_back(v);
      rows.emplace_back(weight, std::move(values));
    }
    auto d = table(std::move(rows));
    d.description_ = std::string(spec);
    return d;
  }
  throw Error(ErrorCode::Parse, "unknown support distribution '" + std::string(spec) + "'");
}

ResidueVector SupportDistribution::sample(unsigned k, std::uint64_t q, Rng& rng) const {
  switch (kind_) {
    case Kind::Ones:
      return ResidueVector(k, 1);
    case Kind::UniformUnits: {
      ResidueVector v(k);
      for (auto& x : v) x = uniform_unit(q, rng);
      return v;
    }
    case Kind::Table: {
      std::uint64_t pick = uniform_index(total_weight_, rng);
      for (const auto& [w, v] : rows_) {
        if (pick < w) {
          if (v.size() != k) {
            throw Error(ErrorCode::UnsupportedSupportSize,
                        "support table row has length " + std::to_string(v.size()) +
                            ", need " + std::to_string(k));
          }
          for (auto x : v) {
            if (x >= q || !is_unit(x, q)) {
              throw Error(ErrorCode::NotAUnit, "support table value is not a unit");
            }
          }
          return v;
        }
        pick -= w;
      }
      break;
    }
  }
  throw Error(ErrorCode::InvalidRange, "support distribution fell through");
}

// ---------------------------------------------------------------------------

std::vector<SentenceIndex> word_shift(const std::vector<SentenceIndex>& columns,
                                      const ResidueVector& rho, const ReductionParams& params) {
  if (rho.size() != columns.size()) {
    throw Error(ErrorCode::DimensionMismatch, "need one shift value per column");
  }
  std::vector<SentenceIndex> out;
  out.reserve(columns.size());
  for (std::size_t psi = 0; psi < columns.size(); ++psi) {
    const std::uint64_t inv = mod_inverse(rho[psi], params.q);
    auto digits = sentence_digits(columns[psi], params);
    for (auto& digit : digits) {
      const auto [m, d] = split_word_index(digit, params.h, params.q);
      digit = join_word_index(mod_mul(inv, m, params.q), d, params.h);
    }
    out.push_back(sentence_from_digits(digits, params));
  }
  return out;
}

std::vector<SentenceIndex> identity_row_indices(const ReductionParams& params) {
  std::vector<SentenceIndex> rows;
  rows.reserve(params.L);
  for (unsigned u = 0; u < params.L; ++u) {
    const unsigned block = u / params.h;
    const unsigned coord = u % params.h;
    // Multiplier 1 on coordinate `coord` in word `block`; zero row 0 elsewhere.
    std::vector<WordIndex> digits(params.t, 0);
    digits[block] = join_word_index(1, coord, params.h);
    rows.push_back(sentence_from_digits(digits, params));
  }
  return rows;
}

SentenceCodec::SentenceCodec(ReductionParams params)
    : params_(params), words_(params.word_params()) {}

std::optional<std::vector<SentenceIndex>> SentenceCodec::decode_columns(const ResidueVector& b,
                                                                        Rng& rng) const {
  if (b.size() != params_.L) {
    throw Error(ErrorCode::DimensionMismatch,
                "dense vector has length " + std::to_string(b.size()) + ", expected L = " +
                    std::to_string(params_.L));
  }
  const std::uint64_t base = params_.alphabet();
  std::vector<SentenceIndex> columns(params_.k, 0);
  for (unsigned j = 0; j < params_.t; ++j) {
    const ResidueVector word(b.begin() + j * params_.h, b.begin() + (j + 1) * params_.h);
    auto tuple = words_.decode_word(word, rng);
    if (!tuple) return std::nullopt;
    for (unsigned psi = 0; psi < params_.k; ++psi) columns[psi] = columns[psi] * base + (*tuple)[psi];
  }
  return columns;
}

std::optional<SparseVector> SentenceCodec::decode_sentence(const ResidueVector& b,
                                                           const SupportDistribution& values,
                                                           Rng& rng) const {
  auto columns = decode_columns(b, rng);
  if (!columns) return std::nullopt;
  const ResidueVector rho = values.sample(params_.k, params_.q, rng);
  const auto shifted = word_shift(*columns, rho, params_);

  // Distinctness is checked after the shift: that is the support actually emitted.
  std::vector<std::pair<SentenceIndex, std::uint64_t>> entries;
  entries.reserve(params_.k);
  for (unsigned psi = 0; psi < params_.k; ++psi) entries.emplace_back(shifted[psi], rho[psi]);
  std::sort(entries.begin(), entries.end());
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].first == entries[i - 1].first) return std::nullopt;
  }

  SparseVector a;
  a.indices.reserve(entries.size());
  a.values.reserve(entries.size());
  for (const auto& [idx, v] : entries) {
    a.indices.push_back(idx);
    a.values.push_back(v);
  }
  if (sparse_times_g(a, params_) != b) {
    throw Error(ErrorCode::PreconditionViolated, "decoded vector violates a^T G = b^T");
  }
  return a;
}

// ---------------------------------------------------------------------------

SupportSizeDistribution SupportSizeDistribution::point(unsigned k) { return uniform(k, k); }

SupportSizeDistribution SupportSizeDistribution::uniform(unsigned k_min, unsigned k_max) {
  if (k_min > k_max) throw Error(ErrorCode::InvalidRange, "k_min > k_max");
  SupportSizeDistribution d;
  d.k_min_ = k_min;
  d.k_max_ = k_max;
  return d;
}

SupportSizeDistribution SupportSizeDistribution::binomial(unsigned trials, std::uint64_t num,
                                                          std::uint64_t den, unsigned k_min,
                                                          unsigned k_max) {
  if (den == 0 || num > den) throw Error(ErrorCode::InvalidProbability, "bad binomial rate");
  if (k_min > k_max || k_max > trials) throw Error(ErrorCode::InvalidRange, "bad size window");
  if (num == 0 && k_min > 0) throw Error(ErrorCode::InvalidRange, "window has zero mass");
  if (num == den && k_max < trials) throw Error(ErrorCode::InvalidRange, "window has zero mass");
  SupportSizeDistribution d;
  d.kind_ = Kind::Binomial;
  d.k_min_ = k_min;
  d.k_max_ = k_max;
  d.trials_ = trials;
  d.num_ = num;
  d.den_ = den;
  return d;
}

unsigned SupportSizeDistribution::sample(Rng& rng) const {
  if (kind_ == Kind::Uniform) {
    if (k_min_ == k_max_) return k_min_;  // point mass draws nothing
    return k_min_ + static_cast<unsigned>(uniform_index(k_max_ - k_min_ + 1, rng));
  }
  for (;;) {
    unsigned hits = 0;
    for (unsigned i = 0; i < trials_; ++i) hits += uniform_index(den_, rng) < num_ ? 1 : 0;
    if (hits >= k_min_ && hits <= k_max_) return hits;
  }
}

VariableSentenceCodec::VariableSentenceCodec(std::uint64_t q, unsigned h, unsigned t,
                                             SupportSizeDistribution sizes, bool relax_gates)
    : sizes_(sizes) {
  const auto lo = ReductionParams::make(q, h, t, sizes.k_min());
  const auto hi = ReductionParams::make(q, h, t, sizes.k_max());
  if (!lo.functional_gate()) {
    throw Error(ErrorCode::UnsupportedSupportSize, "k_min must exceed h + 2");
  }
  if (!relax_gates && !lo.uniformity_gate()) {
    throw Error(ErrorCode::UnsupportedSupportSize, "k_min fails the uniformity bound");
  }
  if (!relax_gates && !hi.sparsity_gate()) {
    throw Error(ErrorCode::UnsupportedSupportSize, "k_max exceeds floor(sqrt(n))/2");
  }
  for (unsigned k = sizes.k_min(); k <= sizes.k_max(); ++k) {
    codecs_.emplace(k, SentenceCodec(ReductionParams::make(q, h, t, k)));
  }
}

const SentenceCodec& VariableSentenceCodec::codec_for(unsigned k) const {
  const auto it = codecs_.find(k);
  if (it == codecs_.end()) {
    throw Error(ErrorCode::UnsupportedSupportSize,
                "support size " + std::to_string(k) + " outside the configured window");
  }
  return it->second;
}

std::optional<SparseVector> VariableSentenceCodec::decode(const ResidueVector& b,
                                                          const SupportDistribution& values,
                                                          Rng& rng) const {
  const unsigned k = sizes_.sample(rng);
  return codec_for(k).decode_sentence(b, values, rng);
}

}  // namespace sparsenle
