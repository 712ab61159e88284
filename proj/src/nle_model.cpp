#include "sparsenle/nle_model.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace sparsenle {

using json = nlohmann::ordered_json;

std::string_view to_string(InstanceKind kind) {
  return kind == InstanceKind::Dense ? "dense" : "sparse";
}

namespace {

std::uint64_t reduce_signed(long long v, std::uint64_t q) {
  if (v >= 0) return static_cast<std::uint64_t>(v) % q;
  const std::uint64_t r = static_cast<std::uint64_t>(-(v + 1)) % q;  // avoids overflow at LLONG_MIN
  return q - 1 - r;
}

void check_residues(const ResidueVector& v, std::uint64_t q, const char* what) {
  for (auto x : v) {
    if (x >= q) throw Error(ErrorCode::InvalidRange, std::string(what) + " entry not reduced mod q");
  }
}

}  // namespace

void validate_instance(const Instance& inst) {
  if (inst.q < 2) throw Error(ErrorCode::InvalidRange, "modulus must be >= 2");
  if (inst.kind == InstanceKind::Dense) {
    if (!inst.sparse.empty()) throw Error(ErrorCode::DimensionMismatch, "dense instance holds sparse rows");
    for (const auto& s : inst.dense) {
      if (s.b.size() != inst.dim) throw Error(ErrorCode::DimensionMismatch, "row length != dim");
      check_residues(s.b, inst.q, "coefficient");
      if (s.y >= inst.q) throw Error(ErrorCode::InvalidRange, "label not reduced mod q");
    }
  } else {
    if (!inst.dense.empty()) throw Error(ErrorCode::DimensionMismatch, "sparse instance holds dense rows");
    for (const auto& s : inst.sparse) {
      if (s.a.indices.size() != inst.k) throw Error(ErrorCode::DimensionMismatch, "support size != k");
      validate_sparse(s.a, inst.dim, inst.q);
      if (s.y >= inst.q) throw Error(ErrorCode::InvalidRange, "label not reduced mod q");
    }
  }
}

// ---------------------------------------------------------------------------

ErrorModel ErrorModel::zero() { return {}; }

ErrorModel ErrorModel::bernoulli(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(ErrorCode::InvalidProbability, "delta outside [0, 1]");
  ErrorModel e;
  e.kind_ = Kind::Bernoulli;
  e.real_ = delta;
  e.description_ = "bernoulli:" + std::to_string(delta);
  return e;
}

ErrorModel ErrorModel::gauss(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidRange, "sigma must be >= 0");
  ErrorModel e;
  e.kind_ = Kind::Gauss;
  e.real_ = sigma;
  e.description_ = "gauss:" + std::to_string(sigma);
  return e;
}

ErrorModel ErrorModel::uniform(std::uint64_t bound) {
  if (bound >= (std::uint64_t{1} << 62)) throw Error(ErrorCode::InvalidRange, "bound too large");
  ErrorModel e;
  e.kind_ = Kind::Uniform;
  e.integer_ = bound;
  e.description_ = "uniform:" + std::to_string(bound);
  return e;
}

ErrorModel ErrorModel::rounding(std::uint64_t p) {
  if (p == 0) throw Error(ErrorCode::InvalidRange, "rounding modulus p must be >= 1");
  ErrorModel e;
  e.kind_ = Kind::Round;
  e.integer_ = p;
  e.description_ = "round:" + std::to_string(p);
  return e;
}

ErrorModel ErrorModel::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string head(spec.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? "" : std::string(spec.substr(colon + 1));
  ErrorModel e;
  try {
    if (head == "zero" && arg.empty()) return zero();
    if (arg.empty()) throw Error(ErrorCode::Parse, "missing parameter");
    std::size_t used = 0;
    if (head == "bernoulli") {
      e = bernoulli(std::stod(arg, &used));
    } else if (head == "gauss") {
      e = gauss(std::stod(arg, &used));
    } else if (head == "uniform") {
      e = uniform(std::stoull(arg, &used));
    } else if (head == "round") {
      e = rounding(std::stoull(arg, &used));
    } else {
      throw Error(ErrorCode::Parse, "unknown error model");
    }
    if (used != arg.size()) throw Error(ErrorCode::Parse, "trailing characters");
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::Parse, "cannot parse error model '" + std::string(spec) + "'");
  } catch (const Error& err) {
    if (err.code() != ErrorCode::Parse) throw;
    throw Error(ErrorCode::Parse, "cannot parse error model '" + std::string(spec) + "': " + err.what());
  }
  e.description_ = std::string(spec);
  return e;
}

std::uint64_t ErrorModel::sample(std::uint64_t clean, std::uint64_t q, Rng& rng) const {
  switch (kind_) {
    case Kind::Zero:
      return 0;
    case Kind::Bernoulli:
      if (q != 2) throw Error(ErrorCode::InvalidRange, "bernoulli noise needs q = 2");
      return uniform_real(rng) < real_ ? 1 : 0;
    case Kind::Gauss:
      return reduce_signed(std::llround(real_ * standard_normal(rng)), q);
    case Kind::Uniform: {
      const long long v = static_cast<long long>(uniform_index(2 * integer_ + 1, rng)) -
                          static_cast<long long>(integer_);
      return reduce_signed(v, q);
    }
    case Kind::Round: {
      // Level j = round(x p / q); the rounded label is round(j q / p) mod q.
      using u128 = unsigned __int128;
      const std::uint64_t p = integer_;
      const u128 j = (u128(2) * p * clean + q) / (u128(2) * q);
      const u128 rounded = (u128(2) * j * q + p) / (u128(2) * p);
      return mod_sub(static_cast<std::uint64_t>(rounded % q), clean % q, q);
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------

WeightFn WeightFn::indicator() { return {}; }

WeightFn WeightFn::circular_lp(unsigned p) {
  if (p == 0) throw Error(ErrorCode::InvalidRange, "lp exponent must be a positive integer");
  WeightFn w;
  w.kind_ = Kind::CircularLp;
  w.p_ = p;
  return w;
}

WeightFn WeightFn::parse(std::string_view spec) {
  if (spec == "indicator") return indicator();
  if (spec.substr(0, 3) == "lp:") {
    const std::string arg(spec.substr(3));
    std::size_t used = 0;
    unsigned long p = 0;
    try {
      p = std::stoul(arg, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == arg.size() && used > 0 && p > 0 && p <= 64) return circular_lp(static_cast<unsigned>(p));
  }
  throw Error(ErrorCode::Parse, "weight function must be 'indicator' or 'lp:p' with integer 1 <= p <= 64");
}

BigRational WeightFn::operator()(std::uint64_t x, std::uint64_t q) const {
  x %= q;
  if (kind_ == Kind::Indicator) return x == 0 ? BigRational(0) : BigRational(1);
  const std::uint64_t dist = std::min(x, q - x);
  return BigRational(big_pow(dist, p_), big_pow(q, p_));
}

std::string WeightFn::describe() const {
  return kind_ == Kind::Indicator ? "indicator" : "lp:" + std::to_string(p_);
}

// ---------------------------------------------------------------------------

namespace {

ResidueVector uniform_vector(std::size_t len, std::uint64_t q, Rng& rng) {
  ResidueVector v(len);
  for (auto& x : v) x = uniform_index(q, rng);
  return v;
}

SparseVector sparse_coefficients(std::uint64_t n, unsigned k, std::uint64_t q,
                                 const SupportDistribution& values, Rng& rng) {
  SparseVector a;
  a.indices = random_k_subset(n, k, rng);
  a.values = values.sample(k, q, rng);
  return a;
}

Instance empty_instance(InstanceKind kind, std::uint64_t q, std::uint64_t dim, unsigned k,
                        const Rng& rng, std::string error_model) {
  if (q < 2) throw Error(ErrorCode::InvalidRange, "modulus must be >= 2");
  if (dim == 0) throw Error(ErrorCode::InvalidRange, "dimension must be >= 1");
  Instance inst;
  inst.kind = kind;
  inst.q = q;
  inst.dim = dim;
  inst.k = k;
  inst.meta.seed = rng.seed();
  inst.meta.error_model = std::move(error_model);
  return inst;
}

}  // namespace

PlantedInstance sample_dense_instance(unsigned L, std::uint64_t q, std::size_t m,
                                      const ErrorModel& error, const Rng& rng) {
  PlantedInstance out;
  out.instance = empty_instance(InstanceKind::Dense, q, L, 0, rng, error.describe());
  Rng secret_rng = rng.substream("secret");
  out.secret = uniform_vector(L, q, secret_rng);
  out.instance.dense.resize(m);
  out.errors.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rng r = rng.substream("dense-sample", i);
    auto& s = out.instance.dense[i];
    s.b = uniform_vector(L, q, r);
    const std::uint64_t clean = dot_mod(s.b, out.secret, q);
    out.errors[i] = error.sample(clean, q, r);
    s.y = mod_add(clean, out.errors[i], q);
  }
  return out;
}

PlantedInstance sample_sparse_instance(std::uint64_t n, unsigned k, std::uint64_t q,
                                       std::size_t m, const SupportDistribution& values,
                                       const ErrorModel& error, const Rng& rng) {
  if (k > n) throw Error(ErrorCode::InvalidRange, "k exceeds n");
  PlantedInstance out;
  out.instance = empty_instance(InstanceKind::Sparse, q, n, k, rng, error.describe());
  Rng secret_rng = rng.substream("secret");
  out.secret = uniform_vector(n, q, secret_rng);
  out.instance.sparse.resize(m);
  out.errors.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rng r = rng.substream("sparse-sample", i);
    auto& s = out.instance.sparse[i];
    s.a = sparse_coefficients(n, k, q, values, r);
    const std::uint64_t clean = sparse_dot(s.a, out.secret, q);
    out.errors[i] = error.sample(clean, q, r);
    s.y = mod_add(clean, out.errors[i], q);
  }
  return out;
}

Instance sample_null_dense(unsigned L, std::uint64_t q, std::size_t m, const Rng& rng) {
  Instance inst = empty_instance(InstanceKind::Dense, q, L, 0, rng, "null");
  inst.dense.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rng r = rng.substream("dense-sample", i);
    inst.dense[i].b = uniform_vector(L, q, r);
    Rng label = rng.substream("null-label", i);
    inst.dense[i].y = uniform_index(q, label);
  }
  return inst;
}

Instance sample_null_sparse(std::uint64_t n, unsigned k, std::uint64_t q, std::size_t m,
                            const SupportDistribution& values, const Rng& rng) {
  if (k > n) throw Error(ErrorCode::InvalidRange, "k exceeds n");
  Instance inst = empty_instance(InstanceKind::Sparse, q, n, k, rng, "null");
  inst.sparse.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    Rng r = rng.substream("sparse-sample", i);
    inst.sparse[i].a = sparse_coefficients(n, k, q, values, r);
    Rng label = rng.substream("null-label", i);
    inst.sparse[i].y = uniform_index(q, label);
  }
  return inst;
}

ResidueVector residuals(const Instance& inst, const ResidueVector& s) {
  if (s.size() != inst.dim) {
    throw Error(ErrorCode::DimensionMismatch, "secret has length " + std::to_string(s.size()) +
                                                  ", instance dimension is " +
                                                  std::to_string(inst.dim));
  }
  ResidueVector out;
  out.reserve(inst.size());
  if (inst.kind == InstanceKind::Dense) {
    for (const auto& x : inst.dense) out.push_back(mod_sub(x.y, dot_mod(x.b, s, inst.q), inst.q));
  } else {
    for (const auto& x : inst.sparse) out.push_back(mod_sub(x.y, sparse_dot(x.a, s, inst.q), inst.q));
  }
  return out;
}

BigRational objective(const Instance& inst, const ResidueVector& s, const WeightFn& mu) {
  const auto r = residuals(inst, s);
  if (r.empty()) return BigRational(0);
  BigRational total(0);
  for (auto x : r) total += mu(x, inst.q);
  return total / BigRational(static_cast<std::uint64_t>(r.size()));
}

// ---------------------------------------------------------------------------

void write_instance(const Instance& inst, std::ostream& out) {
  json header;
  header["format_version"] = 1;
  header["kind"] = std::string(to_string(inst.kind));
  header["q"] = inst.q;
  header["dim"] = inst.dim;
  if (inst.kind == InstanceKind::Sparse) header["k"] = inst.k;
  header["m"] = inst.size();
  header["seed"] = inst.meta.seed;
  header["prg"] = inst.meta.prg;
  header["error_model"] = inst.meta.error_model;
  header["generator"] = inst.meta.generator;
  out << header.dump() << '\n';
  if (inst.kind == InstanceKind::Dense) {
    for (const auto& s : inst.dense) {
      json rec;
      rec["b"] = s.b;
      rec["y"] = s.y;
      out << rec.dump() << '\n';
    }
  } else {
    for (const auto& s : inst.sparse) {
      json rec;
      rec["support"] = s.a.indices;
      rec["values"] = s.a.values;
      rec["y"] = s.y;
      out << rec.dump() << '\n';
    }
  }
}

Instance read_instance(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Parse, "instance file is empty");
  Instance inst;
  std::size_t m = 0;
  std::size_t line_no = 1;
  try {
    const json header = json::parse(line);
    if (header.at("format_version").get<int>() != 1) {
      throw Error(ErrorCode::Parse, "unsupported format_version");
    }
    const auto kind = header.at("kind").get<std::string>();
    if (kind == "dense") {
      inst.kind = InstanceKind::Dense;
    } else if (kind == "sparse") {
      inst.kind = InstanceKind::Sparse;
      inst.k = header.at("k").get<unsigned>();
    } else {
      throw Error(ErrorCode::Parse, "unknown instance kind '" + kind + "'");
    }
    inst.q = header.at("q").get<std::uint64_t>();
    inst.dim = header.at("dim").get<std::uint64_t>();
    m = header.at("m").get<std::size_t>();
    inst.meta.seed = header.value("seed", std::uint64_t{0});
    inst.meta.prg = header.value("prg", std::string(Rng::kIdentifier));
    inst.meta.error_model = header.value("error_model", std::string("unknown"));
    inst.meta.generator = header.value("generator", std::string(kGeneratorVersion));

    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json rec = json::parse(line);
      if (inst.kind == InstanceKind::Dense) {
        DenseSample s;
        s.b = rec.at("b").get<ResidueVector>();
        s.y = rec.at("y").get<std::uint64_t>();
        inst.dense.push_back(std::move(s));
      } else {
        SparseSample s;
        s.a.indices = rec.at("support").get<std::vector<SentenceIndex>>();
        s.a.values = rec.at("values").get<ResidueVector>();
        s.y = rec.at("y").get<std::uint64_t>();
        inst.sparse.push_back(std::move(s));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
  }
  if (inst.size() != m) {
    throw Error(ErrorCode::Parse, "header declares m = " + std::to_string(m) + " but file holds " +
                                      std::to_string(inst.size()) + " records");
  }
  validate_instance(inst);
  return inst;
}

void write_instance_file(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path);
  write_instance(inst, out);
  if (!out) throw Error(ErrorCode::Parse, "write failed for " + path);
}

Instance read_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  return read_instance(in);
}

void write_vector_file(const std::string& path, std::string_view name, std::uint64_t q,
                       const ResidueVector& values) {
  json doc;
  doc["name"] = std::string(name);
  doc["q"] = q;
  doc["dim"] = values.size();
  doc["values"] = values;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path);
  out << doc.dump() << '\n';
}

ResidueVector read_vector_file(const std::string& path, std::uint64_t* q) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  try {
    const json doc = json::parse(in);
    auto values = doc.at("values").get<ResidueVector>();
    const auto modulus = doc.at("q").get<std::uint64_t>();
    if (doc.at("dim").get<std::size_t>() != values.size()) {
      throw Error(ErrorCode::Parse, "dim does not match value count in " + path);
    }
    check_residues(values, modulus, "vector");
    if (q) *q = modulus;
    return values;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
}

}  // namespace sparsenle
