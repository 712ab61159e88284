#include "sparsenle/tensor.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace sparsenle {

using json = nlohmann::ordered_json;

std::string_view to_string(TensorVariant variant) {
  switch (variant) {
    case TensorVariant::Real: return "real";
    case TensorVariant::Complex: return "complex";
    case TensorVariant::Gaussian: return "gaussian";
  }
  return "?";
}

TensorVariant parse_tensor_variant(std::string_view name) {
  if (name == "real") return TensorVariant::Real;
  if (name == "complex") return TensorVariant::Complex;
  if (name == "gaussian") return TensorVariant::Gaussian;
  throw Error(ErrorCode::Parse, "tensor variant must be real, complex or gaussian");
}

std::complex<double> unit_phase(std::uint64_t y, std::uint64_t q) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(y % q) / static_cast<double>(q);
  return {std::cos(angle), std::sin(angle)};
}

namespace {

void require_binary(const Instance& inst) {
  if (inst.kind != InstanceKind::Sparse) {
    throw Error(ErrorCode::DimensionMismatch, "tensorization needs a sparse instance");
  }
  for (std::size_t j = 0; j < inst.sparse.size(); ++j) {
    for (auto v : inst.sparse[j].a.values) {
      if (v != 1) {
        throw Error(ErrorCode::WrongSupportDistribution,
                    "sample " + std::to_string(j) + " has a support value != 1");
      }
    }
  }
}

}  // namespace

std::vector<TensorSample> tensorize_real(const Instance& sparse) {
  require_binary(sparse);
  std::vector<TensorSample> out;
  out.reserve(sparse.size());
  for (const auto& s : sparse.sparse) out.push_back({s.a.indices, unit_phase(s.y, sparse.q).real(), 0.0});
  return out;
}

std::vector<TensorSample> tensorize_complex(const Instance& sparse) {
  require_binary(sparse);
  std::vector<TensorSample> out;
  out.reserve(sparse.size());
  for (const auto& s : sparse.sparse) {
    const auto z = unit_phase(s.y, sparse.q);
    out.push_back({s.a.indices, z.real(), z.imag()});
  }
  return out;
}

std::vector<TensorSample> gaussianize_with(const Instance& sparse, const GaussianComponents& gh) {
  require_binary(sparse);
  std::vector<TensorSample> out;
  out.reserve(sparse.size());
  for (const auto& s : sparse.sparse) {
    std::complex<double> v = unit_phase(s.y, sparse.q);
    for (auto t : s.a.indices) {
      const auto [g, h] = gh(t);
      v *= std::complex<double>(g, h);
    }
    out.push_back({s.a.indices, v.real(), v.imag()});
  }
  return out;
}

std::vector<TensorSample> gaussianize_with(const Instance& sparse, const std::vector<double>& g,
                                           const std::vector<double>& h) {
  if (g.size() != sparse.dim || h.size() != sparse.dim) {
    throw Error(ErrorCode::DimensionMismatch, "component vectors must have length n");
  }
  return gaussianize_with(sparse, [&](SentenceIndex t) { return std::pair{g[t], h[t]}; });
}

GaussianComponents gaussian_components(const Rng& rng) {
  return [rng](SentenceIndex t) {
    Rng rg = rng.substream("gauss-g", t);
    Rng rh = rng.substream("gauss-h", t);
    return std::pair{standard_normal(rg), standard_normal(rh)};
  };
}

std::vector<TensorSample> gaussianize(const Instance& sparse, const Rng& rng) {
  return gaussianize_with(sparse, gaussian_components(rng));
}

// ---------------------------------------------------------------------------

json TensorDiagnostics::to_json() const {
  json j;
  j["m"] = m;
  j["mean"] = mean;
  j["variance"] = variance;
  j["max_modulus_error"] = max_modulus_error;
  j["noise_checked"] = noise_checked;
  if (noise_checked) {
    j["bound_violations"] = bound_violations;
    j["max_bound_ratio"] = max_bound_ratio;
    j["noise_ratio"] = noise_ratio;
    j["alpha_min"] = alpha_min;
    j["alpha_max"] = alpha_max;
    j["incoherence"] = incoherence;
  }
  return j;
}

TensorDiagnostics diagnostics(const std::vector<TensorSample>& samples, TensorVariant variant,
                              std::uint64_t q, const TensorSecretInfo* info) {
  TensorDiagnostics d;
  d.m = samples.size();
  if (d.m > 0) {
    double sum = 0.0;
    for (const auto& s : samples) sum += s.re;
    d.mean = sum / d.m;
    double sq = 0.0;
    for (const auto& s : samples) sq += (s.re - d.mean) * (s.re - d.mean);
    d.variance = sq / d.m;
  }
  if (variant == TensorVariant::Complex) {
    for (const auto& s : samples) {
      d.max_modulus_error = std::max(d.max_modulus_error, std::abs(std::hypot(s.re, s.im) - 1.0));
    }
  }
  if (!info || variant == TensorVariant::Gaussian) return d;
  if (info->errors.size() != samples.size()) {
    throw Error(ErrorCode::DimensionMismatch, "need one error value per tensor sample");
  }

  d.noise_checked = true;
  double delta_l1 = 0.0;
  double clean_l1 = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    std::uint64_t clean = 0;
    for (auto t : samples[j].idx) {
      if (t >= info->secret.size()) throw Error(ErrorCode::DimensionMismatch, "index past secret");
      clean = mod_add(clean, info->secret[t], q);
    }
    const auto phase = unit_phase(clean, q);
    const double delta = variant == TensorVariant::Real
                             ? std::abs(samples[j].re - phase.real())
                             : std::abs(std::complex<double>(samples[j].re, samples[j].im) - phase);
    const std::uint64_t e = info->errors[j] % q;
    const std::uint64_t dist = std::min(e, q - e);
    const double bound = 4.0 * std::numbers::pi * static_cast<double>(dist) / static_cast<double>(q);
    if (delta > bound) ++d.bound_violations;
    if (bound > 0) d.max_bound_ratio = std::max(d.max_bound_ratio, delta / bound);
    delta_l1 += delta;
    clean_l1 += variant == TensorVariant::Real ? std::abs(phase.real()) : 1.0;
    d.alpha_min += static_cast<double>(dist) / q;
    d.alpha_max += static_cast<double>(std::max(e, q - e)) / q;
  }
  if (d.m > 0) {
    d.alpha_min /= d.m;
    d.alpha_max /= d.m;
  }
  d.noise_ratio = clean_l1 > 0 ? delta_l1 / clean_l1 : 0.0;

  // Components u_t = exp(2 pi i s_t / q).
  double linf = 0.0;
  double l2 = 0.0;
  for (auto s : info->secret) {
    const double mod = std::abs(unit_phase(s, q));
    linf = std::max(linf, mod);
    l2 += mod * mod;
  }
  if (l2 > 0) d.incoherence = linf * std::sqrt(static_cast<double>(info->secret.size())) / std::sqrt(l2);
  return d;
}

// ---------------------------------------------------------------------------

void write_tensor_file(const TensorFile& file, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path);
  json header;
  header["format_version"] = 1;
  header["n"] = file.n;
  header["k"] = file.k;
  header["q"] = file.q;
  header["variant"] = std::string(to_string(file.variant));
  header["seed"] = file.seed;
  header["m"] = file.samples.size();
  out << header.dump() << '\n';
  for (const auto& s : file.samples) {
    json rec;
    rec["idx"] = s.idx;
    rec["re"] = s.re;
    if (file.variant != TensorVariant::Real) rec["im"] = s.im;
    out << rec.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::Parse, "write failed for " + path);
}

TensorFile read_tensor_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  TensorFile file;
  std::string line;
  try {
    if (!std::getline(in, line)) throw Error(ErrorCode::Parse, "tensor file is empty");
    const json header = json::parse(line);
    if (header.at("format_version").get<int>() != 1) throw Error(ErrorCode::Parse, "bad format_version");
    file.n = header.at("n").get<std::uint64_t>();
    file.k = header.at("k").get<unsigned>();
    file.q = header.at("q").get<std::uint64_t>();
    file.variant = parse_tensor_variant(header.at("variant").get<std::string>());
    file.seed = header.value("seed", std::uint64_t{0});
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json rec = json::parse(line);
      TensorSample s;
      s.idx = rec.at("idx").get<std::vector<SentenceIndex>>();
      s.re = rec.at("re").get<double>();
      s.im = rec.value("im", 0.0);
      file.samples.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path + ": " + e.what());
  }
  return file;
}

}  // namespace sparsenle
