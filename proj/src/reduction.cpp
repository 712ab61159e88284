#include "sparsenle/reduction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace sparsenle {

using json = nlohmann::ordered_json;

namespace {

double clamp_log2(double x) { return x > 1.0 ? std::log2(x) : 0.0; }

json params_json(const ReductionParams& p) {
  json j;
  j["q"] = p.q;
  j["h"] = p.h;
  j["t"] = p.t;
  j["k"] = p.k;
  j["n"] = p.n;
  j["L"] = p.L;
  j["psi_den"] = p.psi_den;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

PlannerPreset PlannerPreset::parse(std::string_view spec) {
  PlannerPreset p;
  std::string body(spec);
  std::string extra;
  if (const auto comma = body.find(','); comma != std::string::npos) {
    extra = body.substr(comma + 1);
    body.resize(comma);
  }
  const auto colon = body.find(':');
  const std::string head = body.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : body.substr(colon + 1);
  try {
    if (head == "none" && arg.empty()) {
      p.regime = Regime::None;
    } else if (head == "exp-lwe" && arg.empty()) {
      p.regime = Regime::ExponentialLwe;
    } else if (head == "near-exp-lpn" && arg.empty()) {
      p.regime = Regime::NearExponentialLpn;
    } else if (head == "subexp" && !arg.empty()) {
      p.regime = Regime::SubExponential;
      p.alpha = std::stod(arg);
      if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw Error(ErrorCode::Parse, "alpha must lie in (0, 1)");
    } else if (head == "quasi" && !arg.empty()) {
      p.regime = Regime::QuasiPolynomial;
      p.c = std::stod(arg);
      if (!(p.c > 0.0)) throw Error(ErrorCode::Parse, "c must be > 0");
    } else {
      throw Error(ErrorCode::Parse, "unknown preset");
    }
    if (!extra.empty()) {
      if (extra.rfind("kappa=", 0) != 0) throw Error(ErrorCode::Parse, "expected kappa=K");
      p.kappa = std::stod(extra.substr(6));
      if (!(p.kappa > 0.0)) throw Error(ErrorCode::Parse, "kappa must be > 0");
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::Parse, "cannot parse preset '" + std::string(spec) + "'");
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, "cannot parse preset '" + std::string(spec) + "': " + e.what());
  }
  return p;
}

std::string PlannerPreset::describe() const {
  std::ostringstream out;
  switch (regime) {
    case Regime::None: out << "none"; break;
    case Regime::ExponentialLwe: out << "exp-lwe"; break;
    case Regime::NearExponentialLpn: out << "near-exp-lpn"; break;
    case Regime::SubExponential: out << "subexp:" << alpha; break;
    case Regime::QuasiPolynomial: out << "quasi:" << c; break;
  }
  out << ",kappa=" << kappa;
  return out.str();
}

bool GateReport::all_enforced_pass() const {
  return std::all_of(gates.begin(), gates.end(), [](const auto& g) { return !g.enforced || g.pass; });
}

json GateReport::to_json() const {
  json out = json::object();
  for (const auto& g : gates) {
    json j;
    j["pass"] = g.pass;
    j["enforced"] = g.enforced;
    j["value"] = g.value;
    j["limit"] = g.limit;
    out[g.name] = std::move(j);
  }
  return out;
}

json Plan::to_json() const {
  json j;
  j["params"] = params_json(params);
  j["gates"] = gates.to_json();
  j["feasible"] = gates.all_enforced_pass();
  return j;
}

GateReport evaluate_gates(const ReductionParams& p, const PlanOptions& options) {
  GateReport r;
  const bool strict = !options.relax_gates;
  r.gates.push_back({"functional", p.functional_gate(), true, double(p.k), double(p.h + 2)});
  r.gates.push_back({"uniformity", p.uniformity_gate(), strict, double(p.k), p.uniformity_threshold()});
  r.gates.push_back({"sparsity", p.sparsity_gate(), strict, double(p.k), double(p.sparsity_limit())});

  // Regime conditions are asymptotic; these finite proxies are reported only.
  const double logn = clamp_log2(double(p.n));
  const double loglogn = clamp_log2(logn);
  const double logloglogn = clamp_log2(loglogn);
  const auto& pre = options.preset;
  switch (pre.regime) {
    case Regime::None:
      break;
    case Regime::ExponentialLwe: {
      const double bound = loglogn * logloglogn;
      r.gates.push_back({"regime_k_growth", p.k > bound, false, double(p.k), bound});
      const double qmax = std::pow(double(p.L), pre.kappa);
      r.gates.push_back({"regime_q_le_L_kappa", double(p.q) <= qmax, false, double(p.q), qmax});
      break;
    }
    case Regime::NearExponentialLpn: {
      const double bound = loglogn * loglogn * logloglogn;
      r.gates.push_back({"regime_k_growth", p.k > bound, false, double(p.k), bound});
      r.gates.push_back({"regime_q_eq_2", p.q == 2, false, double(p.q), 2.0});
      break;
    }
    case Regime::SubExponential: {
      const double bound = std::pow(logn, pre.alpha / (1.0 - pre.alpha)) * loglogn * loglogn;
      r.gates.push_back({"regime_k_growth", p.k > bound, false, double(p.k), bound});
      const double qmax = std::pow(double(p.L), pre.kappa);
      r.gates.push_back({"regime_q_le_L_kappa", double(p.q) <= qmax, false, double(p.q), qmax});
      break;
    }
    case Regime::QuasiPolynomial: {
      const double bound = std::pow(logn, 1.0 / (1.0 + pre.c));
      const double logk = std::log(double(std::max(p.k, 1u)));
      r.gates.push_back({"regime_log_k_growth", logk > bound, false, logk, bound});
      const double qmax = std::pow(double(p.L), pre.kappa);
      r.gates.push_back({"regime_q_le_L_kappa", double(p.q) <= qmax, false, double(p.q), qmax});
      break;
    }
  }
  return r;
}

Plan plan_params(unsigned k, std::uint64_t target_n, std::uint64_t q, const PlanOptions& options) {
  if (q < 2) throw Error(ErrorCode::InvalidRange, "modulus must be >= 2");
  if (target_n < 1) throw Error(ErrorCode::InvalidRange, "target n must be >= 1");
  std::optional<Plan> best;
  for (unsigned h = 1; h + 2 < k; ++h) {
    const std::uint64_t base = static_cast<std::uint64_t>(h) * q;
    unsigned t = 1;
    std::uint64_t n = base;
    bool overflow = false;
    while (n < target_n) {
      if (n > (std::uint64_t{1} << 62) / base) {
        overflow = true;
        break;
      }
      n *= base;
      ++t;
    }
    if (overflow) continue;
    ReductionParams p;
    try {
      p = ReductionParams::make(q, h, t, k);
    } catch (const Error&) {
      continue;
    }
    GateReport gates = evaluate_gates(p, options);
    if (!gates.all_enforced_pass()) continue;
    if (!best || p.L > best->params.L || (p.L == best->params.L && p.h > best->params.h)) {
      best = Plan{p, std::move(gates)};
    }
  }
  if (!best) {
    throw Error(ErrorCode::Infeasible, "no (h, t) satisfies the enforced gates for k = " +
                                           std::to_string(k) + ", n >= " + std::to_string(target_n) +
                                           ", q = " + std::to_string(q));
  }
  return *best;
}

// ---------------------------------------------------------------------------

std::int64_t compute_m1(std::uint64_t m, std::uint64_t L, std::uint64_t k, std::uint64_t n) {
  if (L == 0 || n == 0) throw Error(ErrorCode::InvalidRange, "L and n must be >= 1");
  using boost::multiprecision::cpp_int;
  const cpp_int den = cpp_int(L) * n;
  const cpp_int num = cpp_int(m) * (den - cpp_int(3) * n - cpp_int(k) * k * L);
  cpp_int quot = num / den;  // truncates toward zero
  if (num < 0 && quot * den != num) --quot;
  return quot.convert_to<std::int64_t>();
}

std::string_view to_string(DecodeStatus status) {
  switch (status) {
    case DecodeStatus::Kept: return "kept";
    case DecodeStatus::Failed: return "failed";
    case DecodeStatus::Truncated: return "truncated";
  }
  return "?";
}

json ReductionOutput::report() const {
  json j;
  j["params"] = params_json(params);
  PlanOptions opts;
  opts.relax_gates = relaxed_gates;
  j["gates"] = evaluate_gates(params, opts).to_json();
  j["m"] = m;
  j["m1"] = m1;
  j["successes"] = successes;
  j["failures"] = failures;
  j["kept"] = sparse.size();
  j["truncated_to_m1"] = truncated_to_m1;
  j["seed"] = sparse.meta.seed;
  j["prg"] = sparse.meta.prg;
  j["error_model"] = sparse.meta.error_model;
  j["wall_time_s"] = wall_time_s;
  return j;
}

ReductionOutput reduce_instance(const Instance& dense, const ReductionParams& params,
                                const SupportDistribution& values, const Rng& rng,
                                const ReduceOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (dense.kind != InstanceKind::Dense) {
    throw Error(ErrorCode::DimensionMismatch, "reduction input must be a dense instance");
  }
  if (dense.dim != params.L || dense.q != params.q) {
    throw Error(ErrorCode::DimensionMismatch,
                "instance has (q, dim) = (" + std::to_string(dense.q) + ", " +
                    std::to_string(dense.dim) + "), params need (" + std::to_string(params.q) +
                    ", " + std::to_string(params.L) + ")");
  }
  if (!params.functional_gate()) {
    throw Error(ErrorCode::ParameterBoundViolated, "decoding needs k > h + 2");
  }
  if (!options.relax_gates && !(params.uniformity_gate() && params.sparsity_gate())) {
    throw Error(ErrorCode::ParameterBoundViolated,
                "parameters fail the uniformity or sparsity gate (use relaxed gates to run anyway)");
  }

  const SentenceCodec codec(params);
  ReductionOutput out;
  out.params = params;
  out.m = dense.size();
  out.m1 = compute_m1(out.m, params.L, params.k, params.n);
  out.relaxed_gates = options.relax_gates;

  Rng mask_rng = rng.substream("mask");
  out.z.resize(params.n);
  for (auto& x : out.z) x = uniform_index(params.q, mask_rng);

  std::vector<std::optional<SparseVector>> decoded(out.m);
  parallel_for(out.m, options.threads, [&](std::size_t i) {
    Rng r = rng.substream("decode", i);
    decoded[i] = codec.decode_sentence(dense.dense[i].b, values, r);
  });

  out.truncated_to_m1 = !(options.relax_gates && out.m1 <= 0);
  const std::size_t cap = out.truncated_to_m1 ? static_cast<std::size_t>(std::max<std::int64_t>(out.m1, 0))
                                              : out.m;
  out.sparse.kind = InstanceKind::Sparse;
  out.sparse.q = params.q;
  out.sparse.dim = params.n;
  out.sparse.k = params.k;
  out.sparse.meta.seed = rng.seed();
  out.sparse.meta.error_model = dense.meta.error_model;
  out.log.reserve(out.m);
  for (std::size_t i = 0; i < out.m; ++i) {
    if (!decoded[i]) {
      ++out.failures;
      out.log.push_back({i, DecodeStatus::Failed});
      continue;
    }
    ++out.successes;
    if (out.sparse.sparse.size() >= cap) {
      out.log.push_back({i, DecodeStatus::Truncated});
      continue;
    }
    SparseSample s;
    s.y = mod_add(dense.dense[i].y, sparse_dot(*decoded[i], out.z, params.q), params.q);
    s.a = std::move(*decoded[i]);
    out.sparse.sparse.push_back(std::move(s));
    out.log.push_back({i, DecodeStatus::Kept});
  }

  const std::size_t need = static_cast<std::size_t>(std::max<std::int64_t>(out.m1, 1));
  if (out.successes < need) {
    throw Error(ErrorCode::InsufficientSamples,
                std::to_string(out.successes) + " of " + std::to_string(out.m) +
                    " samples decoded, need " + std::to_string(need));
  }
  out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------------------

LiftResult lift_secret(const ResidueVector& s_sparse, const ResidueVector& z,
                       const ReductionParams& params, const Rng& rng) {
  if (s_sparse.size() != params.n || z.size() != params.n) {
    throw Error(ErrorCode::DimensionMismatch, "sparse secret and mask must have length n");
  }
  ResidueVector w(params.n);
  for (std::size_t i = 0; i < params.n; ++i) w[i] = mod_sub(s_sparse[i], z[i], params.q);

  LiftResult out;
  const auto rows = identity_row_indices(params);
  out.secret.resize(params.L);
  for (unsigned u = 0; u < params.L; ++u) out.secret[u] = w[rows[u]];

  std::vector<SentenceIndex> check;
  if (params.n <= 64) {
    check.resize(params.n);
    for (std::size_t i = 0; i < params.n; ++i) check[i] = i;
  } else {
    Rng r = rng.substream("lift-check");
    check.resize(64);
    for (auto& idx : check) idx = uniform_index(params.n, r);
  }
  for (SentenceIndex idx : check) {
    if (g_row_dot(idx, out.secret, params) != w[idx]) {
      throw Error(ErrorCode::InconsistentSecret,
                  "recovered secret is not of the form G s + z (row " + std::to_string(idx) + ")");
    }
  }
  out.rows_checked = check.size();
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::Unsatisfiable ? "UNSATISFIABLE" : "APPROXIMATELY SATISFIABLE";
}

RefutationConstants refutation_constants(const BigRational& delta, const BigRational& Delta,
                                         const ReductionParams& params) {
  const BigRational inv_L(BigUint(1), BigUint(params.L));
  const BigRational k2n(BigUint(params.k) * params.k * 2, BigUint(params.n));
  RefutationConstants c;
  c.stated_delta = delta * (1 - 3 * inv_L - k2n);
  c.stated_Delta = Delta + 3 * inv_L + k2n;
  c.forward_delta_factor = 1 + 4 * inv_L + k2n;
  c.forward_Delta = Delta + 4 * inv_L + k2n;
  return c;
}

json RefutationResult::report() const {
  json j;
  j["verdict"] = std::string(to_string(verdict));
  j["reduction_failed"] = reduction_failed;
  j["sparse_samples"] = sparse_samples;
  j["stated_delta"] = to_string(constants.stated_delta);
  j["stated_Delta"] = to_string(constants.stated_Delta);
  j["forward_delta_factor"] = to_string(constants.forward_delta_factor);
  j["forward_Delta"] = to_string(constants.forward_Delta);
  return j;
}

RefutationResult refute_wrapper(const Instance& dense, const ReductionParams& params,
                                const SupportDistribution& values, const SparseRefuter& refuter,
                                const BigRational& delta, const BigRational& Delta,
                                const Rng& rng, const ReduceOptions& options) {
  RefutationResult result;
  result.constants = refutation_constants(delta, Delta, params);
  try {
    const auto reduced = reduce_instance(dense, params, values, rng, options);
    result.sparse_samples = reduced.sparse.size();
    result.verdict = refuter(reduced.sparse);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientSamples) throw;
    result.reduction_failed = true;
    result.verdict = Verdict::ApproximatelySatisfiable;
  }
  return result;
}

}  // namespace sparsenle
