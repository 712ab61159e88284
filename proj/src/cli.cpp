#include "sparsenle/cli.hpp"

#include <functional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sparsenle/core.hpp"
#include "sparsenle/nle_model.hpp"
#include "sparsenle/oracles.hpp"
#include "sparsenle/reduction.hpp"
#include "sparsenle/sentence_codec.hpp"
#include "sparsenle/tensor.hpp"
#include "sparsenle/word_codec.hpp"

namespace sparsenle {

using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::uint64_t q = 2;
  unsigned h = 0;
  unsigned t = 0;
  unsigned k = 0;
  std::uint64_t n = 0;
  std::uint64_t dim = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::string error = "zero";
  std::string support = "ones";
  std::string mu = "indicator";
  unsigned threads = 1;
  bool relax_gates = false;

  std::string in;
  std::string out;
  std::string secret;
  std::string mask;
  std::string log;
  std::string kind = "dense";
  std::string preset = "none";
  std::string b;
  unsigned weight = 0;
  std::uint64_t psi_den = 0;
  std::string delta = "0";
  std::string big_delta = "1";
  std::string max_weight = "0";
  std::size_t max_hits = 100;
  double alpha = 0.01;
  std::string variant = "real";
};

bool is_domain_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::Infeasible:
    case ErrorCode::InsufficientSamples:
    case ErrorCode::InconsistentSecret:
    case ErrorCode::NoCollisions:
    case ErrorCode::ParameterBoundViolated:
      return true;
    default:
      return false;
  }
}

BigRational parse_rational(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return BigRational(BigUint(text));
    const BigUint num(text.substr(0, slash));
    const BigUint den(text.substr(slash + 1));
    if (den == 0) throw Error(ErrorCode::Parse, "zero denominator");
    return BigRational(num, den);
  } catch (const std::runtime_error&) {
    throw Error(ErrorCode::Parse, "expected a rational 'a' or 'a/b', got '" + text + "'");
  }
}

ResidueVector parse_residues(const std::string& text, std::uint64_t q) {
  ResidueVector v;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    if (field.empty()) continue;
    std::size_t used = 0;
    std::uint64_t x = 0;
    try {
      x = std::stoull(field, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != field.size() || x >= q) {
      throw Error(ErrorCode::Parse, "'" + field + "' is not a residue mod " + std::to_string(q));
    }
    v.push_back(x);
  }
  return v;
}

json big_json(const BigUint& v) {
  if (v <= std::numeric_limits<std::uint64_t>::max()) return v.convert_to<std::uint64_t>();
  return v.str();
}

void require(bool cond, const std::string& message) {
  if (!cond) throw Error(ErrorCode::InvalidRange, message);
}

/// Explicit (h, t) if given, else planned from --n.
ReductionParams resolve_params(const Options& o, std::uint64_t q) {
  require(o.k > 0, "--k is required");
  if (o.h > 0 || o.t > 0) {
    require(o.h > 0 && o.t > 0, "--h and --t must be given together");
    return ReductionParams::make(q, o.h, o.t, o.k);
  }
  require(o.n > 0, "give --h and --t, or --n to plan them");
  PlanOptions plan;
  plan.relax_gates = o.relax_gates;
  return plan_params(o.k, o.n, q, plan).params;
}

// ---------------------------------------------------------------------------

json cmd_gen_dense(const Options& o) {
  const std::uint64_t dim = o.dim ? o.dim : static_cast<std::uint64_t>(o.h) * o.t;
  require(dim > 0, "--dim (or --h and --t) is required");
  require(!o.out.empty(), "--out is required");
  const auto error = ErrorModel::parse(o.error);
  const auto planted = sample_dense_instance(static_cast<unsigned>(dim), o.q, o.m, error, Rng(o.seed));
  write_instance_file(planted.instance, o.out);
  if (!o.secret.empty()) write_vector_file(o.secret, "secret", o.q, planted.secret);
  return {{"command", "gen-dense"}, {"q", o.q}, {"dim", dim}, {"m", o.m}, {"seed", o.seed},
          {"error_model", error.describe()}, {"out", o.out}};
}

json cmd_gen_sparse(const Options& o) {
  const std::uint64_t n = o.n ? o.n : o.dim;
  require(n > 0, "--n is required");
  require(!o.out.empty(), "--out is required");
  const auto error = ErrorModel::parse(o.error);
  const auto values = SupportDistribution::parse(o.support);
  const auto planted = sample_sparse_instance(n, o.k, o.q, o.m, values, error, Rng(o.seed));
  write_instance_file(planted.instance, o.out);
  if (!o.secret.empty()) write_vector_file(o.secret, "secret", o.q, planted.secret);
  return {{"command", "gen-sparse"}, {"q", o.q}, {"n", n}, {"k", o.k}, {"m", o.m},
          {"seed", o.seed}, {"support", values.describe()}, {"error_model", error.describe()},
          {"out", o.out}};
}

json cmd_gen_null(const Options& o) {
  require(!o.out.empty(), "--out is required");
  Instance inst;
  if (o.kind == "dense") {
    const std::uint64_t dim = o.dim ? o.dim : static_cast<std::uint64_t>(o.h) * o.t;
    require(dim > 0, "--dim (or --h and --t) is required");
    inst = sample_null_dense(static_cast<unsigned>(dim), o.q, o.m, Rng(o.seed));
  } else if (o.kind == "sparse") {
    const std::uint64_t n = o.n ? o.n : o.dim;
    require(n > 0, "--n is required");
    inst = sample_null_sparse(n, o.k, o.q, o.m, SupportDistribution::parse(o.support), Rng(o.seed));
  } else {
    throw Error(ErrorCode::Parse, "--kind must be dense or sparse");
  }
  write_instance_file(inst, o.out);
  return {{"command", "gen-null"}, {"kind", o.kind}, {"q", o.q}, {"dim", inst.dim},
          {"m", o.m}, {"seed", o.seed}, {"out", o.out}};
}

json cmd_plan(const Options& o) {
  require(o.k > 0 && o.n > 0, "--k and --n are required");
  PlanOptions plan;
  plan.relax_gates = o.relax_gates;
  plan.preset = PlannerPreset::parse(o.preset);
  json j = plan_params(o.k, o.n, o.q, plan).to_json();
  j["preset"] = plan.preset.describe();
  j["relaxed_gates"] = o.relax_gates;
  return j;
}

json cmd_reduce(const Options& o) {
  require(!o.in.empty() && !o.out.empty(), "--in and --out are required");
  const Instance dense = read_instance_file(o.in);
  if (dense.kind != InstanceKind::Dense) throw Error(ErrorCode::Parse, "--in must be a dense instance");
  const auto params = resolve_params(o, dense.q);
  ReduceOptions ro;
  ro.threads = o.threads;
  ro.relax_gates = o.relax_gates;
  const auto values = SupportDistribution::parse(o.support);
  const auto result = reduce_instance(dense, params, values, Rng(o.seed), ro);
  write_instance_file(result.sparse, o.out);
  if (!o.mask.empty()) write_vector_file(o.mask, "mask", params.q, result.z);
  if (!o.log.empty()) {
    std::ofstream log(o.log, std::ios::binary);
    if (!log) throw Error(ErrorCode::Parse, "cannot write " + o.log);
    for (const auto& e : result.log) {
      log << json{{"index", e.index}, {"status", std::string(to_string(e.status))}}.dump() << '\n';
    }
  }
  json j = result.report();
  j["command"] = "reduce";
  j["support"] = values.describe();
  return j;
}

json cmd_lift(const Options& o) {
  require(!o.secret.empty() && !o.mask.empty(), "--secret (sparse secret) and --mask are required");
  std::uint64_t q = 0;
  const auto s_sparse = read_vector_file(o.secret, &q);
  const auto z = read_vector_file(o.mask);
  const auto params = resolve_params(o, q);
  const auto lifted = lift_secret(s_sparse, z, params, Rng(o.seed));
  if (!o.out.empty()) write_vector_file(o.out, "secret", q, lifted.secret);
  return {{"command", "lift"}, {"L", params.L}, {"secret", lifted.secret},
          {"rows_checked", lifted.rows_checked}, {"consistent", true}};
}

json cmd_refute(const Options& o) {
  require(!o.in.empty(), "--in is required");
  const Instance dense = read_instance_file(o.in);
  const auto params = resolve_params(o, dense.q);
  ReduceOptions ro;
  ro.threads = o.threads;
  ro.relax_gates = o.relax_gates;
  const auto mu = WeightFn::parse(o.mu);
  const auto delta = parse_rational(o.delta);
  const auto big_delta = parse_rational(o.big_delta);
  const auto result = refute_wrapper(dense, params, SupportDistribution::parse(o.support),
                                     brute_force_refuter(delta, mu), delta, big_delta,
                                     Rng(o.seed), ro);
  json j = result.report();
  j["command"] = "refute";
  j["mu"] = mu.describe();
  j["sparse_refuter"] = "brute-force";
  return j;
}

json cmd_enum_preimage(const Options& o) {
  require(o.h > 0, "--h is required");
  const auto b = parse_residues(o.b, o.q);
  const auto tuples = enumerate_preimage(b, o.h, o.q, o.k);
  return {{"command", "enum-preimage"}, {"h", o.h}, {"q", o.q}, {"k", o.k}, {"b", b},
          {"count", tuples.size()}, {"tuples", tuples}};
}

json cmd_count_preimage(const Options& o) {
  require(o.h > 0, "--h is required");
  const WordParams wp{o.h, o.q, o.k, o.psi_den ? o.psi_den : 1};
  return {{"command", "count-preimage"}, {"h", o.h}, {"q", o.q}, {"k", o.k},
          {"weight", o.weight}, {"count", big_json(count_preimages(wp, o.weight))}};
}

json cmd_margin(const Options& o) {
  require(o.h > 0, "--h is required");
  std::uint64_t psi_den = o.psi_den;
  if (psi_den == 0) {
    require(o.t > 0, "--psi-den or --t is required");
    psi_den = static_cast<std::uint64_t>(o.h) * o.t * o.h * o.t;
  }
  const WordCodec codec(WordParams{o.h, o.q, o.k, psi_den});
  const auto margin = uniformity_margin(codec);
  json ratios = json::array();
  for (const auto& r : margin.ratios) ratios.push_back(to_string(r));
  return {{"command", "margin"}, {"h", o.h}, {"q", o.q}, {"k", o.k}, {"psi", to_string(margin.psi)},
          {"ratios", ratios}, {"min", to_string(margin.min)}, {"max", to_string(margin.max)},
          {"min_approx", margin.min.convert_to<double>()}, {"max_approx", margin.max.convert_to<double>()},
          {"within_bound", margin.within_bound},
          {"uniformity_threshold", codec.params().uniformity_threshold()}};
}

json cmd_bruteforce(const Options& o) {
  require(!o.in.empty(), "--in is required");
  const Instance inst = read_instance_file(o.in);
  const auto mu = WeightFn::parse(o.mu);
  const auto hits = brute_force_search(inst, parse_rational(o.max_weight), mu);
  const auto best = brute_force_minimum(inst, mu);
  json list = json::array();
  for (std::size_t i = 0; i < hits.size() && i < o.max_hits; ++i) {
    list.push_back({{"secret", hits[i].secret}, {"objective", to_string(hits[i].objective)}});
  }
  if (!o.out.empty() && !hits.empty()) write_vector_file(o.out, "secret", inst.q, hits.front().secret);
  return {{"command", "bruteforce"}, {"dim", inst.dim}, {"q", inst.q}, {"mu", mu.describe()},
          {"max_weight", o.max_weight}, {"hits", hits.size()}, {"listed", list},
          {"min_objective", to_string(best.objective)}, {"argmin", best.secret}};
}

json cmd_folklore(const Options& o) {
  require(!o.in.empty(), "--in is required");
  json j = folklore_distinguisher(read_instance_file(o.in), o.alpha).to_json();
  j["command"] = "folklore";
  j["alpha"] = o.alpha;
  return j;
}

json cmd_tensorize(const Options& o) {
  require(!o.in.empty() && !o.out.empty(), "--in and --out are required");
  const Instance inst = read_instance_file(o.in);
  const auto variant = parse_tensor_variant(o.variant);
  TensorFile file;
  file.n = inst.dim;
  file.k = inst.k;
  file.q = inst.q;
  file.variant = variant;
  file.seed = o.seed;
  switch (variant) {
    case TensorVariant::Real: file.samples = tensorize_real(inst); break;
    case TensorVariant::Complex: file.samples = tensorize_complex(inst); break;
    case TensorVariant::Gaussian: file.samples = gaussianize(inst, Rng(o.seed)); break;
  }
  write_tensor_file(file, o.out);
  std::optional<TensorSecretInfo> info;
  if (!o.secret.empty()) {
    TensorSecretInfo si;
    si.secret = read_vector_file(o.secret);
    si.errors = residuals(inst, si.secret);
    info = std::move(si);
  }
  json j;
  j["command"] = "tensorize";
  j["variant"] = std::string(to_string(variant));
  j["m"] = file.samples.size();
  j["seed"] = o.seed;
  j["diagnostics"] = diagnostics(file.samples, variant, inst.q, info ? &*info : nullptr).to_json();
  return j;
}

// ---------------------------------------------------------------------------
// verify

struct SuiteResult {
  std::size_t checks = 0;
  std::size_t failures = 0;
  void expect(bool ok) {
    ++checks;
    if (!ok) ++failures;
  }
};

SuiteResult verify_dp_vs_enumeration() {
  SuiteResult r;
  for (unsigned h = 1; h <= 2; ++h) {
    for (std::uint64_t q = 2; q <= 3; ++q) {
      for (unsigned k = 0; k <= 5; ++k) {
        const WordCodec codec(WordParams{h, q, k, 1});
        for (unsigned w = 0; w <= h; ++w) {
          ResidueVector b(h, 0);
          for (unsigned d = 0; d < w; ++d) b[d] = 1;
          r.expect(codec.count_preimages(w) == enumerate_preimage(b, h, q, k).size());
        }
      }
    }
  }
  return r;
}

SuiteResult verify_partition_identity() {
  SuiteResult r;
  for (unsigned h = 1; h <= 4; ++h) {
    for (std::uint64_t q = 2; q <= 4; ++q) {
      for (unsigned k = 0; k <= 12; ++k) {
        const WordCodec codec(WordParams{h, q, k, 1});
        BigUint total = 0;
        BigUint binom = 1;
        for (unsigned w = 0; w <= h; ++w) {
          total += binom * big_pow(q - 1, w) * codec.count_preimages(w);
          binom = binom * (h - w) / (w + 1);
        }
        r.expect(total == big_pow(h * q, k));
      }
    }
  }
  return r;
}

SuiteResult verify_decode_identity(const Rng& rng) {
  SuiteResult r;
  const ReductionParams sets[] = {ReductionParams::make(2, 1, 3, 4), ReductionParams::make(3, 2, 2, 8),
                                  ReductionParams::make(5, 1, 3, 8)};
  const auto values = SupportDistribution::uniform_units();
  for (const auto& p : sets) {
    const SentenceCodec codec(p);
    for (std::size_t i = 0; i < 200; ++i) {
      Rng sr = rng.substream("verify-decode", i);
      ResidueVector b(p.L);
      for (auto& x : b) x = uniform_index(p.q, sr);
      const auto a = codec.decode_sentence(b, values, sr);
      if (a) r.expect(sparse_times_g(*a, p) == b && a->indices.size() == p.k);
    }
  }
  return r;
}

SuiteResult verify_weight_identity(const Rng& rng) {
  SuiteResult r;
  const auto p = ReductionParams::make(3, 1, 4, 6);
  const SentenceCodec codec(p);
  const WeightFn mus[] = {WeightFn::indicator(), WeightFn::circular_lp(2)};
  for (std::size_t i = 0; i < 300; ++i) {
    Rng sr = rng.substream("verify-weight", i);
    ResidueVector b(p.L), s(p.L), z(p.n);
    for (auto& x : b) x = uniform_index(p.q, sr);
    for (auto& x : s) x = uniform_index(p.q, sr);
    for (auto& x : z) x = uniform_index(p.q, sr);
    const std::uint64_t y = uniform_index(p.q, sr);
    const auto a = codec.decode_sentence(b, SupportDistribution::uniform_units(), sr);
    if (!a) continue;
    ResidueVector gsz(p.n);
    for (std::size_t idx = 0; idx < p.n; ++idx) gsz[idx] = mod_add(g_row_dot(idx, s, p), z[idx], p.q);
    const std::uint64_t y2 = mod_add(y, sparse_dot(*a, z, p.q), p.q);
    for (const auto& mu : mus) {
      r.expect(mu(mod_sub(dot_mod(b, s, p.q), y, p.q), p.q) ==
               mu(mod_sub(sparse_dot(*a, gsz, p.q), y2, p.q), p.q));
    }
  }
  return r;
}

SuiteResult verify_identity_rows() {
  SuiteResult r;
  for (std::uint64_t q : {2, 3, 5}) {
    for (unsigned h = 1; h <= 3; ++h) {
      for (unsigned t = 1; t <= 3; ++t) {
        const auto p = ReductionParams::make(q, h, t, h + 3);
        const auto rows = identity_row_indices(p);
        r.expect(rows.size() == p.L);
        for (unsigned u = 0; u < rows.size(); ++u) {
          ResidueVector e(p.L, 0);
          e[u] = 1;
          r.expect(g_row(rows[u], p) == e);
        }
      }
    }
  }
  return r;
}

SuiteResult verify_word_shift_bijection() {
  SuiteResult r;
  const auto p = ReductionParams::make(5, 1, 2, 2);  // n = 25
  for (std::uint64_t r0 = 1; r0 < 5; ++r0) {
    for (std::uint64_t r1 = 1; r1 < 5; ++r1) {
      std::vector<bool> seen(p.n * p.n, false);
      for (SentenceIndex x = 0; x < p.n; ++x) {
        for (SentenceIndex y = 0; y < p.n; ++y) {
          const auto out = word_shift({x, y}, {r0, r1}, p);
          seen[out[0] * p.n + out[1]] = true;
          // rho_0 g(x') + rho_1 g(y') = g(x) + g(y)
          const auto gx = g_row(out[0], p), gy = g_row(out[1], p), ox = g_row(x, p), oy = g_row(y, p);
          bool ok = true;
          for (unsigned u = 0; u < p.L; ++u) {
            ok &= mod_add(mod_mul(r0, gx[u], p.q), mod_mul(r1, gy[u], p.q), p.q) == mod_add(ox[u], oy[u], p.q);
          }
          r.expect(ok);
        }
      }
      r.expect(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
    }
  }
  return r;
}

json cmd_verify(const Options& o, bool& all_pass) {
  const Rng rng(o.seed);
  const std::vector<std::pair<std::string, std::function<SuiteResult()>>> suites = {
      {"dp_vs_enumeration", verify_dp_vs_enumeration},
      {"partition_identity", verify_partition_identity},
      {"decode_identity", [&] { return verify_decode_identity(rng); }},
      {"weight_identity", [&] { return verify_weight_identity(rng); }},
      {"identity_rows", verify_identity_rows},
      {"word_shift_bijection", verify_word_shift_bijection},
  };
  json j;
  j["command"] = "verify";
  j["seed"] = o.seed;
  json results = json::object();
  all_pass = true;
  for (const auto& [name, fn] : suites) {
    const auto r = fn();
    const bool pass = r.failures == 0 && r.checks > 0;
    all_pass &= pass;
    results[name] = {{"pass", pass}, {"checks", r.checks}, {"failures", r.failures}};
  }
  j["suites"] = results;
  j["pass"] = all_pass;
  return j;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dense-to-sparse noisy linear equation reduction toolkit", "sparsenle"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1, 1);
  Options o;

  auto add_params = [&o](CLI::App* c) {
    c->add_option("--q", o.q, "modulus")->check(CLI::Range(std::uint64_t{2}, std::uint64_t{1} << 62));
    c->add_option("--h", o.h, "word length");
    c->add_option("--t", o.t, "words per sentence");
    c->add_option("--k", o.k, "sparsity");
    c->add_option("--n", o.n, "sparse dimension (or planner target)");
  };
  auto add_seed = [&o](CLI::App* c) { c->add_option("--seed", o.seed, "master seed"); };

  auto* gen_dense = app.add_subcommand("gen-dense", "sample a planted dense instance");
  add_params(gen_dense);
  add_seed(gen_dense);
  gen_dense->add_option("--dim", o.dim, "dimension L");
  gen_dense->add_option("--m", o.m, "samples")->required();
  gen_dense->add_option("--error", o.error, "zero|bernoulli:d|gauss:s|uniform:B|round:p");
  gen_dense->add_option("--out", o.out, "instance file");
  gen_dense->add_option("--secret", o.secret, "secret sidecar file");

  auto* gen_sparse = app.add_subcommand("gen-sparse", "sample a planted k-sparse instance");
  add_params(gen_sparse);
  add_seed(gen_sparse);
  gen_sparse->add_option("--m", o.m, "samples")->required();
  gen_sparse->add_option("--error", o.error, "noise model");
  gen_sparse->add_option("--support", o.support, "ones|uniform-units|file:path");
  gen_sparse->add_option("--out", o.out, "instance file");
  gen_sparse->add_option("--secret", o.secret, "secret sidecar file");

  auto* gen_null = app.add_subcommand("gen-null", "sample a null instance (uniform labels)");
  add_params(gen_null);
  add_seed(gen_null);
  gen_null->add_option("--kind", o.kind, "dense|sparse");
  gen_null->add_option("--dim", o.dim, "dimension L (dense)");
  gen_null->add_option("--m", o.m, "samples")->required();
  gen_null->add_option("--support", o.support, "ones|uniform-units|file:path");
  gen_null->add_option("--out", o.out, "instance file");

  auto* plan = app.add_subcommand("plan", "choose (h, t) for given k and target n");
  add_params(plan);
  plan->add_option("--preset", o.preset, "none|exp-lwe|near-exp-lpn|subexp:a|quasi:c[,kappa=K]");
  plan->add_flag("--relax-gates", o.relax_gates, "enforce only k > h + 2");

  auto* reduce = app.add_subcommand("reduce", "reduce a dense instance to a k-sparse one");
  add_params(reduce);
  add_seed(reduce);
  reduce->add_option("--in", o.in, "dense instance file");
  reduce->add_option("--out", o.out, "sparse instance file");
  reduce->add_option("--mask", o.mask, "write the mask z here");
  reduce->add_option("--log", o.log, "write the per-sample decode log here");
  reduce->add_option("--support", o.support, "ones|uniform-units|file:path");
  reduce->add_option("--threads", o.threads, "decoding threads")->check(CLI::PositiveNumber);
  reduce->add_flag("--relax-gates", o.relax_gates, "skip the distributional gates");

  auto* lift = app.add_subcommand("lift", "map a sparse secret G s + z back to s");
  add_params(lift);
  add_seed(lift);
  lift->add_option("--secret", o.secret, "sparse secret vector file")->required();
  lift->add_option("--mask", o.mask, "mask vector file")->required();
  lift->add_option("--out", o.out, "dense secret output file");
  lift->add_flag("--relax-gates", o.relax_gates, "planner gates (with --n)");

  auto* refute = app.add_subcommand("refute", "refute a dense instance via the reduction");
  add_params(refute);
  add_seed(refute);
  refute->add_option("--in", o.in, "dense instance file");
  refute->add_option("--mu", o.mu, "indicator|lp:p");
  refute->add_option("--delta", o.delta, "sparse satisfiability threshold (a/b)");
  refute->add_option("--Delta", o.big_delta, "sparse unsatisfiability threshold (a/b)");
  refute->add_option("--support", o.support, "ones|uniform-units|file:path");
  refute->add_option("--threads", o.threads, "decoding threads")->check(CLI::PositiveNumber);
  refute->add_flag("--relax-gates", o.relax_gates, "skip the distributional gates");

  auto* enum_pre = app.add_subcommand("enum-preimage", "list Preimage_V(b) exhaustively");
  add_params(enum_pre);
  enum_pre->add_option("--b", o.b, "target word, comma separated")->required();

  auto* count_pre = app.add_subcommand("count-preimage", "|Preimage_V(b)| for a Hamming weight");
  add_params(count_pre);
  count_pre->add_option("--weight", o.weight, "Hamming weight of b");

  auto* margin = app.add_subcommand("margin", "exact preimage-size ratios per weight");
  add_params(margin);
  margin->add_option("--psi-den", o.psi_den, "1/psi (default (ht)^2)");

  auto* brute = app.add_subcommand("bruteforce", "all secrets with objective <= max weight");
  brute->add_option("--in", o.in, "instance file");
  brute->add_option("--mu", o.mu, "indicator|lp:p");
  brute->add_option("--max-weight", o.max_weight, "objective bound (a/b)");
  brute->add_option("--max-hits", o.max_hits, "hits listed in the report");
  brute->add_option("--out", o.out, "write the first hit here");

  auto* folklore = app.add_subcommand("folklore", "collision distinguisher");
  folklore->add_option("--in", o.in, "sparse instance file");
  folklore->add_option("--alpha", o.alpha, "significance level");

  auto* tensorize = app.add_subcommand("tensorize", "sparse binary instance to tensor entries");
  add_seed(tensorize);
  tensorize->add_option("--in", o.in, "sparse instance file");
  tensorize->add_option("--out", o.out, "tensor sample file");
  tensorize->add_option("--variant", o.variant, "real|complex|gaussian");
  tensorize->add_option("--secret", o.secret, "secret file for the noise check");

  auto* verify = app.add_subcommand("verify", "replay the exact assertion suites");
  add_seed(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    json report;
    int code = 0;
    if (*gen_dense) report = cmd_gen_dense(o);
    else if (*gen_sparse) report = cmd_gen_sparse(o);
    else if (*gen_null) report = cmd_gen_null(o);
    else if (*plan) report = cmd_plan(o);
    else if (*reduce) report = cmd_reduce(o);
    else if (*lift) report = cmd_lift(o);
    else if (*refute) report = cmd_refute(o);
    else if (*enum_pre) report = cmd_enum_preimage(o);
    else if (*count_pre) report = cmd_count_preimage(o);
    else if (*margin) report = cmd_margin(o);
    else if (*brute) report = cmd_bruteforce(o);
    else if (*folklore) report = cmd_folklore(o);
    else if (*tensorize) report = cmd_tensorize(o);
    else if (*verify) {
      bool pass = false;
      report = cmd_verify(o, pass);
      code = pass ? 0 : 2;
    }
    out << report.dump() << '\n';
    return code;
  } catch (const Error& e) {
    const bool domain = is_domain_failure(e.code());
    out << json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump() << '\n';
    err << "sparsenle: " << e.what() << '\n';
    return domain ? 2 : 1;
  } catch (const std::exception& e) {
    err << "sparsenle: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sparsenle
