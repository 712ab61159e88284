// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sparsenle/oracles.hpp"
#include "sparsenle/reduction.hpp"
#include "sparsenle/tensor.hpp"

using namespace sparsenle;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Outcome()> run;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

BigUint binomial(unsigned n, unsigned r) {
  BigUint c = 1;
  for (unsigned i = 0; i < r; ++i) c = c * (n - i) / (i + 1);
  return c;
}

// A vector with the given Hamming weight; nonzero entries cycle through 1..q-1.
ResidueVector word_of_weight(unsigned h, std::uint64_t q, unsigned weight) {
  ResidueVector b(h, 0);
  for (unsigned d = 0; d < weight; ++d) b[d] = 1 + d % (q - 1);
  return b;
}

ResidueVector sparse_secret(const ResidueVector& s, const ResidueVector& z, const ReductionParams& p) {
  ResidueVector w(p.n);
  for (SentenceIndex i = 0; i < p.n; ++i) w[i] = mod_add(g_row_dot(i, s, p), z[i], p.q);
  return w;
}

ReduceOptions relaxed() {
  ReduceOptions o;
  o.relax_gates = true;
  return o;
}

// ---------------------------------------------------------------------------

Outcome dp_equivalence() {
  std::size_t cases = 0;
  for (unsigned h = 1; h <= 3; ++h) {
    for (std::uint64_t q = 2; q <= 3; ++q) {
      for (unsigned k = h + 3; k <= 6; ++k) {
        const WordCodec codec(WordParams{h, q, k, 1});
        for (unsigned w = 0; w <= h; ++w) {
          const auto b = word_of_weight(h, q, w);
          const auto tuples = enumerate_preimage(b, h, q, k);
          ++cases;
          if (BigUint(tuples.size()) != codec.count_preimages(w)) {
            return {false, "mismatch at h=" + std::to_string(h) + " q=" + std::to_string(q) +
                               " k=" + std::to_string(k) + " weight=" + std::to_string(w)};
          }
        }
      }
    }
  }
  return {true, std::to_string(cases) + " (h, q, k, weight) cases"};
}

Outcome partition_identity() {
  std::size_t cases = 0;
  for (unsigned h = 1; h <= 8; ++h) {
    for (std::uint64_t q = 2; q <= 5; ++q) {
      const WordCodec codec(WordParams{h, q, 40, 1});
      for (unsigned k = 0; k <= 40; ++k) {
        BigUint total = 0;
        for (unsigned w = 0; w <= h; ++w) {
          total += binomial(h, w) * big_pow(q - 1, w) * codec.count_table(w, k);
        }
        ++cases;
        if (total != big_pow(h * q, k)) {
          return {false, "fails at h=" + std::to_string(h) + " q=" + std::to_string(q) +
                             " k=" + std::to_string(k)};
        }
      }
    }
  }
  return {true, std::to_string(cases) + " (h, q, k) cases"};
}

Outcome mixing_bound() {
  const WordCodec codec(WordParams{2, 2, 80, 256});
  const auto margin = uniformity_margin(codec);
  const BigRational psi(1, 256);
  bool ok = true;
  for (const auto& r : margin.ratios) ok = ok && r >= 1 - psi && r <= 1 + psi;
  const double threshold = WordParams{2, 2, 80, 256}.uniformity_threshold();
  return {ok && std::ceil(threshold) == 80,
          "ratios in [" + fmt(margin.min.convert_to<double>()) + ", " +
              fmt(margin.max.convert_to<double>()) + "], threshold " + fmt(threshold)};
}

Outcome sampler_uniformity() {
  const unsigned h = 2, k = 6;
  const std::uint64_t q = 2;
  const ResidueVector b{1, 1};
  const auto support = enumerate_preimage(b, h, q, k);
  std::map<WordTuple, std::size_t> cell;
  for (std::size_t i = 0; i < support.size(); ++i) cell[support[i]] = i;
  const WordCodec codec(WordParams{h, q, k, 1});
  int passing = 0;
  std::string ps;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = Rng(seed).substream("sampler-uniformity");
    std::vector<std::uint64_t> counts(support.size(), 0);
    for (int i = 0; i < 200000; ++i) {
      const auto it = cell.find(codec.sample_preimage(b, rng));
      if (it == cell.end()) return {false, "sample outside the enumerated preimage"};
      ++counts[it->second];
    }
    const double p = chi_square_uniform(counts).p_value;
    if (p >= 1e-3) ++passing;
    ps += (seed ? " " : "") + fmt(p);
  }
  return {passing >= 9, std::to_string(passing) + "/10 seeds, |preimage| = " +
                            std::to_string(support.size()) + ", p = [" + ps + "]"};
}

Outcome decoder_failure_rate() {
  const auto p = ReductionParams::make(2, 2, 8, 80);
  const SentenceCodec codec(p);
  const int N = 10000;
  Rng rng(5);
  int fails = 0;
  for (int i = 0; i < N; ++i) {
    ResidueVector b(p.L);
    for (auto& x : b) x = uniform_index(2, rng);
    const auto a = codec.decode_sentence(b, SupportDistribution::ones(), rng);
    if (!a) {
      ++fails;
      continue;
    }
    if (a->indices.size() != p.k || sparse_times_g(*a, p) != b) return {false, "a^T G != b^T"};
  }
  const double bound = 2.0 / 16 + 6400.0 / 65536;
  const double limit = bound + 3 * std::sqrt(bound * (1 - bound) / N);
  const double rate = double(fails) / N;
  return {rate <= limit, "FAIL rate " + fmt(rate) + " <= " + fmt(limit)};
}

Outcome support_uniformity() {
  const auto p = ReductionParams::make(2, 1, 12, 33);
  const SentenceCodec codec(p);
  const std::size_t target = 100000;
  std::vector<std::uint64_t> freq(p.n, 0);
  Rng rng(6);
  std::size_t successes = 0, attempts = 0;
  while (successes < target) {
    ++attempts;
    ResidueVector b(p.L);
    for (auto& x : b) x = uniform_index(2, rng);
    const auto a = codec.decode_sentence(b, SupportDistribution::ones(), rng);
    if (!a) continue;
    ++successes;
    for (auto idx : a->indices) ++freq[idx];
  }
  const auto r = chi_square_uniform(freq);
  return {r.p_value >= 1e-3, "p = " + fmt(r.p_value) + " over " + std::to_string(p.n) + " indices, " +
                                 std::to_string(attempts) + " attempts (sparsity gate relaxed)"};
}

Outcome search_round_trip() {
  const auto p = ReductionParams::make(2, 1, 3, 4);
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Rng rng(1000 + seed);
    const auto planted = sample_dense_instance(p.L, 2, 100, ErrorModel::zero(), rng.substream("instance"));
    const auto out = reduce_instance(planted.instance, p, SupportDistribution::ones(),
                                     rng.substream("reduce"), relaxed());
    const auto hits = brute_force_search(out.sparse, 0, WeightFn::indicator());
    for (const auto& hit : hits) {
      try {
        const auto lifted = lift_secret(hit.secret, out.z, p, rng.substream("lift"));
        if (residuals(planted.instance, lifted.secret) != ResidueVector(100, 0)) continue;
        if (lifted.secret == planted.secret) ++recovered;
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::InconsistentSecret) throw;
      }
    }
  }
  return {recovered >= 95, std::to_string(recovered) + "/100 seeds recover s"};
}

Outcome decision_transport() {
  const auto p = ReductionParams::make(2, 1, 3, 4);
  int planted_hits = 0, null_hits = 0;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    const Rng rng(2000 + trial);
    const auto planted =
        sample_dense_instance(p.L, 2, 2000, ErrorModel::bernoulli(0.1), rng.substream("planted"));
    const auto null = sample_null_dense(p.L, 2, 2000, rng.substream("null"));
    const auto a = reduce_instance(planted.instance, p, SupportDistribution::ones(),
                                   rng.substream("reduce-planted"), relaxed());
    const auto b = reduce_instance(null, p, SupportDistribution::ones(), rng.substream("reduce-null"),
                                   relaxed());
    planted_hits += folklore_distinguisher(a.sparse).verdict == DecisionVerdict::Planted;
    null_hits += folklore_distinguisher(b.sparse).verdict == DecisionVerdict::Planted;
  }
  const double advantage = (planted_hits - null_hits) / 50.0;
  return {advantage >= 0.5, "advantage " + fmt(advantage) + " (planted " + std::to_string(planted_hits) +
                                "/50, null " + std::to_string(null_hits) + "/50)"};
}

Outcome weight_identity() {
  std::size_t checked = 0;
  Rng rng(9);
  for (const auto& p : {ReductionParams::make(5, 1, 3, 6), ReductionParams::make(2, 1, 3, 4)}) {
    const SentenceCodec codec(p);
    const auto values = p.q == 2 ? SupportDistribution::ones() : SupportDistribution::uniform_units();
    std::size_t local = 0;
    while (local < 500) {
      ResidueVector b(p.L), s(p.L), z(p.n);
      for (auto& x : b) x = uniform_index(p.q, rng);
      for (auto& x : s) x = uniform_index(p.q, rng);
      for (auto& x : z) x = uniform_index(p.q, rng);
      const std::uint64_t y = uniform_index(p.q, rng);
      const auto a = codec.decode_sentence(b, values, rng);
      if (!a) continue;
      ++local;
      const auto w = sparse_secret(s, z, p);
      const auto y2 = mod_add(y, sparse_dot(*a, z, p.q), p.q);
      for (const auto& mu : {WeightFn::indicator(), WeightFn::circular_lp(1), WeightFn::circular_lp(2)}) {
        if (mu(mod_sub(dot_mod(b, s, p.q), y, p.q), p.q) !=
            mu(mod_sub(sparse_dot(*a, w, p.q), y2, p.q), p.q)) {
          return {false, "identity fails at q=" + std::to_string(p.q)};
        }
      }
    }
    checked += local;
  }
  return {true, std::to_string(checked) + " triples, indicator and lp weights"};
}

Outcome m1_bookkeeping() {
  Rng rng(10);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t m = 1 + uniform_index(1000000, rng);
    const std::uint64_t L = 1 + uniform_index(128, rng);
    const std::uint64_t k = 1 + uniform_index(200, rng);
    const std::uint64_t n = 1 + uniform_index(std::uint64_t{1} << 30, rng);
    const BigRational exact = BigRational(m) * (1 - BigRational(3, L) - BigRational(BigUint(k * k), BigUint(n)));
    const BigUint num = boost::multiprecision::numerator(exact), den = boost::multiprecision::denominator(exact);
    BigUint floor = num / den;
    if (num < 0 && floor * den != num) --floor;
    if (compute_m1(m, L, k, n) != floor.convert_to<std::int64_t>()) return {false, "m1 mismatch"};
  }
  const auto p = ReductionParams::make(2, 2, 8, 80);
  const auto planted = sample_dense_instance(p.L, 2, 1000, ErrorModel::zero(), Rng(11));
  const auto out = reduce_instance(planted.instance, p, SupportDistribution::ones(), Rng(12));
  if (out.m1 != 714 || out.sparse.size() != 714) return {false, "emitted " + std::to_string(out.sparse.size())};
  std::size_t j = 0, last = 0;
  for (const auto& e : out.log) {
    if (e.status != DecodeStatus::Kept) continue;
    if (e.index < last || sparse_times_g(out.sparse.sparse[j].a, p) != planted.instance.dense[e.index].b) {
      return {false, "output out of input order"};
    }
    last = e.index;
    ++j;
  }
  return {true, "1000 tuples exact; 714 of 1000 emitted in input order"};
}

Outcome rank_extraction() {
  std::size_t sets = 0;
  for (std::uint64_t q : {2, 3, 5}) {
    for (unsigned h = 1; h <= 3 && sets < 20; ++h) {
      for (unsigned t = 1; t <= 3 && sets < 20; ++t) {
        const auto p = ReductionParams::make(q, h, t, h + 3);
        const auto rows = identity_row_indices(p);
        if (rows.size() != p.L) return {false, "wrong number of rows"};
        for (unsigned u = 0; u < p.L; ++u) {
          ResidueVector e(p.L, 0);
          e[u] = 1;
          if (g_row(rows[u], p) != e) return {false, "row " + std::to_string(u) + " is not e_u"};
        }
        ++sets;
      }
    }
  }
  return {sets == 20, std::to_string(sets) + " parameter sets"};
}

Outcome tensor_null() {
  const std::size_t m = 100000;
  const auto inst = sample_null_sparse(2000, 3, 257, m, SupportDistribution::ones(), Rng(13));
  const auto d = diagnostics(tensorize_real(inst), TensorVariant::Real, 257);
  const auto c = diagnostics(tensorize_complex(inst), TensorVariant::Complex, 257);
  const double tol = 4 / std::sqrt(double(m));
  const bool ok = std::abs(d.mean) <= tol && std::abs(d.variance - 0.5) <= tol && c.max_modulus_error <= 1e-12;
  return {ok, "mean " + fmt(d.mean) + ", variance " + fmt(d.variance) + ", tol " + fmt(tol) +
                  ", max ||z|-1| " + fmt(c.max_modulus_error)};
}

Outcome tensor_noise() {
  const auto planted = sample_sparse_instance(2000, 3, 257, 20000, SupportDistribution::ones(),
                                              ErrorModel::gauss(8.0), Rng(14));
  const TensorSecretInfo info{planted.secret, planted.errors};
  const auto r = diagnostics(tensorize_real(planted.instance), TensorVariant::Real, 257, &info);
  const auto c = diagnostics(tensorize_complex(planted.instance), TensorVariant::Complex, 257, &info);
  return {r.bound_violations == 0 && c.bound_violations == 0,
          "violations real " + std::to_string(r.bound_violations) + ", complex " +
              std::to_string(c.bound_violations) + "; max ratio " + fmt(std::max(r.max_bound_ratio, c.max_bound_ratio))};
}

// ---------------------------------------------------------------------------
// Reproducibility through the command-line tool.

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && " + SPARSENLE_CLI_PATH + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void strip_wall_time(nlohmann::json& j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    for (auto& [key, value] : j.items()) strip_wall_time(value);
  } else if (j.is_array()) {
    for (auto& v : j) strip_wall_time(v);
  }
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    files[entry.path().filename().string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return files;
}

Outcome reproducibility() {
  // Sparse secret files for lift, written once and copied into every run directory.
  const auto p = ReductionParams::make(2, 2, 8, 80);
  Rng rng(15);
  ResidueVector s(p.L), z(p.n);
  for (auto& x : s) x = uniform_index(2, rng);
  for (auto& x : z) x = uniform_index(2, rng);
  const auto w = sparse_secret(s, z, p);

  const std::vector<std::string> commands = {
      "gen-dense --h 2 --t 8 --m 1500 --error bernoulli:0.1 --seed 21 --out dense.jsonl --secret dense_secret.json",
      "gen-dense --h 1 --t 3 --m 300 --error zero --seed 22 --out tiny.jsonl",
      "gen-sparse --n 4096 --k 5 --q 7 --m 500 --error gauss:1.5 --support uniform-units --seed 23 "
      "--out sparse.jsonl --secret sparse_secret.json",
      "gen-sparse --n 64 --k 3 --q 11 --m 500 --error uniform:2 --seed 24 --out binary.jsonl",
      "gen-null --kind dense --dim 16 --m 500 --seed 25 --out null_dense.jsonl",
      "gen-null --kind sparse --n 256 --k 4 --q 5 --m 500 --support uniform-units --seed 26 --out null_sparse.jsonl",
      "reduce --in dense.jsonl --h 2 --t 8 --k 80 --seed 27 --out reduced.jsonl --mask mask.json --log log.jsonl THREADS",
      "reduce --in tiny.jsonl --h 1 --t 3 --k 4 --relax-gates --seed 28 --out tiny_reduced.jsonl THREADS",
      "refute --in tiny.jsonl --h 1 --t 3 --k 4 --relax-gates --seed 29 --delta 0 --Delta 1/4 THREADS",
      "lift --secret lift_in.json --mask lift_mask.json --h 2 --t 8 --k 80 --seed 30 --out lifted.json",
      "tensorize --in binary.jsonl --variant gaussian --seed 31 --out gauss.jsonl",
      "tensorize --in binary.jsonl --variant complex --seed 31 --out complex.jsonl",
      "verify --seed 32",
  };

  const fs::path root = fs::temp_directory_path() / ("sparsenle_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::vector<std::pair<std::map<std::string, std::string>, std::vector<std::string>>> runs;
  for (const std::string threads : {"--threads 1", "--threads 1", "--threads 4"}) {
    const fs::path dir = root / std::to_string(runs.size());
    fs::create_directories(dir);
    write_vector_file((dir / "lift_in.json").string(), "secret", 2, w);
    write_vector_file((dir / "lift_mask.json").string(), "mask", 2, z);
    std::vector<std::string> reports;
    for (std::string cmd : commands) {
      const auto pos = cmd.find("THREADS");
      if (pos != std::string::npos) cmd.replace(pos, 7, threads);
      const Run r = run_cli(dir, cmd);
      if (r.code != 0) {
        fs::remove_all(root);
        return {false, "exit " + std::to_string(r.code) + " for: " + cmd};
      }
      auto j = nlohmann::json::parse(r.out);
      strip_wall_time(j);
      reports.push_back(j.dump());
    }
    runs.emplace_back(snapshot(dir), reports);
  }
  fs::remove_all(root);
  const bool ok = runs[0] == runs[1] && runs[0] == runs[2];
  return {ok, std::to_string(commands.size()) + " commands, " + std::to_string(runs[0].first.size()) +
                  " files, 2 runs plus --threads 4"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "exact DP equivalence", 10, dp_equivalence},
      {2, "partition identity", 5, partition_identity},
      {3, "mixing bound", 1, mixing_bound},
      {4, "sampler uniformity", 30, sampler_uniformity},
      {5, "decoder failure rate", 60, decoder_failure_rate},
      {6, "support uniformity", 60, support_uniformity},
      {7, "search round-trip", 30, search_round_trip},
      {8, "decision transport", 60, decision_transport},
      {9, "refutation weight identity", 5, weight_identity},
      {10, "m1 bookkeeping", 5, m1_bookkeeping},
      {11, "rank-L extraction", 5, rank_extraction},
      {12, "tensor null statistics", 30, tensor_null},
      {13, "tensor noise bound", 10, tensor_noise},
      {14, "reproducibility", 60, reproducibility},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
              << "; " << fmt(secs) << " s of " << fmt(c.limit_s) << " s" << (in_time ? "" : " [too slow]")
              << std::endl;
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
