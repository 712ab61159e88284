#pragma once

// Dense-to-sparse reduction: one shared mask z, per-sample sentence decoding,
// label map y' = y + <a, z>, truncation to m1 samples. Also the parameter
// planner and the search / refutation wrappers.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sparsenle/core.hpp"
#include "sparsenle/nle_model.hpp"
#include "sparsenle/sentence_codec.hpp"

namespace sparsenle {

// ---------------------------------------------------------------------------
// Planner

enum class Regime { None, ExponentialLwe, NearExponentialLpn, SubExponential, QuasiPolynomial };

struct PlannerPreset {
  Regime regime = Regime::None;
  double alpha = 0.5;  // sub-exponential exponent
  double c = 1.0;      // quasi-polynomial exponent
  double kappa = 1.0;  // q <= L^kappa

  /// "none" | "exp-lwe" | "near-exp-lpn" | "subexp:alpha" | "quasi:c", with an
  /// optional ",kappa=K" suffix.
  static PlannerPreset parse(std::string_view spec);
  std::string describe() const;
};

struct GateStatus {
  std::string name;
  bool pass = false;
  bool enforced = false;
  double value = 0.0;  // the quantity compared against the limit
  double limit = 0.0;
};

struct GateReport {
  std::vector<GateStatus> gates;
  bool all_enforced_pass() const;
  nlohmann::ordered_json to_json() const;
};

struct PlanOptions {
  PlannerPreset preset;
  /// Only k > h + 2 is enforced; distributional gates are still reported.
  bool relax_gates = false;
};

struct Plan {
  ReductionParams params;
  GateReport gates;
  nlohmann::ordered_json to_json() const;
};

/// Gate report for a fixed parameter set (functional, uniformity, sparsity,
/// plus the preset's regime gates, which are never enforced).
GateReport evaluate_gates(const ReductionParams& params, const PlanOptions& options);

/// For each h the smallest t with (hq)^t >= target_n; among parameter sets
/// passing the enforced gates, maximizes L = ht, ties to larger h.
/// Throws Infeasible if none passes.
Plan plan_params(unsigned k, std::uint64_t target_n, std::uint64_t q, const PlanOptions& options = {});

// ---------------------------------------------------------------------------
// Reduction

/// floor(m (L n - 3 n - k^2 L) / (L n)) in exact integer arithmetic; may be <= 0.
std::int64_t compute_m1(std::uint64_t m, std::uint64_t L, std::uint64_t k, std::uint64_t n);

enum class DecodeStatus { Kept, Failed, Truncated };

std::string_view to_string(DecodeStatus status);

struct DecodeLogEntry {
  std::size_t index = 0;  // position in the dense input
  DecodeStatus status = DecodeStatus::Failed;

  friend bool operator==(const DecodeLogEntry&, const DecodeLogEntry&) = default;
};

struct ReduceOptions {
  unsigned threads = 1;
  /// Skip the distributional gates (tiny experiments). When m1 <= 0 the
  /// output then keeps every decoded sample instead of truncating.
  bool relax_gates = false;
};

struct ReductionOutput {
  Instance sparse;
  ResidueVector z;
  std::vector<DecodeLogEntry> log;
  ReductionParams params;
  std::size_t m = 0;
  std::int64_t m1 = 0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  bool truncated_to_m1 = true;
  bool relaxed_gates = false;
  double wall_time_s = 0.0;

  nlohmann::ordered_json report() const;
};

/// Throws InsufficientSamples if fewer than max(m1, 1) samples decode,
/// ParameterBoundViolated if a distributional gate fails and gates are not
/// relaxed, DimensionMismatch on a dense instance that does not match params.
ReductionOutput reduce_instance(const Instance& dense, const ReductionParams& params,
                                const SupportDistribution& values, const Rng& rng,
                                const ReduceOptions& options = {});

// ---------------------------------------------------------------------------
// Search

struct LiftResult {
  ResidueVector secret;
  std::size_t rows_checked = 0;
};

/// s[u] = (s_sparse - z)[identity_row_indices[u]], then checks G s = s_sparse - z
/// on every row when n <= 64, else on 64 random rows. Throws InconsistentSecret.
LiftResult lift_secret(const ResidueVector& s_sparse, const ResidueVector& z,
                       const ReductionParams& params, const Rng& rng);

// ---------------------------------------------------------------------------
// Refutation

enum class Verdict { ApproximatelySatisfiable, Unsatisfiable };

std::string_view to_string(Verdict verdict);

using SparseRefuter = std::function<Verdict(const Instance&)>;

struct RefutationConstants {
  BigRational stated_delta;  // delta (1 - 3/L - 2k^2/n)
  BigRational stated_Delta;  // Delta + 3/L + 2k^2/n
  BigRational forward_delta_factor;  // 1 + 4/L + 2k^2/n
  BigRational forward_Delta;         // Delta + 4/L + 2k^2/n
};

/// Threshold bookkeeping for a sparse refuter with thresholds (delta, Delta).
RefutationConstants refutation_constants(const BigRational& delta, const BigRational& Delta,
                                         const ReductionParams& params);

struct RefutationResult {
  Verdict verdict = Verdict::ApproximatelySatisfiable;
  bool reduction_failed = false;
  std::size_t sparse_samples = 0;
  RefutationConstants constants;
  nlohmann::ordered_json report() const;
};

/// Reduces, forwards the sparse verdict, and answers APPROXIMATELY
/// SATISFIABLE when the reduction cannot produce enough samples.
RefutationResult refute_wrapper(const Instance& dense, const ReductionParams& params,
                                const SupportDistribution& values, const SparseRefuter& refuter,
                                const BigRational& delta, const BigRational& Delta,
                                const Rng& rng, const ReduceOptions& options = {});

}  // namespace sparsenle
