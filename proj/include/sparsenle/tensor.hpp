#pragma once

// Sparse binary NLE samples as noisy entries of an order-k tensor: entry at
// the support (t^1, ..., t^k) with value exp(2 pi i y / q), its real part, or
// its real part after multiplying in Gaussian components prod (g_t + i h_t).

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sparsenle/core.hpp"
#include "sparsenle/nle_model.hpp"

namespace sparsenle {

enum class TensorVariant { Real, Complex, Gaussian };

std::string_view to_string(TensorVariant variant);
TensorVariant parse_tensor_variant(std::string_view name);

struct TensorSample {
  std::vector<SentenceIndex> idx;
  double re = 0.0;
  double im = 0.0;  // zero for the real variant

  friend bool operator==(const TensorSample&, const TensorSample&) = default;
};

/// exp(2 pi i y / q).
std::complex<double> unit_phase(std::uint64_t y, std::uint64_t q);

/// Each throws WrongSupportDistribution unless every support value is 1.
std::vector<TensorSample> tensorize_real(const Instance& sparse);
std::vector<TensorSample> tensorize_complex(const Instance& sparse);

/// (g_t, h_t) for support index t.
using GaussianComponents = std::function<std::pair<double, double>(SentenceIndex)>;

/// Re(exp(2 pi i y / q) prod_l (g_{t_l} + i h_{t_l})) with caller-supplied components.
std::vector<TensorSample> gaussianize_with(const Instance& sparse, const GaussianComponents& gh);
std::vector<TensorSample> gaussianize_with(const Instance& sparse, const std::vector<double>& g,
                                           const std::vector<double>& h);

/// g_t and h_t iid standard normal, drawn once per run from streams keyed by t.
std::vector<TensorSample> gaussianize(const Instance& sparse, const Rng& rng);
GaussianComponents gaussian_components(const Rng& rng);

/// Planted-side information for the noise check.
struct TensorSecretInfo {
  ResidueVector secret;  // length n
  ResidueVector errors;  // e_j per sample
};

struct TensorDiagnostics {
  std::size_t m = 0;
  double mean = 0.0;      // of the real parts
  double variance = 0.0;  // of the real parts
  double max_modulus_error = 0.0;  // max ||value| - 1| (complex variant)
  bool noise_checked = false;
  std::size_t bound_violations = 0;
  double max_bound_ratio = 0.0;    // max |Delta_j| / (4 pi min(e, q-e) / q), 0/0 counted as 0
  double noise_ratio = 0.0;        // ||Delta||_1 / ||T||_1
  double alpha_min = 0.0;          // mean of min(e, q-e) / q
  double alpha_max = 0.0;          // mean of max(e, q-e) / q
  double incoherence = 0.0;        // ||u||_inf sqrt(n) / ||u||_2

  nlohmann::ordered_json to_json() const;
};

/// Statistics of the values; with `info`, also the per-entry check
/// |value - clean| <= 4 pi min(e, q - e) / q (real and complex variants).
TensorDiagnostics diagnostics(const std::vector<TensorSample>& samples, TensorVariant variant,
                              std::uint64_t q, const TensorSecretInfo* info = nullptr);

struct TensorFile {
  std::uint64_t n = 0;
  unsigned k = 0;
  std::uint64_t q = 2;
  TensorVariant variant = TensorVariant::Real;
  std::uint64_t seed = 0;
  std::vector<TensorSample> samples;

  friend bool operator==(const TensorFile&, const TensorFile&) = default;
};

void write_tensor_file(const TensorFile& file, const std::string& path);
TensorFile read_tensor_file(const std::string& path);

}  // namespace sparsenle
