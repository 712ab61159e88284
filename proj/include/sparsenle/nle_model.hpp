#pragma once

// Noisy linear equation instances: samples (a_i, y_i = <a_i, s> + e_i) over
// Z/qZ with dense or k-sparse coefficient vectors, the noise families, the
// refutation weight functions, and the line-oriented instance file format.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sparsenle/core.hpp"
#include "sparsenle/sentence_codec.hpp"

namespace sparsenle {

inline constexpr std::string_view kGeneratorVersion = "sparsenle 1.0.0";

enum class InstanceKind { Dense, Sparse };

std::string_view to_string(InstanceKind kind);

struct DenseSample {
  ResidueVector b;
  std::uint64_t y = 0;

  friend bool operator==(const DenseSample&, const DenseSample&) = default;
};

struct SparseSample {
  SparseVector a;
  std::uint64_t y = 0;

  friend bool operator==(const SparseSample&, const SparseSample&) = default;
};

struct InstanceMetadata {
  std::uint64_t seed = 0;
  std::string prg{Rng::kIdentifier};
  std::string error_model = "zero";
  std::string generator{kGeneratorVersion};

  friend bool operator==(const InstanceMetadata&, const InstanceMetadata&) = default;
};

/// Exactly one of `dense` / `sparse` is populated, according to kind.
struct Instance {
  InstanceKind kind = InstanceKind::Dense;
  std::uint64_t q = 2;
  std::uint64_t dim = 0;  // L (dense) or n (sparse)
  unsigned k = 0;         // sparse only
  std::vector<DenseSample> dense;
  std::vector<SparseSample> sparse;
  InstanceMetadata meta;

  std::size_t size() const noexcept {
    return kind == InstanceKind::Dense ? dense.size() : sparse.size();
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Throws DimensionMismatch / InvalidRange / NotAUnit on a malformed instance.
void validate_instance(const Instance& inst);

/// The noise law D^error(x), allowed to depend on the clean label x.
class ErrorModel {
 public:
  enum class Kind { Zero, Bernoulli, Gauss, Uniform, Round };

  static ErrorModel zero();
  static ErrorModel bernoulli(double delta);  // q = 2 only
  static ErrorModel gauss(double sigma);      // round(sigma * N(0,1)) mod q
  static ErrorModel uniform(std::uint64_t bound);  // uniform on [-B, B] mod q
  static ErrorModel rounding(std::uint64_t p);     // nearest multiple of q/p minus x

  /// "zero" | "bernoulli:d" | "gauss:s" | "uniform:B" | "round:p".
  static ErrorModel parse(std::string_view spec);

  std::uint64_t sample(std::uint64_t clean, std::uint64_t q, Rng& rng) const;

  Kind kind() const noexcept { return kind_; }
  const std::string& describe() const noexcept { return description_; }

 private:
  Kind kind_ = Kind::Zero;
  double real_ = 0.0;
  std::uint64_t integer_ = 0;
  std::string description_ = "zero";
};

/// mu: Z/qZ -> [0, 1] with mu(0) = 0 and mu(x) = mu(q - x).
class WeightFn {
 public:
  enum class Kind { Indicator, CircularLp };

  static WeightFn indicator();
  /// (min(x, q - x) / q)^p for a positive integer p.
  static WeightFn circular_lp(unsigned p);
  /// "indicator" | "lp:p".
  static WeightFn parse(std::string_view spec);

  BigRational operator()(std::uint64_t x, std::uint64_t q) const;

  Kind kind() const noexcept { return kind_; }
  unsigned exponent() const noexcept { return p_; }
  std::string describe() const;

 private:
  Kind kind_ = Kind::Indicator;
  unsigned p_ = 0;
};

struct PlantedInstance {
  Instance instance;
  ResidueVector secret;
  ResidueVector errors;  // e_i per sample
};

/// b_i uniform on (Z/qZ)^L, s uniform, y_i = <b_i, s> + e_i.
PlantedInstance sample_dense_instance(unsigned L, std::uint64_t q, std::size_t m,
                                      const ErrorModel& error, const Rng& rng);

/// Supports uniform k-subsets of [n], values from D on the ascending support.
PlantedInstance sample_sparse_instance(std::uint64_t n, unsigned k, std::uint64_t q,
                                       std::size_t m, const SupportDistribution& values,
                                       const ErrorModel& error, const Rng& rng);

/// Same coefficient samplers as the planted case, labels iid uniform.
Instance sample_null_dense(unsigned L, std::uint64_t q, std::size_t m, const Rng& rng);
Instance sample_null_sparse(std::uint64_t n, unsigned k, std::uint64_t q, std::size_t m,
                            const SupportDistribution& values, const Rng& rng);

/// y_i - <a_i, s> per sample.
ResidueVector residuals(const Instance& inst, const ResidueVector& s);

/// (1/m) sum_i mu(y_i - <a_i, s>); 0 for an empty instance.
BigRational objective(const Instance& inst, const ResidueVector& s, const WeightFn& mu);

void write_instance(const Instance& inst, std::ostream& out);
Instance read_instance(std::istream& in);
void write_instance_file(const Instance& inst, const std::string& path);
Instance read_instance_file(const std::string& path);

/// Sidecar vector file {"name", "q", "dim", "values"} for secrets and masks.
void write_vector_file(const std::string& path, std::string_view name, std::uint64_t q,
                       const ResidueVector& values);
ResidueVector read_vector_file(const std::string& path, std::uint64_t* q = nullptr);

}  // namespace sparsenle
