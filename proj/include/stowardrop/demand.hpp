#pragma once

#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "stowardrop/rng.hpp"

namespace stowardrop {

struct DeterministicDemand {
  double value;
};

// Untruncated: draws and analytic moments both range over all of R.
struct NormalDemand {
  double mean;
  double stddev;
};

struct UniformDemand {
  double lower;
  double upper;
};

// User-supplied raw moments; raw_moments[k] = E[D^{k+1}].
struct MomentTableDemand {
  std::vector<double> raw_moments;
};

enum class DemandKind { deterministic, normal, uniform, moment_table };

/// Demand of one O-D pair. Immutable once constructed; factories validate.
class DemandDistribution {
 public:
  using Variant = std::variant<DeterministicDemand, NormalDemand, UniformDemand, MomentTableDemand>;

  static DemandDistribution deterministic(double value);
  static DemandDistribution normal(double mean, double stddev);
  static DemandDistribution uniform(double lower, double upper);
  static DemandDistribution moment_table(std::vector<double> raw_moments);

  [[nodiscard]] const Variant& variant() const { return variant_; }
  [[nodiscard]] DemandKind kind() const;

  [[nodiscard]] double mean() const;
  [[nodiscard]] double variance() const;
  [[nodiscard]] double stddev() const;
  // sigma / mean
  [[nodiscard]] double coefficient_of_variation() const;

  // Highest available raw moment; nullopt when every order is available.
  [[nodiscard]] std::optional<int> max_moment_order() const;

  // Support in (0, inf). Moment tables are taken to describe positive demand.
  [[nodiscard]] bool positive_valued() const;
  // Deterministic counts as a normal with zero variance.
  [[nodiscard]] bool normal_family() const;

  [[nodiscard]] double raw_moment(int m) const;
  [[nodiscard]] double theta_m(int m) const;

  [[nodiscard]] double sample(CounterRng& rng) const;

  // Discrete law used to sample a moment table: (node, weight) pairs whose
  // moments match the table up to order 2K-1 for K nodes.
  [[nodiscard]] std::span<const std::pair<double, double>> sampling_nodes() const { return nodes_; }

 private:
  explicit DemandDistribution(Variant v);

  Variant variant_;
  std::vector<std::pair<double, double>> nodes_;
};

[[nodiscard]] double raw_moment(const DemandDistribution& dist, int m);
[[nodiscard]] double theta_m(const DemandDistribution& dist, int m);
[[nodiscard]] double sample(const DemandDistribution& dist, CounterRng& rng);

/// Coefficient-of-variation statistics across all O-D pairs.
struct DemandStats {
  std::vector<double> theta;        // per commodity, sigma_i / d_i
  double theta_bar = 0.0;           // max_i theta_i
  double theta_under = 0.0;         // min_i theta_i
  std::vector<double> theta_bar_m;  // [j] = max_i E[D_i^j] / d_i^j, j = 0..M
};

[[nodiscard]] DemandStats demand_stats(std::span<const DemandDistribution> demands, int max_order);

}  // namespace stowardrop
