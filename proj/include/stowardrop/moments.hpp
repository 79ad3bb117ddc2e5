#pragma once

#include <cstddef>
#include <vector>

#include "stowardrop/network.hpp"

namespace stowardrop {

/// Route-choice probabilities p[i][k]; one simplex per O-D pair.
struct Strategy {
  std::vector<std::vector<double>> p;

  [[nodiscard]] static Strategy uniform(const Network& network);
  // All mass on path `k` of every commodity that has one.
  [[nodiscard]] static Strategy pure(const Network& network, const std::vector<std::size_t>& choice);

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

// Throws ValidationError unless the strategy is in the feasible set (within tol).
void validate_strategy(const Network& network, const Strategy& strategy, double tol = 1e-9);

inline constexpr int kDefaultMaxMomentOrder = 8;

// [e][i] = sum over paths k of commodity i through e of p[i][k]
[[nodiscard]] std::vector<std::vector<double>> link_choice_probs(const Strategy& strategy, const Incidence& incidence);

struct LinkFlowStats {
  std::vector<double> mean;                    // v_e
  std::vector<double> variance;                // sigma_e^2
  std::vector<std::vector<double>> link_prob;  // p_e^i, [e][i]
};

[[nodiscard]] LinkFlowStats link_flow_stats(const Strategy& strategy, const Network& network);

/// Link flow written as V_e = sum_t share_t * D_{commodity_t}; only commodities
/// with a positive share appear.
struct LinkLoad {
  std::vector<std::size_t> commodities;
  std::vector<double> shares;
};

[[nodiscard]] LinkLoad link_load(const std::vector<double>& link_prob_row);

/// Exact moments of link flows for one network's demands.
///
/// Raw demand moments are cached up to `max_order`; moment-table demands stop
/// at their own length and raise MomentUnavailable beyond it.
class MomentEngine {
 public:
  MomentEngine(const Network& network, int max_order);

  [[nodiscard]] int max_order() const { return max_order_; }
  [[nodiscard]] double demand_moment(std::size_t commodity, int m) const;

  // E[V^m] by the multinomial expansion over compositions of m.
  [[nodiscard]] double raw_moment(const LinkLoad& load, int m) const;
  // E[V^m D_i]; commodities absent from the load contribute E[V^m] d_i.
  [[nodiscard]] double cross_moment(const LinkLoad& load, int m, std::size_t commodity) const;

 private:
  std::vector<std::vector<double>> demand_moments_;  // [i][m], m = 0..available
  std::vector<double> demand_means_;
  int max_order_;
};

[[nodiscard]] double link_raw_moment(EdgeIndex edge, int m, const Strategy& strategy, const Network& network);
[[nodiscard]] double link_cross_moment(EdgeIndex edge, int m, std::size_t commodity, const Strategy& strategy,
                                       const Network& network);

/// Closed form sum_{r even} C(m,r) sigma_e^r v_e^{m-r} (r-1)!!; requires every
/// commodity on the edge to be normal or deterministic.
[[nodiscard]] double normal_link_raw_moment(EdgeIndex edge, int m, const Strategy& strategy, const Network& network);

}  // namespace stowardrop
