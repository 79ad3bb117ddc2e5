#pragma once

#include <vector>

#include "stowardrop/moments.hpp"
#include "stowardrop/network.hpp"

namespace stowardrop {

/// Link flows induced by one strategy, with E[V_e^j] for j = 0..deg(c_e)+1.
struct FlowEvaluation {
  std::vector<std::vector<double>> link_prob;  // [e][i]
  std::vector<LinkLoad> loads;                 // [e]
  std::vector<std::vector<double>> moments;    // [e][j]
  std::vector<double> mean;                    // [e], v_e
};

/// Expected-cost layer over a fixed network. Holds its own copy of the network.
class CostModel {
 public:
  explicit CostModel(Network network);

  [[nodiscard]] const Network& network() const { return network_; }
  [[nodiscard]] const Incidence& incidence() const { return incidence_; }
  [[nodiscard]] const MomentEngine& engine() const { return engine_; }

  [[nodiscard]] FlowEvaluation evaluate(const Strategy& strategy) const;

  // E[c_e(V_e)]
  [[nodiscard]] double expected_link_cost(const FlowEvaluation& flows, EdgeIndex e) const;
  // E[c_e(V_e) V_e]
  [[nodiscard]] double expected_link_total(const FlowEvaluation& flows, EdgeIndex e) const;
  // [i][k]
  [[nodiscard]] std::vector<std::vector<double>> expected_path_costs(const FlowEvaluation& flows) const;
  // T(p) = sum_e E[c_e(V_e) V_e]
  [[nodiscard]] double expected_total_cost(const FlowEvaluation& flows) const;
  [[nodiscard]] double expected_total_cost(const Strategy& strategy) const;

  // dT/dp[i][k] via E[V_e^j D_i].
  [[nodiscard]] std::vector<std::vector<double>> total_cost_gradient(const Strategy& strategy) const;

  // sum_e int_0^{v_e} c_e(x) dx on mean flows.
  [[nodiscard]] double beckmann_potential(const FlowEvaluation& flows) const;

 private:
  Network network_;
  Incidence incidence_;
  MomentEngine engine_;
};

[[nodiscard]] double expected_link_cost(EdgeIndex edge, const Strategy& strategy, const Network& network);
[[nodiscard]] double expected_link_total(EdgeIndex edge, const Strategy& strategy, const Network& network);
[[nodiscard]] double expected_path_cost(std::size_t commodity, std::size_t path, const Strategy& strategy,
                                        const Network& network);
[[nodiscard]] double expected_total_cost(const Strategy& strategy, const Network& network);

}  // namespace stowardrop
