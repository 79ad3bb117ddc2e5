#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stowardrop/costs.hpp"
#include "stowardrop/moments.hpp"
#include "stowardrop/network.hpp"

namespace stowardrop {

enum class StepRule {
  // exact_line_search_affine when every cost is affine, armijo otherwise
  automatic,
  // p <- p + (q - p)/(t+1) towards the all-or-nothing assignment q
  msa,
  // projected gradient on the Beckmann potential with exact line search
  exact_line_search_affine,
  // extragradient projection with Armijo-type step backtracking
  armijo,
};

[[nodiscard]] std::string to_string(StepRule rule);
[[nodiscard]] StepRule parse_step_rule(const std::string& name);

struct SolverConfig {
  int max_iterations = 10000;
  double relative_gap_tolerance = 1e-6;
  double so_gradient_tolerance = 1e-8;
  int restarts = 8;
  StepRule step_rule = StepRule::automatic;
  std::uint64_t seed = 0;

  void validate() const;
};

/// VI gap sum_i d_i (sum_k p_k E[c_k] - pi_i), relative to sum_i d_i pi_i.
/// Falls back to the absolute gap when that denominator is below 1e-12.
struct GapMeasure {
  double value = 0.0;
  bool absolute = false;
};

[[nodiscard]] GapMeasure ue_gap(const CostModel& model, const Strategy& strategy);
// Throws DegenerateCost when every expected path cost is zero.
[[nodiscard]] double ue_gap(const Strategy& strategy, const Network& network);

struct EquilibriumDiagnostics {
  int starts = 0;
  int converged_starts = 0;
  double min_total_cost = 0.0;
  double max_total_cost = 0.0;
  // (max - min) / max over converged starts
  double dispersion = 0.0;
  // converged equilibrium with the largest expected total cost
  Strategy worst_strategy;
};

struct EquilibriumResult {
  Strategy strategy;
  GapMeasure gap;
  int iterations = 0;
  bool converged = false;
  StepRule step_rule = StepRule::automatic;
  std::vector<double> min_path_cost;  // pi_i
  double total_cost = 0.0;
  EquilibriumDiagnostics diagnostics;
};

struct OptimumResult {
  Strategy strategy;
  double total_cost = 0.0;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  int restarts_used = 0;
  // Index of the winning start: 0 is the uniform strategy, then random starts,
  // then caller-supplied starts.
  int best_start = 0;
  bool best_of_restarts = false;
  // Local optima from different starts disagree by more than 1e-6 relative.
  bool local_optimum_risk = false;
};

/// Single UE run from a given start; no restarts.
[[nodiscard]] EquilibriumResult solve_ue_from(const CostModel& model, const SolverConfig& config, Strategy start);

/// UE from the uniform (or warm) start plus `restarts` random simplex starts.
[[nodiscard]] EquilibriumResult solve_ue(const Network& network, const SolverConfig& config,
                                         const std::optional<Strategy>& warm_start = std::nullopt);

/// SO by spectral projected gradient from the uniform strategy, random
/// restarts, and any extra starts.
[[nodiscard]] OptimumResult solve_so(const Network& network, const SolverConfig& config,
                                     const std::vector<Strategy>& extra_starts = {});

// ||P(p - grad T) - p||_2 summed over commodities.
[[nodiscard]] double projected_gradient_norm(const Strategy& strategy, const std::vector<std::vector<double>>& grad);

// Dirichlet(1,...,1) point per commodity.
[[nodiscard]] Strategy random_strategy(const Network& network, std::uint64_t seed, std::uint64_t stream);

}  // namespace stowardrop
