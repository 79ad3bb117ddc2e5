#pragma once

#include <vector>

#include "stowardrop/bounds.hpp"
#include "stowardrop/network.hpp"
#include "stowardrop/solvers.hpp"

namespace stowardrop {

/// A theoretical bound checked against the empirical ratio.
struct BoundCheck {
  BoundReport report;
  bool holds = false;   // poa <= bound + 1e-6
  double margin = 0.0;  // bound - poa
  bool tight = false;   // |poa - bound| <= 1e-4 * bound
};

struct PoAReport {
  EquilibriumResult ue;
  OptimumResult so;
  // Expected total cost of the worst converged equilibrium found.
  double ue_total_cost = 0.0;
  double so_total_cost = 0.0;
  double poa = 0.0;
  int m = 0;
  double n = 1.0;
  DemandStats stats;
  std::vector<BoundCheck> bounds;

  [[nodiscard]] bool converged() const { return ue.converged && so.converged; }
  // nullptr if no bound of that name was reported
  [[nodiscard]] const BoundCheck* find_bound(const std::string& name) const;
};

inline constexpr double kDominanceSlack = 1e-6;
inline constexpr double kTightness = 1e-4;

/// Bounds that apply to the network's cost degree and demand family.
[[nodiscard]] std::vector<BoundReport> applicable_bounds(const Network& network);

/// Throws DegenerateCost when the optimal expected total cost is zero.
[[nodiscard]] PoAReport compute_poa(const Network& network, const SolverConfig& config = {});

}  // namespace stowardrop
