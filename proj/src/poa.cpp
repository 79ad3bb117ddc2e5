#include "stowardrop/poa.hpp"

#include <algorithm>
#include <cmath>

#include "stowardrop/costs.hpp"
#include "stowardrop/errors.hpp"

namespace stowardrop {
namespace {

struct BoundContext {
  int m = 0;
  double n = 1.0;
  DemandStats stats;
};

BoundContext context_of(const Network& network) {
  BoundContext ctx;
  ctx.m = network.max_degree();
  ctx.n = std::max(1, build_incidence(network).max_commodities_per_edge);
  const auto demands = network.demands();
  ctx.stats = demand_stats(demands, ctx.m + 1);
  return ctx;
}

std::vector<BoundReport> bounds_for(const Network& network, const BoundContext& ctx) {
  const auto demands = network.demands();
  std::vector<BoundReport> out;
  if (ctx.m <= 1) {
    out.push_back(affine_bound_report(ctx.stats, ctx.n));
  }
  if (std::all_of(demands.begin(), demands.end(), [](const auto& d) { return d.positive_valued(); })) {
    out.push_back(gamma_positive(ctx.m, ctx.stats));
  }
  if (std::all_of(demands.begin(), demands.end(), [](const auto& d) { return d.normal_family(); })) {
    out.push_back(gamma_normal(ctx.m, ctx.stats, ctx.n));
  }
  return out;
}

}  // namespace

const BoundCheck* PoAReport::find_bound(const std::string& name) const {
  for (const auto& b : bounds) {
    if (b.report.name == name) {
      return &b;
    }
  }
  return nullptr;
}

std::vector<BoundReport> applicable_bounds(const Network& network) { return bounds_for(network, context_of(network)); }

PoAReport compute_poa(const Network& network, const SolverConfig& config) {
  PoAReport report;
  report.ue = solve_ue(network, config);

  const CostModel model(network);
  const Strategy& worst = report.ue.diagnostics.worst_strategy.p.empty() ? report.ue.strategy
                                                                         : report.ue.diagnostics.worst_strategy;
  report.ue_total_cost = std::max(report.ue.total_cost, model.expected_total_cost(worst));

  report.so = solve_so(network, config, {report.ue.strategy, worst});
  report.so_total_cost = report.so.total_cost;
  if (!(report.so_total_cost > 0.0)) {
    throw DegenerateCost("optimal expected total cost is zero; the ratio is undefined");
  }
  report.poa = report.ue_total_cost / report.so_total_cost;

  const BoundContext ctx = context_of(network);
  report.m = ctx.m;
  report.n = ctx.n;
  report.stats = ctx.stats;
  for (auto& bound : bounds_for(network, ctx)) {
    BoundCheck check;
    check.report = std::move(bound);
    if (check.report.applicable) {
      check.margin = check.report.value - report.poa;
      check.holds = report.poa <= check.report.value + kDominanceSlack;
      check.tight = std::abs(check.margin) <= kTightness * check.report.value;
    }
    report.bounds.push_back(std::move(check));
  }
  return report;
}

}  // namespace stowardrop
