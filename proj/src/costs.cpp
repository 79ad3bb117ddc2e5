#include "stowardrop/costs.hpp"

#include <string>

#include "stowardrop/errors.hpp"

namespace stowardrop {
namespace {

void check_degree_cap(const Network& network) {
  if (network.max_degree() > kDefaultMaxMomentOrder) {
    throw ValidationError("cost degree " + std::to_string(network.max_degree()) + " exceeds the cap of " +
                          std::to_string(kDefaultMaxMomentOrder));
  }
}

}  // namespace

CostModel::CostModel(Network network)
    : network_((check_degree_cap(network), std::move(network))),
      incidence_(build_incidence(network_)),
      engine_(network_, network_.max_degree() + 1) {}

FlowEvaluation CostModel::evaluate(const Strategy& strategy) const {
  validate_strategy(network_, strategy);
  FlowEvaluation flows;
  flows.link_prob = link_choice_probs(strategy, incidence_);
  const std::size_t edges = network_.edge_count();
  flows.loads.reserve(edges);
  flows.moments.resize(edges);
  flows.mean.assign(edges, 0.0);
  for (EdgeIndex e = 0; e < edges; ++e) {
    flows.loads.push_back(link_load(flows.link_prob[e]));
    const LinkLoad& load = flows.loads.back();
    for (std::size_t t = 0; t < load.commodities.size(); ++t) {
      flows.mean[e] += load.shares[t] * engine_.demand_moment(load.commodities[t], 1);
    }
    const int top = network_.edges()[e].cost.degree() + 1;
    for (int j = 0; j <= top; ++j) {
      flows.moments[e].push_back(engine_.raw_moment(load, j));
    }
  }
  return flows;
}

double CostModel::expected_link_cost(const FlowEvaluation& flows, EdgeIndex e) const {
  const auto b = network_.edges()[e].cost.coefficients();
  double sum = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    sum += b[j] * flows.moments[e][j];
  }
  return sum;
}

double CostModel::expected_link_total(const FlowEvaluation& flows, EdgeIndex e) const {
  const auto b = network_.edges()[e].cost.coefficients();
  double sum = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    sum += b[j] * flows.moments[e][j + 1];
  }
  return sum;
}

std::vector<std::vector<double>> CostModel::expected_path_costs(const FlowEvaluation& flows) const {
  std::vector<double> link(network_.edge_count());
  for (EdgeIndex e = 0; e < link.size(); ++e) {
    link[e] = expected_link_cost(flows, e);
  }
  std::vector<std::vector<double>> out(network_.commodity_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const Path& path : network_.paths(i)) {
      double c = 0.0;
      for (EdgeIndex e : path) {
        c += link[e];
      }
      out[i].push_back(c);
    }
  }
  return out;
}

double CostModel::expected_total_cost(const FlowEvaluation& flows) const {
  double total = 0.0;
  for (EdgeIndex e = 0; e < network_.edge_count(); ++e) {
    total += expected_link_total(flows, e);
  }
  return total;
}

double CostModel::expected_total_cost(const Strategy& strategy) const { return expected_total_cost(evaluate(strategy)); }

std::vector<std::vector<double>> CostModel::total_cost_gradient(const Strategy& strategy) const {
  const FlowEvaluation flows = evaluate(strategy);
  const std::size_t commodities = network_.commodity_count();
  // dlink[e][i] = d E[c_e(V_e) V_e] / d p_e^i = sum_j b_j (j+1) E[V_e^j D_i]
  std::vector<std::vector<double>> dlink(network_.edge_count(), std::vector<double>(commodities, 0.0));
  for (EdgeIndex e = 0; e < network_.edge_count(); ++e) {
    const auto b = network_.edges()[e].cost.coefficients();
    for (std::size_t i = 0; i < commodities; ++i) {
      if (!incidence_.commodity_edge[i][e]) {
        continue;
      }
      double g = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (b[j] != 0.0) {
          g += b[j] * static_cast<double>(j + 1) * engine_.cross_moment(flows.loads[e], static_cast<int>(j), i);
        }
      }
      dlink[e][i] = g;
    }
  }
  std::vector<std::vector<double>> grad(commodities);
  for (std::size_t i = 0; i < commodities; ++i) {
    for (const Path& path : network_.paths(i)) {
      double g = 0.0;
      for (EdgeIndex e : path) {
        g += dlink[e][i];
      }
      grad[i].push_back(g);
    }
  }
  return grad;
}

double CostModel::beckmann_potential(const FlowEvaluation& flows) const {
  double z = 0.0;
  for (EdgeIndex e = 0; e < network_.edge_count(); ++e) {
    const auto b = network_.edges()[e].cost.coefficients();
    const double v = flows.mean[e];
    double power = v;
    for (std::size_t j = 0; j < b.size(); ++j) {
      z += b[j] * power / static_cast<double>(j + 1);
      power *= v;
    }
  }
  return z;
}

double expected_link_cost(EdgeIndex edge, const Strategy& strategy, const Network& network) {
  const CostModel model(network);
  return model.expected_link_cost(model.evaluate(strategy), edge);
}

double expected_link_total(EdgeIndex edge, const Strategy& strategy, const Network& network) {
  const CostModel model(network);
  return model.expected_link_total(model.evaluate(strategy), edge);
}

double expected_path_cost(std::size_t commodity, std::size_t path, const Strategy& strategy, const Network& network) {
  const CostModel model(network);
  return model.expected_path_costs(model.evaluate(strategy)).at(commodity).at(path);
}

double expected_total_cost(const Strategy& strategy, const Network& network) {
  return CostModel(network).expected_total_cost(strategy);
}

}  // namespace stowardrop
