#include "stowardrop/moments.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "stowardrop/errors.hpp"
#include "stowardrop/numeric.hpp"

namespace stowardrop {

Strategy Strategy::uniform(const Network& network) {
  Strategy s;
  for (std::size_t i = 0; i < network.commodity_count(); ++i) {
    const std::size_t count = network.paths(i).size();
    s.p.emplace_back(count, 1.0 / static_cast<double>(count));
  }
  return s;
}

Strategy Strategy::pure(const Network& network, const std::vector<std::size_t>& choice) {
  if (choice.size() != network.commodity_count()) {
    throw ValidationError("pure strategy needs one path choice per O-D pair");
  }
  Strategy s;
  for (std::size_t i = 0; i < network.commodity_count(); ++i) {
    std::vector<double> row(network.paths(i).size(), 0.0);
    row.at(choice[i]) = 1.0;
    s.p.push_back(std::move(row));
  }
  return s;
}

void validate_strategy(const Network& network, const Strategy& strategy, double tol) {
  if (strategy.p.size() != network.commodity_count()) {
    throw ValidationError("strategy has " + std::to_string(strategy.p.size()) + " rows, network has " +
                          std::to_string(network.commodity_count()) + " O-D pairs");
  }
  for (std::size_t i = 0; i < strategy.p.size(); ++i) {
    const auto& row = strategy.p[i];
    if (row.size() != network.paths(i).size()) {
      throw ValidationError("strategy row " + std::to_string(i) + " does not match the path count");
    }
    double sum = 0.0;
    for (double x : row) {
      if (!std::isfinite(x) || x < -tol) {
        throw ValidationError("strategy row " + std::to_string(i) + " has a negative or non-finite entry");
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw ValidationError("strategy row " + std::to_string(i) + " does not sum to one");
    }
  }
}

std::vector<std::vector<double>> link_choice_probs(const Strategy& strategy, const Incidence& incidence) {
  const std::size_t commodities = incidence.path_edge.size();
  const std::size_t edges = incidence.commodities_on_edge.size();
  std::vector<std::vector<double>> out(edges, std::vector<double>(commodities, 0.0));
  for (std::size_t i = 0; i < commodities; ++i) {
    for (std::size_t k = 0; k < incidence.path_edge[i].size(); ++k) {
      const double pk = strategy.p[i][k];
      for (EdgeIndex e = 0; e < edges; ++e) {
        if (incidence.path_edge[i][k][e]) {
          out[e][i] += pk;
        }
      }
    }
  }
  for (auto& row : out) {
    for (double& x : row) {
      x = std::min(1.0, std::max(0.0, x));
    }
  }
  return out;
}

LinkFlowStats link_flow_stats(const Strategy& strategy, const Network& network) {
  validate_strategy(network, strategy);
  LinkFlowStats stats;
  stats.link_prob = link_choice_probs(strategy, build_incidence(network));
  stats.mean.assign(network.edge_count(), 0.0);
  stats.variance.assign(network.edge_count(), 0.0);
  for (EdgeIndex e = 0; e < network.edge_count(); ++e) {
    for (std::size_t i = 0; i < network.commodity_count(); ++i) {
      const double share = stats.link_prob[e][i];
      const auto& demand = network.od_pairs()[i].demand;
      stats.mean[e] += share * demand.mean();
      stats.variance[e] += share * share * demand.variance();
    }
  }
  return stats;
}

LinkLoad link_load(const std::vector<double>& link_prob_row) {
  LinkLoad load;
  for (std::size_t i = 0; i < link_prob_row.size(); ++i) {
    if (link_prob_row[i] > 0.0) {
      load.commodities.push_back(i);
      load.shares.push_back(link_prob_row[i]);
    }
  }
  return load;
}

MomentEngine::MomentEngine(const Network& network, int max_order) : max_order_(max_order) {
  if (max_order < 0) {
    throw ValidationError("moment order must be nonnegative");
  }
  for (const auto& od : network.od_pairs()) {
    int available = max_order;
    if (auto cap = od.demand.max_moment_order()) {
      available = std::min(available, *cap);
    }
    std::vector<double> row;
    for (int m = 0; m <= available; ++m) {
      row.push_back(od.demand.raw_moment(m));
    }
    demand_moments_.push_back(std::move(row));
    demand_means_.push_back(od.demand.mean());
  }
}

double MomentEngine::demand_moment(std::size_t commodity, int m) const {
  const auto& row = demand_moments_.at(commodity);
  if (m < 0 || static_cast<std::size_t>(m) >= row.size()) {
    throw MomentUnavailable("E[D^" + std::to_string(m) + "] unavailable for O-D pair " + std::to_string(commodity));
  }
  return row[static_cast<std::size_t>(m)];
}

namespace {

// sum over s with sum_t s_t = m of m!/prod s_t! prod_t share_t^{s_t} E[D_t^{s_t + bump_t}]
double expand(const MomentEngine& engine, const LinkLoad& load, int m, std::ptrdiff_t bumped) {
  const std::size_t terms = load.commodities.size();
  if (terms == 0) {
    return m == 0 ? 1.0 : 0.0;
  }
  std::vector<double> factorial(static_cast<std::size_t>(m) + 1, 1.0);
  for (int k = 1; k <= m; ++k) {
    factorial[k] = factorial[k - 1] * k;
  }
  double total = 0.0;
  std::function<void(std::size_t, int, double)> walk = [&](std::size_t t, int remaining, double acc) {
    const std::size_t commodity = load.commodities[t];
    const int bump = static_cast<std::ptrdiff_t>(t) == bumped ? 1 : 0;
    if (t + 1 == terms) {
      const int s = remaining;
      total += acc / factorial[s] * std::pow(load.shares[t], s) * engine.demand_moment(commodity, s + bump);
      return;
    }
    for (int s = 0; s <= remaining; ++s) {
      walk(t + 1, remaining - s,
           acc / factorial[s] * std::pow(load.shares[t], s) * engine.demand_moment(commodity, s + bump));
    }
  };
  walk(0, m, factorial[m]);
  return total;
}

}  // namespace

double MomentEngine::raw_moment(const LinkLoad& load, int m) const {
  if (m < 0) {
    throw MomentUnavailable("negative moment order");
  }
  return expand(*this, load, m, -1);
}

double MomentEngine::cross_moment(const LinkLoad& load, int m, std::size_t commodity) const {
  if (m < 0) {
    throw MomentUnavailable("negative moment order");
  }
  for (std::size_t t = 0; t < load.commodities.size(); ++t) {
    if (load.commodities[t] == commodity) {
      return expand(*this, load, m, static_cast<std::ptrdiff_t>(t));
    }
  }
  return expand(*this, load, m, -1) * demand_means_.at(commodity);
}

double link_raw_moment(EdgeIndex edge, int m, const Strategy& strategy, const Network& network) {
  validate_strategy(network, strategy);
  const auto probs = link_choice_probs(strategy, build_incidence(network));
  MomentEngine engine(network, m);
  return engine.raw_moment(link_load(probs.at(edge)), m);
}

double link_cross_moment(EdgeIndex edge, int m, std::size_t commodity, const Strategy& strategy,
                         const Network& network) {
  validate_strategy(network, strategy);
  const auto probs = link_choice_probs(strategy, build_incidence(network));
  MomentEngine engine(network, m + 1);
  return engine.cross_moment(link_load(probs.at(edge)), m, commodity);
}

double normal_link_raw_moment(EdgeIndex edge, int m, const Strategy& strategy, const Network& network) {
  const LinkFlowStats stats = link_flow_stats(strategy, network);
  for (std::size_t i = 0; i < network.commodity_count(); ++i) {
    if (stats.link_prob.at(edge)[i] > 0.0 && !network.od_pairs()[i].demand.normal_family()) {
      throw ValidationError("normal closed form needs normal demands on the edge");
    }
  }
  return normal_raw_moment(stats.mean[edge], std::sqrt(stats.variance[edge]), m);
}

}  // namespace stowardrop
