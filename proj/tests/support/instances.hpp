#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stowardrop/network.hpp"
#include "stowardrop/numeric.hpp"
#include "stowardrop/solvers.hpp"

namespace testsupport {

using namespace stowardrop;

// Two parallel links: upper c = d (constant), lower c = x; normal demand N(d, (theta d)^2).
inline Network example1(double theta, double d = 1.0) {
  NetworkBuilder b;
  b.add_node("o");
  b.add_node("t");
  b.add_edge("upper", "o", "t", PolynomialCost({d}));
  b.add_edge("lower", "o", "t", PolynomialCost::affine(1.0, 0.0));
  b.add_od_pair("od", "o", "t", DemandDistribution::normal(d, theta * d));
  return b.build();
}

// Upper c = g_j d^j (constant), lower c = x^j; normal demand N(d, (theta d)^2).
inline Network example2(int j, double theta, double d = 1.0) {
  const double g = normal_moment_factor(j, theta * theta);
  NetworkBuilder b;
  b.add_node("o");
  b.add_node("t");
  b.add_edge("upper", "o", "t", PolynomialCost({g * std::pow(d, j)}));
  b.add_edge("lower", "o", "t", PolynomialCost::monomial(j, 1.0));
  b.add_od_pair("od", "o", "t", DemandDistribution::normal(d, theta * d));
  return b.build();
}

inline double example1_poa(double theta) {
  const double t2 = theta * theta;
  return 4.0 * (1.0 + t2) * (1.0 + t2) / (3.0 + 4.0 * t2);
}

inline double example2_so_share(int j, double theta) {
  const double gj = normal_moment_factor(j, theta * theta);
  const double gj1 = normal_moment_factor(j + 1, theta * theta);
  return std::pow(gj / (gj1 * (j + 1.0)), 1.0 / j);
}

inline double example2_poa(int j, double theta) {
  const double gj = normal_moment_factor(j, theta * theta);
  const double gj1 = normal_moment_factor(j + 1, theta * theta);
  const double jd = j;
  return 1.0 / (gj / gj1 - (gj * jd / (gj1 * (jd + 1.0))) * std::pow(gj / (gj1 * (jd + 1.0)), 1.0 / jd));
}

inline Network parallel_links(int links, const PolynomialCost& cost, DemandDistribution demand) {
  NetworkBuilder b;
  b.add_node("o");
  b.add_node("t");
  for (int k = 0; k < links; ++k) {
    b.add_edge("e" + std::to_string(k), "o", "t", cost);
  }
  b.add_od_pair("od", "o", "t", std::move(demand));
  return b.build();
}

enum class Family { normal, uniform, deterministic, moments, mixed_positive };

struct InstanceOptions {
  int max_nodes = 6;
  int max_edges = 10;
  int max_commodities = 3;
  int max_degree = 3;
  double max_theta = 0.5;
  Family family = Family::normal;
  bool affine_only = false;
};

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int int_in(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Uniform law with mean `mean` and coefficient of variation `theta` (needs theta < 1/sqrt(3)).
inline DemandDistribution uniform_with(double mean, double theta) {
  const double half = std::sqrt(3.0) * theta * mean;
  return DemandDistribution::uniform(mean - half, mean + half);
}

inline DemandDistribution random_demand(std::mt19937_64& rng, Family family, double max_theta) {
  const double mean = uniform_in(rng, 0.5, 2.0);
  const double theta = uniform_in(rng, 0.0, max_theta);
  if (family == Family::mixed_positive) {
    family = static_cast<Family>(int_in(rng, 1, 3));
  }
  switch (family) {
    case Family::normal:
      return DemandDistribution::normal(mean, theta * mean);
    case Family::uniform:
      return uniform_with(mean, std::min(theta, 0.55));
    case Family::deterministic:
      return DemandDistribution::deterministic(mean);
    case Family::moments: {
      const auto u = uniform_with(mean, std::min(theta, 0.55));
      std::vector<double> table;
      for (int m = 1; m <= 8; ++m) {
        table.push_back(u.raw_moment(m));
      }
      return DemandDistribution::moment_table(table);
    }
    default:
      return DemandDistribution::deterministic(mean);
  }
}

inline PolynomialCost random_cost(std::mt19937_64& rng, int degree) {
  std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
  for (auto& v : c) {
    if (uniform_in(rng, 0.0, 1.0) < 0.7) {
      v = uniform_in(rng, 0.0, 2.0);
    }
  }
  c.back() = uniform_in(rng, 0.1, 2.0);
  return PolynomialCost(c);
}

// Random acyclic multigraph with a backbone 0 -> 1 -> ... so every ordered pair is connected.
inline Network random_instance(std::mt19937_64& rng, const InstanceOptions& opt = {}) {
  const int nodes = int_in(rng, 2, opt.max_nodes);
  const int degree = opt.affine_only ? 1 : int_in(rng, 1, opt.max_degree);
  const int edges = int_in(rng, nodes - 1 + 1, std::max(nodes, opt.max_edges));
  NetworkBuilder b;
  for (int v = 0; v < nodes; ++v) {
    b.add_node("n" + std::to_string(v));
  }
  int e = 0;
  for (int v = 0; v + 1 < nodes; ++v, ++e) {
    b.add_edge("e" + std::to_string(e), v, v + 1, random_cost(rng, int_in(rng, 0, degree)));
  }
  for (; e < edges; ++e) {
    const int u = int_in(rng, 0, nodes - 2);
    const int v = int_in(rng, u + 1, nodes - 1);
    b.add_edge("e" + std::to_string(e), u, v, random_cost(rng, int_in(rng, 0, degree)));
  }
  const int commodities = int_in(rng, 1, opt.max_commodities);
  for (int i = 0; i < commodities; ++i) {
    const int o = int_in(rng, 0, nodes - 2);
    const int d = int_in(rng, o + 1, nodes - 1);
    b.add_od_pair("od" + std::to_string(i), o, d, random_demand(rng, opt.family, opt.max_theta));
  }
  return b.build();
}

inline Strategy random_point(const Network& net, std::mt19937_64& rng) {
  return random_strategy(net, rng(), rng());
}

}  // namespace testsupport
