#include "stowardrop/demand.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "stowardrop/errors.hpp"
#include "stowardrop/numeric.hpp"

namespace stowardrop {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw ValidationError(std::string(what) + " must be finite");
  }
}

// Gauss quadrature for the moment sequence mu_0 = 1, mu_k = table[k-1]
// (Golub-Welsch). Uses moments up to 2K-1 and drops nodes once the Hankel
// matrix stops being positive definite.
std::vector<std::pair<double, double>> quadrature_from_moments(const std::vector<double>& table) {
  const int available = static_cast<int>(table.size());
  auto mu = [&](int k) { return k == 0 ? 1.0 : table[static_cast<std::size_t>(k - 1)]; };

  int nodes = (available + 1) / 2;
  // Partial Cholesky of the (K+1)x(K+1) Hankel matrix; R[K][K] is never needed.
  std::vector<std::vector<double>> r(static_cast<std::size_t>(nodes) + 1,
                                     std::vector<double>(static_cast<std::size_t>(nodes) + 1, 0.0));
  for (int i = 0; i < nodes; ++i) {
    double diag = mu(2 * i);
    for (int k = 0; k < i; ++k) {
      diag -= r[k][i] * r[k][i];
    }
    if (diag <= 1e-12 * mu(2 * i)) {
      nodes = i;
      break;
    }
    r[i][i] = std::sqrt(diag);
    for (int j = i + 1; j <= nodes; ++j) {
      double off = mu(i + j);
      for (int k = 0; k < i; ++k) {
        off -= r[k][i] * r[k][j];
      }
      r[i][j] = off / r[i][i];
    }
  }

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int j = 0; j < nodes; ++j) {
    double alpha = r[j][j + 1] / r[j][j];
    if (j > 0) {
      alpha -= r[j - 1][j] / r[j - 1][j - 1];
    }
    jacobi(j, j) = alpha;
    if (j + 1 < nodes) {
      const double beta = r[j + 1][j + 1] / r[j][j];
      jacobi(j, j + 1) = beta;
      jacobi(j + 1, j) = beta;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  std::vector<std::pair<double, double>> out;
  for (int j = 0; j < nodes; ++j) {
    const double lead = solver.eigenvectors()(0, j);
    out.emplace_back(solver.eigenvalues()(j), lead * lead);
  }
  return out;
}

}  // namespace

DemandDistribution::DemandDistribution(Variant v) : variant_(std::move(v)) {}

DemandDistribution DemandDistribution::deterministic(double value) {
  require_finite(value, "deterministic demand");
  if (value <= 0.0) {
    throw ValidationError("deterministic demand must be positive");
  }
  return DemandDistribution(DeterministicDemand{value});
}

DemandDistribution DemandDistribution::normal(double mean, double stddev) {
  require_finite(mean, "normal mean");
  require_finite(stddev, "normal stddev");
  if (mean <= 0.0) {
    throw ValidationError("normal demand mean must be positive");
  }
  if (stddev < 0.0) {
    throw ValidationError("normal demand stddev must be nonnegative");
  }
  return DemandDistribution(NormalDemand{mean, stddev});
}

DemandDistribution DemandDistribution::uniform(double lower, double upper) {
  require_finite(lower, "uniform lower bound");
  require_finite(upper, "uniform upper bound");
  if (!(lower > 0.0) || upper < lower) {
    throw ValidationError("uniform demand needs 0 < lower <= upper");
  }
  return DemandDistribution(UniformDemand{lower, upper});
}

DemandDistribution DemandDistribution::moment_table(std::vector<double> raw_moments) {
  if (raw_moments.empty()) {
    throw ValidationError("moment table needs at least the mean");
  }
  for (double x : raw_moments) {
    require_finite(x, "tabulated moment");
  }
  const double d = raw_moments.front();
  if (d <= 0.0) {
    throw ValidationError("moment table mean must be positive");
  }
  for (std::size_t k = 1; k < raw_moments.size(); ++k) {
    const double floor = std::pow(d, static_cast<double>(k + 1));
    if (raw_moments[k] < floor * (1.0 - 1e-12)) {
      throw ValidationError("moment table violates Jensen: E[D^" + std::to_string(k + 1) + "] < mean^" +
                            std::to_string(k + 1));
    }
  }
  DemandDistribution dist(MomentTableDemand{raw_moments});
  dist.nodes_ = quadrature_from_moments(raw_moments);
  return dist;
}

DemandKind DemandDistribution::kind() const {
  return std::visit(Overloaded{
                        [](const DeterministicDemand&) { return DemandKind::deterministic; },
                        [](const NormalDemand&) { return DemandKind::normal; },
                        [](const UniformDemand&) { return DemandKind::uniform; },
                        [](const MomentTableDemand&) { return DemandKind::moment_table; },
                    },
                    variant_);
}

double DemandDistribution::mean() const {
  return std::visit(Overloaded{
                        [](const DeterministicDemand& d) { return d.value; },
                        [](const NormalDemand& d) { return d.mean; },
                        [](const UniformDemand& d) { return 0.5 * (d.lower + d.upper); },
                        [](const MomentTableDemand& d) { return d.raw_moments.front(); },
                    },
                    variant_);
}

double DemandDistribution::variance() const {
  return std::visit(Overloaded{
                        [](const DeterministicDemand&) { return 0.0; },
                        [](const NormalDemand& d) { return d.stddev * d.stddev; },
                        [](const UniformDemand& d) {
                          const double w = d.upper - d.lower;
                          return w * w / 12.0;
                        },
                        [](const MomentTableDemand& d) {
                          if (d.raw_moments.size() < 2) {
                            throw MomentUnavailable("moment table has no second moment; variance unavailable");
                          }
                          return std::max(0.0, d.raw_moments[1] - d.raw_moments[0] * d.raw_moments[0]);
                        },
                    },
                    variant_);
}

double DemandDistribution::stddev() const { return std::sqrt(variance()); }

double DemandDistribution::coefficient_of_variation() const { return stddev() / mean(); }

std::optional<int> DemandDistribution::max_moment_order() const {
  if (const auto* table = std::get_if<MomentTableDemand>(&variant_)) {
    return static_cast<int>(table->raw_moments.size());
  }
  return std::nullopt;
}

bool DemandDistribution::positive_valued() const { return kind() != DemandKind::normal; }

bool DemandDistribution::normal_family() const {
  const DemandKind k = kind();
  return k == DemandKind::normal || k == DemandKind::deterministic;
}

double DemandDistribution::raw_moment(int m) const {
  if (m < 0) {
    throw MomentUnavailable("negative moment order");
  }
  if (m == 0) {
    return 1.0;
  }
  return std::visit(Overloaded{
                        [m](const DeterministicDemand& d) { return std::pow(d.value, m); },
                        [m](const NormalDemand& d) { return normal_raw_moment(d.mean, d.stddev, m); },
                        [m](const UniformDemand& d) {
                          if (d.upper == d.lower) {
                            return std::pow(d.lower, m);
                          }
                          // (b^{m+1} - a^{m+1}) / ((m+1)(b-a)) without the cancellation.
                          double sum = 0.0;
                          for (int k = 0; k <= m; ++k) {
                            sum += std::pow(d.upper, k) * std::pow(d.lower, m - k);
                          }
                          return sum / static_cast<double>(m + 1);
                        },
                        [m](const MomentTableDemand& d) {
                          if (static_cast<std::size_t>(m) > d.raw_moments.size()) {
                            throw MomentUnavailable("moment table stops at order " +
                                                    std::to_string(d.raw_moments.size()) + ", requested " +
                                                    std::to_string(m));
                          }
                          return d.raw_moments[static_cast<std::size_t>(m - 1)];
                        },
                    },
                    variant_);
}

double DemandDistribution::theta_m(int m) const { return raw_moment(m) / std::pow(mean(), m); }

double DemandDistribution::sample(CounterRng& rng) const {
  return std::visit(Overloaded{
                        [](const DeterministicDemand& d) { return d.value; },
                        [&rng](const NormalDemand& d) {
                          if (d.stddev == 0.0) {
                            return d.mean;
                          }
                          std::normal_distribution<double> draw(d.mean, d.stddev);
                          return draw(rng);
                        },
                        [&rng](const UniformDemand& d) { return d.lower + (d.upper - d.lower) * rng.uniform01(); },
                        [&rng, this](const MomentTableDemand&) {
                          double u = rng.uniform01();
                          for (const auto& [node, weight] : nodes_) {
                            if (u < weight) {
                              return node;
                            }
                            u -= weight;
                          }
                          return nodes_.back().first;
                        },
                    },
                    variant_);
}

double raw_moment(const DemandDistribution& dist, int m) { return dist.raw_moment(m); }
double theta_m(const DemandDistribution& dist, int m) { return dist.theta_m(m); }
double sample(const DemandDistribution& dist, CounterRng& rng) { return dist.sample(rng); }

DemandStats demand_stats(std::span<const DemandDistribution> demands, int max_order) {
  if (demands.empty()) {
    throw ValidationError("demand statistics need at least one O-D pair");
  }
  DemandStats stats;
  stats.theta.reserve(demands.size());
  stats.theta_bar_m.assign(static_cast<std::size_t>(std::max(max_order, 1)) + 1, 0.0);
  for (const auto& dist : demands) {
    stats.theta.push_back(dist.coefficient_of_variation());
    for (int j = 0; j < static_cast<int>(stats.theta_bar_m.size()); ++j) {
      stats.theta_bar_m[j] = std::max(stats.theta_bar_m[j], dist.theta_m(j));
    }
  }
  stats.theta_bar = *std::max_element(stats.theta.begin(), stats.theta.end());
  stats.theta_under = *std::min_element(stats.theta.begin(), stats.theta.end());
  return stats;
}

}  // namespace stowardrop
