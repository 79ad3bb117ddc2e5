#include "stowardrop/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "stowardrop/errors.hpp"
#include "stowardrop/rng.hpp"

namespace stowardrop {
namespace {

constexpr std::uint64_t kBlock = 4096;

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  // Chan et al. pairwise combination
  void merge(const Moments& o) {
    if (o.count == 0.0) {
      return;
    }
    const double total = count + o.count;
    const double delta = o.mean - mean;
    mean += delta * o.count / total;
    m2 += o.m2 + delta * delta * count * o.count / total;
    count = total;
  }
};

}  // namespace

unsigned default_worker_count() {
  if (const char* env = std::getenv("STO_WARDROP_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) {
        return static_cast<unsigned>(v);
      }
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<McEstimate> simulate(const Network& network, const Strategy& strategy, std::uint64_t samples,
                                 std::uint64_t seed, std::size_t outputs, const FlowFunctional& f, unsigned workers) {
  if (samples < 2) {
    throw ValidationError("Monte Carlo needs at least 2 samples");
  }
  validate_strategy(network, strategy);
  const Incidence inc = build_incidence(network);
  const auto probs = link_choice_probs(strategy, inc);  // [e][i]
  const auto demands = network.demands();
  const std::size_t edges = network.edge_count();
  const std::size_t commodities = demands.size();

  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::vector<Moments>> per_block(blocks, std::vector<Moments>(outputs));

  auto run_block = [&](std::uint64_t b) {
    std::vector<double> draw(commodities);
    std::vector<double> flows(edges);
    std::vector<double> out(outputs);
    auto& acc = per_block[b];
    const std::uint64_t end = std::min(samples, (b + 1) * kBlock);
    for (std::uint64_t s = b * kBlock; s < end; ++s) {
      CounterRng rng(seed, s);
      for (std::size_t i = 0; i < commodities; ++i) {
        draw[i] = demands[i].sample(rng);
      }
      for (std::size_t e = 0; e < edges; ++e) {
        double v = 0.0;
        for (std::size_t i = 0; i < commodities; ++i) {
          v += probs[e][i] * draw[i];
        }
        flows[e] = v;
      }
      std::fill(out.begin(), out.end(), 0.0);
      f(flows, out);
      for (std::size_t k = 0; k < outputs; ++k) {
        acc[k].push(out[k]);
      }
    }
  };

  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::uint64_t>(workers == 0 ? default_worker_count() : workers, blocks));
  if (n_workers <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) {
      run_block(b);
    }
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t b = next++; b < blocks; b = next++) {
          run_block(b);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  std::vector<McEstimate> result(outputs);
  for (std::size_t k = 0; k < outputs; ++k) {
    Moments total;
    for (std::uint64_t b = 0; b < blocks; ++b) {
      total.merge(per_block[b][k]);
    }
    const double n = static_cast<double>(samples);
    const double var = std::max(0.0, total.m2 / (n - 1.0));
    result[k] = McEstimate{total.mean, std::sqrt(var / n), samples, seed};
  }
  return result;
}

McEstimate simulate_total_cost(const Strategy& strategy, const Network& network, std::uint64_t samples,
                               std::uint64_t seed, unsigned workers) {
  const auto& edges = network.edges();
  return simulate(
      network, strategy, samples, seed, 1,
      [&edges](std::span<const double> v, std::span<double> out) {
        double total = 0.0;
        for (std::size_t e = 0; e < edges.size(); ++e) {
          total += edges[e].cost(v[e]) * v[e];
        }
        out[0] = total;
      },
      workers)[0];
}

McEstimate simulate_link_moment(EdgeIndex edge, int m, const Strategy& strategy, const Network& network,
                                std::uint64_t samples, std::uint64_t seed, unsigned workers) {
  if (edge >= network.edge_count()) {
    throw ValidationError("edge index out of range");
  }
  if (m < 0) {
    throw ValidationError("moment order must be nonnegative");
  }
  return simulate(
      network, strategy, samples, seed, 1,
      [edge, m](std::span<const double> v, std::span<double> out) { out[0] = std::pow(v[edge], m); }, workers)[0];
}

McEstimate simulate_link_cost(EdgeIndex edge, const Strategy& strategy, const Network& network, std::uint64_t samples,
                              std::uint64_t seed, unsigned workers) {
  if (edge >= network.edge_count()) {
    throw ValidationError("edge index out of range");
  }
  const PolynomialCost cost = network.edges()[edge].cost;
  return simulate(
      network, strategy, samples, seed, 1,
      [edge, &cost](std::span<const double> v, std::span<double> out) { out[0] = cost(v[edge]); }, workers)[0];
}

}  // namespace stowardrop
