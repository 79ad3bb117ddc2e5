#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stowardrop/moments.hpp"
#include "stowardrop/network.hpp"

namespace stowardrop {

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;  // sample stdev / sqrt(N)
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

// Maps one realization of the link flows to k outputs.
using FlowFunctional = std::function<void(std::span<const double> link_flows, std::span<double> out)>;

/// Samples are processed in fixed blocks, each keyed by (seed, sample index),
/// so the result does not depend on the worker count.
/// workers = 0 reads STO_WARDROP_THREADS, falling back to the hardware count.
[[nodiscard]] std::vector<McEstimate> simulate(const Network& network, const Strategy& strategy, std::uint64_t samples,
                                               std::uint64_t seed, std::size_t outputs, const FlowFunctional& f,
                                               unsigned workers = 0);

[[nodiscard]] McEstimate simulate_total_cost(const Strategy& strategy, const Network& network, std::uint64_t samples,
                                             std::uint64_t seed, unsigned workers = 0);

[[nodiscard]] McEstimate simulate_link_moment(EdgeIndex edge, int m, const Strategy& strategy, const Network& network,
                                              std::uint64_t samples, std::uint64_t seed, unsigned workers = 0);

// E[c_e(V_e)]
[[nodiscard]] McEstimate simulate_link_cost(EdgeIndex edge, const Strategy& strategy, const Network& network,
                                            std::uint64_t samples, std::uint64_t seed, unsigned workers = 0);

// Worker count from STO_WARDROP_THREADS, else hardware concurrency (at least 1).
[[nodiscard]] unsigned default_worker_count();

}  // namespace stowardrop
