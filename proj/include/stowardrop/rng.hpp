#pragma once

#include <cstdint>
#include <limits>

namespace stowardrop {

/// SplitMix64 stream keyed by (seed, stream index).
///
/// Each Monte Carlo sample draws from its own stream, so results do not
/// depend on how samples are distributed over worker threads.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform01();

 private:
  std::uint64_t state_;
};

}  // namespace stowardrop
