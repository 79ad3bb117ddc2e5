#include "stowardrop/simplex.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace stowardrop {

void project_to_simplex(std::span<double> values) {
  if (values.empty()) {
    return;
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) {
      shift = candidate;
    }
  }
  for (double& x : values) {
    x = std::max(0.0, x - shift);
  }
}

}  // namespace stowardrop
