#include "stowardrop/numeric.hpp"

#include <cmath>

namespace stowardrop {

double binomial(int n, int k) {
  if (k < 0 || k > n) {
    return 0.0;
  }
  k = k < n - k ? k : n - k;
  double result = 1.0;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(result);
}

double double_factorial(int k) {
  double result = 1.0;
  for (int i = k; i > 1; i -= 2) {
    result *= static_cast<double>(i);
  }
  return result;
}

double normal_moment_factor(int m, double ratio) {
  double sum = 0.0;
  double power = 1.0;  // ratio^{r/2}
  for (int r = 0; r <= m; r += 2) {
    sum += binomial(m, r) * power * double_factorial(r - 1);
    power *= ratio;
  }
  return sum;
}

double normal_raw_moment(double mean, double stddev, int m) {
  double sum = 0.0;
  for (int r = 0; r <= m; r += 2) {
    sum += binomial(m, r) * std::pow(stddev, r) * std::pow(mean, m - r) * double_factorial(r - 1);
  }
  return sum;
}

}  // namespace stowardrop
