#pragma once

namespace stowardrop {

// C(n, k) as a double; exact for the small arguments used here.
[[nodiscard]] double binomial(int n, int k);

// k!! with the convention (-1)!! = 0!! = 1.
[[nodiscard]] double double_factorial(int k);

// sum_{r even <= m} C(m, r) ratio^{r/2} (r-1)!!
//
// With ratio = theta^2 this is E[X^m] / mean^m for a normal X with coefficient
// of variation theta; with ratio = theta_under^2 / n it is the normal-demand
// lower-bound coefficient ell_m.
[[nodiscard]] double normal_moment_factor(int m, double ratio);

// E[X^m] for X ~ N(mean, stddev^2).
[[nodiscard]] double normal_raw_moment(double mean, double stddev, int m);

}  // namespace stowardrop
