#pragma once

#include <span>
#include <vector>

namespace stowardrop {

/// Link cost c(x) = sum_j b_j x^j with every b_j >= 0.
///
/// Trailing zero coefficients are kept, so `degree()` reports the length the
/// caller supplied minus one. Evaluation is defined on all of R; negative
/// arguments arise from untruncated normal flows.
class PolynomialCost {
 public:
  PolynomialCost() : coefficients_{0.0} {}
  explicit PolynomialCost(std::vector<double> coefficients);

  static PolynomialCost affine(double slope, double intercept) { return PolynomialCost({intercept, slope}); }
  static PolynomialCost monomial(int power, double coefficient);

  [[nodiscard]] int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  [[nodiscard]] std::span<const double> coefficients() const { return coefficients_; }
  [[nodiscard]] double coefficient(int j) const;

  // True when every coefficient of degree >= 1 is zero.
  [[nodiscard]] bool is_constant() const;
  [[nodiscard]] bool is_affine() const;

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double derivative(double x) const;

  [[nodiscard]] PolynomialCost scaled(double factor) const;

  friend bool operator==(const PolynomialCost&, const PolynomialCost&) = default;

 private:
  std::vector<double> coefficients_;
};

}  // namespace stowardrop
