#include "stowardrop/polynomial.hpp"

#include <cmath>
#include <string>

#include "stowardrop/errors.hpp"

namespace stowardrop {

PolynomialCost::PolynomialCost(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
  if (coefficients_.empty()) {
    throw ValidationError("cost polynomial needs at least one coefficient");
  }
  for (std::size_t j = 0; j < coefficients_.size(); ++j) {
    if (!std::isfinite(coefficients_[j]) || coefficients_[j] < 0.0) {
      throw ValidationError("cost coefficient b_" + std::to_string(j) + " must be finite and nonnegative");
    }
  }
}

PolynomialCost PolynomialCost::monomial(int power, double coefficient) {
  if (power < 0) {
    throw ValidationError("monomial power must be nonnegative");
  }
  std::vector<double> b(static_cast<std::size_t>(power) + 1, 0.0);
  b.back() = coefficient;
  return PolynomialCost(std::move(b));
}

double PolynomialCost::coefficient(int j) const {
  if (j < 0 || j > degree()) {
    return 0.0;
  }
  return coefficients_[static_cast<std::size_t>(j)];
}

bool PolynomialCost::is_constant() const {
  for (std::size_t j = 1; j < coefficients_.size(); ++j) {
    if (coefficients_[j] > 0.0) {
      return false;
    }
  }
  return true;
}

bool PolynomialCost::is_affine() const {
  for (std::size_t j = 2; j < coefficients_.size(); ++j) {
    if (coefficients_[j] > 0.0) {
      return false;
    }
  }
  return true;
}

double PolynomialCost::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

double PolynomialCost::derivative(double x) const {
  double acc = 0.0;
  for (std::size_t j = coefficients_.size(); j-- > 1;) {
    acc = acc * x + static_cast<double>(j) * coefficients_[j];
  }
  return acc;
}

PolynomialCost PolynomialCost::scaled(double factor) const {
  std::vector<double> b = coefficients_;
  for (double& c : b) {
    c *= factor;
  }
  return PolynomialCost(std::move(b));
}

}  // namespace stowardrop
