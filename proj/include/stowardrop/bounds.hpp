#pragma once

#include <span>
#include <string>
#include <vector>

#include "stowardrop/demand.hpp"
#include "stowardrop/polynomial.hpp"

namespace stowardrop {

/// Parameters a bound was evaluated with.
struct BoundParameters {
  int m = 0;
  double n = 1.0;
  double theta_bar = 0.0;
  double theta_under = 0.0;
  std::vector<double> theta_bar_m;
};

/// A closed-form PoA upper bound. `value` is +inf whenever `applicable` is
/// false, and `violated_condition` then says which condition failed.
struct BoundReport {
  std::string name;
  bool applicable = false;
  double value = 0.0;
  std::string violated_condition;
  BoundParameters parameters;
};

/// 4(1+theta_bar^2)(n+theta_under^2)/(3n+4 theta_under^2)
[[nodiscard]] double affine_bound(double theta_bar, double theta_under, double n);
[[nodiscard]] BoundReport affine_bound_report(const DemandStats& stats, double n);

/// sum_{r even <= m} C(m,r) (theta_under^2/n)^{r/2} (r-1)!!; n may be +inf.
[[nodiscard]] double ell(int m, double theta_under, double n);

/// (m+1)(1/m)^{m/(m+1)}; +inf for m = 0.
[[nodiscard]] double positive_threshold(int m);

/// (1 - m(m+1)^{-(m+1)/m})^{-1}, the deterministic-demand anarchy value.
[[nodiscard]] double deterministic_anarchy_value(int m);

// Anarchy value of b x^j for positive-valued demand; NotApplicable when the
// bracket is not positive.
[[nodiscard]] double gamma_monomial_positive(int j, std::span<const double> theta_bar_m);
[[nodiscard]] BoundReport gamma_positive(int m, const DemandStats& stats);

// ell_j - (theta_bar^(j) j/(j+1)) (theta_bar^(j)/(ell_{j+1}(j+1)))^{1/j}; must be > 0.
[[nodiscard]] double normal_condition(int j, std::span<const double> theta_bar_m, double theta_under, double n);
[[nodiscard]] double gamma_monomial_normal(int j, std::span<const double> theta_bar_m, double theta_under, double n);
[[nodiscard]] BoundReport gamma_normal(int m, const DemandStats& stats, double n);

/// Stats of normal demands sharing coefficients of variation theta_bar (max)
/// and theta_under (min), with theta_bar_m up to order `max_order`.
[[nodiscard]] DemandStats normal_stats(double theta_bar, double theta_under, int max_order);

/// Largest common theta for which the normal-demand bound applies at (m, n);
/// +inf when the condition holds on all of [0, 64].
[[nodiscard]] double max_applicable_theta(int m, double n);

/// Largest b/a for U[a, b] demand satisfying the positive-demand threshold.
[[nodiscard]] double max_uniform_ratio(int m);

/// The auxiliary functions of one cost polynomial under given demand stats.
///
/// The normal variant lifts the lower envelopes with ell_j(theta_under, n).
class AuxFunctions {
 public:
  AuxFunctions(PolynomialCost cost, DemandStats stats, bool normal_variant = false, double n = 1.0);

  [[nodiscard]] double t_upper(double x) const;
  [[nodiscard]] double t_lower(double x) const;
  [[nodiscard]] double s_upper(double x) const;
  [[nodiscard]] double s_lower(double x) const;
  [[nodiscard]] double s_lower_derivative(double x) const;

  // lambda(x) > 0 with s_lower'(lambda x) = t_upper(x); throws ConstantCost.
  [[nodiscard]] double lambda(double x) const;
  [[nodiscard]] double mu(double x) const;
  [[nodiscard]] double phi(double x) const;
  [[nodiscard]] double eta(double x) const;
  // mu + phi - eta * lambda
  [[nodiscard]] double denominator(double x) const;

 private:
  [[nodiscard]] double lower_weight(int j) const;

  PolynomialCost cost_;
  DemandStats stats_;
  bool normal_variant_;
  double n_;
};

[[nodiscard]] double lambda_of(const PolynomialCost& cost, const DemandStats& stats, double x,
                               bool normal_variant = false, double n = 1.0);

/// sup_x [mu + phi - eta lambda]^{-1} by a log grid on [1e-3, 1e3] refined with
/// golden section. Heuristic for general polynomials; exact for monomials,
/// where the expression is constant in x.
struct AnarchyEstimate {
  double value = 0.0;
  bool applicable = false;
  double min_denominator = 0.0;
  double argmin = 0.0;
};

[[nodiscard]] AnarchyEstimate anarchy_value(const PolynomialCost& cost, const DemandStats& stats,
                                            bool normal_variant = false, double n = 1.0);

}  // namespace stowardrop
