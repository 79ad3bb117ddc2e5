#include "stowardrop/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stowardrop/errors.hpp"
#include "stowardrop/numeric.hpp"

namespace stowardrop {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double at(std::span<const double> theta_bar_m, int j) {
  if (j < 0 || static_cast<std::size_t>(j) >= theta_bar_m.size()) {
    throw MomentUnavailable("theta_bar^(" + std::to_string(j) + ") not supplied");
  }
  return theta_bar_m[static_cast<std::size_t>(j)];
}

BoundParameters parameters_of(int m, const DemandStats& stats, double n) {
  return BoundParameters{m, n, stats.theta_bar, stats.theta_under, stats.theta_bar_m};
}

// 0/0 = 1
double ratio(double num, double den) {
  if (den == 0.0) {
    return num == 0.0 ? 1.0 : kInf;
  }
  return num / den;
}

}  // namespace

double affine_bound(double theta_bar, double theta_under, double n) {
  if (theta_under < 0.0 || theta_bar < theta_under || n < 1.0) {
    throw ValidationError("affine bound needs theta_bar >= theta_under >= 0 and n >= 1");
  }
  const double tb2 = theta_bar * theta_bar;
  const double tu2 = theta_under * theta_under;
  if (std::isinf(n)) {
    return 4.0 * (1.0 + tb2) / 3.0;
  }
  return 4.0 * (1.0 + tb2) * (n + tu2) / (3.0 * n + 4.0 * tu2);
}

BoundReport affine_bound_report(const DemandStats& stats, double n) {
  BoundReport r;
  r.name = "affine";
  r.applicable = true;
  r.value = affine_bound(stats.theta_bar, stats.theta_under, n);
  r.parameters = parameters_of(1, stats, n);
  return r;
}

double ell(int m, double theta_under, double n) {
  if (m < 0 || n < 1.0) {
    throw ValidationError("ell needs m >= 0 and n >= 1");
  }
  const double ratio = std::isinf(n) ? 0.0 : theta_under * theta_under / n;
  return normal_moment_factor(m, ratio);
}

double positive_threshold(int m) {
  if (m <= 0) {
    return kInf;
  }
  const double md = static_cast<double>(m);
  return (md + 1.0) * std::pow(1.0 / md, md / (md + 1.0));
}

double deterministic_anarchy_value(int m) {
  if (m <= 0) {
    return 1.0;
  }
  const double md = static_cast<double>(m);
  return 1.0 / (1.0 - md * std::pow(md + 1.0, -(md + 1.0) / md));
}

double gamma_monomial_positive(int j, std::span<const double> theta_bar_m) {
  if (j < 0) {
    throw ValidationError("monomial degree must be nonnegative");
  }
  const double next = at(theta_bar_m, j + 1);
  if (j == 0) {
    return next;  // theta_bar^(1) = 1
  }
  const double cur = at(theta_bar_m, j);
  const double jd = static_cast<double>(j);
  const double bracket = 1.0 / next - (jd / (jd + 1.0)) * (cur / next) * std::pow(cur / (jd + 1.0), 1.0 / jd);
  if (!(bracket > 0.0)) {
    throw NotApplicable("theta_bar^(" + std::to_string(j) + ") = " + std::to_string(cur) +
                        " reaches the positive-demand threshold " + std::to_string(positive_threshold(j)));
  }
  return 1.0 / bracket;
}

BoundReport gamma_positive(int m, const DemandStats& stats) {
  BoundReport r;
  r.name = "polynomial_positive";
  r.parameters = parameters_of(m, stats, 1.0);
  if (m >= 1 && !(at(stats.theta_bar_m, m) < positive_threshold(m))) {
    r.violated_condition = "theta_bar^(" + std::to_string(m) + ") = " + std::to_string(at(stats.theta_bar_m, m)) +
                           " >= " + std::to_string(positive_threshold(m));
    r.value = kInf;
    return r;
  }
  double best = 1.0;
  for (int j = 0; j <= m; ++j) {
    try {
      best = std::max(best, gamma_monomial_positive(j, stats.theta_bar_m));
    } catch (const NotApplicable& e) {
      r.violated_condition = e.what();
      r.value = kInf;
      return r;
    }
  }
  r.applicable = true;
  r.value = best;
  return r;
}

double normal_condition(int j, std::span<const double> theta_bar_m, double theta_under, double n) {
  if (j < 1) {
    throw ValidationError("the normal applicability condition starts at j = 1");
  }
  const double jd = static_cast<double>(j);
  const double cur = at(theta_bar_m, j);
  return ell(j, theta_under, n) - (cur * jd / (jd + 1.0)) * std::pow(cur / (ell(j + 1, theta_under, n) * (jd + 1.0)), 1.0 / jd);
}

double gamma_monomial_normal(int j, std::span<const double> theta_bar_m, double theta_under, double n) {
  if (j < 0) {
    throw ValidationError("monomial degree must be nonnegative");
  }
  const double next = at(theta_bar_m, j + 1);
  if (j == 0) {
    return next / ell(0, theta_under, n);
  }
  const double condition = normal_condition(j, theta_bar_m, theta_under, n);
  if (!(condition > 0.0)) {
    throw NotApplicable("normal-demand condition fails at j = " + std::to_string(j) + " (value " +
                        std::to_string(condition) + ")");
  }
  return next / condition;
}

BoundReport gamma_normal(int m, const DemandStats& stats, double n) {
  BoundReport r;
  r.name = "polynomial_normal";
  r.parameters = parameters_of(m, stats, n);
  double best = 1.0;
  for (int j = 0; j <= m; ++j) {
    try {
      best = std::max(best, gamma_monomial_normal(j, stats.theta_bar_m, stats.theta_under, n));
    } catch (const NotApplicable& e) {
      r.violated_condition = e.what();
      r.value = kInf;
      return r;
    }
  }
  r.applicable = true;
  r.value = best;
  return r;
}

DemandStats normal_stats(double theta_bar, double theta_under, int max_order) {
  if (theta_under < 0.0 || theta_bar < theta_under) {
    throw ValidationError("normal stats need theta_bar >= theta_under >= 0");
  }
  DemandStats s;
  s.theta = {theta_bar, theta_under};
  s.theta_bar = theta_bar;
  s.theta_under = theta_under;
  for (int j = 0; j <= max_order; ++j) {
    s.theta_bar_m.push_back(normal_moment_factor(j, theta_bar * theta_bar));
  }
  return s;
}

double max_applicable_theta(int m, double n) {
  if (m < 1 || n < 1.0) {
    throw ValidationError("max_applicable_theta needs m >= 1 and n >= 1");
  }
  auto holds = [&](double theta) {
    const DemandStats s = normal_stats(theta, theta, m + 1);
    for (int j = 1; j <= m; ++j) {
      if (!(normal_condition(j, s.theta_bar_m, theta, n) > 0.0)) {
        return false;
      }
    }
    return true;
  };
  // Scan [0, 64] for the first failure, then bisect inside that cell.
  constexpr double kUpper = 64.0;
  constexpr int kCells = 6400;
  double lo = 0.0;
  for (int c = 1; c <= kCells; ++c) {
    const double hi = kUpper * c / kCells;
    if (!holds(hi)) {
      double a = lo;
      double b = hi;
      while (b - a > 1e-12) {
        const double mid = 0.5 * (a + b);
        (holds(mid) ? a : b) = mid;
      }
      return a;
    }
    lo = hi;
  }
  return kInf;
}

double max_uniform_ratio(int m) {
  if (m < 1) {
    throw ValidationError("max_uniform_ratio needs m >= 1");
  }
  const double threshold = positive_threshold(m);
  auto theta_m_of = [m](double b) { return DemandDistribution::uniform(1.0, b).theta_m(m); };
  // theta^(m) of U[1, b] increases to 2^m/(m+1) as b -> inf.
  if (std::pow(2.0, m) / (m + 1.0) < threshold) {
    return kInf;
  }
  double lo = 1.0;
  double hi = 2.0;
  while (theta_m_of(hi) < threshold) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    (theta_m_of(mid) < threshold ? lo : hi) = mid;
  }
  return lo;
}

AuxFunctions::AuxFunctions(PolynomialCost cost, DemandStats stats, bool normal_variant, double n)
    : cost_(std::move(cost)), stats_(std::move(stats)), normal_variant_(normal_variant), n_(n) {
  if (static_cast<int>(stats_.theta_bar_m.size()) < cost_.degree() + 2) {
    throw MomentUnavailable("auxiliary functions need theta_bar^(j) up to degree + 1");
  }
}

double AuxFunctions::lower_weight(int j) const { return normal_variant_ ? ell(j, stats_.theta_under, n_) : 1.0; }

double AuxFunctions::t_upper(double x) const {
  double sum = 0.0;
  for (int j = 0; j <= cost_.degree(); ++j) {
    sum += cost_.coefficient(j) * stats_.theta_bar_m[j] * std::pow(x, j);
  }
  return sum;
}

double AuxFunctions::t_lower(double x) const {
  double sum = 0.0;
  for (int j = 0; j <= cost_.degree(); ++j) {
    sum += cost_.coefficient(j) * lower_weight(j) * std::pow(x, j);
  }
  return sum;
}

double AuxFunctions::s_upper(double x) const {
  double sum = 0.0;
  for (int j = 0; j <= cost_.degree(); ++j) {
    sum += cost_.coefficient(j) * stats_.theta_bar_m[j + 1] * std::pow(x, j + 1);
  }
  return sum;
}

double AuxFunctions::s_lower(double x) const {
  double sum = 0.0;
  for (int j = 0; j <= cost_.degree(); ++j) {
    sum += cost_.coefficient(j) * lower_weight(j + 1) * std::pow(x, j + 1);
  }
  return sum;
}

double AuxFunctions::s_lower_derivative(double x) const {
  double sum = 0.0;
  for (int j = 0; j <= cost_.degree(); ++j) {
    sum += (j + 1.0) * cost_.coefficient(j) * lower_weight(j + 1) * std::pow(x, j);
  }
  return sum;
}

double AuxFunctions::lambda(double x) const {
  if (!(x > 0.0)) {
    throw ValidationError("lambda(x) needs x > 0");
  }
  if (cost_.is_constant()) {
    throw ConstantCost("lambda(x) is undefined for a constant cost");
  }
  const double target = t_upper(x);
  auto f = [&](double y) { return s_lower_derivative(y) - target; };
  double lo = 0.0;
  double hi = x;
  while (f(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  double y = 0.5 * (lo + hi);
  // Newton polish on s_lower'(y) = target.
  for (int it = 0; it < 3; ++it) {
    double slope = 0.0;
    for (int j = 1; j <= cost_.degree(); ++j) {
      slope += (j + 1.0) * j * cost_.coefficient(j) * lower_weight(j + 1) * std::pow(y, j - 1);
    }
    if (slope <= 0.0) {
      break;
    }
    const double next = y - f(y) / slope;
    if (!(next > lo && next < hi)) {
      break;
    }
    y = next;
  }
  return y / x;
}

double AuxFunctions::mu(double x) const { return ratio(s_lower(lambda(x) * x), s_upper(x)); }
double AuxFunctions::phi(double x) const { return ratio(x * t_lower(x), s_upper(x)); }
double AuxFunctions::eta(double x) const { return ratio(x * t_upper(x), s_upper(x)); }

double AuxFunctions::denominator(double x) const { return mu(x) + phi(x) - eta(x) * lambda(x); }

double lambda_of(const PolynomialCost& cost, const DemandStats& stats, double x, bool normal_variant, double n) {
  return AuxFunctions(cost, stats, normal_variant, n).lambda(x);
}

AnarchyEstimate anarchy_value(const PolynomialCost& cost, const DemandStats& stats, bool normal_variant, double n) {
  AnarchyEstimate out;
  if (cost.is_constant()) {
    out.value = 1.0;
    out.applicable = true;
    out.min_denominator = 1.0;
    out.argmin = 1.0;
    return out;
  }
  const AuxFunctions aux(cost, stats, normal_variant, n);
  auto den = [&](double log_x) { return aux.denominator(std::pow(10.0, log_x)); };
  constexpr int kPoints = 601;
  int best = 0;
  double best_value = kInf;
  for (int k = 0; k < kPoints; ++k) {
    const double lx = -3.0 + 6.0 * k / (kPoints - 1);
    const double v = den(lx);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  const double step = 6.0 / (kPoints - 1);
  double a = -3.0 + step * std::max(best - 1, 0);
  double b = -3.0 + step * std::min(best + 1, kPoints - 1);
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - golden * (b - a);
  double d = a + golden * (b - a);
  double fc = den(c);
  double fd = den(d);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - golden * (b - a);
      fc = den(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + golden * (b - a);
      fd = den(d);
    }
  }
  const double refined = std::min(fc, fd);
  if (refined < best_value) {
    best_value = refined;
    out.argmin = std::pow(10.0, fc < fd ? c : d);
  } else {
    out.argmin = std::pow(10.0, -3.0 + step * best);
  }
  out.min_denominator = best_value;
  out.applicable = best_value > 0.0;
  out.value = out.applicable ? 1.0 / best_value : kInf;
  return out;
}

}  // namespace stowardrop
