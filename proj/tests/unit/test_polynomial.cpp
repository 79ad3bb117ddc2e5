#include <cmath>
#include <random>

#include "doctest.h"
#include "stowardrop/errors.hpp"
#include "stowardrop/numeric.hpp"
#include "stowardrop/polynomial.hpp"
#include "stowardrop/simplex.hpp"

using namespace stowardrop;

TEST_CASE("polynomial evaluation and shape") {
  const PolynomialCost c({1.0, 1.0, 1.0});
  CHECK(c.degree() == 2);
  CHECK(c(2.0) == doctest::Approx(7.0));
  CHECK(c.derivative(2.0) == doctest::Approx(5.0));
  CHECK(c(-1.0) == doctest::Approx(1.0));
  CHECK_FALSE(c.is_affine());
  CHECK(PolynomialCost::affine(2.0, 3.0).is_affine());
  CHECK(PolynomialCost({4.0}).is_constant());
  CHECK(PolynomialCost({4.0, 0.0, 0.0}).is_constant());
  CHECK(PolynomialCost::monomial(3, 2.0)(2.0) == doctest::Approx(16.0));
  CHECK(PolynomialCost::monomial(3, 2.0).coefficient(1) == 0.0);
  CHECK(c.coefficient(7) == 0.0);
  CHECK(c.scaled(3.0)(2.0) == doctest::Approx(21.0));
}

TEST_CASE("polynomial rejects bad coefficients") {
  CHECK_THROWS_AS(PolynomialCost({1.0, -0.5}), ValidationError);
  CHECK_THROWS_AS(PolynomialCost({NAN}), ValidationError);
  CHECK_THROWS_AS(PolynomialCost(std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(PolynomialCost::monomial(-1, 1.0), ValidationError);
}

TEST_CASE("nondecreasing on the positive axis") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int t = 0; t < 100; ++t) {
    const PolynomialCost c({u(rng), u(rng), u(rng), u(rng)});
    const double x = u(rng);
    CHECK(c(x + 0.1) >= c(x));
  }
}

TEST_CASE("combinatorial helpers") {
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(8, 0) == 1.0);
  CHECK(binomial(3, 4) == 0.0);
  CHECK(double_factorial(-1) == 1.0);
  CHECK(double_factorial(0) == 1.0);
  CHECK(double_factorial(5) == 15.0);
  CHECK(double_factorial(6) == 48.0);
}

TEST_CASE("normal moment factor") {
  CHECK(normal_moment_factor(0, 0.3) == 1.0);
  CHECK(normal_moment_factor(1, 0.3) == 1.0);
  CHECK(normal_moment_factor(2, 0.25) == doctest::Approx(1.25));
  CHECK(normal_moment_factor(3, 0.25) == doctest::Approx(1.75));
  // 1 + 6 theta^2 + 3 theta^4
  CHECK(normal_moment_factor(4, 0.25) == doctest::Approx(1.0 + 1.5 + 3.0 / 16.0));
  CHECK(normal_raw_moment(1.0, 1.0, 3) == doctest::Approx(4.0));
  CHECK(normal_raw_moment(0.0, 2.0, 4) == doctest::Approx(48.0));
}

TEST_CASE("simplex projection") {
  std::vector<double> a{0.2, 0.3, 0.5};
  project_to_simplex(a);
  CHECK(a[2] == doctest::Approx(0.5));
  std::vector<double> b{2.0, 0.0};
  project_to_simplex(b);
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[1] == doctest::Approx(0.0));
  std::vector<double> c{1.0, 1.0};
  project_to_simplex(c);
  CHECK(c[0] == doctest::Approx(0.5));

  // Projection is the closest simplex point: no random simplex point is closer.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  std::exponential_distribution<double> ex(1.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(4), y;
    for (auto& v : x) v = n(rng);
    y = x;
    project_to_simplex(y);
    double s = 0.0, dy = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(y[k] >= 0.0);
      s += y[k];
      dy += (x[k] - y[k]) * (x[k] - y[k]);
    }
    CHECK(s == doctest::Approx(1.0));
    for (int r = 0; r < 20; ++r) {
      std::vector<double> z(4);
      double zs = 0.0;
      for (auto& v : z) zs += (v = ex(rng));
      double dz = 0.0;
      for (std::size_t k = 0; k < 4; ++k) dz += (x[k] - z[k] / zs) * (x[k] - z[k] / zs);
      CHECK(dy <= dz + 1e-12);
    }
  }
}
