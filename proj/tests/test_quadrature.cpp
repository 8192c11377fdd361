#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rmtlab/quadrature.hpp"

using namespace rmtlab;
using std::numbers::pi;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 16, 40}) {
    const auto rule = gauss_legendre(n, -1.0, 3.0);
    for (int k = 0; k < 2 * n; k += 3) {
      const double exact = (std::pow(3.0, k + 1) - std::pow(-1.0, k + 1)) / (k + 1);
      CHECK(rule.integrate([&](double x) { return std::pow(x, k); }) == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("composite rule on a smooth integrand") {
  const auto rule = composite_gauss_legendre(8, 10, 0.0, pi);
  CHECK(rule.integrate([](double x) { return std::sin(x); }) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(rule.size() == 80);
}

TEST_CASE("arcsine rule has unit mass and the arcsine moments") {
  const auto rule = arcsine_rule(12, -2.0, 2.0);
  CHECK(rule.integrate([](double) { return 1.0; }) == doctest::Approx(1.0));
  CHECK(rule.integrate([](double x) { return x * x; }) == doctest::Approx(2.0));
  CHECK(rule.integrate([](double x) { return x * x * x * x; }) == doctest::Approx(6.0));
}

TEST_CASE("Chebyshev-U rule integrates the semicircle") {
  const auto rule = chebyshev_u_rule(10, -2.0, 2.0);
  CHECK(rule.integrate([](double) { return 1.0 / (2 * pi); }) == doctest::Approx(1.0));
}
