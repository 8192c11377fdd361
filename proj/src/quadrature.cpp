#include "rmtlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "rmtlab/errors.hpp"

namespace rmtlab {

namespace {

// Returns (P_n(x), P_{n-1}(x)) by the three-term recurrence; n >= 1.
std::pair<double, double> legendre_pair(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

QuadratureRule gauss_legendre(int n, double lo, double hi) {
  if (n < 1) throw InvalidParameter("gauss_legendre: n must be positive");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  // Newton on P_n from the Tricomi initial guesses; nodes come in +/- pairs.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      const auto [pn, pm] = legendre_pair(n, x);
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [pn, pm] = legendre_pair(n, x);
    dp = n * (x * pn - pm) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(int panels, int order, double lo, double hi) {
  if (panels < 1) throw InvalidParameter("composite_gauss_legendre: panels must be positive");
  const QuadratureRule base = gauss_legendre(order);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * order);
  rule.weights.reserve(rule.nodes.capacity());
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    for (int i = 0; i < order; ++i) {
      rule.nodes.push_back(a + 0.5 * h * (base.nodes[i] + 1.0));
      rule.weights.push_back(0.5 * h * base.weights[i]);
    }
  }
  return rule;
}

QuadratureRule arcsine_rule(int n, double a, double b) {
  if (n < 1) throw InvalidParameter("arcsine_rule: n must be positive");
  QuadratureRule rule;
  const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
  for (int j = 0; j < n; ++j) {
    const double theta = std::numbers::pi * (j + 0.5) / n;
    rule.nodes.push_back(mid + rad * std::cos(theta));
    rule.weights.push_back(1.0 / n);
  }
  return rule;
}

QuadratureRule chebyshev_u_rule(int n, double a, double b) {
  if (n < 1) throw InvalidParameter("chebyshev_u_rule: n must be positive");
  QuadratureRule rule;
  const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
  for (int j = 1; j <= n; ++j) {
    const double theta = std::numbers::pi * j / (n + 1);
    const double s = std::sin(theta);
    rule.nodes.push_back(mid + rad * std::cos(theta));
    // integral of f(x) sqrt((x-a)(b-x)) dx = rad^2 * int_0^pi f sin^2
    rule.weights.push_back(rad * rad * std::numbers::pi / (n + 1) * s * s);
  }
  return rule;
}

}  // namespace rmtlab
