#pragma once

#include <vector>

namespace rmtlab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  auto integrate(F&& f) const {
    decltype(f(nodes[0]) * weights[0]) acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

// n-point Gauss-Legendre rule on [lo, hi].
QuadratureRule gauss_legendre(int n, double lo = -1.0, double hi = 1.0);

// `panels` equal sub-intervals of [lo, hi], each with an `order`-point
// Gauss-Legendre rule.
QuadratureRule composite_gauss_legendre(int panels, int order, double lo, double hi);

// Rule for the arcsine probability measure dx / (pi sqrt((b-x)(x-a))) on
// [a, b]. Uses x = mid + rad cos(theta), which turns the weight into
// d(theta)/pi, and equal weights at the Chebyshev angles. Exact for
// polynomials of degree < 2n.
QuadratureRule arcsine_rule(int n, double a, double b);

// Rule for the semicircle-type weight sqrt((x-a)(b-x)) dx on [a, b]
// (Gauss-Chebyshev of the second kind). Exact for degree < 2n times weight.
QuadratureRule chebyshev_u_rule(int n, double a, double b);

}  // namespace rmtlab
