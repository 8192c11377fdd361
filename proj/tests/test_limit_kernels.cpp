#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rmtlab/errors.hpp"
#include "rmtlab/grid.hpp"
#include "rmtlab/limit_kernels.hpp"

using namespace rmtlab;
using std::numbers::pi;

namespace {

// The sigma integral for |u| up to 3 needs q down to about -30.
const HastingsMcLeodSolution& hm() {
  static const HastingsMcLeodSolution sol = solve_hastings_mcleod(-40.0, 6.0, 1e-9);
  return sol;
}

double boost_edge(double u, double v) {
  using boost::math::airy_ai;
  using boost::math::airy_ai_prime;
  if (u == v) return airy_ai_prime(u) * airy_ai_prime(u) - u * airy_ai(u) * airy_ai(u);
  return (airy_ai(u) * airy_ai_prime(v) - airy_ai_prime(u) * airy_ai(v)) / (u - v);
}

}  // namespace

TEST_CASE("sine kernel values") {
  CHECK(k_bulk(0.3, 0.3) == 1.0);
  CHECK(k_bulk(0.5, 0.0) == doctest::Approx(2.0 / pi).epsilon(1e-15));
  for (int k = 1; k <= 4; ++k) CHECK(std::abs(k_bulk(k + 0.25, 0.25)) < 1e-15);
  CHECK(k_bulk(1e-9, 0.0) == doctest::Approx(1.0));
  for (double u = -2; u <= 2; u += 0.37)
    for (double v = -2; v <= 2; v += 0.41) CHECK(k_bulk(u, v) == k_bulk(v, u));
}

TEST_CASE("Airy kernel values, symmetry and decay") {
  CHECK(k_edge(0.0, 0.0) == doctest::Approx(0.0669875).epsilon(1e-6));
  CHECK(std::abs(k_edge(10.0, 10.0)) < 1e-9);
  for (double u = -5; u <= 5; u += 0.7)
    for (double v = -5; v <= 5; v += 0.9) {
      CHECK(k_edge(u, v) == doctest::Approx(k_edge(v, u)).epsilon(1e-12));
      // The ratio form of the oracle itself cancels badly close to u = v.
      if (std::abs(u - v) > 1e-3 || u == v) CHECK(std::abs(k_edge(u, v) - boost_edge(u, v)) < 1e-9);
    }
  for (double u = -6; u <= 6; u += 0.25) CHECK(k_edge(u, u) >= 0.0);
  // No cancellation blow-up next to the diagonal.
  CHECK(std::abs(k_edge(1.0, 1.0 + 1e-9) - k_edge(1.0, 1.0)) < 1e-9);
  CHECK(std::abs(k_edge(1.0, 1.0 + 2e-5) - boost_edge(1.0, 1.0 + 2e-5)) < 1e-9);
}

TEST_CASE("Airy kernel diagonal has a finite right tail") {
  // Partial integrals of K(u, u) over [0, X] stabilize as X grows.
  auto partial = [](double X) {
    double acc = 0.0;
    const int n = static_cast<int>(X * 200);
    for (int i = 0; i < n; ++i) {
      const double a = X * i / n, b = X * (i + 1) / n;
      acc += (b - a) / 6.0 * (k_edge(a, a) + 4 * k_edge(0.5 * (a + b), 0.5 * (a + b)) + k_edge(b, b));
    }
    return acc;
  };
  const double p8 = partial(8.0), p12 = partial(12.0);
  CHECK(p8 > 0.0);
  CHECK(std::abs(p12 - p8) < 1e-3);
}

TEST_CASE("critical kernel: symmetry, parity and positive diagonal") {
  for (double s : {-2.0, 0.0, 2.0}) {
    const CritKernelContext ctx(hm(), s);
    for (double u = -3; u <= 3; u += 0.75) {
      CHECK(k_crit(ctx, u, u) > 0.0);
      for (double v = -3; v <= 3; v += 1.5) {
        const double k = k_crit(ctx, u, v);
        CHECK(k == doctest::Approx(k_crit(ctx, v, u)).epsilon(1e-12));
        CHECK(std::abs(k - k_crit(ctx, -u, -v)) < 1e-8);
      }
    }
    // Near the diagonal, against the cancellation-free integral form.
    for (double d : {5e-6, 2e-5, 1e-3})
      CHECK(std::abs(k_crit(ctx, 0.7, 0.7 + d) - k_crit_integral(ctx, 0.7, 0.7 + d)) < 1e-6);
  }
}

TEST_CASE("critical kernel: ratio and integral representations agree") {
  const auto grid = tensor_grid(-3.0, 3.0, 7);
  for (double s : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    const CritKernelContext ctx(hm(), s);
    const auto ratio = k_crit_grid(ctx, grid);
    const auto integral = k_crit_integral_grid(ctx, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(ratio[i] - integral[i].value) < 1e-4);
      CHECK(integral[i].tail_bound <= ctx.integral.tail_tol);
      if (grid[i].u == grid[i].v) CHECK(integral[i].value >= 0.0);
    }
  }
  const CritKernelContext ctx(hm(), 0.5);
  CHECK(std::abs(k_crit_integral(ctx, 1.2, -0.4) - k_crit(ctx, 1.2, -0.4)) < 1e-4);
}

TEST_CASE("diagonal s-derivative equals (Phi1^2 + Phi2^2) / pi") {
  for (double u : {-1.5, 0.0, 0.8, 2.5}) {
    const double s = 0.3;
    auto diag = [&](double h, double sign) {
      return k_crit(CritKernelContext(hm(), s + sign * h), u, u);
    };
    const auto p = psi_eval(hm(), u, s);
    const double exact = (p.phi1 * p.phi1 + p.phi2 * p.phi2) / pi;
    const double e1 = std::abs((diag(1e-2, 1) - diag(1e-2, -1)) / 2e-2 - exact);
    const double e2 = std::abs((diag(5e-3, 1) - diag(5e-3, -1)) / 1e-2 - exact);
    CHECK(e1 < 1e-3);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(exact >= 0.0);
  }
}

TEST_CASE("truncated sigma range raises a truncation error") {
  const auto narrow = solve_hastings_mcleod(-10.0, 6.0, 1e-9);
  const CritKernelContext ctx(narrow, 0.0);
  CHECK_THROWS_AS(k_crit_integral(ctx, 3.0, 3.0), TruncationError);
  // Near the origin the integrand has already decayed by sigma = -10.
  CHECK_NOTHROW(k_crit_integral(ctx, 0.0, 0.5));
}

TEST_CASE("context validation") {
  CHECK_THROWS_AS(CritKernelContext(hm(), 7.0), DomainError);
  CritIntegralConfig bad;
  bad.order = 1;
  CHECK_THROWS_AS(CritKernelContext(hm(), 0.0, {}, bad), InvalidParameter);
}

TEST_CASE("serial and parallel grid evaluation agree") {
  const auto grid = tensor_grid(-2.0, 2.0, 5);
  CHECK(eval_grid(k_edge, grid, Exec::serial) == eval_grid(k_edge, grid, Exec::parallel));
  const CritKernelContext ctx(hm(), 1.0);
  const auto a = k_crit_grid(ctx, grid, Exec::serial), b = k_crit_grid(ctx, grid, Exec::parallel);
  CHECK(a == b);
  for (std::size_t i = 0; i < grid.size(); i += 3) CHECK(a[i] == doctest::Approx(k_crit(ctx, grid[i].u, grid[i].v)));
  const auto c = k_crit_integral_grid(ctx, grid, Exec::serial), d = k_crit_integral_grid(ctx, grid, Exec::parallel);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(c[i].value == d[i].value);
}

TEST_CASE("tensor grid layout") {
  const auto g = tensor_grid(-2.0, 2.0, 9);
  REQUIRE(g.size() == 81);
  CHECK(g.front().u == -2.0);
  CHECK(g.back().v == 2.0);
  CHECK(g[1].u == -2.0);
  CHECK(g[1].v == doctest::Approx(-1.5));
  CHECK_THROWS_AS(tensor_grid(0, 1, 0), InvalidParameter);
}
