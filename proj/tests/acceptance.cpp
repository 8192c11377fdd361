// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <array>
#include <boost/math/special_functions/airy.hpp>
#include <boost/numeric/odeint.hpp>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "rmtlab/equilibrium.hpp"
#include "rmtlab/grid.hpp"
#include "rmtlab/harness.hpp"
#include "rmtlab/limit_kernels.hpp"
#include "rmtlab/orthopoly.hpp"
#include "rmtlab/painleve2.hpp"
#include "rmtlab/quadrature.hpp"

using namespace rmtlab;
using std::numbers::pi;

namespace {

const Potential kGauss({0.0, 0.0, 0.5});
const Potential kQuartic({0.0, 0.0, -1.0, 0.0, 0.25});

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = sec < limit_seconds;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("criterion %2d %s: %s; %s; runtime %.2f s (limit %g s%s)\n", id, pass ? "PASS" : "FAIL", title,
              out.detail.c_str(), sec, limit_seconds, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

// Hastings-McLeod by shooting backward from s = 8 with Airy data, an
// independent route from the collocation solver.
double shoot_q(double s_to) {
  namespace odeint = boost::numeric::odeint;
  using S = std::array<double, 2>;
  const double s0 = 8.0;
  S x{boost::math::airy_ai(s0), boost::math::airy_ai_prime(s0)};
  auto rhs = [](const S& y, S& dy, double s) {
    dy[0] = y[1];
    dy[1] = s * y[0] + 2.0 * y[0] * y[0] * y[0];
  };
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<S>>(1e-14, 1e-14), rhs, x, s0, s_to,
                             -1e-3);
  return x[0];
}

const HastingsMcLeodSolution& hm_default() {
  static const auto sol = solve_hastings_mcleod();
  return sol;
}

// Wide grid for the sigma integral of the critical kernel.
const HastingsMcLeodSolution& hm_wide() {
  static const auto sol = solve_hastings_mcleod(-40.0, 6.0, 1e-9);
  return sol;
}

Outcome c1_equilibrium() {
  const auto em = solve_one_cut(kQuartic, 1.0);
  const double ends = std::max(std::abs(em.support().a + 2.0), std::abs(em.support().b - 2.0));
  double dens = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = -2.0 + 4.0 * (i + 0.5) / 50;
    const double exact = x * x * std::sqrt(4.0 - x * x) / (2 * pi);
    dens = std::max(dens, std::abs(em.density(x) - exact));
  }
  return {ends <= 1e-10 && dens <= 1e-9, fmt("endpoint err %.2e (tol 1e-10), density err %.2e (tol 1e-9)", ends, dens)};
}

Outcome c2_critical_constants() {
  double c_err = 0.0, s_err = 0.0;
  for (double L : {-1.0, 0.0, 1.0, 2.5}) {
    const auto cd = critical_constants(kQuartic, 0.0, L);
    c_err = std::max(c_err, std::abs(cd.c - 0.25));
    s_err = std::max(s_err, std::abs(cd.s - L * std::pow(2.0, -1.0 / 3.0)));
  }
  const auto em = solve_one_cut(kQuartic, 1.0);
  const double h = 1e-4;
  const double fd = (conformal_map_f(em, 0.0, h) - conformal_map_f(em, 0.0, -h)).real() / (2 * h);
  const double f_err = std::abs(fd - std::cbrt(0.25));
  return {c_err <= 1e-8 && s_err <= 1e-8 && f_err <= 1e-6,
          fmt("|c - 1/4| %.2e, |s - L 2^(-1/3)| %.2e (tol 1e-8), |f'(0) - c^(1/3)| %.2e (tol 1e-6)", c_err, s_err,
              f_err)};
}

Outcome c3_buyarov_rakhmanov() {
  const double w = 1.0 / (2 * pi);
  std::vector<double> errs;
  for (double dt : {4e-3, 2e-3, 1e-3}) {
    const auto r = buyarov_rakhmanov_check(kQuartic, 0.0, dt);
    errs.push_back(std::abs(r.fd_value - w));
  }
  const bool shrinking = errs[1] < errs[0] && errs[2] < errs[1];
  return {errs[2] <= 1e-3 && shrinking,
          fmt("err at dt = 4e-3, 2e-3, 1e-3: %.2e, %.2e, %.2e (tol 1e-3, shrinking %s)", errs[0], errs[1], errs[2],
              shrinking ? "yes" : "no")};
}

Outcome c4_identity() {
  double worst = 0.0;
  for (const Potential* p : {&kGauss, &kQuartic}) {
    const auto em = solve_one_cut(*p, 1.0);
    const Support sup = em.support();
    for (int i = 0; i < 10; ++i) {
      const double x = sup.a + (sup.b - sup.a) * (i + 0.5) / 10;
      const auto r = psiV_identity_check(em, x);
      worst = std::max(worst, std::abs(r.lhs / r.rhs - 1.0));
    }
  }
  return {worst <= 1e-6, fmt("max |lhs/rhs - 1| %.2e over 20 points (tol 1e-6)", worst)};
}

Outcome c5_hastings_mcleod() {
  const auto& hm = hm_default();
  double res = std::max(hm.diagnostics.collocation_residual, hm.diagnostics.offmesh_residual);
  for (int i = 0; i < 4000; ++i) res = std::max(res, hm.residual(hm.s_min() + (hm.s_max() - hm.s_min()) * (i + 0.5) / 4000));
  const double q0 = q_at(hm, 0.0).q;
  const double oracle = shoot_q(0.0);
  bool positive = true;
  for (double v : hm.q()) positive = positive && v > 0.0;
  const double ratio = q_at(hm, 5.0).q / boost::math::airy_ai(5.0);
  const bool ok = res < 1e-8 && std::abs(q0 - oracle) <= 1e-6 && positive && std::abs(ratio - 1.0) <= 1e-3;
  return {ok, fmt("residual %.2e (tol 1e-8), |q(0) - shooting| %.2e (tol 1e-6), q > 0 %s, |q/Ai(5) - 1| %.2e (tol 1e-3)",
                  res, std::abs(q0 - oracle), positive ? "yes" : "no", std::abs(ratio - 1.0))};
}

Outcome c6_psi() {
  const auto& hm = hm_default();
  double parity = 0.0, drift = 0.0, order_lo = 1e300, order_hi = -1e300;
  for (double s : {-2.0, 0.0, 2.0}) {
    for (int i = 0; i <= 16; ++i) {
      const double z = 0.25 * i;
      const auto left = psi_eval_from_right(hm, -z, s);
      const auto right = psi_eval(hm, z, s);
      parity = std::max({parity, std::abs(left.phi1 - right.phi1), std::abs(left.phi2 + right.phi2)});
    }
    drift = std::max(drift, psi_determinant_drift(hm, s, 8.0, -8.0).drift_per_unit);
    for (double z : {0.5, 1.0, 2.0}) {
      const double r1 = psi_s_derivative_check(hm, z, s, 1e-2);
      const double r2 = psi_s_derivative_check(hm, z, s, 5e-3);
      const double order = std::log2(r1 / r2);
      order_lo = std::min(order_lo, order);
      order_hi = std::max(order_hi, order);
    }
  }
  const bool ok = parity <= 1e-6 && drift < 1e-8 && order_lo >= 1.8 && order_hi <= 2.2;
  return {ok, fmt("parity err %.2e (tol 1e-6), determinant drift %.2e per unit (tol 1e-8), observed order of the "
                  "s-derivative residual in [%.3f, %.3f] (expected 2)",
                  parity, drift, order_lo, order_hi)};
}

Outcome c7_representations() {
  const auto& hm = hm_wide();
  const auto grid = tensor_grid(-3.0, 3.0, 7);
  double diff = 0.0, min_diag = 1e300;
  for (double s : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    const CritKernelContext ctx(hm, s);
    const auto ratio = k_crit_grid(ctx, grid);
    const auto integral = k_crit_integral_grid(ctx, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) diff = std::max(diff, std::abs(ratio[i] - integral[i].value));
    std::vector<GridPoint> diag;
    for (int i = 0; i <= 120; ++i) diag.push_back({-3.0 + 0.05 * i, -3.0 + 0.05 * i});
    for (double k : k_crit_grid(ctx, diag)) min_diag = std::min(min_diag, k);
  }
  return {diff < 1e-4 && min_diag > 0.0,
          fmt("max |ratio - integral| %.2e on 7x7 x 5 s (tol 1e-4), min diagonal %.3e on [-3,3] (must be > 0)", diff,
              min_diag)};
}

Outcome c8_bulk() {
  const auto rep = bulk_experiment(kGauss, 0.0, {20, 40, 60});
  const double e60 = rep.rows.back().max_err;
  return {e60 < 0.05 && rep.decreasing,
          fmt("E(20, 40, 60) = %.4f, %.4f, %.4f; E(60) < 0.05 %s; strictly decreasing %s", rep.rows[0].max_err,
              rep.rows[1].max_err, e60, e60 < 0.05 ? "yes" : "no", rep.decreasing ? "yes" : "no")};
}

Outcome c9_edge() {
  const auto rep = edge_experiment(kGauss, {20, 40, 80});
  const double e80 = rep.rows.back().max_err;
  return {e80 < 0.1 && rep.decreasing,
          fmt("fitted c = %.6f at n = %g (analytic %.6f); E(20, 40, 80) = %.4f, %.4f, %.4f; E(80) < 0.1 %s; "
              "decreasing %s",
              rep.constant("c_fitted"), rep.constant("n_fit"), rep.constant("c_analytic"), rep.rows[0].max_err,
              rep.rows[1].max_err, e80, e80 < 0.1 ? "yes" : "no", rep.decreasing ? "yes" : "no")};
}

Outcome c10_double_scaling() {
  const auto& hm = hm_default();
  bool ok = true;
  std::string detail;
  for (double L : {0.0, 1.0}) {
    ExperimentConfig cfg;
    cfg.L = L;
    const auto rep = double_scaling_experiment(cfg, hm);
    const double e80 = rep.rows.back().max_err;
    ok = ok && rep.decreasing && e80 < 0.1;
    detail += fmt("L = %g (s = %.4f): E(20, 40, 80) = %.4f, %.4f, %.4f, decreasing %s, E(80) < 0.1 %s; ", L,
                  rep.constant("s"), rep.rows[0].max_err, rep.rows[1].max_err, e80, rep.decreasing ? "yes" : "no",
                  e80 < 0.1 ? "yes" : "no");
  }
  ExperimentConfig cfg;
  int held = 0, total = 0;
  for (const auto& m : mismatched_s_control(cfg, {0.0, 0.5, -0.5}, hm)) {
    ++total;
    if (m.ok()) ++held;
  }
  ok = ok && held == total;
  detail += fmt("mismatched-s control at n = 80 holds for %d of %d ordered pairs", held, total);
  return {ok, detail};
}

Outcome c11_finite_kernel() {
  double trace_err = 0.0, cd_err = 0.0;
  for (const Potential* p : {&kGauss, &kQuartic}) {
    for (int n : {1, 5, 10, 20, 40, 80}) {
      const auto tab = build_recurrence(*p, n, n);
      const double R = 1.5 * tab.interval_radius;
      const auto rule = composite_gauss_legendre(300, 20, -R, R);
      double tr = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) tr += rule.weights[i] * cd_kernel(tab, *p, n, rule.nodes[i], rule.nodes[i]);
      trace_err = std::max(trace_err, std::abs(tr / n - 1.0));
      if (n > 20) continue;
      std::vector<double> phi_x, phi_y;
      for (double x : {-2.1, -1.0, -0.3, 0.0, 0.45, 1.7})
        for (double y : {-1.9, -0.3, 0.2, 1.0, 2.3}) {
          weighted_polys(tab, *p, n - 1, x, phi_x);
          weighted_polys(tab, *p, n - 1, y, phi_y);
          double direct = 0.0;
          for (int k = 0; k < n; ++k) direct += phi_x[k] * phi_y[k];
          cd_err = std::max(cd_err, std::abs(cd_kernel(tab, *p, n, x, y) - direct));
        }
    }
  }
  return {trace_err <= 1e-6 && cd_err <= 1e-8,
          fmt("max |trace/n - 1| %.2e for n <= 80 (tol 1e-6), max |CD - direct sum| %.2e for n <= 20 (tol 1e-8)",
              trace_err, cd_err)};
}

}  // namespace

int main() {
  criterion(1, "equilibrium closed form", 1, c1_equilibrium);
  criterion(2, "critical constants", 1, c2_critical_constants);
  criterion(3, "Buyarov-Rakhmanov derivative", 5, c3_buyarov_rakhmanov);
  criterion(4, "psi_V identity", 5, c4_identity);
  criterion(5, "Hastings-McLeod", 30, c5_hastings_mcleod);
  criterion(6, "psi-function suite", 60, c6_psi);
  criterion(7, "critical kernel representations", 120, c7_representations);
  criterion(8, "bulk universality", 60, c8_bulk);
  criterion(9, "edge universality", 120, c9_edge);
  criterion(10, "double-scaling universality", 600, c10_double_scaling);
  criterion(11, "finite-n kernel sanity", 60, c11_finite_kernel);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
