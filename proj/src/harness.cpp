#include "rmtlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "rmtlab/equilibrium.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/limit_kernels.hpp"
#include "rmtlab/recurrence_cache.hpp"

namespace rmtlab {

namespace {

using Clock = std::chrono::steady_clock;

RecurrenceTable get_table(const Potential& p, double N, int n_max, const ExperimentConfig& cfg) {
  const char* env = std::getenv(kCacheDirEnv);
  if (cfg.cache_dir.empty() && !(env && *env)) return build_recurrence(p, N, n_max, cfg.quad);
  return RecurrenceCache(RecurrenceCache::resolve_dir(cfg.cache_dir)).get_or_build(p, N, n_max, cfg.quad);
}

void check_config(const ExperimentConfig& cfg, const std::vector<int>& n_list) {
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw InvalidParameter("n_list entries must be positive");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw InvalidParameter("n_list must be strictly increasing");
  }
  for (const auto& g : cfg.grid)
    if (!std::isfinite(g.u) || !std::isfinite(g.v)) throw InvalidParameter("grid points must be finite");
}

template <class F>
auto per_n(int n, F f) {
  try {
    return f();
  } catch (const Error& e) {
    throw ExperimentError("n = " + std::to_string(n) + ": " + e.what());
  }
}

ConvergenceRow compare(int n, double N, const std::vector<double>& finite, const std::vector<double>& limit) {
  double mx = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < finite.size(); ++i) {
    const double e = std::abs(finite[i] - limit[i]);
    mx = std::max(mx, e);
    sum += e;
  }
  return {n, N, mx, finite.empty() ? 0.0 : sum / finite.size()};
}

void finish(ConvergenceReport& rep, Clock::time_point start) {
  rep.decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    if (!(rep.rows[i].max_err < rep.rows[i - 1].max_err)) rep.decreasing = false;
  rep.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

double ConvergenceReport::constant(const std::string& name) const {
  for (const auto& [k, v] : constants)
    if (k == name) return v;
  throw InvalidParameter("report has no constant '" + name + "'");
}

double coupled_N(int n, double L) {
  const double n23 = std::cbrt(static_cast<double>(n) * n);
  const double denom = 1.0 + L / n23;
  if (!(denom > 0.0)) throw InvalidParameter("coupling L too negative for n = " + std::to_string(n));
  return n / denom;
}

double scaled_critical_kernel(const RecurrenceTable& tab, const Potential& p, int n, double x_star, double c, double u,
                              double v) {
  const double scale = std::cbrt(c * n);
  return cd_kernel(tab, p, n, x_star + u / scale, x_star + v / scale) / scale;
}

ConvergenceReport double_scaling_experiment(const ExperimentConfig& cfg) {
  return double_scaling_experiment(cfg, solve_hastings_mcleod(cfg.painleve));
}

ConvergenceReport double_scaling_experiment(const ExperimentConfig& cfg, const HastingsMcLeodSolution& hm) {
  const auto start = Clock::now();
  check_config(cfg, cfg.n_list);
  const Potential p(cfg.potential);
  const CriticalData cd = critical_constants(p, cfg.x_star, cfg.L, cfg.critical_tol);

  ConvergenceReport rep;
  rep.experiment = "critical";
  rep.potential = describe_potential(p);
  rep.grid_spec = cfg.grid_spec;
  rep.constants = {{"c", cd.c}, {"s", cd.s}, {"L", cfg.L}, {"x_star", cfg.x_star}, {"w_x_star", cd.w_at_xstar}};

  const auto limit = k_crit_grid(CritKernelContext(hm, cd.s), cfg.grid, cfg.exec);
  for (int n : cfg.n_list) {
    rep.rows.push_back(per_n(n, [&] {
      const double N = coupled_N(n, cfg.L);
      const auto tab = get_table(p, N, n, cfg);
      const auto finite = eval_grid(
          [&](double u, double v) { return scaled_critical_kernel(tab, p, n, cfg.x_star, cd.c, u, v); }, cfg.grid,
          cfg.exec);
      return compare(n, N, finite, limit);
    }));
  }
  finish(rep, start);
  return rep;
}

std::vector<MismatchResult> mismatched_s_control(const ExperimentConfig& cfg, const std::vector<double>& couplings,
                                                 const HastingsMcLeodSolution& hm) {
  check_config(cfg, cfg.n_list);
  if (cfg.n_list.empty()) throw InvalidParameter("mismatch control needs a non-empty n_list");
  const Potential p(cfg.potential);
  const int n = cfg.n_list.back();
  const CriticalData cd = critical_constants(p, cfg.x_star, 0.0, cfg.critical_tol);

  std::vector<std::vector<double>> limits;
  for (double L : couplings) limits.push_back(k_crit_grid(CritKernelContext(hm, s_from_L(cd, L)), cfg.grid, cfg.exec));

  std::vector<MismatchResult> out;
  for (std::size_t i = 0; i < couplings.size(); ++i) {
    const auto finite = per_n(n, [&] {
      const auto tab = get_table(p, coupled_N(n, couplings[i]), n, cfg);
      return eval_grid([&](double u, double v) { return scaled_critical_kernel(tab, p, n, cfg.x_star, cd.c, u, v); },
                       cfg.grid, cfg.exec);
    });
    const double matched = compare(n, 0.0, finite, limits[i]).max_err;
    for (std::size_t j = 0; j < couplings.size(); ++j) {
      if (j == i) continue;
      out.push_back({couplings[i], couplings[j], n, matched, compare(n, 0.0, finite, limits[j]).max_err});
    }
  }
  return out;
}

ConvergenceReport bulk_experiment(const Potential& p, double x_ref, const std::vector<int>& n_list,
                                  const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  check_config(cfg, n_list);
  const auto em = solve_one_cut(p, 1.0);
  if (!em.support().contains(x_ref) || !(em.density(x_ref) > 0.0))
    throw InvalidParameter("bulk reference point needs psi_V(x_ref) > 0");
  const double psi = em.density(x_ref);

  ConvergenceReport rep;
  rep.experiment = "bulk";
  rep.potential = describe_potential(p);
  rep.grid_spec = cfg.grid_spec;
  rep.constants = {{"x_ref", x_ref}, {"psi_x_ref", psi}};
  const auto limit = eval_grid(k_bulk, cfg.grid, cfg.exec);
  for (int n : n_list) {
    rep.rows.push_back(per_n(n, [&] {
      const auto tab = get_table(p, n, n, cfg);
      const double scale = n * psi;
      const auto finite = eval_grid(
          [&](double u, double v) { return cd_kernel(tab, p, n, x_ref + u / scale, x_ref + v / scale) / scale; },
          cfg.grid, cfg.exec);
      return compare(n, n, finite, limit);
    }));
  }
  finish(rep, start);
  return rep;
}

double scaled_edge_kernel(const RecurrenceTable& tab, const Potential& p, int n, double edge, double c, EdgeSide side,
                          double u, double v) {
  const double scale = std::pow(c * n, 2.0 / 3.0);
  const double sgn = side == EdgeSide::right ? 1.0 : -1.0;
  return cd_kernel(tab, p, n, edge + sgn * u / scale, edge + sgn * v / scale) / scale;
}

ConvergenceReport edge_experiment(const Potential& p, const std::vector<int>& n_list, const EdgeOptions& opts,
                                  const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  check_config(cfg, n_list);
  const auto em = solve_one_cut(p, 1.0);
  const Support sup = em.support();
  const double edge = opts.side == EdgeSide::right ? sup.b : sup.a;
  // psi_V(x) ~ (rho / pi) sqrt(|x - edge|) at a regular edge.
  // A degenerate edge is only located to about sqrt(eps), so h there is small
  // but not zero; compare with the opposite edge.
  const double rho = em.h(edge) * std::sqrt(sup.b - sup.a);
  const double rho_other = std::abs(em.h(edge == sup.b ? sup.a : sup.b)) * std::sqrt(sup.b - sup.a);
  if (!(rho > 1e-6 * std::max(1.0, rho_other))) throw IrregularEdge("edge density does not vanish like a square root");

  const auto limit = eval_grid(k_edge, cfg.grid, cfg.exec);
  auto error_at = [&](const RecurrenceTable& tab, int n, double c) {
    const auto finite = eval_grid(
        [&](double u, double v) { return scaled_edge_kernel(tab, p, n, edge, c, opts.side, u, v); }, cfg.grid,
        cfg.exec);
    return compare(n, n, finite, limit);
  };

  // One-parameter fit: golden section on log c within a factor 2 of rho.
  const auto fit_tab = per_n(opts.n_fit, [&] { return get_table(p, opts.n_fit, opts.n_fit, cfg); });
  auto objective = [&](double logc) { return error_at(fit_tab, opts.n_fit, std::exp(logc)).max_err; };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(rho / 2), hi = std::log(rho * 2);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > 1e-6) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double c_fit = std::exp(0.5 * (lo + hi));
  const double c_used = opts.constant == EdgeConstant::fitted ? c_fit : rho;

  ConvergenceReport rep;
  rep.experiment = opts.side == EdgeSide::right ? "edge-right" : "edge-left";
  rep.potential = describe_potential(p);
  rep.grid_spec = cfg.grid_spec;
  rep.constants = {{"edge", edge},
                   {"c_analytic", rho},
                   {"c_fitted", c_fit},
                   {"n_fit", static_cast<double>(opts.n_fit)},
                   {"c_used", c_used}};
  for (int n : n_list)
    rep.rows.push_back(per_n(n, [&] { return error_at(get_table(p, n, n, cfg), n, c_used); }));
  finish(rep, start);
  return rep;
}

}  // namespace rmtlab
