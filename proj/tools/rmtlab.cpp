#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rmtlab/equilibrium.hpp"
#include "rmtlab/errors.hpp"
#include "rmtlab/grid.hpp"
#include "rmtlab/harness.hpp"
#include "rmtlab/limit_kernels.hpp"
#include "rmtlab/orthopoly.hpp"
#include "rmtlab/painleve2.hpp"
#include "rmtlab/recurrence_cache.hpp"

using namespace rmtlab;

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct Settings {
  // general
  std::vector<double> potential = {0.0, 0.0, -1.0, 0.0, 0.25};
  std::string output = "-";
  std::string cache_dir;
  bool serial = false;
  // x grid (equilibrium, kernel-finite)
  double x_min = kUnset, x_max = kUnset;
  int points = 0;
  // (u, v) grid (kernel-limit, verify-*)
  double grid_min = kUnset, grid_max = kUnset;
  int grid_points = 0;
  // equilibrium
  double t = 1.0;
  // kernel-finite
  int n = 20;
  double N = kUnset;
  int nodes = 0;
  double cutoff = 1e-30;
  // experiments
  std::vector<int> n_list = {20, 40, 80};
  double L = 0.0;
  double x_star = 0.0;
  double x_ref = 0.0;
  double critical_tol = 1e-8;
  std::string side = "right";
  std::string edge_constant = "fitted";
  int n_fit = 60;
  std::vector<double> mismatch;
  // Painleve II and psi
  std::string table;
  double s_min = kUnset, s_max = 6.0;
  double tol = 1e-9;
  double table_step = 0.02;
  double s = 0.0;
  bool psi = false;
  double zeta_min = 0.0, zeta_max = 4.0;
  int zeta_points = 41;
  // limit kernels
  std::string which = "bulk";
  double tail_tol = 1e-8;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

// "--a-b,--a_b" so config files may use either spelling.
std::string names(const std::string& dashed) {
  std::string under = dashed;
  for (auto& c : under)
    if (c == '-') c = '_';
  return under == dashed ? "--" + dashed : "--" + dashed + ",--" + under;
}

void with_output(const Settings& st, const std::function<void(std::ostream&)>& body) {
  if (st.output.empty() || st.output == "-") {
    body(std::cout);
    std::cout.flush();
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream f(st.output, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + st.output + " for writing");
  body(f);
  f.flush();
  if (!f) throw IoError("failed writing " + st.output);
}

Exec exec_of(const Settings& st) { return st.serial ? Exec::serial : Exec::parallel; }

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw InvalidParameter("point count must be positive");
  if (!(lo <= hi)) throw InvalidParameter("range must satisfy min <= max");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return x;
}

double or_default(double v, double d) { return std::isnan(v) ? d : v; }

std::vector<GridPoint> uv_grid(const Settings& st, double lo, double hi, int n, std::string& desc) {
  lo = or_default(st.grid_min, lo);
  hi = or_default(st.grid_max, hi);
  n = st.grid_points > 0 ? st.grid_points : n;
  if (!(lo < hi) || n < 2) throw InvalidParameter("grid needs grid_min < grid_max and grid_points >= 2");
  desc = "tensor " + std::to_string(n) + "x" + std::to_string(n) + " [" + num(lo) + "," + num(hi) + "]^2";
  return tensor_grid(lo, hi, n);
}

HastingsMcLeodSolution painleve_solution(const Settings& st, double default_s_min) {
  if (!st.table.empty()) {
    std::ifstream f(st.table);
    if (!f) throw IoError("cannot open " + st.table);
    return read_hastings_mcleod(f);
  }
  HastingsMcLeodOptions o;
  o.s_min = or_default(st.s_min, default_s_min);
  o.s_max = st.s_max;
  o.tol = st.tol;
  o.table_step = st.table_step;
  return solve_hastings_mcleod(o);
}

ExperimentConfig experiment_config(const Settings& st) {
  ExperimentConfig cfg;
  cfg.potential = st.potential;
  cfg.x_star = st.x_star;
  cfg.x_ref = st.x_ref;
  cfg.L = st.L;
  cfg.n_list = st.n_list;
  cfg.grid = uv_grid(st, -2.0, 2.0, 9, cfg.grid_spec);
  cfg.critical_tol = st.critical_tol;
  cfg.quad.nodes = st.nodes;
  cfg.quad.cutoff = st.cutoff;
  cfg.painleve.s_min = or_default(st.s_min, cfg.painleve.s_min);
  cfg.painleve.s_max = st.s_max;
  cfg.painleve.tol = st.tol;
  cfg.painleve.table_step = st.table_step;
  cfg.cache_dir = st.cache_dir;
  cfg.exec = exec_of(st);
  return cfg;
}

void run_equilibrium(const Settings& st) {
  const Potential p(st.potential);
  const auto em = solve_one_cut(p, st.t);
  const Support sup = em.support();
  const auto xs = linspace(or_default(st.x_min, sup.a), or_default(st.x_max, sup.b), st.points > 0 ? st.points : 201);
  with_output(st, [&](std::ostream& os) {
    os << "# rmtlab equilibrium\n";
    os << "# potential = " << describe_potential(p) << "\n";
    os << "# t = " << num(st.t) << "\n";
    os << "# a_t = " << num(sup.a) << "\n";
    os << "# b_t = " << num(sup.b) << "\n";
    os << "# mass_check = " << num(em.mass_check()) << "\n";
    os << "x,psi_t,q_t\n";
    for (double x : xs) {
      const double psi = sup.contains(x) ? density_psi_t(em, x) : 0.0;
      os << num(x) << "," << num(psi) << "," << num(q_t(em, x).real()) << "\n";
    }
  });
}

void run_kernel_finite(const Settings& st) {
  const Potential p(st.potential);
  if (st.n < 1) throw InvalidParameter("n must be positive");
  const double N = std::isnan(st.N) ? coupled_N(st.n, st.L) : st.N;
  QuadratureConfig quad;
  quad.nodes = st.nodes;
  quad.cutoff = st.cutoff;
  const char* env = std::getenv(kCacheDirEnv);
  const auto tab = st.cache_dir.empty() && !(env && *env)
                       ? build_recurrence(p, N, st.n, quad)
                       : RecurrenceCache(RecurrenceCache::resolve_dir(st.cache_dir)).get_or_build(p, N, st.n, quad);

  double lo = st.x_min, hi = st.x_max;
  if (std::isnan(lo) || std::isnan(hi)) {
    // Default window: the support of V_t with t = n / N, padded.
    const Support sup = solve_one_cut(p, st.n / N).support();
    const double pad = 0.1 * (sup.b - sup.a);
    lo = or_default(lo, sup.a - pad);
    hi = or_default(hi, sup.b + pad);
  }
  const auto xs = linspace(lo, hi, st.points > 0 ? st.points : 41);
  std::vector<GridPoint> grid;
  for (double x : xs)
    for (double y : xs) grid.push_back({x, y});
  const auto K = eval_grid([&](double x, double y) { return cd_kernel(tab, p, st.n, x, y); }, grid, exec_of(st));

  with_output(st, [&](std::ostream& os) {
    os << "# rmtlab kernel-finite\n";
    os << "# potential = " << describe_potential(p) << "\n";
    os << "# n = " << st.n << "\n";
    os << "# N = " << num(N) << "\n";
    os << "# node_count = " << tab.node_count << "\n";
    os << "# interval_radius = " << num(tab.interval_radius) << "\n";
    os << "x,y,K\n";
    for (std::size_t i = 0; i < grid.size(); ++i) os << num(grid[i].u) << "," << num(grid[i].v) << "," << num(K[i]) << "\n";
  });
}

void run_painleve(const Settings& st) {
  const auto hm = painleve_solution(st, -10.0);
  if (!st.psi) {
    with_output(st, [&](std::ostream& os) { write_hastings_mcleod(os, hm); });
    return;
  }
  const auto zetas = linspace(st.zeta_min, st.zeta_max, st.zeta_points);
  PsiOptions po;
  const auto vals = psi_eval_from_origin(hm, zetas, st.s, po);
  const auto qv = hm.eval(st.s);
  with_output(st, [&](std::ostream& os) {
    os << "# rmtlab psi\n";
    os << "# s = " << num(st.s) << "\n";
    os << "# q = " << num(qv.q) << "\n";
    os << "# r = " << num(qv.r) << "\n";
    os << "# s_min = " << num(hm.s_min()) << "\n";
    os << "# s_max = " << num(hm.s_max()) << "\n";
    os << "zeta,phi1,phi2\n";
    for (std::size_t i = 0; i < zetas.size(); ++i)
      os << num(zetas[i]) << "," << num(vals[i].phi1) << "," << num(vals[i].phi2) << "\n";
  });
}

void run_kernel_limit(const Settings& st) {
  std::string desc;
  const auto grid = uv_grid(st, -3.0, 3.0, 7, desc);
  std::vector<std::string> header = {"which = " + st.which, "grid = " + desc};
  std::vector<double> K;
  if (st.which == "bulk") {
    K = eval_grid(k_bulk, grid, exec_of(st));
  } else if (st.which == "edge") {
    K = eval_grid(k_edge, grid, exec_of(st));
  } else if (st.which == "crit" || st.which == "crit-integral") {
    // The sigma integral needs the solution well below the kernel arguments.
    const auto hm = painleve_solution(st, st.which == "crit" ? -10.0 : -40.0);
    CritIntegralConfig ic;
    ic.tail_tol = st.tail_tol;
    const CritKernelContext ctx(hm, st.s, {}, ic);
    header.push_back("s = " + num(st.s));
    header.push_back("s_min = " + num(hm.s_min()));
    if (st.which == "crit") {
      K = k_crit_grid(ctx, grid, exec_of(st));
    } else {
      const auto res = k_crit_integral_grid(ctx, grid, exec_of(st));
      double bound = 0.0, lo = st.s;
      for (const auto& r : res) {
        K.push_back(r.value);
        bound = std::max(bound, r.tail_bound);
        lo = std::min(lo, r.sigma_lo);
      }
      header.push_back("max_tail_bound = " + num(bound));
      header.push_back("sigma_lo = " + num(lo));
    }
  } else {
    throw InvalidParameter("unknown kernel '" + st.which + "'");
  }
  with_output(st, [&](std::ostream& os) {
    os << "# rmtlab kernel-limit\n";
    for (const auto& h : header) os << "# " << h << "\n";
    os << "u,v,K\n";
    for (std::size_t i = 0; i < grid.size(); ++i) os << num(grid[i].u) << "," << num(grid[i].v) << "," << num(K[i]) << "\n";
  });
}

void run_verify_bulk(const Settings& st) {
  const auto cfg = experiment_config(st);
  const auto rep = bulk_experiment(Potential(cfg.potential), st.x_ref, cfg.n_list, cfg);
  with_output(st, [&](std::ostream& os) { emit_report(rep, os); });
}

void run_verify_edge(const Settings& st) {
  const auto cfg = experiment_config(st);
  EdgeOptions eo;
  eo.side = st.side == "left" ? EdgeSide::left : EdgeSide::right;
  eo.constant = st.edge_constant == "analytic" ? EdgeConstant::analytic : EdgeConstant::fitted;
  eo.n_fit = st.n_fit;
  const auto rep = edge_experiment(Potential(cfg.potential), cfg.n_list, eo, cfg);
  with_output(st, [&](std::ostream& os) { emit_report(rep, os); });
}

void run_verify_critical(const Settings& st) {
  const auto cfg = experiment_config(st);
  const auto hm = solve_hastings_mcleod(cfg.painleve);
  auto rep = double_scaling_experiment(cfg, hm);
  if (!st.mismatch.empty()) {
    bool all = true;
    for (const auto& m : mismatched_s_control(cfg, st.mismatch, hm)) {
      all = all && m.ok();
      rep.notes.push_back("mismatch L = " + num(m.L) + " vs " + num(m.L_other) + ": matched " + num(m.matched_err) +
                          ", mismatched " + num(m.mismatched_err) + (m.ok() ? ", ok" : ", FAILED"));
    }
    rep.notes.push_back(std::string("mismatch_control = ") + (all ? "true" : "false"));
  }
  with_output(st, [&](std::ostream& os) { emit_report(rep, os); });
}

}  // namespace

int main(int argc, char** argv) {
  Settings st;
  CLI::App app{"Orthogonal-polynomial kernels and their universality limits"};
  app.set_config("--config", "", "Read key = value settings from a file");
  app.require_subcommand(1);

  const std::string general = "General", xgrid = "x grid", uvgrid = "(u,v) grid", fin = "Finite kernel",
                    exp = "Experiments", pii = "Painleve II", lim = "Limit kernels";
  app.add_option(names("potential"), st.potential, "Monomial coefficients of V, lowest degree first")
      ->delimiter(',')
      ->group(general);
  app.add_option(names("output") + ",-o", st.output, "Output CSV path, '-' for stdout")->group(general);
  app.add_option(names("cache-dir"), st.cache_dir, "Recurrence cache directory (RMTLAB_CACHE_DIR overrides)")
      ->group(general);
  app.add_flag(names("serial"), st.serial, "Evaluate grids serially")->group(general);

  app.add_option(names("x-min"), st.x_min, "Left end of the x grid")->group(xgrid);
  app.add_option(names("x-max"), st.x_max, "Right end of the x grid")->group(xgrid);
  app.add_option(names("points"), st.points, "Points in the x grid")->group(xgrid);
  app.add_option(names("grid-min"), st.grid_min, "Lower end of the tensor grid")->group(uvgrid);
  app.add_option(names("grid-max"), st.grid_max, "Upper end of the tensor grid")->group(uvgrid);
  app.add_option(names("grid-points"), st.grid_points, "Points per axis of the tensor grid")->group(uvgrid);

  app.add_option(names("t"), st.t, "Temperature of V_t = V / t")->capture_default_str()->group(general);
  app.add_option(names("n"), st.n, "Polynomial count")->capture_default_str()->group(fin);
  app.add_option(names("N"), st.N, "Weight exponent (default from n and L)")->group(fin);
  app.add_option(names("nodes"), st.nodes, "Quadrature nodes, 0 for automatic")->capture_default_str()->group(fin);
  app.add_option(names("cutoff"), st.cutoff, "Tail cutoff of the quadrature interval")->capture_default_str()->group(fin);

  app.add_option(names("n-list"), st.n_list, "Values of n")->delimiter(',')->capture_default_str()->group(exp);
  app.add_option(names("L"), st.L, "Coupling n^{2/3}(n/N - 1)")->capture_default_str()->group(exp);
  app.add_option(names("x-star"), st.x_star, "Critical point")->capture_default_str()->group(exp);
  app.add_option(names("x-ref"), st.x_ref, "Bulk reference point")->capture_default_str()->group(exp);
  app.add_option(names("critical-tol"), st.critical_tol, "Tolerance of the criticality test")
      ->capture_default_str()
      ->group(exp);
  app.add_option(names("side"), st.side, "Edge side")->check(CLI::IsMember({"right", "left"}))->group(exp);
  app.add_option(names("edge-constant"), st.edge_constant, "Edge scaling constant")
      ->check(CLI::IsMember({"fitted", "analytic"}))
      ->group(exp);
  app.add_option(names("n-fit"), st.n_fit, "n used to fit the edge constant")->capture_default_str()->group(exp);
  app.add_option(names("mismatch"), st.mismatch, "Couplings for the mismatched-s control")
      ->delimiter(',')
      ->group(exp);

  app.add_option(names("table"), st.table, "Load a saved Hastings-McLeod table instead of solving")->group(pii);
  app.add_option(names("s-min"), st.s_min, "Left end of the Hastings-McLeod grid")->group(pii);
  app.add_option(names("s-max"), st.s_max, "Right end of the Hastings-McLeod grid")->capture_default_str()->group(pii);
  app.add_option(names("tol"), st.tol, "Hastings-McLeod tolerance")->capture_default_str()->group(pii);
  app.add_option(names("table-step"), st.table_step, "Spacing of the tabulated solution")
      ->capture_default_str()
      ->group(pii);
  app.add_option(names("s"), st.s, "Painleve variable for psi and the critical kernel")->capture_default_str()->group(pii);
  app.add_flag(names("psi"), st.psi, "Emit (zeta, phi1, phi2) at fixed s instead of the table")->group(pii);
  app.add_option(names("zeta-min"), st.zeta_min)->capture_default_str()->group(pii);
  app.add_option(names("zeta-max"), st.zeta_max)->capture_default_str()->group(pii);
  app.add_option(names("zeta-points"), st.zeta_points)->capture_default_str()->group(pii);

  app.add_option(names("which"), st.which, "Limit kernel")
      ->check(CLI::IsMember({"bulk", "edge", "crit", "crit-integral"}))
      ->group(lim);
  app.add_option(names("tail-tol"), st.tail_tol, "Tail bound of the sigma integral")->capture_default_str()->group(lim);

  const std::map<std::string, std::pair<std::string, std::function<void(const Settings&)>>> commands = {
      {"equilibrium", {"Equilibrium density psi_t and q_t on an x grid", run_equilibrium}},
      {"kernel-finite", {"Finite-n kernel K_{n,N}(x, y) on an x grid", run_kernel_finite}},
      {"painleve", {"Hastings-McLeod table (s, q, qp) or psi at fixed s", run_painleve}},
      {"kernel-limit", {"Limit kernel on a (u, v) grid", run_kernel_limit}},
      {"verify-bulk", {"Bulk scaling experiment against the sine kernel", run_verify_bulk}},
      {"verify-edge", {"Edge scaling experiment against the Airy kernel", run_verify_edge}},
      {"verify-critical", {"Double-scaling experiment against the Painleve II kernel", run_verify_critical}},
  };
  std::map<CLI::App*, std::function<void(const Settings&)>> handlers;
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->fallthrough();
    handlers[sub] = entry.second;
  }

  CLI11_PARSE(app, argc, argv);
  try {
    for (auto* sub : app.get_subcommands()) handlers.at(sub)(st);
  } catch (const Error& e) {
    std::cerr << "rmtlab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "rmtlab: unexpected failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
