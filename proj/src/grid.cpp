#include "rmtlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rmtlab/errors.hpp"
#include "rmtlab/quadrature.hpp"

namespace rmtlab {

std::vector<GridPoint> tensor_grid(double lo, double hi, int n) {
  if (n < 1 || !(hi >= lo)) throw InvalidParameter("tensor_grid: need n >= 1 and hi >= lo");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  std::vector<GridPoint> g;
  g.reserve(static_cast<std::size_t>(n) * n);
  for (double u : x)
    for (double v : x) g.push_back({u, v});
  return g;
}

std::vector<double> eval_grid(const std::function<double(double, double)>& kernel, const std::vector<GridPoint>& grid,
                              Exec exec) {
  const long n = static_cast<long>(grid.size());
  std::vector<double> out(grid.size());
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) out[i] = kernel(grid[i].u, grid[i].v);
    return out;
  }
  // Exceptions may not cross the parallel region; keep the first message.
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = kernel(grid[i].u, grid[i].v);
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw Error(error);
  return out;
}

namespace {

std::vector<double> distinct_coordinates(const std::vector<GridPoint>& grid) {
  std::vector<double> z;
  for (const auto& p : grid) {
    z.push_back(p.u);
    z.push_back(p.v);
  }
  std::sort(z.begin(), z.end());
  z.erase(std::unique(z.begin(), z.end()), z.end());
  return z;
}

std::size_t index_of(const std::vector<double>& z, double x) {
  return static_cast<std::size_t>(std::lower_bound(z.begin(), z.end(), x) - z.begin());
}

template <class F>
void for_each_index(long n, Exec exec, F f) {
  if (exec == Exec::serial) {
    for (long i = 0; i < n; ++i) f(i);
    return;
  }
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (const std::exception& e) {
#pragma omp critical
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw Error(error);
}

}  // namespace

std::vector<double> k_crit_grid(const CritKernelContext& ctx, const std::vector<GridPoint>& grid, Exec exec) {
  const auto z = distinct_coordinates(grid);
  std::vector<PsiValue> psi(z.size());
  for_each_index(static_cast<long>(z.size()), exec,
                 [&](long i) { psi[i] = psi_eval(*ctx.hm, z[i], ctx.s, ctx.psi); });
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& p = grid[i];
    const double r = k_crit_ratio(p.u, psi[index_of(z, p.u)], p.v, psi[index_of(z, p.v)]);
    out[i] = std::isnan(r) ? k_crit(ctx, p.u, p.v) : r;
  }
  return out;
}

std::vector<CritIntegralResult> k_crit_integral_grid(const CritKernelContext& ctx, const std::vector<GridPoint>& grid,
                                                     Exec exec) {
  const auto& cfg = ctx.integral;
  const double bottom = std::isnan(cfg.sigma_min) ? ctx.hm->s_min() : std::max(cfg.sigma_min, ctx.hm->s_min());
  const auto z = distinct_coordinates(grid);
  const std::size_t np = grid.size();
  std::vector<std::size_t> iu(np), iv(np);
  for (std::size_t k = 0; k < np; ++k) {
    iu[k] = index_of(z, grid[k].u);
    iv[k] = index_of(z, grid[k].v);
  }

  const auto rule = gauss_legendre(cfg.order, 0.0, 1.0);
  std::vector<double> acc(np, 0.0), tail(np, std::numeric_limits<double>::infinity());
  double top = ctx.s;
  std::vector<double> env_prev;  // envelope at the lowest node of the previous panel
  double sigma_prev = 0.0;
  while (top > bottom) {
    const double lo = std::max(bottom, top - cfg.panel), width = top - lo;
    std::vector<std::vector<PsiValue>> psi(rule.nodes.size());
    for_each_index(static_cast<long>(rule.nodes.size()), exec, [&](long j) {
      psi[j] = psi_eval_from_origin(*ctx.hm, z, lo + width * rule.nodes[j], ctx.psi);
    });
    for (std::size_t k = 0; k < np; ++k) {
      double sum = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const auto& a = psi[j][iu[k]];
        const auto& b = psi[j][iv[k]];
        sum += rule.weights[j] * (a.phi1 * b.phi1 + a.phi2 * b.phi2);
      }
      acc[k] += width * sum / std::numbers::pi;
    }
    // Envelope at the lowest node (the rule nodes are increasing).
    const double sigma_low = lo + width * rule.nodes.front();
    std::vector<double> env(np);
    for (std::size_t k = 0; k < np; ++k) {
      const auto& a = psi.front()[iu[k]];
      const auto& b = psi.front()[iv[k]];
      env[k] = std::hypot(a.phi1, a.phi2) * std::hypot(b.phi1, b.phi2);
    }
    double worst = 0.0;
    if (!env_prev.empty()) {
      for (std::size_t k = 0; k < np; ++k) {
        const double kappa = std::log(env_prev[k] / env[k]) / (sigma_prev - sigma_low);
        // Tail below sigma_low plus the sliver between it and lo.
        tail[k] = kappa > 0.0 ? env[k] / (std::numbers::pi * kappa) : std::numeric_limits<double>::infinity();
        if (env[k] == 0.0) tail[k] = 0.0;
        worst = std::max(worst, tail[k]);
      }
    }
    top = lo;
    if (!env_prev.empty() && worst <= cfg.tail_tol) break;
    env_prev = std::move(env);
    sigma_prev = sigma_low;
  }
  double worst = 0.0;
  for (double t : tail) worst = std::max(worst, t);
  if (!(worst <= cfg.tail_tol)) {
    std::ostringstream msg;
    msg << "critical kernel integral: tail bound " << worst << " at sigma = " << top << " exceeds " << cfg.tail_tol
        << "; use a smaller sigma_min (solve Hastings-McLeod further to the left)";
    throw TruncationError(msg.str());
  }
  std::vector<CritIntegralResult> out(np);
  for (std::size_t k = 0; k < np; ++k) out[k] = {acc[k], tail[k], top};
  return out;
}

}  // namespace rmtlab
