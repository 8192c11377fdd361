#include "rmtlab/limit_kernels.hpp"

#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"
#include "rmtlab/grid.hpp"

namespace rmtlab {

namespace {
constexpr double kPi = std::numbers::pi;
// Below this separation the ratio forms lose digits to cancellation and the
// diagonal at the midpoint is used instead (error O(|u - v|^2)).
constexpr double kConfluent = 1e-5;
}  // namespace

double k_bulk(double u, double v) {
  const double x = kPi * (u - v);
  return x == 0.0 ? 1.0 : std::sin(x) / x;
}

double k_edge(double u, double v) {
  if (std::abs(u - v) < kConfluent) {
    const double m = 0.5 * (u + v);
    const auto a = airy(m);
    return a.aip * a.aip - m * a.ai * a.ai;
  }
  const auto a = airy(u), b = airy(v);
  return (a.ai * b.aip - a.aip * b.ai) / (u - v);
}

CritKernelContext::CritKernelContext(const HastingsMcLeodSolution& h, double s_, PsiOptions p, CritIntegralConfig c)
    : hm(&h), s(s_), psi(p), integral(c) {
  if (!(s >= h.s_min() && s <= h.s_max())) throw DomainError("critical kernel: s outside the Hastings-McLeod grid");
  if (!(integral.panel > 0.0) || integral.order < 2 || !(integral.tail_tol > 0.0))
    throw InvalidParameter("critical kernel: bad integration settings");
}

double k_crit_ratio(double u, const PsiValue& pu, double v, const PsiValue& pv) {
  if (std::abs(u - v) < kConfluent) return std::numeric_limits<double>::quiet_NaN();
  return (pu.phi1 * pv.phi2 - pu.phi2 * pv.phi1) / (kPi * (u - v));
}

double k_crit_diagonal(const PsiValue& p) { return (p.dphi1 * p.phi2 - p.dphi2 * p.phi1) / kPi; }

double k_crit(const CritKernelContext& ctx, double u, double v) {
  if (std::abs(u - v) < kConfluent) return k_crit_diagonal(psi_eval(*ctx.hm, 0.5 * (u + v), ctx.s, ctx.psi));
  return k_crit_ratio(u, psi_eval(*ctx.hm, u, ctx.s, ctx.psi), v, psi_eval(*ctx.hm, v, ctx.s, ctx.psi));
}

CritIntegralResult k_crit_integral_detail(const CritKernelContext& ctx, double u, double v) {
  return k_crit_integral_grid(ctx, {{u, v}}, Exec::serial).front();
}

double k_crit_integral(const CritKernelContext& ctx, double u, double v) {
  return k_crit_integral_detail(ctx, u, v).value;
}

}  // namespace rmtlab
