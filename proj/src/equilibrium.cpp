#include "rmtlab/equilibrium.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "rmtlab/errors.hpp"
#include "rmtlab/quadrature.hpp"

namespace rmtlab {

using cplx = std::complex<double>;
using std::numbers::pi;

Support::Support(double a_, double b_) : a(a_), b(b_) {
  if (!(a < b)) throw DegenerateSupport("support: need a < b");
}

namespace {

// Laurent coefficients of 1/sqrt(1 + alpha y + beta y^2) = sum_k e_k y^k,
// together with their partial derivatives in alpha and beta.
struct LaurentSeries {
  std::vector<double> e, de_dalpha, de_dbeta;
};

LaurentSeries inverse_sqrt_series(double alpha, double beta, int terms) {
  LaurentSeries s;
  s.e.assign(terms, 0.0);
  s.de_dalpha.assign(terms, 0.0);
  s.de_dbeta.assign(terms, 0.0);
  s.e[0] = 1.0;
  for (int k = 0; k + 1 < terms; ++k) {
    const double ek = s.e[k];
    const double ekm = k > 0 ? s.e[k - 1] : 0.0;
    const double dak = s.de_dalpha[k], dakm = k > 0 ? s.de_dalpha[k - 1] : 0.0;
    const double dbk = s.de_dbeta[k], dbkm = k > 0 ? s.de_dbeta[k - 1] : 0.0;
    const double c1 = -(k + 0.5), c2 = -static_cast<double>(k);
    s.e[k + 1] = (c1 * alpha * ek + c2 * beta * ekm) / (k + 1);
    s.de_dalpha[k + 1] = (c1 * (ek + alpha * dak) + c2 * beta * dakm) / (k + 1);
    s.de_dbeta[k + 1] = (c1 * alpha * dbk + c2 * (ekm + beta * dbkm)) / (k + 1);
  }
  return s;
}

struct MomentSystem {
  std::array<double, 2> residual;
  std::array<std::array<double, 2>, 2> jacobian;  // d residual / d(a, b)
};

// With v = V'/(2t) = sum_j v_j z^j, the conditions G(z) = 1/z + O(z^-2) read
//   sum_j v_j e_j = 0,   sum_j v_j e_{j+1} = 1.
MomentSystem moment_system(const std::vector<double>& v, double a, double b) {
  const double alpha = -(a + b), beta = a * b;
  const auto s = inverse_sqrt_series(alpha, beta, static_cast<int>(v.size()) + 1);
  MomentSystem m{};
  double f1 = 0, f2 = -1.0, f1a = 0, f1b = 0, f2a = 0, f2b = 0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    f1 += v[j] * s.e[j];
    f2 += v[j] * s.e[j + 1];
    f1a += v[j] * s.de_dalpha[j];
    f1b += v[j] * s.de_dbeta[j];
    f2a += v[j] * s.de_dalpha[j + 1];
    f2b += v[j] * s.de_dbeta[j + 1];
  }
  m.residual = {f1, f2};
  // d alpha/da = -1, d beta/da = b; d alpha/db = -1, d beta/db = a.
  m.jacobian = {{{-f1a + b * f1b, -f1a + a * f1b}, {-f2a + b * f2b, -f2a + a * f2b}}};
  return m;
}

std::vector<double> poly_part_from_endpoints(const std::vector<double>& v, double a, double b) {
  const int deg_vp = static_cast<int>(v.size()) - 1;
  const auto s = inverse_sqrt_series(-(a + b), a * b, deg_vp + 1);
  std::vector<double> h(deg_vp, 0.0);  // degree deg_vp - 1 = deg V - 2
  for (int n = 0; n < deg_vp; ++n)
    for (int j = n + 1; j <= deg_vp; ++j) h[n] += v[j] * s.e[j - n - 1];
  return h;
}

double max_abs(const std::array<double, 2>& r) { return std::max(std::abs(r[0]), std::abs(r[1])); }

bool is_quartic_family(const Potential& p, double& g) {
  const auto c = p.coefficients();
  if (p.degree() != 4 || c[0] != 0.0 || c[1] != 0.0 || c[3] != 0.0) return false;
  g = 4.0 * c[4];
  return true;
}

std::array<double, 2> initial_endpoints(const Potential& p, double t) {
  double g = 0.0;
  if (is_quartic_family(p, g)) {
    const double r = 2.0 * std::pow(g, -0.25);
    return {-r, r};
  }
  // Support of the monomial field kappa x^{2m}: E_arcsine[x^{2m}] on [-R, R]
  // is R^{2m} binom(2m, m) / 4^m, and the second moment condition fixes R.
  const int m = p.degree() / 2;
  const double kappa = p.coefficients().back();
  double binom = 1.0;
  for (int i = 1; i <= m; ++i) binom *= static_cast<double>(m + i) / i;
  const double R = std::pow(t * std::pow(4.0, m) / (m * kappa * binom), 1.0 / (2 * m));
  return {-R, R};
}

}  // namespace

EquilibriumMeasure::EquilibriumMeasure(Potential potential, double t, Support support, std::vector<double> poly_part)
    : potential_(std::move(potential)), t_(t), support_(support), h_(std::move(poly_part)) {
  const auto rule = chebyshev_u_rule(static_cast<int>(h_.size()) + 32, support_.a, support_.b);
  mass_ = rule.integrate([&](double x) { return h(x); }) / pi;
}

double EquilibriumMeasure::h(double x) const { return horner<double>(h_, x); }
cplx EquilibriumMeasure::h(cplx z) const { return horner<cplx>(h_, z); }

double EquilibriumMeasure::density(double x) const { return density_jet(x).value; }

DensityJet EquilibriumMeasure::density_jet(double x) const {
  const double a = support_.a, b = support_.b;
  if (!(a <= x && x <= b))
    throw DomainError("density: x = " + std::to_string(x) + " outside support [" + std::to_string(a) + ", " +
                      std::to_string(b) + "]");
  double h0 = 0, h1 = 0, h2 = 0;
  for (auto it = h_.rbegin(); it != h_.rend(); ++it) {
    h2 = h2 * x + 2.0 * h1;
    h1 = h1 * x + h0;
    h0 = h0 * x + *it;
  }
  const double P = (x - a) * (b - x);
  const double g = std::sqrt(P);
  if (x == a || x == b) return {0.0, 0.0, 0.0};  // endpoint: derivatives blow up
  const double P1 = a + b - 2.0 * x;
  const double g1 = P1 / (2.0 * g);
  const double g2 = -1.0 / g - P1 * P1 / (4.0 * g * g * g);
  return {h0 * g / pi, (h1 * g + h0 * g1) / pi, (h2 * g + 2.0 * h1 * g1 + h0 * g2) / pi};
}

cplx EquilibriumMeasure::q(cplx z) const {
  const cplx hz = h(z);
  return hz * hz * (z - support_.a) * (z - support_.b);
}

EquilibriumMeasure solve_one_cut(const Potential& p, double t, const OneCutOptions& opts) {
  if (!(t > 0.0)) throw InvalidParameter("solve_one_cut: t must be positive");
  auto v = p.derivative_coefficients();
  for (double& c : v) c /= 2.0 * t;

  auto [a, b] = initial_endpoints(p, t);
  auto sys = moment_system(v, a, b);
  double res = max_abs(sys.residual);
  int iter = 0;
  for (; iter < opts.max_iterations && res > opts.residual_tol; ++iter) {
    const auto& J = sys.jacobian;
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (!std::isfinite(det) || det == 0.0) break;
    const double da = (J[1][1] * sys.residual[0] - J[0][1] * sys.residual[1]) / det;
    const double db = (-J[1][0] * sys.residual[0] + J[0][0] * sys.residual[1]) / det;
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 40; ++k, lambda *= 0.5) {
      const double na = a - lambda * da, nb = b - lambda * db;
      if (!(nb - na > opts.min_support_width)) continue;
      auto trial = moment_system(v, na, nb);
      const double tr = max_abs(trial.residual);
      if (std::isfinite(tr) && (tr < res || tr <= opts.residual_tol)) {
        a = na;
        b = nb;
        sys = trial;
        res = tr;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(res <= opts.residual_tol))
    throw NoOneCutSolution("solve_one_cut: endpoint Newton did not converge (residual " + std::to_string(res) +
                           " after " + std::to_string(iter) + " iterations)");
  if (!(b - a > opts.min_support_width)) throw DegenerateSupport("solve_one_cut: support collapsed");
  return EquilibriumMeasure(p, t, Support(a, b), poly_part_from_endpoints(v, a, b));
}

cplx q_t(const EquilibriumMeasure& em, cplx z) { return em.q(z); }

double density_psi_t(const EquilibriumMeasure& em, double x) { return em.density(x); }

double w_S(const Support& sup, double x) {
  if (!(sup.a < x && x < sup.b)) throw DomainError("w_S: x outside the open support interval");
  return 1.0 / (pi * std::sqrt((sup.b - x) * (x - sup.a)));
}

BuyarovRakhmanovResult buyarov_rakhmanov_check(const Potential& p, double x, double dt) {
  if (!(dt > 0.0 && dt < 1.0)) throw InvalidParameter("buyarov_rakhmanov_check: dt must lie in (0, 1)");
  const auto base = solve_one_cut(p, 1.0);
  const double tp = 1.0 + dt, tm = 1.0 - dt;
  const auto plus = solve_one_cut(p, tp);
  const auto minus = solve_one_cut(p, tm);
  const double fd = (tp * plus.density(x) - tm * minus.density(x)) / (tp - tm);
  return {fd, w_S(base.support(), x)};
}

IdentityCheck psiV_identity_check(const Potential& p, double x) {
  return psiV_identity_check(solve_one_cut(p, 1.0), x);
}

IdentityCheck psiV_identity_check(const EquilibriumMeasure& em, double x) {
  const Support& sup = em.support();
  const double w = w_S(sup, x);
  // (V'(x) - V'(y)) / (x - y) as an exact polynomial in y:
  // d_j = sum_{k > j} c_k x^{k-1-j} for V' = sum_k c_k y^k.
  const auto c = em.potential().derivative_coefficients();
  std::vector<double> d(c.size() > 1 ? c.size() - 1 : 1, 0.0);
  for (int j = static_cast<int>(c.size()) - 2; j >= 0; --j) {
    const double next = (j + 1 < static_cast<int>(d.size())) ? d[j + 1] : 0.0;
    d[j] = c[j + 1] + x * next;
  }
  auto integral = [&](int n) {
    return arcsine_rule(n, sup.a, sup.b).integrate([&](double y) { return horner<double>(d, y); });
  };
  const int n = static_cast<int>(d.size()) + 16;
  const double i1 = integral(n), i2 = integral(2 * n);
  if (std::abs(i1 - i2) > 1e-12 * (1.0 + std::abs(i2)))
    throw AccuracyError("psiV_identity_check: arcsine quadrature did not converge");
  return {em.density(x), i2 / (2.0 * pi * pi * w)};
}

CriticalData critical_constants(const Potential& p, double x_star, double L, double tol) {
  return critical_constants(solve_one_cut(p, 1.0), x_star, L, tol);
}

CriticalData critical_constants(const EquilibriumMeasure& em, double x_star, double L, double tol) {
  const Support& sup = em.support();
  if (!(sup.a < x_star && x_star < sup.b)) throw NotCritical("critical_constants: x* is not interior to the support");
  const auto jet = em.density_jet(x_star);
  if (std::abs(jet.value) > tol || std::abs(jet.first) > tol || !(jet.second > 0.0))
    throw NotCritical("critical_constants: density at x* = " + std::to_string(x_star) +
                      " is not a quadratic zero (psi = " + std::to_string(jet.value) +
                      ", psi' = " + std::to_string(jet.first) + ", psi'' = " + std::to_string(jet.second) + ")");
  CriticalData cd{};
  cd.x_star = x_star;
  cd.psiV_second = jet.second;
  cd.c = pi * jet.second / 8.0;
  cd.w_at_xstar = w_S(sup, x_star);
  cd.L = L;
  cd.s = s_from_L(cd, L);
  return cd;
}

double s_from_L(const CriticalData& cd, double L) { return L * pi / std::cbrt(cd.c) * cd.w_at_xstar; }

double conformal_disk_radius(const EquilibriumMeasure& em, double x_star) {
  const Support& sup = em.support();
  return 0.5 * std::min(x_star - sup.a, sup.b - x_star);
}

cplx conformal_map_f(const Potential& p, double x_star, cplx z) {
  return conformal_map_f(solve_one_cut(p, 1.0), x_star, z);
}

cplx conformal_map_f(const EquilibriumMeasure& em, double x_star, cplx z) {
  const double rho = conformal_disk_radius(em, x_star);
  const cplx dz = z - x_star;
  if (!(std::abs(dz) < rho)) throw DomainError("conformal_map_f: z outside the disk around x*");
  if (dz == cplx(0.0)) return 0.0;
  const Support& sup = em.support();
  // (-q_V(y))^{1/2} = h(y) sqrt((y-a)(b-y)); inside the disk both factors of
  // the radicand have |arg| < pi/2, so the principal root is analytic there.
  static const QuadratureRule rule = gauss_legendre(40, 0.0, 1.0);
  const cplx integral = rule.integrate([&](double tau) {
    const cplx y = x_star + tau * dz;
    return em.h(y) * std::sqrt((y - sup.a) * (sup.b - y));
  }) * dz;
  const cplx ratio = 0.75 * integral / (dz * dz * dz);
  if (!(ratio.real() > 0.0)) throw DomainError("conformal_map_f: cube-root branch leaves the principal sheet");
  return dz * std::pow(ratio, 1.0 / 3.0);
}

}  // namespace rmtlab
