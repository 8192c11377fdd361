#include "rmtlab/painleve2.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "rmtlab/airy.hpp"
#include "rmtlab/errors.hpp"

namespace rmtlab {

namespace {

// Chebyshev-Lobatto nodes on [lo, hi] in increasing order, with barycentric
// weights and the first-derivative matrix.
struct ChebDomain {
  double lo, hi;
  Eigen::VectorXd x, w;
  Eigen::MatrixXd D, D2;

  ChebDomain(double lo_, double hi_, int n) : lo(lo_), hi(hi_), x(n + 1), w(n + 1), D(n + 1, n + 1) {
    for (int j = 0; j <= n; ++j) {
      x[j] = 0.5 * (lo + hi) - 0.5 * (hi - lo) * std::cos(std::numbers::pi * j / n);
      w[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
    }
    for (int i = 0; i <= n; ++i) {
      double diag = 0.0;
      for (int j = 0; j <= n; ++j) {
        if (i == j) continue;
        D(i, j) = (w[j] / w[i]) / (x[i] - x[j]);
        diag -= D(i, j);
      }
      D(i, i) = diag;
    }
    D2 = D * D;
  }

  int size() const { return static_cast<int>(x.size()); }

  double interpolate(const Eigen::VectorXd& f, double t) const {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < size(); ++j) {
      const double d = t - x[j];
      if (d == 0.0) return f[j];
      num += w[j] / d * f[j];
      den += w[j] / d;
    }
    return num / den;
  }
};

struct Collocation {
  std::vector<ChebDomain> doms;
  Eigen::VectorXd Q;
  int iterations = 0;
  double residual = 0.0;
  double offmesh = 0.0;

  int m() const { return doms.front().size(); }
  int domain_of(double s) const {
    for (std::size_t d = 0; d + 1 < doms.size(); ++d)
      if (s <= doms[d].hi) return static_cast<int>(d);
    return static_cast<int>(doms.size()) - 1;
  }
  Eigen::VectorXd segment(int d) const { return Q.segment(d * m(), m()); }
};

double initial_guess(double s) {
  const double ai = airy(std::clamp(s, -30.0, 30.0)).ai;
  return std::sqrt(std::max(-s / 2.0, 0.0) + ai * ai);
}

// Residual vector and Jacobian of the collocation system.
void assemble(const Collocation& c, double left_bc, double right_bc, Eigen::VectorXd& F, Eigen::MatrixXd* J) {
  const int m = c.m(), K = static_cast<int>(c.doms.size()), total = m * K;
  F.setZero(total);
  if (J) J->setZero(total, total);
  int row = 0;
  for (int d = 0; d < K; ++d) {
    const auto& dom = c.doms[d];
    const Eigen::VectorXd q = c.segment(d);
    const Eigen::VectorXd q2 = dom.D2 * q;
    for (int i = 1; i + 1 < m; ++i) {
      const double s = dom.x[i];
      F[row] = q2[i] - s * q[i] - 2.0 * q[i] * q[i] * q[i];
      if (J) {
        J->block(row, d * m, 1, m) = dom.D2.row(i);
        (*J)(row, d * m + i) -= s + 6.0 * q[i] * q[i];
      }
      ++row;
    }
  }
  // Outer boundary conditions.
  F[row] = c.Q[0] - left_bc;
  if (J) (*J)(row, 0) = 1.0;
  ++row;
  F[row] = c.Q[total - 1] - right_bc;
  if (J) (*J)(row, total - 1) = 1.0;
  ++row;
  // Continuity of q and q' across interfaces.
  for (int d = 0; d + 1 < K; ++d) {
    const int a = d * m + (m - 1), b = (d + 1) * m;
    F[row] = c.Q[a] - c.Q[b];
    if (J) {
      (*J)(row, a) = 1.0;
      (*J)(row, b) = -1.0;
    }
    ++row;
    const auto& L = c.doms[d];
    const auto& R = c.doms[d + 1];
    F[row] = L.D.row(m - 1).dot(c.segment(d)) - R.D.row(0).dot(c.segment(d + 1));
    if (J) {
      J->block(row, d * m, 1, m) = L.D.row(m - 1);
      J->block(row, (d + 1) * m, 1, m) -= R.D.row(0);
    }
    ++row;
  }
}

double ode_rows_norm(const Collocation& c, const Eigen::VectorXd& F) {
  const int rows = static_cast<int>(c.doms.size()) * (c.m() - 2);
  return F.head(rows).lpNorm<Eigen::Infinity>();
}

Collocation solve_collocation(const HastingsMcLeodOptions& o, int order, const Collocation* warm) {
  Collocation c;
  const double width = (o.s_max - o.s_min) / o.domains;
  for (int d = 0; d < o.domains; ++d) c.doms.emplace_back(o.s_min + d * width, o.s_min + (d + 1) * width, order);
  const int m = c.m();
  c.Q.resize(m * o.domains);
  for (int d = 0; d < o.domains; ++d)
    for (int i = 0; i < m; ++i) {
      const double s = c.doms[d].x[i];
      c.Q[d * m + i] = warm ? warm->doms[d].interpolate(warm->segment(d), s) : initial_guess(s);
    }

  const double left_bc = hastings_mcleod_left_asymptote(o.s_min);
  const double right_bc = airy(o.s_max).ai;
  Eigen::VectorXd F;
  Eigen::MatrixXd J;
  assemble(c, left_bc, right_bc, F, &J);
  double fnorm = F.lpNorm<Eigen::Infinity>();
  for (int it = 1; it <= o.max_newton; ++it) {
    const Eigen::VectorXd delta = J.partialPivLu().solve(F);
    double lambda = 1.0;
    Eigen::VectorXd Q0 = c.Q, Ftrial;
    for (;;) {
      c.Q = Q0 - lambda * delta;
      assemble(c, left_bc, right_bc, Ftrial, nullptr);
      const double tn = Ftrial.lpNorm<Eigen::Infinity>();
      if (std::isfinite(tn) && (tn < fnorm || tn < 1e-13)) {
        fnorm = tn;
        break;
      }
      lambda *= 0.5;
      if (lambda < 1.0 / 1024)
        throw ConvergenceError("hastings-mcleod: damped Newton stalled at order " + std::to_string(order) +
                               "; try a denser mesh (more domains)");
    }
    c.iterations = it;
    assemble(c, left_bc, right_bc, F, &J);
    if (delta.lpNorm<Eigen::Infinity>() * lambda < 1e-14 * (1.0 + c.Q.lpNorm<Eigen::Infinity>())) break;
    if (it == o.max_newton)
      throw ConvergenceError("hastings-mcleod: Newton did not converge; try a denser mesh (more domains)");
  }
  c.residual = ode_rows_norm(c, F);

  // Residual of the polynomial interpolant between collocation points.
  double off = 0.0;
  for (int d = 0; d < o.domains; ++d) {
    const auto& dom = c.doms[d];
    const Eigen::VectorXd q = c.segment(d), q2 = dom.D2 * q;
    for (int i = 0; i + 1 < m; ++i) {
      const double s = 0.5 * (dom.x[i] + dom.x[i + 1]);
      const double qv = dom.interpolate(q, s), q2v = dom.interpolate(q2, s);
      off = std::max(off, std::abs(q2v - s * qv - 2.0 * qv * qv * qv));
    }
  }
  c.offmesh = off;
  return c;
}

struct HermiteCoeffs {
  double c[6];
};

HermiteCoeffs quintic(double h, double y0, double d0, double s0, double y1, double d1, double s1) {
  HermiteCoeffs k;
  k.c[0] = y0;
  k.c[1] = h * d0;
  k.c[2] = 0.5 * h * h * s0;
  const double D0 = y1 - (k.c[0] + k.c[1] + k.c[2]);
  const double D1 = h * d1 - (k.c[1] + 2.0 * k.c[2]);
  const double D2 = h * h * s1 - 2.0 * k.c[2];
  k.c[3] = 10.0 * D0 - 4.0 * D1 + 0.5 * D2;
  k.c[4] = -15.0 * D0 + 7.0 * D1 - D2;
  k.c[5] = 6.0 * D0 - 3.0 * D1 + 0.5 * D2;
  return k;
}

double pII_rhs(double s, double q) { return s * q + 2.0 * q * q * q; }

}  // namespace

double hastings_mcleod_left_asymptote(double s) {
  if (s >= 0.0) throw DomainError("left asymptote needs s < 0");
  return std::sqrt(-s / 2.0) * (1.0 + 1.0 / (8.0 * s * s * s));
}

HastingsMcLeodSolution::HastingsMcLeodSolution(std::vector<double> s_grid, std::vector<double> q,
                                               std::vector<double> qp, double tol)
    : s_(std::move(s_grid)), q_(std::move(q)), qp_(std::move(qp)), tol_(tol) {
  if (s_.size() < 2 || q_.size() != s_.size() || qp_.size() != s_.size())
    throw InvalidParameter("hastings-mcleod table: inconsistent sizes");
  for (std::size_t i = 1; i < s_.size(); ++i)
    if (!(s_[i] > s_[i - 1])) throw InvalidParameter("hastings-mcleod table: s grid not increasing");
}

HastingsMcLeodSolution::Value HastingsMcLeodSolution::eval(double s) const {
  if (!(s >= s_.front() && s <= s_.back()))
    throw DomainError("s = " + std::to_string(s) + " outside the Hastings-McLeod grid");
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  std::size_t i = (it == s_.begin()) ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
  if (i + 1 >= s_.size()) i = s_.size() - 2;
  if (s == s_[i]) return {q_[i], qp_[i], pII_rhs(s, q_[i])};
  const double h = s_[i + 1] - s_[i];
  const auto k = quintic(h, q_[i], qp_[i], pII_rhs(s_[i], q_[i]), q_[i + 1], qp_[i + 1], pII_rhs(s_[i + 1], q_[i + 1]));
  const double t = (s - s_[i]) / h;
  const auto& c = k.c;
  const double v = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
  const double d = c[1] + t * (2 * c[2] + t * (3 * c[3] + t * (4 * c[4] + t * 5 * c[5])));
  const double dd = 2 * c[2] + t * (6 * c[3] + t * (12 * c[4] + t * 20 * c[5]));
  return {v, d / h, dd / (h * h)};
}

double HastingsMcLeodSolution::residual(double s) const {
  const auto v = eval(s);
  return std::abs(v.qpp - pII_rhs(s, v.q));
}

HastingsMcLeodSolution solve_hastings_mcleod(double s_min, double s_max, double tol) {
  HastingsMcLeodOptions o;
  o.s_min = s_min;
  o.s_max = s_max;
  o.tol = tol;
  return solve_hastings_mcleod(o);
}

HastingsMcLeodSolution solve_hastings_mcleod(const HastingsMcLeodOptions& opts) {
  HastingsMcLeodOptions o = opts;
  if (o.domains == 0) o.domains = static_cast<int>(std::ceil(o.s_max - o.s_min));
  if (!(o.s_min <= -8.0) || !(o.s_max >= 6.0) || !(o.s_max <= 30.0))
    throw InvalidParameter("solve_hastings_mcleod needs s_min <= -8 and 6 <= s_max <= 30");
  if (!(o.tol > 0.0) || o.domains < 1 || o.initial_order < 4 || !(o.table_step > 0.0))
    throw InvalidParameter("solve_hastings_mcleod: bad options");

  Collocation col;
  bool ok = false;
  for (int order = o.initial_order; order <= o.max_order; order *= 2) {
    col = solve_collocation(o, order, ok || order != o.initial_order ? &col : nullptr);
    ok = true;
    if (col.residual <= o.tol && col.offmesh <= o.tol) break;
    if (order * 2 > o.max_order) {
      std::ostringstream msg;
      msg << "hastings-mcleod: tolerance " << o.tol << " not reached (collocation residual " << col.residual
          << ", off-mesh " << col.offmesh << " at order " << order << ")";
      throw AccuracyError(msg.str());
    }
  }

  // The table residual is truncation-limited for large steps and limited by
  // rounding in the node data (amplified by 1/h^2 in q'') for small ones, so
  // a few steps around the requested one are tried.
  double best = std::numeric_limits<double>::infinity();
  for (double factor : {1.0, 0.5, 2.0, 0.25}) {
    const double step = o.table_step * factor;
    const int n = static_cast<int>(std::ceil((o.s_max - o.s_min) / step));
    std::vector<double> s(n + 1), q(n + 1), qp(n + 1);
    for (int i = 0; i <= n; ++i) {
      s[i] = (i == n) ? o.s_max : o.s_min + (o.s_max - o.s_min) * i / n;
      const int d = col.domain_of(s[i]);
      const auto& dom = col.doms[d];
      const Eigen::VectorXd seg = col.segment(d);
      q[i] = dom.interpolate(seg, s[i]);
      qp[i] = dom.interpolate(dom.D * seg, s[i]);
    }
    HastingsMcLeodSolution hm(std::move(s), std::move(q), std::move(qp), o.tol);
    double worst = 0.0;
    const auto& g = hm.s_grid();
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      worst = std::max(worst, hm.residual(g[i] + 0.5 * (g[i + 1] - g[i])));
      worst = std::max(worst, hm.residual(g[i] + 0.21 * (g[i + 1] - g[i])));
    }
    best = std::min(best, worst);
    if (worst <= o.tol) {
      hm.diagnostics = {col.m() - 1, col.iterations, col.residual, std::max(col.offmesh, worst)};
      return hm;
    }
  }
  std::ostringstream msg;
  msg << "hastings-mcleod: table interpolant residual " << best << " exceeds tolerance " << o.tol;
  throw AccuracyError(msg.str());
}

QValue q_at(const HastingsMcLeodSolution& hm, double s) {
  const auto v = hm.eval(s);
  return {v.q, v.r};
}

void write_hastings_mcleod(std::ostream& os, const HastingsMcLeodSolution& hm) {
  char buf[128];
  os << "# rmtlab hastings-mcleod table\n";
  std::snprintf(buf, sizeof buf, "# s_min = %.17g\n# s_max = %.17g\n# tol = %.17g\n", hm.s_min(), hm.s_max(),
                hm.tolerance());
  os << buf << "s,q,qp\n";
  for (std::size_t i = 0; i < hm.s_grid().size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", hm.s_grid()[i], hm.q()[i], hm.qp()[i]);
    os << buf;
  }
  if (!os) throw IoError("failed writing Hastings-McLeod table");
}

HastingsMcLeodSolution read_hastings_mcleod(std::istream& is) {
  std::string line;
  double tol = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> s, q, qp;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos && line.find("tol") != std::string::npos && line.find("tol") < eq)
        tol = std::stod(line.substr(eq + 1));
      continue;
    }
    if (line.rfind("s,", 0) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a, b, c;
    if (!(row >> a >> b >> c)) throw IoError("malformed Hastings-McLeod row: " + line);
    s.push_back(a);
    q.push_back(b);
    qp.push_back(c);
  }
  if (!std::isfinite(tol)) throw IoError("Hastings-McLeod table lacks a tol header");
  try {
    return HastingsMcLeodSolution(std::move(s), std::move(q), std::move(qp), tol);
  } catch (const InvalidParameter& e) {
    throw IoError(e.what());
  }
}

// ---------------------------------------------------------------------------

Mat2 psi_zeta_matrix(double zeta, double s, double q, double r) {
  const double theta = 4.0 * zeta * zeta + s + 2.0 * q * q;
  return {4.0 * zeta * q, theta + 2.0 * r, -theta + 2.0 * r, -4.0 * zeta * q};
}

Mat2 psi_s_matrix(double zeta, double q) { return {q, zeta, -zeta, -q}; }

FormalSeries psi_formal_series(double s, double q, double r, int terms) {
  using C = std::complex<double>;
  const C I(0.0, 1.0);
  FormalSeries fs{s, q, r, std::vector<C>(terms), std::vector<C>(terms), std::vector<C>(terms), std::vector<C>(terms)};
  auto& a = fs.a;
  auto& b = fs.b;
  auto& c = fs.c;
  auto& d = fs.d;
  auto at = [](const std::vector<C>& v, int k) { return k >= 0 ? v[k] : C(0.0); };
  a[0] = d[0] = 1.0;
  const double p = s + q * q;
  for (int k = 1; k < terms; ++k) {
    b[k] = (double(k - 3) * at(b, k - 3) - 2.0 * I * p * at(b, k - 2) + 4.0 * q * at(d, k - 1) +
            2.0 * I * r * at(d, k - 2)) /
           (8.0 * I);
    c[k] = (double(k - 3) * at(c, k - 3) + 2.0 * I * p * at(c, k - 2) + 4.0 * q * at(a, k - 1) -
            2.0 * I * r * at(a, k - 2)) /
           (-8.0 * I);
    a[k] = (q * p * c[k] - I * q * double(k - 1) / 2.0 * at(c, k - 1) + I * r * p / 2.0 * at(c, k - 1) -
            I * r * r / 2.0 * at(a, k - 1) + r * double(k - 2) / 4.0 * at(c, k - 2)) /
           double(k);
    d[k] = (q * p * b[k] + I * q * double(k - 1) / 2.0 * at(b, k - 1) - I * r * p / 2.0 * at(b, k - 1) +
            I * r * r / 2.0 * at(d, k - 1) + r * double(k - 2) / 4.0 * at(b, k - 2)) /
           double(k);
  }
  return fs;
}

SeriesValue psi_asymptotic(const FormalSeries& fs, double zeta) {
  using C = std::complex<double>;
  const double theta = 4.0 * zeta * zeta * zeta / 3.0 + fs.s * zeta;
  const C em = std::polar(1.0, -theta), ep = std::polar(1.0, theta);
  // For large |s| the early terms grow (an expanded phase correction) before
  // the series starts to decrease, so truncate at the globally smallest term.
  const std::size_t n = fs.a.size();
  std::vector<C> t1(n), t2(n);
  double zpow = 1.0, smallest = std::numeric_limits<double>::infinity();
  std::size_t cut = n - 1;
  for (std::size_t k = 0; k < n; ++k) {
    t1[k] = (fs.a[k] * em + fs.b[k] * ep) * zpow;
    t2[k] = (fs.c[k] * em + fs.d[k] * ep) * zpow;
    const double size = std::abs(t1[k]) + std::abs(t2[k]);
    if (k > 0 && size < smallest) {
      smallest = size;
      cut = k;
    }
    zpow /= zeta;
  }
  C p1 = 0.0, p2 = 0.0;
  for (std::size_t k = 0; k < cut; ++k) {
    p1 += t1[k];
    p2 += t2[k];
  }
  const C phi1 = 0.5 * (p1 + p2);
  const C phi2 = (p1 - p2) / C(0.0, 2.0);
  return {phi1.real(), phi2.real(), smallest};
}

double psi_matching_point(const FormalSeries& fs, double start, const PsiOptions& o) {
  double z = std::max(std::abs(start), 1.0);
  for (; z < 200.0; z *= 1.1)
    if (psi_asymptotic(fs, z).error <= o.series_tol) return z;
  throw IntegrationError("psi: formal series does not reach series_tol below |zeta| = 200");
}

namespace {

namespace odeint = boost::numeric::odeint;
using State2 = std::array<double, 2>;
using State4 = std::array<double, 4>;

template <class State, class System>
void integrate(System sys, State& x, double from, double to, const PsiOptions& o) {
  if (from == to) return;
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(o.abs_tol, o.rel_tol);
  const double dt0 = (to > from ? 1.0 : -1.0) * 0.05 / (1.0 + from * from);
  try {
    odeint::integrate_adaptive(stepper, sys, x, from, to, dt0);
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("psi integration failed: ") + e.what());
  }
  for (double v : x)
    if (!std::isfinite(v)) throw IntegrationError("psi integration produced a non-finite value");
}

struct PsiSystem {
  double s, q, r;
  void operator()(const State2& x, State2& dx, double z) const {
    const Mat2 A = psi_zeta_matrix(z, s, q, r);
    dx[0] = A.a11 * x[0] + A.a12 * x[1];
    dx[1] = A.a21 * x[0] + A.a22 * x[1];
  }
};

void check_psi_args(const HastingsMcLeodSolution& hm, double zeta, double s, const PsiOptions& o) {
  if (!(std::abs(zeta) <= o.zeta_cap)) throw DomainError("|zeta| exceeds zeta_cap");
  if (!(s >= hm.s_min() && s <= hm.s_max())) throw DomainError("s outside the Hastings-McLeod grid");
}

PsiValue finish(const PsiSystem& sys, const State2& x, double zeta) {
  const Mat2 A = psi_zeta_matrix(zeta, sys.s, sys.q, sys.r);
  return {x[0], x[1], A.a11 * x[0] + A.a12 * x[1], A.a21 * x[0] + A.a22 * x[1]};
}

}  // namespace

PsiValue psi_eval(const HastingsMcLeodSolution& hm, double zeta, double s, const PsiOptions& o) {
  check_psi_args(hm, zeta, s, o);
  const auto qr = q_at(hm, s);
  const PsiSystem sys{s, qr.q, qr.r};
  const auto fs = psi_formal_series(s, qr.q, qr.r, o.series_terms);
  const double z0 = std::copysign(psi_matching_point(fs, std::max(std::abs(zeta), o.zeta_asym), o),
                                  zeta == 0.0 ? 1.0 : zeta);
  const auto [p1, p2, err] = psi_asymptotic(fs, z0);
  State2 x{p1, p2};
  integrate(sys, x, z0, zeta, o);
  return finish(sys, x, zeta);
}

PsiValue psi_eval_from_right(const HastingsMcLeodSolution& hm, double zeta, double s, const PsiOptions& o) {
  check_psi_args(hm, zeta, s, o);
  const auto qr = q_at(hm, s);
  const PsiSystem sys{s, qr.q, qr.r};
  const auto fs = psi_formal_series(s, qr.q, qr.r, o.series_terms);
  const double z0 = psi_matching_point(fs, std::max(zeta, o.zeta_asym), o);
  const auto [p1, p2, err] = psi_asymptotic(fs, z0);
  State2 x{p1, p2};
  integrate(sys, x, z0, zeta, o);
  return finish(sys, x, zeta);
}

std::vector<PsiValue> psi_eval_from_origin(const HastingsMcLeodSolution& hm, const std::vector<double>& zetas,
                                           double s, const PsiOptions& o) {
  for (double z : zetas) check_psi_args(hm, z, s, o);
  if (!(s >= hm.s_min() && s <= hm.s_max())) throw DomainError("s outside the Hastings-McLeod grid");
  const auto qr = q_at(hm, s);
  const PsiSystem sys{s, qr.q, qr.r};

  std::vector<double> times{0.0};
  for (double z : zetas) times.push_back(std::abs(z));
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const auto fs = psi_formal_series(s, qr.q, qr.r, o.series_terms);
  const double z_match = psi_matching_point(fs, std::max(times.back(), o.zeta_asym), o);
  if (times.back() < z_match) times.push_back(z_match);

  std::vector<State2> at(times.size());
  State2 x{1.0, 0.0};
  std::size_t idx = 0;
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State2>>(o.abs_tol, o.rel_tol);
  try {
    if (times.size() > 1)
      odeint::integrate_times(stepper, sys, x, times.begin(), times.end(), 0.01,
                              [&](const State2& y, double) { at[idx++] = y; });
    else
      at[0] = x;
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("psi integration failed: ") + e.what());
  }
  const State2& y = at.back();
  if (!std::isfinite(y[0]) || !std::isfinite(y[1])) throw IntegrationError("psi integration overflowed");
  const auto [p1, p2, err] = psi_asymptotic(fs, z_match);
  const double scale = (p1 * y[0] + p2 * y[1]) / (y[0] * y[0] + y[1] * y[1]);

  std::vector<PsiValue> out;
  out.reserve(zetas.size());
  for (double z : zetas) {
    const std::size_t k = std::lower_bound(times.begin(), times.end(), std::abs(z)) - times.begin();
    const double sign = z < 0.0 ? -1.0 : 1.0;
    const State2 v{scale * at[k][0], sign * scale * at[k][1]};
    out.push_back(finish(sys, v, z));
  }
  return out;
}

double psi_s_derivative_check(const HastingsMcLeodSolution& hm, double zeta, double s, double h,
                              const PsiOptions& o) {
  if (!(h > 0.0) || s - h < hm.s_min() || s + h > hm.s_max())
    throw DomainError("psi_s_derivative_check: s +- h outside the grid");
  const PsiValue plus = psi_eval(hm, zeta, s + h, o);
  const PsiValue minus = psi_eval(hm, zeta, s - h, o);
  const PsiValue mid = psi_eval(hm, zeta, s, o);
  const Mat2 B = psi_s_matrix(zeta, q_at(hm, s).q);
  const double e1 = (plus.phi1 - minus.phi1) / (2 * h) - (B.a11 * mid.phi1 + B.a12 * mid.phi2);
  const double e2 = (plus.phi2 - minus.phi2) / (2 * h) - (B.a21 * mid.phi1 + B.a22 * mid.phi2);
  return std::max(std::abs(e1), std::abs(e2));
}

DeterminantDrift psi_determinant_drift(const HastingsMcLeodSolution& hm, double s, double zeta_from, double zeta_to,
                                       const PsiOptions& o) {
  check_psi_args(hm, zeta_from, s, o);
  check_psi_args(hm, zeta_to, s, o);
  const auto qr = q_at(hm, s);
  const PsiSystem sys{s, qr.q, qr.r};
  FormalSeries fs = psi_formal_series(s, qr.q, qr.r, o.series_terms);
  const auto [u1, u2, e1] = psi_asymptotic(fs, zeta_from);
  // Second column: the formal solution acting on (i e^{-i theta}, -i e^{i theta}),
  // which is again a real pair, close to (sin theta, cos theta).
  FormalSeries fs2 = fs;
  const std::complex<double> I(0.0, 1.0);
  for (std::size_t k = 0; k < fs2.a.size(); ++k) {
    fs2.a[k] *= I;
    fs2.c[k] *= I;
    fs2.b[k] *= -I;
    fs2.d[k] *= -I;
  }
  const auto [v1, v2, e2] = psi_asymptotic(fs2, zeta_from);
  State4 x{u1, u2, v1, v2};
  auto sys4 = [&](const State4& y, State4& dy, double z) {
    const Mat2 A = psi_zeta_matrix(z, sys.s, sys.q, sys.r);
    dy[0] = A.a11 * y[0] + A.a12 * y[1];
    dy[1] = A.a21 * y[0] + A.a22 * y[1];
    dy[2] = A.a11 * y[2] + A.a12 * y[3];
    dy[3] = A.a21 * y[2] + A.a22 * y[3];
  };
  const double det0 = x[0] * x[3] - x[1] * x[2];
  double worst = 0.0;
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State4>>(o.abs_tol, o.rel_tol);
  const double dt0 = (zeta_to > zeta_from ? 1.0 : -1.0) * 0.05 / (1.0 + zeta_from * zeta_from);
  try {
    odeint::integrate_adaptive(stepper, sys4, x, zeta_from, zeta_to, dt0, [&](const State4& y, double) {
      worst = std::max(worst, std::abs(y[0] * y[3] - y[1] * y[2] - det0));
    });
  } catch (const std::exception& e) {
    throw IntegrationError(std::string("determinant integration failed: ") + e.what());
  }
  const double span = std::abs(zeta_to - zeta_from);
  return {det0, worst, span > 0 ? worst / span : 0.0};
}

}  // namespace rmtlab
