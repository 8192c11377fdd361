#include "rmtlab/orthopoly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "rmtlab/errors.hpp"
#include "rmtlab/quadrature.hpp"

namespace rmtlab {

double RecurrenceTable::scale() const { return 4.0 * std::sqrt(beta.back()); }

int resolved_node_count(int n_max, const QuadratureConfig& quad) {
  const int nodes = quad.nodes > 0 ? quad.nodes : std::max(16 * n_max, 600);
  if (nodes < 4 * n_max) throw InvalidParameter("build_recurrence: need at least 4 n_max quadrature nodes");
  return nodes;
}

namespace {

// Minimum of V on the real line, located on a sample grid and polished by
// Newton on V'.
double potential_minimum(const Potential& p) {
  double span = 1.0;
  const double v0 = p.value(0.0);
  while (p.value(span) < v0 + 1.0 || p.value(-span) < v0 + 1.0) span *= 2.0;
  double best_x = 0.0, best_v = v0;
  for (int i = 0; i <= 4000; ++i) {
    const double x = -span + 2.0 * span * i / 4000.0;
    const double v = p.value(x);
    if (v < best_v) {
      best_v = v;
      best_x = x;
    }
  }
  for (int it = 0; it < 30; ++it) {
    const double d2 = p.second_derivative(best_x);
    if (!(d2 > 0.0)) break;
    const double step = p.derivative(best_x) / d2;
    best_x -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return std::min(best_v, p.value(best_x));
}

}  // namespace

namespace {
RecurrenceTable lanczos(std::span<const double> x, std::span<const double> s, int n_max);
}

RecurrenceTable build_recurrence(const Potential& p, double N, int n_max, const QuadratureConfig& quad) {
  if (!(N > 0.0)) throw InvalidParameter("build_recurrence: N must be positive");
  if (n_max < 1) throw InvalidParameter("build_recurrence: n_max must be >= 1");
  const int nodes = resolved_node_count(n_max, quad);
  const double vmin = potential_minimum(p);

  // Smallest R with N (V(+-R) - vmin) - n_max log(1 + R^2) >= -log(cutoff).
  const double target = -std::log(quad.cutoff);
  auto excess = [&](double x) { return N * (p.value(x) - vmin) - n_max * std::log1p(x * x) - target; };
  auto edge = [&](double sign) {
    double lo = 0.0, hi = 1.0;
    while (excess(sign * hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
    }
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(sign * mid) < 0.0 ? lo : hi) = mid;
    }
    return hi;
  };
  // The bound above ignores the normalization of p_k, so it is only a
  // starting point: widen [-R, R] until phi_{n_max-1}, phi_{n_max} are
  // negligible at both ends.
  double R = std::max(edge(1.0), edge(-1.0));
  const int panels = (nodes + quad.order - 1) / quad.order;
  RecurrenceTable tab;
  std::vector<double> phi;
  for (int attempt = 0;; ++attempt) {
    const QuadratureRule rule = composite_gauss_legendre(panels, quad.order, -R, R);
    std::vector<double> sw(rule.size());
    for (std::size_t i = 0; i < sw.size(); ++i)
      sw[i] = std::sqrt(rule.weights[i]) * std::exp(-0.5 * N * (p.value(rule.nodes[i]) - vmin));
    tab = lanczos(rule.nodes, sw, n_max);
    tab.N = N;
    tab.log_beta0 -= N * vmin;
    double end_mass = 0.0;
    for (double x : {-R, R}) {
      weighted_polys(tab, p, n_max, x, phi);
      end_mass = std::max({end_mass, phi[n_max] * phi[n_max], phi[n_max - 1] * phi[n_max - 1]});
    }
    if (end_mass <= quad.cutoff) break;
    if (attempt == 40) throw InstabilityError("build_recurrence: polynomials do not decay inside any tried interval");
    R *= 1.1;
  }
  tab.interval_radius = R;
  tab.beta[0] = std::exp(tab.log_beta0);
  return tab;
}

RecurrenceTable discrete_recurrence(std::span<const double> x, std::span<const double> w, int n_max) {
  if (w.size() != x.size()) throw InvalidParameter("discrete_recurrence: node/weight size mismatch");
  std::vector<double> s(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= 0.0)) throw InvalidParameter("discrete_recurrence: negative weight");
    s[i] = std::sqrt(w[i]);
  }
  return lanczos(x, s, n_max);
}

namespace {

// Lanczos from square-root weights, which stay representable where the
// weights themselves underflow (e^{-N V} near the edge for large N).
RecurrenceTable lanczos(std::span<const double> x, std::span<const double> s, int n_max) {
  const std::size_t M = x.size();
  double mass = 0.0;
  for (double si : s) mass += si * si;
  if (!(mass > 0.0)) throw InvalidParameter("discrete_recurrence: zero total weight");
  double radius = 0.0;
  for (double xi : x) radius = std::max(radius, std::abs(xi));

  RecurrenceTable tab;
  tab.n_max = n_max;
  tab.node_count = static_cast<int>(M);
  tab.log_beta0 = std::log(mass);
  tab.alpha.assign(n_max + 1, 0.0);
  tab.beta.assign(n_max + 1, 0.0);
  tab.beta[0] = mass;

  // Lanczos on diag(x) with starting vector sqrt(w), full reorthogonalization.
  std::vector<std::vector<double>> Q;
  Q.reserve(n_max + 1);
  Q.emplace_back(M);
  const double norm0 = std::sqrt(mass);
  for (std::size_t i = 0; i < M; ++i) Q[0][i] = s[i] / norm0;

  auto dot = [M](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < M; ++i) acc += a[i] * b[i];
    return acc;
  };

  std::vector<double> v(M);
  for (int k = 0; k <= n_max; ++k) {
    const auto& qk = Q[k];
    for (std::size_t i = 0; i < M; ++i) v[i] = x[i] * qk[i];
    tab.alpha[k] = dot(qk, v);
    if (k == n_max) break;
    const double sb = k > 0 ? std::sqrt(tab.beta[k]) : 0.0;
    for (std::size_t i = 0; i < M; ++i) v[i] -= tab.alpha[k] * qk[i] + (k > 0 ? sb * Q[k - 1][i] : 0.0);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j <= k; ++j) {
        const double c = dot(Q[j], v);
        for (std::size_t i = 0; i < M; ++i) v[i] -= c * Q[j][i];
      }
    const double b = dot(v, v);
    if (!(b > 1e-13 * radius * radius)) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "recurrence: beta_%d lost positivity (%.3g); increase the quadrature node count "
                    "(currently %zu)",
                    k + 1, b, M);
      throw InstabilityError(msg);
    }
    tab.beta[k + 1] = b;
    const double nb = std::sqrt(b);
    Q.emplace_back(M);
    for (std::size_t i = 0; i < M; ++i) Q[k + 1][i] = v[i] / nb;
  }
  return tab;
}

}  // namespace

void weighted_polys(const RecurrenceTable& tab, const Potential& p, int k, double x, std::vector<double>& phi,
                    std::vector<double>* dphi) {
  if (k < 0 || k > tab.n_max) throw IndexError("weighted_polys: degree out of range");
  phi.assign(k + 1, 0.0);
  phi[0] = std::exp(-0.5 * (tab.N * p.value(x) + tab.log_beta0));
  if (dphi) {
    dphi->assign(k + 1, 0.0);
    (*dphi)[0] = -0.5 * tab.N * p.derivative(x) * phi[0];
  }
  for (int j = 0; j < k; ++j) {
    const double sb_next = std::sqrt(tab.beta[j + 1]);
    const double sb = j > 0 ? std::sqrt(tab.beta[j]) : 0.0;
    const double prev = j > 0 ? phi[j - 1] : 0.0;
    phi[j + 1] = ((x - tab.alpha[j]) * phi[j] - sb * prev) / sb_next;
    if (dphi) {
      auto& d = *dphi;
      const double dprev = j > 0 ? d[j - 1] : 0.0;
      d[j + 1] = (phi[j] + (x - tab.alpha[j]) * d[j] - sb * dprev) / sb_next;
    }
  }
}

double eval_weighted_poly(const RecurrenceTable& tab, const Potential& p, int k, double x) {
  std::vector<double> phi;
  weighted_polys(tab, p, k, x, phi);
  return phi[k];
}

double cd_kernel(const RecurrenceTable& tab, const Potential& p, int n, double x, double y) {
  if (n < 1 || n > tab.n_max) throw IndexError("cd_kernel: n must lie in [1, n_max]");
  const double sbn = std::sqrt(tab.beta[n]);
  std::vector<double> px, py;
  if (std::abs(x - y) < 1e-6 * tab.scale()) {
    // Confluent form at the midpoint; the weight-derivative terms cancel.
    std::vector<double> d;
    const double m = 0.5 * (x + y);
    weighted_polys(tab, p, n, m, px, &d);
    return sbn * (d[n] * px[n - 1] - d[n - 1] * px[n]);
  }
  weighted_polys(tab, p, n, x, px);
  weighted_polys(tab, p, n, y, py);
  return sbn * (px[n] * py[n - 1] - px[n - 1] * py[n]) / (x - y);
}

std::string recurrence_key(const Potential& p, double N, int n_max, const QuadratureConfig& quad) {
  std::string key = "v2;coeffs=";
  char buf[160];
  for (double c : p.coefficients()) {
    std::snprintf(buf, sizeof buf, "%.17g,", c);
    key += buf;
  }
  std::snprintf(buf, sizeof buf, ";N=%.17g;n_max=%d;nodes=%d;order=%d;cutoff=%.17g", N, n_max,
                resolved_node_count(n_max, quad), quad.order, quad.cutoff);
  key += buf;
  return key;
}

}  // namespace rmtlab
