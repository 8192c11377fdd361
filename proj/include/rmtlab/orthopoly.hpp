#pragma once

#include <span>
#include <string>
#include <vector>

#include "rmtlab/potential.hpp"

namespace rmtlab {

struct QuadratureConfig {
  // Total Gauss-Legendre nodes; 0 selects max(16 n_max, 600). Must be >= 4 n_max.
  int nodes = 0;
  int order = 16;
  // Interval [-R, R] is widened until phi_{n_max}(+-R)^2 and
  // phi_{n_max-1}(+-R)^2 fall below this value.
  double cutoff = 1e-30;
};

// Three-term recurrence for the orthonormal polynomials of e^{-N V(x)} dx:
//   x p_k = sqrt(beta_{k+1}) p_{k+1} + alpha_k p_k + sqrt(beta_k) p_{k-1},
// with beta_0 = int e^{-N V}. beta_0 is kept as a logarithm because it
// overflows for large N.
struct RecurrenceTable {
  double N = 0.0;
  int n_max = 0;
  int node_count = 0;
  double interval_radius = 0.0;
  double log_beta0 = 0.0;
  std::vector<double> alpha;  // alpha_0 .. alpha_{n_max}
  std::vector<double> beta;   // beta_0 .. beta_{n_max}; beta[0] = exp(log_beta0)

  // Width of the bulk of the weighted polynomials, 4 sqrt(beta_{n_max}).
  double scale() const;
};

RecurrenceTable build_recurrence(const Potential& p, double N, int n_max, const QuadratureConfig& quad = {});

// Recurrence of the discrete measure sum_i w_i delta_{x_i} (Stieltjes /
// Lanczos). N and interval_radius are left unset; log_beta0 = log sum w_i.
RecurrenceTable discrete_recurrence(std::span<const double> x, std::span<const double> w, int n_max);

// phi_k(x) = e^{-N V(x)/2} p_k(x).
double eval_weighted_poly(const RecurrenceTable& tab, const Potential& p, int k, double x);

// All of phi_0 .. phi_k at x, and optionally their x-derivatives.
void weighted_polys(const RecurrenceTable& tab, const Potential& p, int k, double x, std::vector<double>& phi,
                    std::vector<double>* dphi = nullptr);

// Christoffel-Darboux form of K_{n,N}(x, y) = sum_{k<n} phi_k(x) phi_k(y).
double cd_kernel(const RecurrenceTable& tab, const Potential& p, int n, double x, double y);

// Key identifying a table for caching: coefficients, N, n_max and the
// quadrature settings.
std::string recurrence_key(const Potential& p, double N, int n_max, const QuadratureConfig& quad = {});

int resolved_node_count(int n_max, const QuadratureConfig& quad);

}  // namespace rmtlab
