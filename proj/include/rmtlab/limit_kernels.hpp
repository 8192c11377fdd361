#pragma once

#include <limits>

#include "rmtlab/airy.hpp"
#include "rmtlab/painleve2.hpp"

namespace rmtlab {

// sin(pi (u - v)) / (pi (u - v)), equal to 1 on the diagonal.
double k_bulk(double u, double v);

// (Ai(u) Ai'(v) - Ai'(u) Ai(v)) / (u - v); diagonal Ai'(u)^2 - u Ai(u)^2.
double k_edge(double u, double v);

struct CritIntegralConfig {
  // Lowest sigma used; NaN means the bottom of the Hastings-McLeod grid.
  double sigma_min = std::numeric_limits<double>::quiet_NaN();
  double panel = 1.0;  // Gauss-Legendre panel width in sigma
  int order = 20;      // nodes per panel
  double tail_tol = 1e-8;
};

struct CritKernelContext {
  CritKernelContext(const HastingsMcLeodSolution& hm, double s, PsiOptions psi = {}, CritIntegralConfig integral = {});

  const HastingsMcLeodSolution* hm;
  double s;
  PsiOptions psi;
  CritIntegralConfig integral;
};

// Ratio form (Phi^1(u) Phi^2(v) - Phi^2(u) Phi^1(v)) / (pi (u - v)) from
// precomputed psi values. Returns NaN if u and v are too close for the ratio.
double k_crit_ratio(double u, const PsiValue& pu, double v, const PsiValue& pv);
// Confluent diagonal (Phi^1' Phi^2 - Phi^2' Phi^1) / pi.
double k_crit_diagonal(const PsiValue& pu);

double k_crit(const CritKernelContext& ctx, double u, double v);

struct CritIntegralResult {
  double value;
  double tail_bound;  // bound on the discarded part of the sigma integral
  double sigma_lo;    // where the sigma integration stopped
};

// (1/pi) int_{-inf}^{s} [Phi^1(u) Phi^1(v) + Phi^2(u) Phi^2(v)](sigma) dsigma.
// Panels are added downward from s until an exponential fit of the envelope
// |Phi(u)| |Phi(v)| bounds the remaining tail by tail_tol; reaching sigma_min
// first raises TruncationError.
CritIntegralResult k_crit_integral_detail(const CritKernelContext& ctx, double u, double v);
double k_crit_integral(const CritKernelContext& ctx, double u, double v);

}  // namespace rmtlab
