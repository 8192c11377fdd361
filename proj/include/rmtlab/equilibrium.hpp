#pragma once

#include <complex>
#include <vector>

#include "rmtlab/potential.hpp"

namespace rmtlab {

struct Support {
  double a;
  double b;

  Support(double a_, double b_);
  double mid() const { return 0.5 * (a + b); }
  double radius() const { return 0.5 * (b - a); }
  bool contains(double x) const { return a <= x && x <= b; }
};

struct DensityJet {
  double value;
  double first;
  double second;
};

// One-cut (possibly signed) equilibrium measure of V_t = V / t.
//
// The Stieltjes transform is G(z) = V'(z)/(2t) - h(z) R(z) with
// R(z) = sqrt((z-a)(z-b)) ~ z at infinity and h a polynomial of degree
// deg V - 2, so that
//   q_t(z)   = h(z)^2 (z-a)(z-b)
//   psi_t(x) = h(x) sqrt((x-a)(b-x)) / pi   on [a, b].
// The sign of psi_t follows h, which gives the analytic continuation through
// an interior zero (negative near x* for t < 1).
class EquilibriumMeasure {
 public:
  EquilibriumMeasure(Potential potential, double t, Support support, std::vector<double> poly_part);

  double t() const { return t_; }
  const Support& support() const { return support_; }
  const Potential& potential() const { return potential_; }
  // Monomial coefficients of h.
  const std::vector<double>& poly_part() const { return h_; }
  double mass_check() const { return mass_; }

  double h(double x) const;
  std::complex<double> h(std::complex<double> z) const;
  // Throws DomainError outside [a, b].
  double density(double x) const;
  DensityJet density_jet(double x) const;
  std::complex<double> q(std::complex<double> z) const;

 private:
  Potential potential_;
  double t_;
  Support support_;
  std::vector<double> h_;
  double mass_;
};

struct OneCutOptions {
  double residual_tol = 1e-12;
  int max_iterations = 50;
  double min_support_width = 1e-10;
};

EquilibriumMeasure solve_one_cut(const Potential& p, double t, const OneCutOptions& opts = {});

std::complex<double> q_t(const EquilibriumMeasure& em, std::complex<double> z);
double density_psi_t(const EquilibriumMeasure& em, double x);

// Arcsine density 1 / (pi sqrt((b-x)(x-a))) of the equilibrium measure of [a, b].
double w_S(const Support& sup, double x);

struct BuyarovRakhmanovResult {
  double fd_value;
  double w_value;
};

// Central difference of t psi_t(x) at t = 1 against w_{S_V}(x).
BuyarovRakhmanovResult buyarov_rakhmanov_check(const Potential& p, double x, double dt);

struct IdentityCheck {
  double lhs;
  double rhs;
};

// psi_V(x) against (1/(2 pi^2 w(x))) * int (V'(x)-V'(y))/(x-y) d omega_S(y).
IdentityCheck psiV_identity_check(const Potential& p, double x);
IdentityCheck psiV_identity_check(const EquilibriumMeasure& em, double x);

struct CriticalData {
  double x_star;
  double psiV_second;
  double c;
  double w_at_xstar;
  double L;
  double s;
};

CriticalData critical_constants(const Potential& p, double x_star, double L, double tol = 1e-8);
CriticalData critical_constants(const EquilibriumMeasure& em, double x_star, double L, double tol = 1e-8);
// s for another L with the same c and w (s is linear in L).
double s_from_L(const CriticalData& cd, double L);

// f(z) = [(3/4) int_{x*}^z (-q_V(y))^{1/2} dy]^{1/3}, real and increasing on
// the real axis near x*. Valid in the disk |z - x*| < disk_radius(em, x*).
std::complex<double> conformal_map_f(const EquilibriumMeasure& em, double x_star, std::complex<double> z);
std::complex<double> conformal_map_f(const Potential& p, double x_star, std::complex<double> z);
double conformal_disk_radius(const EquilibriumMeasure& em, double x_star);

}  // namespace rmtlab
