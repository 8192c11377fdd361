#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

namespace rmtlab {

struct HastingsMcLeodOptions {
  double s_min = -10.0;
  double s_max = 6.0;
  double tol = 1e-9;
  // Collocation: equal sub-domains (0 = one per unit length), each with a
  // Chebyshev-Lobatto grid whose order is doubled from `initial_order` until
  // the residual meets `tol`.
  int domains = 0;
  int initial_order = 16;
  int max_order = 64;
  int max_newton = 50;
  // Spacing of the stored (s, q, q') table.
  double table_step = 0.02;
};

struct SolveDiagnostics {
  int chebyshev_order = 0;
  int newton_iterations = 0;
  double collocation_residual = 0.0;
  double offmesh_residual = 0.0;
};

// Tabulated Hastings-McLeod solution q'' = s q + 2 q^3, q ~ Ai(s) at +inf.
// Between nodes q is a quintic Hermite interpolant of (q, q', q'') where
// q'' comes from the equation itself.
class HastingsMcLeodSolution {
 public:
  HastingsMcLeodSolution(std::vector<double> s_grid, std::vector<double> q, std::vector<double> qp, double tol);

  const std::vector<double>& s_grid() const { return s_; }
  const std::vector<double>& q() const { return q_; }
  const std::vector<double>& qp() const { return qp_; }
  double tolerance() const { return tol_; }
  double s_min() const { return s_.front(); }
  double s_max() const { return s_.back(); }

  struct Value {
    double q;
    double r;    // q'
    double qpp;  // second derivative of the interpolant
  };
  // Throws DomainError outside [s_min, s_max].
  Value eval(double s) const;

  // |q'' - s q - 2 q^3| of the interpolant at s.
  double residual(double s) const;

  SolveDiagnostics diagnostics;

 private:
  std::vector<double> s_, q_, qp_;
  double tol_;
};

struct QValue {
  double q;
  double r;
};

HastingsMcLeodSolution solve_hastings_mcleod(double s_min, double s_max, double tol);
HastingsMcLeodSolution solve_hastings_mcleod(const HastingsMcLeodOptions& opts = {});

QValue q_at(const HastingsMcLeodSolution& hm, double s);

// Two-term negative-axis asymptote sqrt(-s/2) (1 + 1/(8 s^3)).
double hastings_mcleod_left_asymptote(double s);

// CSV with a '#' header (s_min, s_max, tol) and rows s,q,qp.
void write_hastings_mcleod(std::ostream& os, const HastingsMcLeodSolution& hm);
HastingsMcLeodSolution read_hastings_mcleod(std::istream& is);

// ---------------------------------------------------------------------------
// psi-functions on the real axis.

struct PsiOptions {
  // Smallest matching point; it is moved outward until the truncated formal
  // series is accurate to series_tol (needed for large negative s).
  double zeta_asym = 8.0;
  double series_tol = 1e-12;
  double zeta_cap = 12.0;
  double abs_tol = 1e-13;
  double rel_tol = 1e-13;
  int series_terms = 60;
};

struct PsiValue {
  double phi1;
  double phi2;
  double dphi1;  // d/dzeta
  double dphi2;
};

// Real pair (Phi^1, Phi^2) solving d/dzeta Phi = A Phi with
//   A = [[4 zeta q, theta + 2 r], [-theta + 2 r, -4 zeta q]],
//   theta = 4 zeta^2 + s + 2 q^2,
// and Phi^1 ~ cos(4 zeta^3/3 + s zeta), Phi^2 ~ -sin(...) as zeta -> +-inf.
PsiValue psi_eval(const HastingsMcLeodSolution& hm, double zeta, double s, const PsiOptions& opts = {});

// Same solution, but integrated from +zeta_0 all the way down to `zeta`
// (through the origin when zeta < 0). Used to test the connection between
// the two asymptotic directions.
PsiValue psi_eval_from_right(const HastingsMcLeodSolution& hm, double zeta, double s, const PsiOptions& opts = {});

// All points at once, by integrating outward from zeta = 0 with the even
// data (1, 0) and fixing the scale against the formal series at the
// matching point; negative zeta follow from parity. Outward
// integration follows the growing direction, so this stays accurate for very
// negative s where inward integration loses all digits.
std::vector<PsiValue> psi_eval_from_origin(const HastingsMcLeodSolution& hm, const std::vector<double>& zetas,
                                           double s, const PsiOptions& opts = {});

// Coefficient matrix A(zeta; s) of the real system.
struct Mat2 {
  double a11, a12, a21, a22;
};
Mat2 psi_zeta_matrix(double zeta, double s, double q, double r);
// Coefficient matrix of d/ds (Phi^1, Phi^2): [[q, zeta], [-zeta, -q]].
Mat2 psi_s_matrix(double zeta, double q);

// Initial data from the formal series at large |zeta| (complex pair
// (Phi_1, Phi_2) = (Phi^1 + i Phi^2, Phi^1 - i Phi^2)).
struct FormalSeries {
  double s, q, r;
  // m_k = [[a_k, b_k], [c_k, d_k]] for k = 0 .. terms-1.
  std::vector<std::complex<double>> a, b, c, d;
};
FormalSeries psi_formal_series(double s, double q, double r, int terms);
struct SeriesValue {
  double phi1;
  double phi2;
  double error;  // size of the smallest term, where the sum is truncated
};
// Real pair (Phi^1, Phi^2) from the series truncated at its smallest term.
SeriesValue psi_asymptotic(const FormalSeries& fs, double zeta);
// Smallest |zeta| >= start where the truncated series meets opts.series_tol.
double psi_matching_point(const FormalSeries& fs, double start, const PsiOptions& opts = {});

// Central difference of psi_eval in s against d/ds Phi = B Phi; returns the
// max-norm discrepancy.
double psi_s_derivative_check(const HastingsMcLeodSolution& hm, double zeta, double s, double h,
                              const PsiOptions& opts = {});

struct DeterminantDrift {
  double det_start;
  double max_deviation;
  double drift_per_unit;  // max_deviation / |zeta range|
};
// Integrates two independent real solutions from zeta_from to zeta_to and
// tracks det[Phi, Phi~], which is constant because trace A = 0.
DeterminantDrift psi_determinant_drift(const HastingsMcLeodSolution& hm, double s, double zeta_from, double zeta_to,
                                       const PsiOptions& opts = {});

}  // namespace rmtlab
