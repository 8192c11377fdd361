#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "rmtlab/grid.hpp"
#include "rmtlab/orthopoly.hpp"
#include "rmtlab/painleve2.hpp"
#include "rmtlab/potential.hpp"

namespace rmtlab {

struct ExperimentConfig {
  // Monomial coefficients of V; the default is the critical quartic x^4/4 - x^2.
  std::vector<double> potential = {0.0, 0.0, -1.0, 0.0, 0.25};
  double x_star = 0.0;  // critical point (double scaling)
  double x_ref = 0.0;   // reference point (bulk)
  double L = 0.0;
  std::vector<int> n_list = {20, 40, 80};
  std::vector<GridPoint> grid = tensor_grid(-2.0, 2.0, 9);
  std::string grid_spec = "tensor 9x9 [-2,2]^2";
  double critical_tol = 1e-8;
  QuadratureConfig quad;
  // Hastings-McLeod range; the sigma integral is not used here, so the
  // default range is enough.
  HastingsMcLeodOptions painleve;
  // Recurrence cache directory; empty disables caching unless the
  // RMTLAB_CACHE_DIR environment variable is set.
  std::string cache_dir;
  Exec exec = Exec::parallel;
};

struct ConvergenceRow {
  int n;
  double N;
  double max_err;
  double mean_err;
};

struct ConvergenceReport {
  std::string experiment;
  std::string potential;
  std::string grid_spec;
  // Named constants in emission order (c, s, L, x*, ...).
  std::vector<std::pair<std::string, double>> constants;
  // Free-form header lines written after the constants.
  std::vector<std::string> notes;
  std::vector<ConvergenceRow> rows;
  bool decreasing = true;  // strictly decreasing max_err over n
  double runtime_seconds = 0.0;

  double constant(const std::string& name) const;
};

// N with n^{2/3} (n / N - 1) = L.
double coupled_N(int n, double L);

// Finite-n kernel in critical scaling:
//   (c n)^{-1/3} K_{n,N}(x* + u (c n)^{-1/3}, x* + v (c n)^{-1/3}).
double scaled_critical_kernel(const RecurrenceTable& tab, const Potential& p, int n, double x_star, double c, double u,
                              double v);

ConvergenceReport double_scaling_experiment(const ExperimentConfig& cfg);
// Same, with a precomputed Hastings-McLeod solution.
ConvergenceReport double_scaling_experiment(const ExperimentConfig& cfg, const HastingsMcLeodSolution& hm);

struct MismatchResult {
  double L;        // coupling used for the finite-n kernel
  double L_other;  // coupling whose s is used for the mismatched limit
  int n;
  double matched_err;
  double mismatched_err;
  bool ok() const { return matched_err < mismatched_err; }
};

// At the largest n of cfg, compares the finite-n kernel built with each L
// in `couplings` against K^crit at its own s and at the s of every other
// coupling.
std::vector<MismatchResult> mismatched_s_control(const ExperimentConfig& cfg, const std::vector<double>& couplings,
                                                 const HastingsMcLeodSolution& hm);

ConvergenceReport bulk_experiment(const Potential& p, double x_ref, const std::vector<int>& n_list,
                                  const ExperimentConfig& cfg = {});

enum class EdgeSide { right, left };
enum class EdgeConstant { analytic, fitted };

struct EdgeOptions {
  EdgeSide side = EdgeSide::right;
  EdgeConstant constant = EdgeConstant::fitted;
  int n_fit = 60;  // n used for the one-parameter fit
};

// Finite-n kernel in edge scaling at endpoint e:
//   (c n)^{-2/3} K_{n,n}(e + sgn u (c n)^{-2/3}, e + sgn v (c n)^{-2/3}),
// sgn = +1 at a right edge and -1 at a left edge.
double scaled_edge_kernel(const RecurrenceTable& tab, const Potential& p, int n, double edge, double c, EdgeSide side,
                          double u, double v);

// Error of the edge scaling against the Airy kernel; the constant c_edge is
// either the square-root coefficient rho of psi_V ~ (rho/pi) sqrt(|x - e|)
// or the value minimizing the grid error at n_fit. Both are reported.
ConvergenceReport edge_experiment(const Potential& p, const std::vector<int>& n_list, const EdgeOptions& opts = {},
                                  const ExperimentConfig& cfg = {});

// CSV with a '#' header; byte-identical for identical reports (runtime is
// not written).
void emit_report(const ConvergenceReport& rep, std::ostream& os);
void emit_report(const ConvergenceReport& rep, const std::filesystem::path& path);

std::string describe_potential(const Potential& p);

}  // namespace rmtlab
