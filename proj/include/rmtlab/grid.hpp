#pragma once

#include <functional>
#include <vector>

#include "rmtlab/limit_kernels.hpp"

namespace rmtlab {

struct GridPoint {
  double u;
  double v;
};

// n x n tensor grid on [lo, hi]^2, u varying slowest.
std::vector<GridPoint> tensor_grid(double lo, double hi, int n);

enum class Exec { serial, parallel };

// Pointwise evaluation of a pure kernel over the grid.
std::vector<double> eval_grid(const std::function<double(double, double)>& kernel, const std::vector<GridPoint>& grid,
                              Exec exec = Exec::parallel);

// k_crit over a grid; psi is evaluated once per distinct coordinate.
std::vector<double> k_crit_grid(const CritKernelContext& ctx, const std::vector<GridPoint>& grid,
                                Exec exec = Exec::parallel);

// k_crit_integral over a grid; for each sigma node one outward psi sweep
// serves every coordinate.
std::vector<CritIntegralResult> k_crit_integral_grid(const CritKernelContext& ctx, const std::vector<GridPoint>& grid,
                                                     Exec exec = Exec::parallel);

}  // namespace rmtlab
