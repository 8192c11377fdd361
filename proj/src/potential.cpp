#include "rmtlab/potential.hpp"

#include <cmath>
#include <string>

#include "rmtlab/errors.hpp"

namespace rmtlab {

Potential::Potential(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) throw InvalidParameter("potential: empty coefficient list");
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw InvalidParameter("potential: non-finite coefficient");
  const int deg = degree();
  if (deg < 2 || deg % 2 != 0)
    throw InvalidParameter("potential: degree must be even and >= 2, got " + std::to_string(deg));
  if (!(coeffs_.back() > 0.0)) throw InvalidParameter("potential: leading coefficient must be positive");
}

double Potential::value(double x) const { return horner<double>(coeffs_, x); }

double Potential::derivative(double x) const {
  double acc = 0.0;
  for (int k = degree(); k >= 1; --k) acc = acc * x + k * coeffs_[k];
  return acc;
}

double Potential::second_derivative(double x) const {
  double acc = 0.0;
  for (int k = degree(); k >= 2; --k) acc = acc * x + k * (k - 1) * coeffs_[k];
  return acc;
}

std::vector<double> Potential::derivative_coefficients() const {
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return d;
}

bool Potential::is_even() const {
  for (std::size_t k = 1; k < coeffs_.size(); k += 2)
    if (coeffs_[k] != 0.0) return false;
  return true;
}

Potential QuarticFamily::potential() const { return Potential({0.0, 0.0, t / 2.0, 0.0, g / 4.0}); }

double QuarticFamily::critical_t() const { return -2.0 * std::sqrt(g); }

bool QuarticFamily::is_critical(double rel_tol) const {
  const double tc = critical_t();
  return std::abs(t - tc) <= rel_tol * std::abs(tc);
}

QuarticFamily quartic_family(double g, double t) {
  if (!(g > 0.0)) throw InvalidParameter("quartic_family: g must be positive");
  return {g, t};
}

}  // namespace rmtlab
