#pragma once

#include <optional>
#include <span>
#include <vector>

namespace rmtlab {

// Polynomial external field V(x) = sum_k coefficients[k] x^k.
// Even degree >= 2 with positive leading coefficient, so V grows faster than
// log(1 + x^2) at infinity.
class Potential {
 public:
  explicit Potential(std::vector<double> coefficients);

  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coefficients() const { return coeffs_; }
  // Coefficients of V' in the monomial basis.
  std::vector<double> derivative_coefficients() const;
  bool is_even() const;

 private:
  std::vector<double> coeffs_;
};

inline double eval_V(const Potential& p, double x) { return p.value(x); }
inline double eval_Vp(const Potential& p, double x) { return p.derivative(x); }

// V(x) = (g/4) x^4 + (t/2) x^2, critical at t = -2 sqrt(g).
struct QuarticFamily {
  double g;
  double t;

  Potential potential() const;
  double critical_t() const;
  bool is_critical(double rel_tol = 1e-14) const;
  // Interior point where the equilibrium density vanishes when critical.
  double critical_point() const { return 0.0; }
};

QuarticFamily quartic_family(double g, double t);

// Horner evaluation of sum_k c[k] x^k; templated so the same routine serves
// real and complex arguments.
template <class T>
T horner(std::span<const double> c, T x) {
  T acc{0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + T(*it);
  return acc;
}

}  // namespace rmtlab
