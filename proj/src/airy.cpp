#include "rmtlab/airy.hpp"

#include <cmath>
#include <numbers>

#include "rmtlab/errors.hpp"

namespace rmtlab {

namespace {

constexpr long double kAi0 = 0.355028053887817239260063186004183176L;   // 3^{-2/3} / Gamma(2/3)
constexpr long double kAip0 = 0.258819403792806798405183560189203963L;  // 3^{-1/3} / Gamma(1/3)

constexpr double kSeriesLo = -8.0;
constexpr double kSeriesHi = 5.0;

AiryValue maclaurin(double xd) {
  if (xd == 0.0) return {static_cast<double>(kAi0), static_cast<double>(-kAip0)};
  // Ai = c1 f - c2 g with f = sum 3^k (1/3)_k x^{3k}/(3k)!, g = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!.
  const long double x = xd, x3 = x * x * x;
  long double f = 1, g = x, tf = 1, tg = x;
  long double fp = 0, gp = 1, tfp = 0, tgp = 1;
  for (int k = 1; k < 200; ++k) {
    tf *= x3 / ((3.0L * k - 1) * (3.0L * k));
    tg *= x3 / ((3.0L * k) * (3.0L * k + 1));
    // f' and g' terms: d/dx x^{3k} = 3k x^{3k-1}.
    tfp = tf * 3.0L * k / x;
    tgp = tg * (3.0L * k + 1) / x;
    f += tf;
    g += tg;
    fp += tfp;
    gp += tgp;
    if (std::fabs(tf) + std::fabs(tg) < 1e-22L * (std::fabs(f) + std::fabs(g)) && k > 3) break;
  }
  return {static_cast<double>(kAi0 * f - kAip0 * g), static_cast<double>(kAi0 * fp - kAip0 * gp)};
}

// u_k and v_k coefficients of the Airy asymptotic expansions.
struct AsymptoticCoeffs {
  static constexpr int kTerms = 30;
  double u[kTerms];
  double v[kTerms];
  constexpr AsymptoticCoeffs() : u{}, v{} {
    u[0] = 1.0;
    v[0] = 1.0;
    for (int k = 1; k < kTerms; ++k) {
      // u_k = (6k-5)(6k-3)(6k-1) / ((2k-1) 216 k) u_{k-1}
      const double num = (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1);
      u[k] = u[k - 1] * num / ((2.0 * k - 1) * 216.0 * k);
      v[k] = -(6.0 * k + 1) / (6.0 * k - 1) * u[k];
    }
  }
};

constexpr AsymptoticCoeffs kCoeffs{};

AiryValue asymptotic_positive(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  double su = 0, sv = 0, term_prev = 1e300, pw = 1.0;
  for (int k = 0; k < AsymptoticCoeffs::kTerms; ++k) {
    const double tu = kCoeffs.u[k] * pw, tv = kCoeffs.v[k] * pw;
    if (std::abs(tu) > term_prev) break;  // optimal truncation
    su += tu;
    sv += tv;
    term_prev = std::abs(tu);
    if (term_prev < 1e-17 * std::abs(su)) break;
    pw *= -1.0 / zeta;
  }
  const double e = std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi));
  const double x14 = std::pow(x, 0.25);
  return {e / x14 * su, -e * x14 * sv};
}

AiryValue asymptotic_negative(double x) {
  const double ax = -x;
  const double zeta = 2.0 / 3.0 * ax * std::sqrt(ax);
  // P, Q series with even/odd terms of u_k (and v_k for the derivative).
  double P = 0, Q = 0, R = 0, S = 0, pw = 1.0, prev = 1e300;
  for (int k = 0; k < AsymptoticCoeffs::kTerms; ++k) {
    const double tu = kCoeffs.u[k] * pw, tv = kCoeffs.v[k] * pw;
    if (std::abs(tu) > prev) break;
    prev = std::abs(tu);
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      P += sign * tu;
      R += sign * tv;
    } else {
      Q += sign * tu;
      S += sign * tv;
    }
    if (prev < 1e-17) break;
    pw /= zeta;
  }
  const double ph = zeta + std::numbers::pi / 4.0;
  const double c = std::cos(ph), s = std::sin(ph);
  const double rpi = 1.0 / std::sqrt(std::numbers::pi);
  const double x14 = std::pow(ax, 0.25);
  // Ai(-x) = x^{-1/4}/sqrt(pi) [sin(ph) P - cos(ph) Q]
  // Ai'(-x) = -x^{1/4}/sqrt(pi) [cos(ph) R + sin(ph) S]
  return {rpi / x14 * (s * P - c * Q), -rpi * x14 * (c * R + s * S)};
}

}  // namespace

AiryValue airy(double x) {
  if (!(std::abs(x) <= 30.0)) throw DomainError("airy: |x| must be <= 30");
  if (x >= kSeriesLo && x <= kSeriesHi) return maclaurin(x);
  return x > 0 ? asymptotic_positive(x) : asymptotic_negative(x);
}

}  // namespace rmtlab
