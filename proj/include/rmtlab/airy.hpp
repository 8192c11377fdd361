#pragma once

namespace rmtlab {

struct AiryValue {
  double ai;
  double aip;
};

// Ai and Ai' on |x| <= 30 with absolute error below 1e-10.
// Maclaurin series in extended precision on [-8, 5], asymptotic expansions
// outside.
AiryValue airy(double x);

}  // namespace rmtlab
