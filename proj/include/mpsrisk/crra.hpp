#pragma once

#include "mpsrisk/geometry.hpp"

namespace mpsrisk {

// Bracket and tolerance for inverting the Holt-Laury indifference condition.
inline constexpr double kCrraBracketLo = -20.0;
inline constexpr double kCrraBracketHi = 20.0;
inline constexpr double kCrraTolerance = 1e-9;

// Normalized utility pair of u(x) = x^(1-r)/(1-r) on $1, $16, $21, $38.5,
// with the logarithmic limit at r = 1.
NormalizedUtilityPoint crra_point(double r);

// Range of CRRA coefficients consistent with s safe choices followed by a
// switch. r_lo is -inf for s = 0 and r_hi is +inf for s = 9.
struct CrraInterval {
  int safe_count = 0;
  double r_lo = 0.0;
  double r_hi = 0.0;
};

// Safe-minus-risky normalized expected utility of a CRRA agent in the row
// where the high prize has probability p: p*u2 + (1-p)*u1 - p.
double hl_indifference_gap(double r, double p);

// Root of hl_indifference_gap(., p) by bisection on the default bracket.
double crra_indifference_root(double p);

CrraInterval crra_interval(int safe_count);

// Two-decimal rounding used when reporting r bounds.
double round_to_cents(double value);

}  // namespace mpsrisk
