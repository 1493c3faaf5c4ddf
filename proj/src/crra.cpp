#include "mpsrisk/crra.hpp"

#include "mpsrisk/utility_family.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mpsrisk {

NormalizedUtilityPoint crra_point(double r) {
  if (!std::isfinite(r)) throw std::invalid_argument("crra_point needs a finite coefficient");
  const TabulatedUtility u = tabulate(Crra{r}, standard_prizes());
  return {u[1], u[2]};
}

double hl_indifference_gap(double r, double p) {
  const NormalizedUtilityPoint pt = crra_point(r);
  return p * pt.u2 + (1.0 - p) * pt.u1 - p;
}

double crra_indifference_root(double p) {
  double lo = kCrraBracketLo;
  double hi = kCrraBracketHi;
  double g_lo = hl_indifference_gap(lo, p);
  const double g_hi = hl_indifference_gap(hi, p);
  if (!(g_lo < 0.0 && g_hi > 0.0))
    throw std::domain_error("indifference root not bracketed for p=" + std::to_string(p));
  while (hi - lo > kCrraTolerance) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = hl_indifference_gap(mid, p);
    if (g_mid == 0.0) return mid;
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

CrraInterval crra_interval(int safe_count) {
  if (safe_count < 0 || safe_count > 9)
    throw std::out_of_range("safe-choice count " + std::to_string(safe_count) + " has no CRRA interval (valid 0..9)");
  constexpr double inf = std::numeric_limits<double>::infinity();
  CrraInterval out;
  out.safe_count = safe_count;
  out.r_lo = safe_count == 0 ? -inf : crra_indifference_root(safe_count / 10.0);
  out.r_hi = safe_count == 9 ? inf : crra_indifference_root((safe_count + 1) / 10.0);
  return out;
}

double round_to_cents(double value) {
  if (!std::isfinite(value)) return value;
  return std::round(value * 100.0) / 100.0;
}

}  // namespace mpsrisk
