#pragma once

#include "mpsrisk/lottery.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mpsrisk {

// u(x) = x^(1-r)/(1-r), log x at r = 1. Requires positive prizes.
struct Crra {
  double r = 0.0;
  friend bool operator==(const Crra&, const Crra&) = default;
};

// u(x) = (1 - exp(-a x))/a, linear at a = 0.
struct Cara {
  double a = 0.0;
  friend bool operator==(const Cara&, const Cara&) = default;
};

// u(x) = (1 - exp(-alpha x^(1-r)))/alpha with r < 1, alpha >= 0; alpha = 0 is
// the power limit x^(1-r). Functional form from Holt and Laury (2002).
struct PowerExpo {
  double r = 0.0;
  double alpha = 0.0;
  friend bool operator==(const PowerExpo&, const PowerExpo&) = default;
};

struct Tabulated {
  std::vector<double> values;
  friend bool operator==(const Tabulated&, const Tabulated&) = default;
};

using UtilityFamily = std::variant<Crra, Cara, PowerExpo, Tabulated>;

// Utility levels on the prize grid rescaled so the lowest prize maps to 0 and
// the highest to 1 (a positive affine transform, so preferences are kept).
// Evaluated in a form that neither overflows nor cancels for large or tiny
// curvature. Tabulated values are returned as given.
TabulatedUtility tabulate(const UtilityFamily& family, const PrizeVector& prizes);

// "crra:0.5", "cara:0.1", "powerexpo:0.3,0.03", "table:0,0.3,0.35,1".
UtilityFamily parse_utility_family(std::string_view text);
std::string to_string(const UtilityFamily& family);

}  // namespace mpsrisk
