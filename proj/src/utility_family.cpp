#include "mpsrisk/utility_family.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mpsrisk {

namespace {

// (y_i^a - y_1^a) / (y_n^a - y_1^a) from log y, with the a -> 0 log limit.
std::vector<double> normalized_power(const std::vector<double>& log_y, double a) {
  const std::size_t n = log_y.size();
  const double l1 = log_y.front();
  const double ln = log_y.back();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double li = log_y[i];
    if (a == 0.0) {
      out[i] = (li - l1) / (ln - l1);
    } else if (a > 0.0) {
      // Divide through by y_n^a: every exponent is <= 0.
      out[i] = std::exp(a * (li - ln)) * -std::expm1(a * (l1 - li)) / -std::expm1(a * (l1 - ln));
    } else {
      // Divide through by y_1^a, the largest power when a < 0.
      out[i] = std::expm1(a * (li - l1)) / std::expm1(a * (ln - l1));
    }
  }
  out.front() = 0.0;
  out.back() = 1.0;
  return out;
}

// (e^{-c y_1} - e^{-c y_i}) / (e^{-c y_1} - e^{-c y_n}), linear at c = 0.
std::vector<double> normalized_exponential(const std::vector<double>& y, double c) {
  const std::size_t n = y.size();
  const double y1 = y.front();
  const double yn = y.back();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (c == 0.0) {
      out[i] = (y[i] - y1) / (yn - y1);
    } else if (c > 0.0) {
      out[i] = std::expm1(-c * (y[i] - y1)) / std::expm1(-c * (yn - y1));
    } else {
      const double b = -c;
      out[i] = std::exp(b * (y[i] - yn)) * -std::expm1(b * (y1 - y[i])) / -std::expm1(b * (y1 - yn));
    }
  }
  out.front() = 0.0;
  out.back() = 1.0;
  return out;
}

std::vector<double> prize_doubles(const PrizeVector& prizes) {
  std::vector<double> x;
  x.reserve(prizes.size());
  for (const auto& p : prizes.values()) x.push_back(to_double(p));
  return x;
}

// Rounding can leave adjacent levels a hair out of order or outside [0, 1].
TabulatedUtility monotone(std::vector<double> v) {
  for (std::size_t i = 1; i < v.size(); ++i) v[i] = std::clamp(v[i], v[i - 1], 1.0);
  return TabulatedUtility(std::move(v));
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("bad number '" + std::string(text) + "'");
  return value;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_double(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

TabulatedUtility tabulate(const UtilityFamily& family, const PrizeVector& prizes) {
  const std::vector<double> x = prize_doubles(prizes);
  return std::visit(
      [&](const auto& f) -> TabulatedUtility {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Crra>) {
          if (!std::isfinite(f.r)) throw std::invalid_argument("CRRA parameter must be finite");
          if (x.front() <= 0.0) throw std::domain_error("CRRA utility needs positive prizes");
          std::vector<double> logs;
          for (double xi : x) logs.push_back(std::log(xi));
          return monotone(normalized_power(logs, 1.0 - f.r));
        } else if constexpr (std::is_same_v<F, Cara>) {
          if (!std::isfinite(f.a)) throw std::invalid_argument("CARA parameter must be finite");
          return monotone(normalized_exponential(x, f.a));
        } else if constexpr (std::is_same_v<F, PowerExpo>) {
          if (!(f.r < 1.0) || !(f.alpha >= 0.0) || !std::isfinite(f.alpha))
            throw std::invalid_argument("power-expo needs r < 1 and alpha >= 0");
          if (x.front() < 0.0) throw std::domain_error("power-expo utility needs non-negative prizes");
          std::vector<double> y;
          for (double xi : x) y.push_back(std::pow(xi, 1.0 - f.r));
          return monotone(normalized_exponential(y, f.alpha));
        } else {
          if (f.values.size() != prizes.size())
            throw std::invalid_argument("tabulated utility has " + std::to_string(f.values.size()) +
                                        " values for " + std::to_string(prizes.size()) + " prizes");
          return TabulatedUtility(f.values);
        }
      },
      family);
}

UtilityFamily parse_utility_family(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("agent spec must look like kind:params");
  const std::string_view kind = text.substr(0, colon);
  const std::vector<double> params = parse_list(text.substr(colon + 1));
  if (kind == "crra" && params.size() == 1) return Crra{params[0]};
  if (kind == "cara" && params.size() == 1) return Cara{params[0]};
  if (kind == "powerexpo" && params.size() == 2) {
    if (!(params[0] < 1.0) || !(params[1] >= 0.0)) throw std::invalid_argument("power-expo needs r < 1 and alpha >= 0");
    return PowerExpo{params[0], params[1]};
  }
  if (kind == "table" && params.size() >= 2) {
    TabulatedUtility check(params);
    return Tabulated{params};
  }
  throw std::invalid_argument("unrecognised agent spec '" + std::string(text) + "'");
}

std::string to_string(const UtilityFamily& family) {
  std::ostringstream out;
  out.precision(17);
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, Crra>) {
          out << "crra:" << f.r;
        } else if constexpr (std::is_same_v<F, Cara>) {
          out << "cara:" << f.a;
        } else if constexpr (std::is_same_v<F, PowerExpo>) {
          out << "powerexpo:" << f.r << "," << f.alpha;
        } else {
          out << "table:";
          for (std::size_t i = 0; i < f.values.size(); ++i) out << (i ? "," : "") << f.values[i];
        }
      },
      family);
  return out.str();
}

}  // namespace mpsrisk
