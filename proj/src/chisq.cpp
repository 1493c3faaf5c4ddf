#include "mpsrisk/chisq.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mpsrisk {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 10000;

// P(a, x) by the series x^a e^-x / Γ(a+1) * Σ x^n / ((a+1)...(a+n)).
double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the continued fraction for Γ(a, x), modified Lentz.
double upper_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw std::domain_error("gamma_q needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - lower_series(a, x);
  return upper_fraction(a, x);
}

double chi_square_sf(double statistic, int df) {
  if (df <= 0) throw std::domain_error("chi-square needs df >= 1");
  if (!(statistic >= 0.0)) throw std::domain_error("chi-square statistic must be non-negative");
  return gamma_q(0.5 * df, 0.5 * statistic);
}

ChiSquareResult chisq_goodness_of_fit(std::span<const double> observed, std::span<const double> expected,
                                      int df_override) {
  if (observed.size() != expected.size()) throw std::invalid_argument("observed/expected length mismatch");
  if (observed.size() < 2) throw std::invalid_argument("goodness of fit needs at least two cells");
  for (double e : expected) {
    if (!(e > 0.0)) throw std::invalid_argument("expected cell count must be positive");
  }
  ChiSquareResult out;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected[i];
    const double diff = observed[i] - e;
    out.statistic += diff * diff / e;
  }
  out.df = df_override > 0 ? df_override : static_cast<int>(observed.size()) - 1;
  out.p_value = chi_square_sf(out.statistic, out.df);
  return out;
}

ChiSquareResult chisq_goodness_of_fit_proportions(std::span<const double> observed,
                                                  std::span<const double> proportions, int df_override) {
  if (observed.size() != proportions.size()) throw std::invalid_argument("observed/expected length mismatch");
  const double n_obs = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double mass = std::accumulate(proportions.begin(), proportions.end(), 0.0);
  if (!(mass > 0.0)) throw std::invalid_argument("expected proportions must have positive mass");
  std::vector<double> expected;
  for (double p : proportions) expected.push_back(p / mass * n_obs);
  return chisq_goodness_of_fit(observed, expected, df_override);
}

ChiSquareResult chisq_goodness_of_fit_uniform(std::span<const double> observed) {
  const std::vector<double> uniform(observed.size(), 1.0);
  return chisq_goodness_of_fit_proportions(observed, uniform);
}

ChiSquareResult chisq_homogeneity(const std::vector<std::vector<double>>& table) {
  const std::size_t rows = table.size();
  if (rows < 2) throw std::invalid_argument("homogeneity test needs at least two rows");
  const std::size_t cols = table.front().size();
  if (cols < 2) throw std::invalid_argument("homogeneity test needs at least two columns");
  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (table[i].size() != cols) throw std::invalid_argument("ragged contingency table");
    for (std::size_t j = 0; j < cols; ++j) {
      row_sum[i] += table[i][j];
      col_sum[j] += table[i][j];
      total += table[i][j];
    }
  }
  for (double s : row_sum) {
    if (!(s > 0.0)) throw std::invalid_argument("degenerate margin: a row sums to zero");
  }
  for (double s : col_sum) {
    if (!(s > 0.0)) throw std::invalid_argument("degenerate margin: a column sums to zero");
  }
  ChiSquareResult out;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double e = row_sum[i] * col_sum[j] / total;
      const double diff = table[i][j] - e;
      out.statistic += diff * diff / e;
    }
  }
  out.df = static_cast<int>((rows - 1) * (cols - 1));
  out.p_value = chi_square_sf(out.statistic, out.df);
  return out;
}

}  // namespace mpsrisk
