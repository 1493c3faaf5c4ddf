#pragma once

#include <span>
#include <vector>

namespace mpsrisk {

// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a), a > 0, x >= 0.
// Power series below x < a + 1, Lentz continued fraction above.
double gamma_q(double a, double x);

// Upper tail P(X >= statistic) of a chi-square with df degrees of freedom.
double chi_square_sf(double statistic, int df);

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Pearson goodness of fit against expected counts taken as given (not
// rescaled to the observed total). df = cells - 1 unless df_override > 0.
// Throws std::invalid_argument on a non-positive expected cell or length
// mismatch.
ChiSquareResult chisq_goodness_of_fit(std::span<const double> observed, std::span<const double> expected,
                                      int df_override = 0);

// Expected counts = proportions (normalized to sum one) times the observed total.
ChiSquareResult chisq_goodness_of_fit_proportions(std::span<const double> observed,
                                                  std::span<const double> proportions, int df_override = 0);

// Uniform expected distribution over the cells.
ChiSquareResult chisq_goodness_of_fit_uniform(std::span<const double> observed);

// Pearson independence test on a rows x cols table stored row-major, no
// continuity correction. df = (rows - 1)(cols - 1). Throws on a zero margin.
ChiSquareResult chisq_homogeneity(const std::vector<std::vector<double>>& table);

}  // namespace mpsrisk
