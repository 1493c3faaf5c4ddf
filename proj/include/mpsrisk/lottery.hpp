#pragma once

#include "mpsrisk/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace mpsrisk {

// Utility levels are doubles. Differences smaller than this fraction of the
// utility scale are treated as exact ties and resolved toward the weak side.
inline constexpr double kTieTolerance = 1e-12;

inline bool weakly_geq(double lhs, double rhs, double scale) {
  return lhs >= rhs - kTieTolerance * std::max(1.0, std::abs(scale));
}

// Strictly ascending money prizes, at least two of them.
class PrizeVector {
 public:
  explicit PrizeVector(std::vector<Rational> prizes);

  std::size_t size() const { return prizes_.size(); }
  const Rational& operator[](std::size_t i) const { return prizes_[i]; }
  std::span<const Rational> values() const { return prizes_; }

  friend bool operator==(const PrizeVector&, const PrizeVector&) = default;

 private:
  std::vector<Rational> prizes_;
};

// The four prizes shared by the mean-preserving-spread cases and the
// Holt-Laury list: $1, $16, $21, $38.5.
const PrizeVector& standard_prizes();

class Lottery {
 public:
  // Throws std::invalid_argument unless probs has one non-negative entry per
  // prize and the entries sum to exactly one.
  Lottery(PrizeVector prizes, std::vector<Rational> probs);

  // Probabilities given as integer percentages.
  static Lottery from_percentages(PrizeVector prizes, std::span<const long long> percents);

  const PrizeVector& prizes() const { return prizes_; }
  std::span<const Rational> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  const Rational& prob(std::size_t i) const { return probs_[i]; }

  friend bool operator==(const Lottery&, const Lottery&) = default;

 private:
  PrizeVector prizes_;
  std::vector<Rational> probs_;
};

// Non-decreasing utility levels, one per prize.
class TabulatedUtility {
 public:
  explicit TabulatedUtility(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  double scale() const;

  friend bool operator==(const TabulatedUtility&, const TabulatedUtility&) = default;

 private:
  std::vector<double> values_;
};

// A base lottery together with its one-step mean-preserving spreads, keyed by
// the 1-based interior prize index whose mass was moved out.
class MpsFamily {
 public:
  MpsFamily(Lottery base, std::map<int, Lottery> spreads);

  const Lottery& base() const { return base_; }
  const std::map<int, Lottery>& spreads() const { return spreads_; }
  bool empty() const { return spreads_.empty(); }

  // True when some interior prize carries no mass in the base, so the
  // concavity test only covers part of the grid.
  bool partial() const;

  friend bool operator==(const MpsFamily&, const MpsFamily&) = default;

 private:
  Lottery base_;
  std::map<int, Lottery> spreads_;
};

Rational expected_value(const Lottery& lottery);

double expected_utility(const Lottery& lottery, const TabulatedUtility& utility);

// Moves all mass at 1-based interior index k to its neighbours so that the
// mean is unchanged: the share (x[k+1]-x[k])/(x[k+1]-x[k-1]) goes down to k-1
// and (x[k]-x[k-1])/(x[k+1]-x[k-1]) goes up to k+1.
// Throws std::out_of_range if k is not interior and std::domain_error if the
// base has no mass at k.
Lottery mps_spread(const Lottery& lottery, int k);

MpsFamily mps_family(const Lottery& lottery);

// Weak slope test on the prize grid: the utility's chord slopes never increase.
bool is_concave_on_grid(const TabulatedUtility& utility, const PrizeVector& prizes);

// Weak expected-utility preference of the base over every spread in the family.
// Throws std::invalid_argument for an empty family.
bool prefers_base_to_all_spreads(const TabulatedUtility& utility, const MpsFamily& family);

// Componentwise mixture weight*a + (1-weight)*b over a shared prize vector.
Lottery mixture(const Rational& weight, const Lottery& a, const Lottery& b);

}  // namespace mpsrisk
