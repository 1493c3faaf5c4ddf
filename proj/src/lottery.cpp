#include "mpsrisk/lottery.hpp"

#include <stdexcept>
#include <string>

namespace mpsrisk {

PrizeVector::PrizeVector(std::vector<Rational> prizes) : prizes_(std::move(prizes)) {
  if (prizes_.size() < 2) throw std::invalid_argument("a prize vector needs at least two prizes");
  for (std::size_t i = 1; i < prizes_.size(); ++i) {
    if (!(prizes_[i - 1] < prizes_[i]))
      throw std::invalid_argument("prizes must be strictly ascending (index " + std::to_string(i + 1) + ")");
  }
}

const PrizeVector& standard_prizes() {
  static const PrizeVector prizes({Rational(1), Rational(16), Rational(21), Rational(77, 2)});
  return prizes;
}

Lottery::Lottery(PrizeVector prizes, std::vector<Rational> probs)
    : prizes_(std::move(prizes)), probs_(std::move(probs)) {
  if (probs_.size() != prizes_.size())
    throw std::invalid_argument("lottery has " + std::to_string(probs_.size()) + " probabilities for " +
                                std::to_string(prizes_.size()) + " prizes");
  Rational total = 0;
  for (const auto& p : probs_) {
    if (p < 0) throw std::invalid_argument("negative probability " + format_rational(p));
    total += p;
  }
  if (total != 1) throw std::invalid_argument("probabilities sum to " + format_rational(total) + ", not 1");
}

Lottery Lottery::from_percentages(PrizeVector prizes, std::span<const long long> percents) {
  std::vector<Rational> probs;
  probs.reserve(percents.size());
  for (long long p : percents) probs.push_back(percent(p));
  return Lottery(std::move(prizes), std::move(probs));
}

TabulatedUtility::TabulatedUtility(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw std::invalid_argument("utility values must be finite");
    if (i > 0 && values_[i] < values_[i - 1])
      throw std::invalid_argument("utility must be non-decreasing (index " + std::to_string(i + 1) + ")");
  }
}

double TabulatedUtility::scale() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

MpsFamily::MpsFamily(Lottery base, std::map<int, Lottery> spreads)
    : base_(std::move(base)), spreads_(std::move(spreads)) {
  const int size = static_cast<int>(base_.size());
  const Rational mean = expected_value(base_);
  for (const auto& [k, spread] : spreads_) {
    if (k <= 1 || k >= size) throw std::invalid_argument("spread index " + std::to_string(k) + " is not interior");
    if (base_.prob(k - 1) == 0) throw std::invalid_argument("spread at k=" + std::to_string(k) + " but base has no mass there");
    if (!(spread.prizes() == base_.prizes())) throw std::invalid_argument("spread prize vector differs from base");
    if (spread.prob(k - 1) != 0) throw std::invalid_argument("spread keeps mass at its own index");
    if (expected_value(spread) != mean) throw std::invalid_argument("spread does not preserve the mean");
  }
  for (int k = 2; k < size; ++k) {
    if (base_.prob(k - 1) > 0 && !spreads_.contains(k))
      throw std::invalid_argument("missing spread for interior index " + std::to_string(k));
  }
}

bool MpsFamily::partial() const {
  for (std::size_t k = 1; k + 1 < base_.size(); ++k) {
    if (base_.prob(k) == 0) return true;
  }
  return false;
}

Rational expected_value(const Lottery& lottery) {
  Rational mean = 0;
  for (std::size_t i = 0; i < lottery.size(); ++i) mean += lottery.prob(i) * lottery.prizes()[i];
  return mean;
}

double expected_utility(const Lottery& lottery, const TabulatedUtility& utility) {
  if (utility.size() != lottery.size())
    throw std::invalid_argument("utility table has " + std::to_string(utility.size()) + " entries for " +
                                std::to_string(lottery.size()) + " prizes");
  double eu = 0.0;
  for (std::size_t i = 0; i < lottery.size(); ++i) {
    if (lottery.prob(i) != 0) eu += to_double(lottery.prob(i)) * utility[i];
  }
  return eu;
}

Lottery mps_spread(const Lottery& lottery, int k) {
  const int size = static_cast<int>(lottery.size());
  if (k <= 1 || k >= size)
    throw std::out_of_range("spread index " + std::to_string(k) + " is not interior to 1.." + std::to_string(size));
  const std::size_t mid = static_cast<std::size_t>(k - 1);
  const Rational& mass = lottery.prob(mid);
  if (mass == 0) throw std::domain_error("no probability mass at index " + std::to_string(k) + "; spread undefined");

  const auto& x = lottery.prizes();
  const Rational width = x[mid + 1] - x[mid - 1];
  const Rational down = (x[mid + 1] - x[mid]) / width;
  const Rational up = (x[mid] - x[mid - 1]) / width;

  std::vector<Rational> probs(lottery.probs().begin(), lottery.probs().end());
  probs[mid - 1] += mass * down;
  probs[mid + 1] += mass * up;
  probs[mid] = 0;
  return Lottery(x, std::move(probs));
}

MpsFamily mps_family(const Lottery& lottery) {
  std::map<int, Lottery> spreads;
  const int size = static_cast<int>(lottery.size());
  for (int k = 2; k < size; ++k) {
    if (lottery.prob(static_cast<std::size_t>(k - 1)) > 0) spreads.emplace(k, mps_spread(lottery, k));
  }
  return MpsFamily(lottery, std::move(spreads));
}

bool is_concave_on_grid(const TabulatedUtility& utility, const PrizeVector& prizes) {
  if (utility.size() != prizes.size()) throw std::invalid_argument("utility/prize length mismatch");
  // Cross-multiplied slope comparison; both gaps are positive.
  for (std::size_t k = 1; k + 1 < prizes.size(); ++k) {
    const double gap_left = to_double(prizes[k] - prizes[k - 1]);
    const double gap_right = to_double(prizes[k + 1] - prizes[k]);
    const double left = (utility[k] - utility[k - 1]) * gap_right;
    const double right = (utility[k + 1] - utility[k]) * gap_left;
    if (!weakly_geq(left, right, utility.scale() * std::max(gap_left, gap_right))) return false;
  }
  return true;
}

bool prefers_base_to_all_spreads(const TabulatedUtility& utility, const MpsFamily& family) {
  if (family.empty()) throw std::invalid_argument("empty spread family: the concavity test is vacuous");
  const double base_eu = expected_utility(family.base(), utility);
  for (const auto& [k, spread] : family.spreads()) {
    if (!weakly_geq(base_eu, expected_utility(spread, utility), utility.scale())) return false;
  }
  return true;
}

Lottery mixture(const Rational& weight, const Lottery& a, const Lottery& b) {
  if (weight < 0 || weight > 1) throw std::invalid_argument("mixture weight outside [0,1]");
  if (!(a.prizes() == b.prizes())) throw std::invalid_argument("mixture of lotteries over different prizes");
  std::vector<Rational> probs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) probs[i] = weight * a.prob(i) + (1 - weight) * b.prob(i);
  return Lottery(a.prizes(), std::move(probs));
}

}  // namespace mpsrisk
