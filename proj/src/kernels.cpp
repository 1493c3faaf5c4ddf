#include "mpsrisk/kernels.hpp"

#include "mpsrisk/crra.hpp"
#include "mpsrisk/prf.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

namespace mpsrisk {

namespace {

// Exceptions may not cross an OpenMP region boundary; the first one thrown by
// any iteration is captured and rethrown after the loop.
class ExceptionSlot {
 public:
  template <typename F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(mpsrisk_exception_slot)
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::exception_ptr error_;
};

std::vector<ChoiceRecord> concatenate(std::vector<std::vector<ChoiceRecord>>& parts) {
  std::size_t total = 0;
  for (const auto& p : parts) total += p.size();
  std::vector<ChoiceRecord> out;
  out.reserve(total);
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

bool disagrees(const ConcavityInstance& inst, bool& concave) {
  concave = is_concave_on_grid(inst.utility, inst.lottery.prizes());
  return prefers_base_to_all_spreads(inst.utility, mps_family(inst.lottery)) != concave;
}

long long sample_count(double r_min, double r_max, double step) {
  if (!(step > 0.0) || !(r_max >= r_min)) throw std::invalid_argument("crra_curve needs step > 0 and r_max >= r_min");
  return static_cast<long long>(std::floor((r_max - r_min) / step + 0.5)) + 1;
}

}  // namespace

std::vector<ChoiceRecord> simulate_population_serial(std::span<const AgentSpec> specs,
                                                     const std::vector<MpsCase>& battery,
                                                     const std::vector<HLRow>& rows, const PopulationConfig& config) {
  std::vector<ChoiceRecord> out;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto part = simulate_subject(specs[i], i, battery, rows, config.session_id, config.session_seed);
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<ChoiceRecord> simulate_population(std::span<const AgentSpec> specs, const std::vector<MpsCase>& battery,
                                              const std::vector<HLRow>& rows, const PopulationConfig& config) {
  std::vector<std::vector<ChoiceRecord>> parts(specs.size());
  ExceptionSlot slot;
  const auto n = static_cast<long long>(specs.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    slot.run([&] {
      const auto idx = static_cast<std::size_t>(i);
      parts[idx] = simulate_subject(specs[idx], idx, battery, rows, config.session_id, config.session_seed);
    });
  }
  slot.rethrow();
  return concatenate(parts);
}

ConcavityInstance random_concavity_instance(std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(prf(seed, index));
  const std::size_t k = 3 + rng.below(4);

  std::vector<Rational> prizes;
  Rational x(static_cast<long long>(rng.below(21)));
  for (std::size_t i = 0; i < k; ++i) {
    prizes.push_back(x);
    x += Rational(static_cast<long long>(1 + rng.below(40)), static_cast<long long>(1 + rng.below(4)));
  }

  std::vector<long long> weights(k);
  long long total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const bool interior = i > 0 && i + 1 < k;
    weights[i] = interior ? static_cast<long long>(1 + rng.below(20)) : static_cast<long long>(rng.below(10));
    total += weights[i];
  }
  std::vector<Rational> probs;
  for (long long w : weights) probs.push_back(Rational(w, total));

  // Slopes per gap; the mode mixes concave, arbitrary, linear and
  // tie-heavy shapes so both outcomes and the weak boundary all occur.
  std::vector<double> slopes(k - 1);
  const auto mode = rng.below(4);
  for (auto& s : slopes) {
    switch (mode) {
      case 0:
      case 1: s = rng.uniform(); break;
      case 2: s = 0.5; break;
      default: s = 0.25 * static_cast<double>(rng.below(5)); break;
    }
  }
  if (mode == 0 || mode == 3) std::sort(slopes.begin(), slopes.end(), std::greater<>());

  std::vector<double> values(k);
  values[0] = 5.0 * rng.uniform();
  for (std::size_t i = 1; i < k; ++i) values[i] = values[i - 1] + slopes[i - 1] * to_double(prizes[i] - prizes[i - 1]);

  return ConcavityInstance{Lottery(PrizeVector(std::move(prizes)), std::move(probs)), TabulatedUtility(std::move(values))};
}

ConcavitySweep concavity_sweep_serial(std::uint64_t count, std::uint64_t seed) {
  ConcavitySweep out;
  out.instances = count;
  for (std::uint64_t i = 0; i < count; ++i) {
    bool concave = false;
    if (disagrees(random_concavity_instance(seed, i), concave)) out.counterexamples.push_back(i);
    if (concave) ++out.concave;
  }
  return out;
}

ConcavitySweep concavity_sweep(std::uint64_t count, std::uint64_t seed) {
  std::vector<char> flags(count, 0);
  std::uint64_t concave_total = 0;
  ExceptionSlot slot;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : concave_total)
  for (long long i = 0; i < n; ++i) {
    slot.run([&] {
      bool concave = false;
      flags[static_cast<std::size_t>(i)] = disagrees(random_concavity_instance(seed, static_cast<std::uint64_t>(i)), concave);
      if (concave) ++concave_total;
    });
  }
  slot.rethrow();
  ConcavitySweep out;
  out.instances = count;
  out.concave = concave_total;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (flags[i]) out.counterexamples.push_back(i);
  }
  return out;
}

std::vector<Region> classify_points_serial(std::span<const NormalizedUtilityPoint> points) {
  std::vector<Region> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(classify_point(p));
  return out;
}

std::vector<Region> classify_points(std::span<const NormalizedUtilityPoint> points) {
  std::vector<Region> out(points.size());
  const auto n = static_cast<long long>(points.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = classify_point(points[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<CurveSample> crra_curve_serial(double r_min, double r_max, double step) {
  const long long n = sample_count(r_min, r_max, step);
  std::vector<CurveSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const double r = r_min + static_cast<double>(i) * step;
    out.push_back(CurveSample{r, crra_point(r)});
  }
  return out;
}

std::vector<CurveSample> crra_curve(double r_min, double r_max, double step) {
  const long long n = sample_count(r_min, r_max, step);
  std::vector<CurveSample> out(static_cast<std::size_t>(n));
  ExceptionSlot slot;
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    slot.run([&] {
      const double r = r_min + static_cast<double>(i) * step;
      out[static_cast<std::size_t>(i)] = CurveSample{r, crra_point(r)};
    });
  }
  slot.rethrow();
  return out;
}

}  // namespace mpsrisk
