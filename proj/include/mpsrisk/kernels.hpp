#pragma once

// Data-parallel batch kernels. Each has an OpenMP version and a serial
// reference with identical output; tests compare the two and the benchmark
// target times them.

#include "mpsrisk/agents.hpp"
#include "mpsrisk/geometry.hpp"
#include "mpsrisk/lottery.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mpsrisk {

struct PopulationConfig {
  std::string session_id = "sim";
  std::uint64_t session_seed = 0;
};

// Records for every agent, agent i's records contiguous and in agent order.
std::vector<ChoiceRecord> simulate_population(std::span<const AgentSpec> specs, const std::vector<MpsCase>& battery,
                                              const std::vector<HLRow>& rows, const PopulationConfig& config);
std::vector<ChoiceRecord> simulate_population_serial(std::span<const AgentSpec> specs,
                                                     const std::vector<MpsCase>& battery,
                                                     const std::vector<HLRow>& rows, const PopulationConfig& config);

// Random (prizes, lottery, monotone utility) triple: K in 3..6, every interior
// probability positive. A pure function of (seed, index).
struct ConcavityInstance {
  Lottery lottery;
  TabulatedUtility utility;
};
ConcavityInstance random_concavity_instance(std::uint64_t seed, std::uint64_t index);

// Indices i < count where prefers_base_to_all_spreads and is_concave_on_grid
// disagree on random_concavity_instance(seed, i).
struct ConcavitySweep {
  std::uint64_t instances = 0;
  std::uint64_t concave = 0;
  std::vector<std::uint64_t> counterexamples;
};
ConcavitySweep concavity_sweep(std::uint64_t count, std::uint64_t seed);
ConcavitySweep concavity_sweep_serial(std::uint64_t count, std::uint64_t seed);

std::vector<Region> classify_points(std::span<const NormalizedUtilityPoint> points);
std::vector<Region> classify_points_serial(std::span<const NormalizedUtilityPoint> points);

struct CurveSample {
  double r = 0.0;
  NormalizedUtilityPoint point;

  friend bool operator==(const CurveSample&, const CurveSample&) = default;
};
// crra_point on r_min, r_min + step, ... up to r_max (inclusive within step/2).
std::vector<CurveSample> crra_curve(double r_min, double r_max, double step);
std::vector<CurveSample> crra_curve_serial(double r_min, double r_max, double step);

}  // namespace mpsrisk
