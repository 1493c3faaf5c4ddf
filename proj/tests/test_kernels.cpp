#include "mpsrisk/analysis.hpp"
#include "mpsrisk/kernels.hpp"

#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <set>

using namespace mpsrisk;

namespace {

std::vector<AgentSpec> population(const UtilityFamily& u, std::size_t n, double tremble = 0.0, std::uint64_t seed = 1) {
  return std::vector<AgentSpec>(n, AgentSpec(u, tremble, seed));
}

std::vector<ChoiceRecord> simulate(const std::vector<AgentSpec>& specs, std::uint64_t seed = 5) {
  PopulationConfig config;
  config.session_seed = seed;
  return simulate_population(specs, paper_battery(), hl_battery(), config);
}

}  // namespace

TEST_CASE("parallel population simulation matches the serial reference") {
  std::vector<AgentSpec> specs;
  for (int i = 0; i < 300; ++i) {
    specs.emplace_back(Crra{-1.0 + 0.01 * i}, 0.2, 17);
  }
  PopulationConfig config;
  config.session_id = "run";
  config.session_seed = 8;
  const auto serial = simulate_population_serial(specs, paper_battery(), hl_battery(), config);
  for (int threads : {1, 2, 4, 7}) {
    omp_set_num_threads(threads);
    CHECK(simulate_population(specs, paper_battery(), hl_battery(), config) == serial);
  }
  CHECK(serial.size() == 300 * 22);
}

TEST_CASE("parallel concavity sweep matches the serial reference") {
  omp_set_num_threads(4);
  const auto a = concavity_sweep(2000, 3);
  const auto b = concavity_sweep_serial(2000, 3);
  CHECK(a.instances == b.instances);
  CHECK(a.concave == b.concave);
  CHECK(a.counterexamples == b.counterexamples);
  CHECK(a.counterexamples.empty());
}

TEST_CASE("random concavity instances cover K = 3..6 and both outcomes") {
  std::set<std::size_t> sizes;
  int concave = 0;
  for (std::uint64_t i = 0; i < 400; ++i) {
    const auto inst = random_concavity_instance(12, i);
    sizes.insert(inst.lottery.size());
    for (std::size_t k = 1; k + 1 < inst.lottery.size(); ++k) CHECK(inst.lottery.prob(k) > 0);
    if (is_concave_on_grid(inst.utility, inst.lottery.prizes())) ++concave;
    CHECK(random_concavity_instance(12, i).lottery == inst.lottery);
  }
  CHECK(sizes == std::set<std::size_t>{3, 4, 5, 6});
  CHECK(concave > 20);
  CHECK(concave < 380);
}

TEST_CASE("parallel summarize matches the serial reference") {
  std::vector<AgentSpec> specs;
  for (int i = 0; i < 200; ++i) specs.emplace_back(Tabulated{{0, 0.01 * (i % 50), 0.5 + 0.002 * i, 1}}, 0.3, 2);
  const auto records = simulate(specs);
  omp_set_num_threads(4);
  const auto a = summarize(records);
  const auto b = summarize_serial(records);
  CHECK(a.subjects == b.subjects);
  CHECK(a.audit == b.audit);
  CHECK(a.case_ids == b.case_ids);
}

TEST_CASE("100 CRRA 0.5 agents: all (A,A) and all s = 6") {
  const auto report = analyze(simulate(population(Crra{0.5}, 100)));
  CHECK(report.patterns.subjects == 100);
  CHECK(report.patterns.pooled_share(ChoicePattern::AA) == 1.0);
  CHECK(report.cross_tab.hl_histogram[6] == 100);
  REQUIRE(report.cross_tab.groups.size() == 1);
  CHECK(report.cross_tab.groups[0].safe_count == 6);
  CHECK(report.cross_tab.groups[0].share() == 1);
  CHECK(report.consistency.perfectly_consistent == 100);
}

TEST_CASE("Green and Yellow agents spread over safe counts with no (A,A)") {
  std::vector<AgentSpec> specs;
  // Points inside the Green (u2 < 7/9 u1 + 2/9, below 4/3 u1) and Yellow regions with varied HL triangles.
  for (int i = 0; i < 50; ++i) {
    const double u1 = 0.02 + 0.0195 * i;
    specs.emplace_back(Tabulated{{0, u1, u1 + 0.5 * (7.0 / 9.0 * u1 + 2.0 / 9.0 - u1), 1}});
  }
  for (int i = 0; i < 50; ++i) {
    const double u1 = 0.005 + 0.0075 * i;
    const double lo = std::max(4.0 / 3.0 * u1, 7.0 / 9.0 * u1 + 2.0 / 9.0);
    specs.emplace_back(Tabulated{{0, u1, lo + 0.5 * (1 - lo), 1}});
  }
  const auto report = analyze(simulate(specs));
  CHECK(report.patterns.pooled[static_cast<int>(ChoicePattern::AA)] == 0);
  int groups = 0;
  for (long long n : report.cross_tab.hl_histogram) groups += n > 0 ? 1 : 0;
  CHECK(groups >= 6);
  for (const auto& g : report.cross_tab.groups) CHECK(g.aa_choices == 0);
}

TEST_CASE("high-tremble populations approach the chance consistency baseline") {
  const auto report = analyze(simulate(population(Crra{0.5}, 4000, 0.999, 21)));
  const double p = std::pow(0.25, 5);
  const double observed = static_cast<double>(report.consistency.perfectly_consistent) / 4000.0;
  CHECK(std::abs(observed - p) < 4 * std::sqrt(p * (1 - p) / 4000.0) + 1e-12);
  for (ChoicePattern pat : kAllPatterns) CHECK(std::abs(report.patterns.pooled_share(pat) - 0.25) < 0.015);
}

TEST_CASE("classify_points handles empty input") {
  CHECK(classify_points({}).empty());
  CHECK(crra_curve(0.0, 0.0, 0.1).size() == 1);
  CHECK_THROWS(crra_curve(0.0, 1.0, 0.0));
}
