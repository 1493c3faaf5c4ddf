#pragma once

#include "mpsrisk/geometry.hpp"
#include "mpsrisk/prf.hpp"
#include "mpsrisk/records.hpp"
#include "mpsrisk/tasks.hpp"
#include "mpsrisk/utility_family.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mpsrisk {

struct AgentSpec {
  UtilityFamily utility;
  double tremble = 0.0;  // probability of a uniformly random pick, in [0, 1)
  std::uint64_t rng_seed = 0;

  AgentSpec(UtilityFamily utility_, double tremble_ = 0.0, std::uint64_t rng_seed_ = 0);
};

// Expected-utility choice between two lotteries over the same prizes:
// 0 picks `first`, 1 picks `second`. Ties go to `first`. Throws
// std::invalid_argument for different prize vectors.
int preferred(const TabulatedUtility& utility, const Lottery& first, const Lottery& second);

// As preferred(), but with probability agent.tremble the pick is a fair coin.
int choose(const AgentSpec& agent, const Lottery& first, const Lottery& second, CounterRng& rng);

std::vector<ChoicePattern> simulate_mps(const AgentSpec& agent, const std::vector<MpsCase>& battery, CounterRng& rng);

struct HLOutcome {
  std::vector<bool> safe;  // one entry per row, in row order
  int safe_count = 0;
  bool single_switch = true;
};

HLOutcome simulate_hl(const AgentSpec& agent, const std::vector<HLRow>& rows, CounterRng& rng);

// Per-agent RNG stream, a function of (agent seed, agent index) only.
CounterRng agent_stream(const AgentSpec& agent, std::size_t index);

std::string agent_subject_id(std::size_t index);

// Every record for one simulated subject: ten HL rows, then twelve spread
// decisions in the subject's display-plan order. Timestamps are decision
// ordinals.
std::vector<ChoiceRecord> simulate_subject(const AgentSpec& agent, std::size_t index,
                                           const std::vector<MpsCase>& battery, const std::vector<HLRow>& rows,
                                           const std::string& session_id, std::uint64_t session_seed);

}  // namespace mpsrisk
