#include "mpsrisk/agents.hpp"

#include <cstdio>
#include <stdexcept>

namespace mpsrisk {

AgentSpec::AgentSpec(UtilityFamily utility_, double tremble_, std::uint64_t rng_seed_)
    : utility(std::move(utility_)), tremble(tremble_), rng_seed(rng_seed_) {
  if (!(tremble >= 0.0 && tremble < 1.0)) throw std::invalid_argument("tremble must lie in [0, 1)");
}

int preferred(const TabulatedUtility& utility, const Lottery& first, const Lottery& second) {
  if (!(first.prizes() == second.prizes())) throw std::invalid_argument("choice between lotteries over different prizes");
  const double eu_first = expected_utility(first, utility);
  const double eu_second = expected_utility(second, utility);
  return weakly_geq(eu_first, eu_second, utility.scale()) ? 0 : 1;
}

namespace {

bool trembles(const AgentSpec& agent, CounterRng& rng) { return agent.tremble > 0.0 && rng.uniform() < agent.tremble; }

int pick(const AgentSpec& agent, const TabulatedUtility& u, const Lottery& first, const Lottery& second,
         CounterRng& rng) {
  if (trembles(agent, rng)) return static_cast<int>(rng.below(2));
  return preferred(u, first, second);
}

}  // namespace

int choose(const AgentSpec& agent, const Lottery& first, const Lottery& second, CounterRng& rng) {
  if (!(first.prizes() == second.prizes())) throw std::invalid_argument("choice between lotteries over different prizes");
  return pick(agent, tabulate(agent.utility, first.prizes()), first, second, rng);
}

std::vector<ChoicePattern> simulate_mps(const AgentSpec& agent, const std::vector<MpsCase>& battery, CounterRng& rng) {
  std::vector<ChoicePattern> out;
  out.reserve(battery.size());
  for (const auto& c : battery) {
    const TabulatedUtility u = tabulate(agent.utility, c.base().prizes());
    const bool over_b = pick(agent, u, c.base(), c.spread_b(), rng) == 0;
    const bool over_c = pick(agent, u, c.base(), c.spread_c(), rng) == 0;
    out.push_back(make_pattern(over_b, over_c));
  }
  return out;
}

HLOutcome simulate_hl(const AgentSpec& agent, const std::vector<HLRow>& rows, CounterRng& rng) {
  HLOutcome out;
  if (rows.empty()) return out;
  if (trembles(agent, rng)) {
    // A uniformly random list among the single-switch ones.
    const auto s = static_cast<int>(rng.below(rows.size() + 1));
    for (std::size_t i = 0; i < rows.size(); ++i) out.safe.push_back(static_cast<int>(i) < s);
    out.safe_count = s;
    return out;
  }
  const TabulatedUtility u = tabulate(agent.utility, rows.front().safe.prizes());
  bool switched = false;
  for (const auto& row : rows) {
    const bool safe = preferred(u, row.safe, row.risky) == 0;
    out.safe.push_back(safe);
    if (safe) {
      ++out.safe_count;
      if (switched) out.single_switch = false;
    } else {
      switched = true;
    }
  }
  return out;
}

CounterRng agent_stream(const AgentSpec& agent, std::size_t index) {
  return CounterRng(prf(agent.rng_seed, static_cast<std::uint64_t>(index)));
}

std::string agent_subject_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "agent-%06zu", index + 1);
  return buf;
}

std::vector<ChoiceRecord> simulate_subject(const AgentSpec& agent, std::size_t index,
                                           const std::vector<MpsCase>& battery, const std::vector<HLRow>& rows,
                                           const std::string& session_id, std::uint64_t session_seed) {
  CounterRng rng = agent_stream(agent, index);
  const std::string subject = agent_subject_id(index);
  const std::uint64_t seed = display_seed(session_seed, subject);
  std::vector<ChoiceRecord> out;
  out.reserve(rows.size() + 2 * battery.size());
  std::int64_t ordinal = 0;

  const HLOutcome hl = simulate_hl(agent, rows, rng);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.push_back(ChoiceRecord{session_id, subject, 1, std::to_string(rows[i].index), "",
                               hl.safe[i] ? "safe" : "risky", seed, ordinal++});
  }

  const std::vector<ChoicePattern> patterns = simulate_mps(agent, battery, rng);
  const DisplayPlan plan = display_plan(session_seed, subject, case_ids(battery));
  for (const auto& screen : plan.screens) {
    std::size_t pos = 0;
    while (battery[pos].id != screen.case_id) ++pos;
    const ChoicePattern p = patterns[pos];
    const bool over_b = p == ChoicePattern::AA || p == ChoicePattern::AC;
    const bool over_c = p == ChoicePattern::AA || p == ChoicePattern::BA;
    for (const auto& pair : screen.decision_order) {
      const std::string chosen = pair == "AB" ? (over_b ? "A" : "B") : (over_c ? "A" : "C");
      out.push_back(ChoiceRecord{session_id, subject, 2, screen.case_id, pair, chosen, seed, ordinal++});
    }
  }
  return out;
}

}  // namespace mpsrisk
