#pragma once

#include "mpsrisk/lottery.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mpsrisk {

// One screen of the spread task: base L_A with its spreads. For four prizes
// L_B is the spread at k = 2 and L_C the spread at k = 3.
struct MpsCase {
  std::string id;
  MpsFamily family;

  const Lottery& base() const { return family.base(); }
  const Lottery& spread_b() const;
  const Lottery& spread_c() const;
  bool partial() const { return family.partial(); }

  friend bool operator==(const MpsCase&, const MpsCase&) = default;
};

// Row i of the Holt-Laury list, p = i/10, both lotteries written over the
// standard four-prize vector: safe pays $16 or $21, risky $1 or $38.5.
struct HLRow {
  int index = 0;
  Rational p;
  Lottery safe;
  Lottery risky;

  friend bool operator==(const HLRow&, const HLRow&) = default;
};

// The six cases C1..C6 (integer percentages over $1, $16, $21, $38.5).
// L_B and L_C are stored, not derived; construction throws std::logic_error
// if they disagree with mps_spread applied to L_A.
const std::vector<MpsCase>& paper_battery();

// Recomputes every stored spread from its base; true when all match exactly.
bool paper_battery_self_check();

const std::vector<HLRow>& hl_battery();

// One case per base lottery, ids "U1", "U2", ...
std::vector<MpsCase> custom_battery(const std::vector<Lottery>& bases);

struct ScreenLayout {
  std::string case_id;
  std::array<char, 3> lottery_order{'A', 'B', 'C'};          // left-to-right placement
  std::array<std::string, 2> decision_order{"AB", "AC"};     // top-to-bottom
  std::array<std::array<char, 2>, 2> button_order{{{'A', 'B'}, {'A', 'C'}}};  // per AB / AC decision

  friend bool operator==(const ScreenLayout&, const ScreenLayout&) = default;
};

// Per-subject presentation of part two: screen order plus per-screen
// placement of lotteries, decisions and buttons. A deterministic function of
// (seed, subject, screen).
struct DisplayPlan {
  std::uint64_t seed = 0;
  std::string subject_id;
  std::vector<ScreenLayout> screens;

  friend bool operator==(const DisplayPlan&, const DisplayPlan&) = default;
};

ScreenLayout screen_layout(std::uint64_t session_seed, const std::string& subject_id, const std::string& case_id);

DisplayPlan display_plan(std::uint64_t session_seed, const std::string& subject_id,
                         const std::vector<std::string>& case_ids);
DisplayPlan display_plan(std::uint64_t session_seed, const std::string& subject_id);

// Seed recorded with each choice: identifies the subject's display stream.
std::uint64_t display_seed(std::uint64_t session_seed, const std::string& subject_id);

std::vector<std::string> case_ids(const std::vector<MpsCase>& battery);

}  // namespace mpsrisk
