#include "mpsrisk/tasks.hpp"

#include "mpsrisk/prf.hpp"

#include <stdexcept>

namespace mpsrisk {

namespace {

struct TableRow {
  const char* id;
  std::array<long long, 4> a, b, c;
};

// Probabilities in percent over $1, $16, $21, $38.5.
constexpr std::array<TableRow, 6> kTableOne{{
    {"C1", {21, 16, 63, 0}, {25, 0, 75, 0}, {21, 65, 0, 14}},
    {"C2", {27, 64, 9, 0}, {43, 0, 57, 0}, {27, 71, 0, 2}},
    {"C3", {57, 16, 27, 0}, {61, 0, 39, 0}, {57, 37, 0, 6}},
    {"C4", {0, 16, 63, 21}, {4, 0, 75, 21}, {0, 65, 0, 35}},
    {"C5", {0, 64, 27, 9}, {16, 0, 75, 9}, {0, 85, 0, 15}},
    {"C6", {0, 16, 27, 57}, {4, 0, 39, 57}, {0, 37, 0, 63}},
}};

Lottery from_row(const std::array<long long, 4>& percents) {
  return Lottery::from_percentages(standard_prizes(), percents);
}

std::vector<MpsCase> build_paper_battery() {
  std::vector<MpsCase> cases;
  for (const auto& row : kTableOne) {
    std::map<int, Lottery> spreads;
    spreads.emplace(2, from_row(row.b));
    spreads.emplace(3, from_row(row.c));
    cases.push_back(MpsCase{row.id, MpsFamily(from_row(row.a), std::move(spreads))});
  }
  return cases;
}

}  // namespace

const Lottery& MpsCase::spread_b() const {
  auto it = family.spreads().find(2);
  if (it == family.spreads().end()) throw std::logic_error("case " + id + " has no L_B spread");
  return it->second;
}

const Lottery& MpsCase::spread_c() const {
  auto it = family.spreads().find(3);
  if (it == family.spreads().end()) throw std::logic_error("case " + id + " has no L_C spread");
  return it->second;
}

bool paper_battery_self_check() {
  for (const auto& c : build_paper_battery()) {
    if (!(mps_family(c.base()) == c.family)) return false;
  }
  return true;
}

const std::vector<MpsCase>& paper_battery() {
  static const std::vector<MpsCase> battery = [] {
    if (!paper_battery_self_check())
      throw std::logic_error("embedded spread battery disagrees with regenerated spreads");
    return build_paper_battery();
  }();
  return battery;
}

const std::vector<HLRow>& hl_battery() {
  static const std::vector<HLRow> rows = [] {
    std::vector<HLRow> out;
    for (int i = 1; i <= 10; ++i) {
      const Rational p(i, 10);
      Lottery safe(standard_prizes(), {0, 1 - p, p, 0});
      Lottery risky(standard_prizes(), {1 - p, 0, 0, p});
      out.push_back(HLRow{i, p, std::move(safe), std::move(risky)});
    }
    return out;
  }();
  return rows;
}

std::vector<MpsCase> custom_battery(const std::vector<Lottery>& bases) {
  std::vector<MpsCase> out;
  out.reserve(bases.size());
  for (std::size_t i = 0; i < bases.size(); ++i) {
    out.push_back(MpsCase{"U" + std::to_string(i + 1), mps_family(bases[i])});
  }
  return out;
}

std::uint64_t display_seed(std::uint64_t session_seed, const std::string& subject_id) {
  return derive_key(session_seed, "subject:" + subject_id);
}

ScreenLayout screen_layout(std::uint64_t session_seed, const std::string& subject_id, const std::string& case_id) {
  CounterRng rng(derive_key(display_seed(session_seed, subject_id), "screen:" + case_id));
  ScreenLayout layout;
  layout.case_id = case_id;
  shuffle(layout.lottery_order.begin(), layout.lottery_order.end(), rng);
  shuffle(layout.decision_order.begin(), layout.decision_order.end(), rng);
  for (auto& buttons : layout.button_order) shuffle(buttons.begin(), buttons.end(), rng);
  return layout;
}

DisplayPlan display_plan(std::uint64_t session_seed, const std::string& subject_id,
                         const std::vector<std::string>& ids) {
  DisplayPlan plan;
  plan.seed = session_seed;
  plan.subject_id = subject_id;
  std::vector<std::string> order = ids;
  CounterRng rng(derive_key(display_seed(session_seed, subject_id), "screen-order"));
  shuffle(order.begin(), order.end(), rng);
  for (const auto& id : order) plan.screens.push_back(screen_layout(session_seed, subject_id, id));
  return plan;
}

DisplayPlan display_plan(std::uint64_t session_seed, const std::string& subject_id) {
  return display_plan(session_seed, subject_id, case_ids(paper_battery()));
}

std::vector<std::string> case_ids(const std::vector<MpsCase>& battery) {
  std::vector<std::string> ids;
  for (const auto& c : battery) ids.push_back(c.id);
  return ids;
}

}  // namespace mpsrisk
