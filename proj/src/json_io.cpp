#include "mpsrisk/json_io.hpp"

#include <cmath>
#include <stdexcept>

namespace mpsrisk {

using nlohmann::json;

json rational_json(const Rational& value) { return format_rational(value); }

Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  throw std::invalid_argument("rational must be a string like \"77/2\" or an integer");
}

json lottery_json(const Lottery& lottery) {
  json prizes = json::array();
  for (const auto& p : lottery.prizes().values()) prizes.push_back(rational_json(p));
  json probs = json::array();
  for (const auto& p : lottery.probs()) probs.push_back(rational_json(p));
  return json{{"prizes", prizes}, {"probs", probs}};
}

Lottery lottery_from_json(const json& j) {
  std::vector<Rational> prizes, probs;
  for (const auto& p : j.at("prizes")) prizes.push_back(rational_from_json(p));
  for (const auto& p : j.at("probs")) probs.push_back(rational_from_json(p));
  return Lottery(PrizeVector(std::move(prizes)), std::move(probs));
}

json mps_case_json(const MpsCase& c) {
  json spreads = json::object();
  for (const auto& [k, l] : c.family.spreads()) spreads[std::to_string(k)] = lottery_json(l);
  return json{{"id", c.id}, {"base", lottery_json(c.base())}, {"spreads", spreads}, {"partial", c.partial()}};
}

json hl_row_json(const HLRow& row) {
  return json{{"index", row.index},
              {"p", rational_json(row.p)},
              {"safe", lottery_json(row.safe)},
              {"risky", lottery_json(row.risky)}};
}

json battery_json(const std::vector<MpsCase>& cases, const std::vector<HLRow>& rows) {
  json mps = json::array();
  for (const auto& c : cases) mps.push_back(mps_case_json(c));
  json hl = json::array();
  for (const auto& r : rows) hl.push_back(hl_row_json(r));
  return json{{"mps_cases", mps}, {"hl_rows", hl}};
}

std::vector<Lottery> base_lotteries_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of lotteries");
  std::vector<Lottery> out;
  for (const auto& entry : j) out.push_back(lottery_from_json(entry.contains("base") ? entry.at("base") : entry));
  return out;
}

json point_json(const Point& p) { return json::array({rational_json(p.u1), rational_json(p.u2)}); }

json polygon_json(const Polygon& polygon) {
  json out = json::array();
  for (const auto& v : polygon.vertices()) out.push_back(point_json(v));
  return out;
}

json display_plan_json(const DisplayPlan& plan) {
  json screens = json::array();
  for (const auto& s : plan.screens) {
    screens.push_back(json{{"case_id", s.case_id},
                           {"lottery_order", std::string(s.lottery_order.begin(), s.lottery_order.end())},
                           {"decision_order", s.decision_order},
                           {"button_order",
                            {{"AB", std::string(s.button_order[0].begin(), s.button_order[0].end())},
                             {"AC", std::string(s.button_order[1].begin(), s.button_order[1].end())}}}});
  }
  return json{{"seed", plan.seed}, {"subject_id", plan.subject_id}, {"screens", screens}};
}

DisplayPlan display_plan_from_json(const json& j) {
  DisplayPlan plan;
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.subject_id = j.at("subject_id").get<std::string>();
  auto chars = [](const std::string& s, auto& dst) {
    if (s.size() != dst.size()) throw std::invalid_argument("bad permutation string '" + s + "'");
    std::copy(s.begin(), s.end(), dst.begin());
  };
  for (const auto& s : j.at("screens")) {
    ScreenLayout layout;
    layout.case_id = s.at("case_id").get<std::string>();
    chars(s.at("lottery_order").get<std::string>(), layout.lottery_order);
    layout.decision_order = s.at("decision_order").get<std::array<std::string, 2>>();
    chars(s.at("button_order").at("AB").get<std::string>(), layout.button_order[0]);
    chars(s.at("button_order").at("AC").get<std::string>(), layout.button_order[1]);
    plan.screens.push_back(std::move(layout));
  }
  return plan;
}

json chi_square_json(const ChiSquareResult& r) {
  return json{{"statistic", r.statistic}, {"df", r.df}, {"p_value", r.p_value}};
}

namespace {
json bound_json(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return v;
}
}  // namespace

json crra_interval_json(const CrraInterval& interval) {
  return json{{"s", interval.safe_count},
              {"r_lo", bound_json(interval.r_lo)},
              {"r_hi", bound_json(interval.r_hi)},
              {"r_lo_rounded", bound_json(round_to_cents(interval.r_lo))},
              {"r_hi_rounded", bound_json(round_to_cents(interval.r_hi))}};
}

json geometry_json() {
  json regions = json::object();
  for (Region r : kAllRegions) {
    const Polygon poly = region_polygon(r);
    regions[to_string(r)] = json{{"pattern", to_string(region_to_pattern(r))},
                                 {"vertices", polygon_json(poly)},
                                 {"area", rational_json(poly.area())}};
  }
  const OverlapReport overlap = overlap_report();
  json triangles = json::array();
  for (int s = 0; s < 10; ++s) {
    const Polygon tri = hl_triangle(s);
    json areas = json::object();
    for (Region r : kAllRegions) areas[to_string(r)] = rational_json(overlap.areas[s][static_cast<int>(r)]);
    triangles.push_back(json{{"s", s},
                             {"vertices", polygon_json(tri)},
                             {"area", rational_json(tri.area())},
                             {"crra", crra_interval_json(crra_interval(s))},
                             {"overlap", areas}});
  }
  return json{{"regions", regions}, {"triangles", triangles}};
}

namespace {

json pattern_table_json(const PatternTable& t) {
  json cases = json::array();
  for (std::size_t i = 0; i < t.case_ids.size(); ++i) {
    json counts = json::object();
    for (ChoicePattern p : kAllPatterns) counts[to_string(p)] = t.counts[i][static_cast<int>(p)];
    cases.push_back(json{{"case", t.case_ids[i]}, {"counts", counts}});
  }
  json pooled = json::object();
  json shares = json::object();
  for (ChoicePattern p : kAllPatterns) {
    pooled[to_string(p)] = t.pooled[static_cast<int>(p)];
    shares[to_string(p)] = t.pooled_share(p);
  }
  return json{{"subjects", t.subjects}, {"cases", cases}, {"pooled", pooled}, {"pooled_shares", shares}};
}

json groups_json(const std::vector<CrossTabGroup>& groups) {
  json out = json::array();
  for (const auto& g : groups) {
    out.push_back(json{{"s", g.safe_count},
                       {"subjects", g.subjects},
                       {"aa_choices", g.aa_choices},
                       {"choices", g.choices},
                       {"share", rational_json(g.share())},
                       {"share_decimal", to_double(g.share())}});
  }
  return out;
}

}  // namespace

json analysis_report_json(const AnalysisReport& r) {
  json out;
  out["subjects"] = r.summaries.subjects.size();
  out["audit"] = r.summaries.audit;
  out["pattern_table"] = pattern_table_json(r.patterns);
  out["uniform_gof"] = r.uniform_gof ? chi_square_json(*r.uniform_gof) : json(nullptr);
  out["homogeneity"] = r.homogeneity.result ? chi_square_json(*r.homogeneity.result) : json{{"note", r.homogeneity.note}};
  out["consistency"] = json{{"cases", r.consistency.cases},
                            {"subjects", r.consistency.subjects},
                            {"modal_histogram", r.consistency.modal_histogram},
                            {"perfectly_consistent", r.consistency.perfectly_consistent},
                            {"majority_consistent", r.consistency.majority_consistent}};
  out["hl_histogram"] = r.cross_tab.hl_histogram;
  out["hl_cross_tab"] = groups_json(r.cross_tab.groups);
  out["hl_excluded_dominated"] = r.cross_tab.excluded_dominated;
  out["aa_average"] = r.aa_average;
  out["hl_cross_tab_gof"] = r.cross_tab_gof_result ? chi_square_json(*r.cross_tab_gof_result) : json(nullptr);
  return out;
}

json reference_report_json(const ReferenceReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return json{{"pattern_table", pattern_table_json(r.table)},
              {"uniform_gof", chi_square_json(r.uniform_gof)},
              {"homogeneity", chi_square_json(r.homogeneity)},
              {"hl_cross_tab", groups_json(r.aa_by_safe_count)},
              {"hl_cross_tab_gof", chi_square_json(r.aa_gof)},
              {"hl_cross_tab_gof_df_cells", chi_square_json(r.aa_gof_cells)},
              {"share_s_at_least_5", r.share_s_at_least_5},
              {"checks", checks}};
}

}  // namespace mpsrisk
