#pragma once

// JSON forms shared by the CLI and the session service. Rationals are
// strings ("77/2", "0"); lotteries look like
//   {"prizes":["1","16","21","77/2"],"probs":["21/100","4/25","63/100","0"]}

#include "mpsrisk/analysis.hpp"
#include "mpsrisk/crra.hpp"
#include "mpsrisk/geometry.hpp"
#include "mpsrisk/lottery.hpp"
#include "mpsrisk/tasks.hpp"

#include <json.hpp>

namespace mpsrisk {

nlohmann::json rational_json(const Rational& value);
Rational rational_from_json(const nlohmann::json& j);

nlohmann::json lottery_json(const Lottery& lottery);
Lottery lottery_from_json(const nlohmann::json& j);

nlohmann::json mps_case_json(const MpsCase& c);
nlohmann::json hl_row_json(const HLRow& row);
// {"mps_cases": [...], "hl_rows": [...]}
nlohmann::json battery_json(const std::vector<MpsCase>& cases, const std::vector<HLRow>& rows);
// An array of lotteries, or of objects holding one under "base".
std::vector<Lottery> base_lotteries_from_json(const nlohmann::json& j);

nlohmann::json point_json(const Point& p);
nlohmann::json polygon_json(const Polygon& polygon);

nlohmann::json display_plan_json(const DisplayPlan& plan);
DisplayPlan display_plan_from_json(const nlohmann::json& j);

nlohmann::json chi_square_json(const ChiSquareResult& r);
nlohmann::json crra_interval_json(const CrraInterval& interval);

// Region polygons, HL triangles with their CRRA intervals, and overlap areas.
nlohmann::json geometry_json();

nlohmann::json analysis_report_json(const AnalysisReport& report);
nlohmann::json reference_report_json(const ReferenceReport& report);

}  // namespace mpsrisk
