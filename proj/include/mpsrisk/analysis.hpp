#pragma once

#include "mpsrisk/chisq.hpp"
#include "mpsrisk/geometry.hpp"
#include "mpsrisk/rational.hpp"
#include "mpsrisk/records.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mpsrisk {

struct SubjectSummary {
  std::string session_id;
  std::string subject_id;
  std::map<std::string, ChoicePattern> patterns;  // complete cases only
  bool part2_complete = false;
  ChoicePattern modal = ChoicePattern::AA;
  int modal_count = 0;
  std::optional<int> hl_safe_count;  // set when part 1 is complete and single-switch
  bool dominated_hl = false;         // s == 10

  friend bool operator==(const SubjectSummary&, const SubjectSummary&) = default;
};

struct SummarySet {
  std::vector<std::string> case_ids;  // every case seen, in natural order
  std::vector<SubjectSummary> subjects;
  std::vector<std::string> audit;     // one line per exclusion
};

// Groups by (session_id, subject_id) in first-appearance order. Cases are
// ordered by natural order of their ids ("C2" < "C10").
SummarySet summarize(const std::vector<ChoiceRecord>& records);
SummarySet summarize_serial(const std::vector<ChoiceRecord>& records);

struct PatternTable {
  std::vector<std::string> case_ids;
  std::vector<std::array<long long, 4>> counts;  // per case, columns in ChoicePattern order
  std::array<long long, 4> pooled{};
  long long subjects = 0;

  long long pooled_total() const;
  double pooled_share(ChoicePattern p) const;
  // counts as the 4 x cases table (rows = patterns) used by the homogeneity test.
  std::vector<std::vector<double>> pattern_by_case() const;
};

// Subjects with a complete part two only.
PatternTable pattern_table(const SummarySet& summaries);

struct ConsistencyReport {
  int cases = 0;
  std::vector<long long> modal_histogram;  // index m = subjects whose modal pattern occurs m times
  long long subjects = 0;
  long long perfectly_consistent = 0;
  long long majority_consistent = 0;  // modal count strictly above half the cases
};

ConsistencyReport consistency_report(const SummarySet& summaries);

struct CrossTabGroup {
  int safe_count = 0;
  long long subjects = 0;
  long long aa_choices = 0;
  long long choices = 0;
  Rational share() const { return choices == 0 ? Rational(0) : Rational(aa_choices, choices); }

  friend bool operator==(const CrossTabGroup&, const CrossTabGroup&) = default;
};

struct CrossTab {
  std::vector<CrossTabGroup> groups;  // ascending safe_count, non-empty groups only
  std::array<long long, 11> hl_histogram{};  // s = 0..10 over subjects with a valid part 1
  long long excluded_dominated = 0;
};

// Needs both parts per subject; s = 10 subjects are counted and excluded.
CrossTab hl_cross_tab(const SummarySet& summaries);

enum class DfConvention { CellsMinusOne, Cells };

// (A,A) counts per group against a constant share times each group's choices.
ChiSquareResult cross_tab_gof(const std::vector<CrossTabGroup>& groups, double share,
                              DfConvention df = DfConvention::CellsMinusOne);

// ----- Bundled aggregate reference data -----

struct ReferenceData {
  long long subjects = 0;
  std::vector<std::string> case_ids;
  std::vector<std::array<double, 4>> published_proportions;
  std::vector<std::array<long long, 4>> case_counts;
  std::array<double, 4> published_pooled{};
  std::array<long long, 10> hl_histogram{};
  std::vector<CrossTabGroup> aa_by_safe_count;  // s = 4..9
  double published_aa_average = 0.0;

  // Subject-level findings: not recomputable from aggregates.
  long long perfectly_consistent = 0;
  long long majority_consistent = 0;
  long long most_consistent = 0;
  double most_consistent_red_share = 0.0;
  double most_consistent_yellow_green_share = 0.0;
  double published_hl_risk_averse_share = 0.0;

  PatternTable table() const;
};

// The embedded JSON document and its FNV-1a checksum.
std::string_view reference_dataset_text();
std::uint64_t reference_dataset_checksum();

// Parses and validates: checksum, integrality of every proportion x subjects,
// totals. Throws std::runtime_error on any failure.
ReferenceData parse_reference_dataset(std::string_view text, std::uint64_t expected_checksum);
const ReferenceData& load_reference_dataset();

// One subject-level record set consistent with every aggregate in `data`:
// the HL histogram, each case's pattern counts, and the (A,A) count of each
// safe-count group. Throws std::runtime_error when no such set exists.
std::vector<ChoiceRecord> reconstruct_reference_records(const ReferenceData& data = load_reference_dataset());

// ----- Reports -----

struct HomogeneityOutcome {
  std::optional<ChiSquareResult> result;
  std::string note;  // why it could not be computed
};

struct AnalysisReport {
  SummarySet summaries;
  PatternTable patterns;
  std::optional<ChiSquareResult> uniform_gof;
  HomogeneityOutcome homogeneity;
  ConsistencyReport consistency;
  CrossTab cross_tab;
  std::optional<ChiSquareResult> cross_tab_gof_result;
  double aa_average = 0.0;
};

AnalysisReport analyze(const std::vector<ChoiceRecord>& records);

struct ReferenceCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ReferenceReport {
  PatternTable table;
  ChiSquareResult uniform_gof;
  ChiSquareResult homogeneity;
  std::vector<CrossTabGroup> aa_by_safe_count;
  ChiSquareResult aa_gof;          // df = cells - 1
  ChiSquareResult aa_gof_cells;    // df = cells
  double share_s_at_least_5 = 0.0;
  std::vector<ReferenceCheck> checks;
};

ReferenceReport reference_report(const ReferenceData& data = load_reference_dataset());

// Natural ordering of case ids: shorter numeric suffix first.
bool case_id_less(const std::string& a, const std::string& b);

}  // namespace mpsrisk
