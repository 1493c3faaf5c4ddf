#include "mpsrisk/analysis.hpp"

#include "mpsrisk/prf.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace mpsrisk {

using nlohmann::json;

bool case_id_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    std::size_t i = s.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
    return std::pair<std::string, std::string>{s.substr(0, i), s.substr(i)};
  };
  const auto [pa, na] = split(a);
  const auto [pb, nb] = split(b);
  if (pa != pb) return pa < pb;
  if (na.size() != nb.size()) return na.size() < nb.size();
  return na < nb;
}

namespace {

struct SubjectRecords {
  std::string session_id;
  std::string subject_id;
  std::vector<const ChoiceRecord*> records;
};

std::vector<SubjectRecords> group_by_subject(const std::vector<ChoiceRecord>& records) {
  std::vector<SubjectRecords> groups;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& r : records) {
    auto key = std::make_pair(r.session_id, r.subject_id);
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back(SubjectRecords{r.session_id, r.subject_id, {}});
    groups[it->second].records.push_back(&r);
  }
  return groups;
}

std::vector<std::string> collect_case_ids(const std::vector<ChoiceRecord>& records) {
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (r.part == 2) ids.insert(r.screen);
  }
  std::vector<std::string> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end(), case_id_less);
  return out;
}

SubjectSummary summarize_one(const SubjectRecords& group, const std::vector<std::string>& case_ids,
                             std::vector<std::string>& audit) {
  SubjectSummary s;
  s.session_id = group.session_id;
  s.subject_id = group.subject_id;
  const std::string who = group.session_id + "/" + group.subject_id;

  std::map<int, std::string> hl;
  bool hl_duplicate = false;
  std::map<std::string, std::map<std::string, std::string>> cases;
  std::set<std::string> case_duplicates;

  for (const ChoiceRecord* r : group.records) {
    if (r->part == 1) {
      if (!hl.emplace(std::stoi(r->screen), r->chosen).second) hl_duplicate = true;
    } else {
      if (!cases[r->screen].emplace(r->pair, r->chosen).second) case_duplicates.insert(r->screen);
    }
  }

  if (hl_duplicate) {
    audit.push_back(who + ": duplicate part-1 row, part 1 excluded");
  } else if (hl.size() == 10) {
    int safe = 0;
    bool switched = false, single = true;
    for (const auto& [row, chosen] : hl) {
      if (chosen == "safe") {
        ++safe;
        if (switched) single = false;
      } else {
        switched = true;
      }
    }
    if (single) {
      s.hl_safe_count = safe;
      s.dominated_hl = safe == 10;
    } else {
      audit.push_back(who + ": part-1 choices switch more than once, part 1 excluded");
    }
  } else if (!hl.empty()) {
    audit.push_back(who + ": part 1 incomplete (" + std::to_string(hl.size()) + "/10 rows), excluded");
  }

  for (const auto& [case_id, picks] : cases) {
    if (case_duplicates.contains(case_id)) {
      audit.push_back(who + ": duplicate decision in case " + case_id + ", case excluded");
      continue;
    }
    auto ab = picks.find("AB");
    auto ac = picks.find("AC");
    if (ab == picks.end() || ac == picks.end()) {
      audit.push_back(who + ": incomplete AB/AC pair in case " + case_id);
      continue;
    }
    s.patterns.emplace(case_id, make_pattern(ab->second == "A", ac->second == "A"));
  }
  s.part2_complete = !case_ids.empty() && s.patterns.size() == case_ids.size();
  if (!cases.empty() && !s.part2_complete) audit.push_back(who + ": part 2 incomplete, excluded from part-2 tables");

  std::array<int, 4> tally{};
  for (const auto& [id, p] : s.patterns) ++tally[static_cast<int>(p)];
  for (ChoicePattern p : kAllPatterns) {
    if (tally[static_cast<int>(p)] > s.modal_count) {
      s.modal_count = tally[static_cast<int>(p)];
      s.modal = p;
    }
  }
  return s;
}

}  // namespace

SummarySet summarize_serial(const std::vector<ChoiceRecord>& records) {
  SummarySet out;
  out.case_ids = collect_case_ids(records);
  for (const auto& group : group_by_subject(records)) out.subjects.push_back(summarize_one(group, out.case_ids, out.audit));
  return out;
}

SummarySet summarize(const std::vector<ChoiceRecord>& records) {
  SummarySet out;
  out.case_ids = collect_case_ids(records);
  const auto groups = group_by_subject(records);
  out.subjects.resize(groups.size());
  std::vector<std::vector<std::string>> audits(groups.size());
  std::exception_ptr error;
  const auto n = static_cast<long long>(groups.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      out.subjects[idx] = summarize_one(groups[idx], out.case_ids, audits[idx]);
    } catch (...) {
#pragma omp critical(mpsrisk_summarize_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  for (auto& a : audits) std::move(a.begin(), a.end(), std::back_inserter(out.audit));
  return out;
}

long long PatternTable::pooled_total() const {
  long long total = 0;
  for (long long c : pooled) total += c;
  return total;
}

double PatternTable::pooled_share(ChoicePattern p) const {
  const long long total = pooled_total();
  return total == 0 ? 0.0 : static_cast<double>(pooled[static_cast<int>(p)]) / static_cast<double>(total);
}

std::vector<std::vector<double>> PatternTable::pattern_by_case() const {
  std::vector<std::vector<double>> t(4, std::vector<double>(counts.size()));
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (int p = 0; p < 4; ++p) t[p][c] = static_cast<double>(counts[c][p]);
  }
  return t;
}

PatternTable pattern_table(const SummarySet& summaries) {
  PatternTable t;
  t.case_ids = summaries.case_ids;
  t.counts.assign(t.case_ids.size(), {});
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < t.case_ids.size(); ++i) column[t.case_ids[i]] = i;
  for (const auto& s : summaries.subjects) {
    if (!s.part2_complete) continue;
    ++t.subjects;
    for (const auto& [id, p] : s.patterns) {
      ++t.counts[column.at(id)][static_cast<int>(p)];
      ++t.pooled[static_cast<int>(p)];
    }
  }
  return t;
}

ConsistencyReport consistency_report(const SummarySet& summaries) {
  ConsistencyReport r;
  r.cases = static_cast<int>(summaries.case_ids.size());
  r.modal_histogram.assign(static_cast<std::size_t>(r.cases) + 1, 0);
  for (const auto& s : summaries.subjects) {
    if (!s.part2_complete) continue;
    ++r.subjects;
    ++r.modal_histogram[static_cast<std::size_t>(s.modal_count)];
    if (s.modal_count == r.cases) ++r.perfectly_consistent;
    if (2 * s.modal_count > r.cases) ++r.majority_consistent;
  }
  return r;
}

CrossTab hl_cross_tab(const SummarySet& summaries) {
  CrossTab t;
  std::map<int, CrossTabGroup> groups;
  for (const auto& s : summaries.subjects) {
    if (!s.hl_safe_count) continue;
    const int safe = *s.hl_safe_count;
    ++t.hl_histogram[static_cast<std::size_t>(safe)];
    if (!s.part2_complete) continue;
    if (s.dominated_hl) {
      ++t.excluded_dominated;
      continue;
    }
    auto& g = groups[safe];
    g.safe_count = safe;
    ++g.subjects;
    g.choices += static_cast<long long>(s.patterns.size());
    for (const auto& [id, p] : s.patterns) {
      if (p == ChoicePattern::AA) ++g.aa_choices;
    }
  }
  for (auto& [s, g] : groups) t.groups.push_back(g);
  return t;
}

ChiSquareResult cross_tab_gof(const std::vector<CrossTabGroup>& groups, double share, DfConvention df) {
  std::vector<double> observed, expected;
  for (const auto& g : groups) {
    observed.push_back(static_cast<double>(g.aa_choices));
    expected.push_back(share * static_cast<double>(g.choices));
  }
  const int cells = static_cast<int>(groups.size());
  return chisq_goodness_of_fit(observed, expected, df == DfConvention::Cells ? cells : cells - 1);
}

// ----- reference data -----

namespace {

// Published aggregates. Case proportions are the bar heights of the choice
// figure (five decimals, each an integer count over 72 subjects); the HL
// histogram and the (A,A) shares by safe count are the published numbers.
constexpr std::string_view kReferenceJson = R"({
  "subjects": 72,
  "cases": [
    {"id": "C1", "proportions": [0.20833, 0.23611, 0.31944, 0.23611]},
    {"id": "C2", "proportions": [0.26389, 0.06944, 0.61111, 0.05556]},
    {"id": "C3", "proportions": [0.25000, 0.23611, 0.36111, 0.15278]},
    {"id": "C4", "proportions": [0.31944, 0.23611, 0.29167, 0.15278]},
    {"id": "C5", "proportions": [0.43056, 0.20833, 0.25000, 0.11111]},
    {"id": "C6", "proportions": [0.30556, 0.16667, 0.34722, 0.18056]}
  ],
  "pooled_proportions": [0.296, 0.192, 0.363, 0.148],
  "hl_histogram": [0, 1, 0, 2, 19, 5, 12, 16, 11, 6],
  "aa_by_safe_count": [
    {"s": 4, "share": "37/114"},
    {"s": 5, "share": "1/5"},
    {"s": 6, "share": "11/36"},
    {"s": 7, "share": "31/96"},
    {"s": 8, "share": "23/66"},
    {"s": 9, "share": "7/36"}
  ],
  "aa_average": 0.296,
  "subject_level": {
    "perfectly_consistent": 2,
    "majority_consistent": 31,
    "most_consistent": 16,
    "most_consistent_red_share": 0.250,
    "most_consistent_yellow_green_share": 0.688,
    "hl_risk_averse_share": 0.694
  }
}
)";

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error("reference dataset: " + what);
}

}  // namespace

std::string_view reference_dataset_text() { return kReferenceJson; }

std::uint64_t reference_dataset_checksum() { return 0x5beb691bb3208de4ULL; }

PatternTable ReferenceData::table() const {
  PatternTable t;
  t.case_ids = case_ids;
  t.counts = case_counts;
  t.subjects = subjects;
  for (const auto& row : case_counts) {
    for (int p = 0; p < 4; ++p) t.pooled[p] += row[p];
  }
  return t;
}

ReferenceData parse_reference_dataset(std::string_view text, std::uint64_t expected_checksum) {
  require(hash_string(text) == expected_checksum, "checksum mismatch");
  ReferenceData d;
  json j;
  try {
    j = json::parse(text);
    d.subjects = j.at("subjects").get<long long>();
    for (const auto& c : j.at("cases")) {
      d.case_ids.push_back(c.at("id").get<std::string>());
      const auto props = c.at("proportions").get<std::array<double, 4>>();
      d.published_proportions.push_back(props);
      std::array<long long, 4> counts{};
      long long total = 0;
      for (int p = 0; p < 4; ++p) {
        const double scaled = props[p] * static_cast<double>(d.subjects);
        counts[p] = std::llround(scaled);
        require(std::abs(scaled - static_cast<double>(counts[p])) < 0.01,
                "proportion in case " + d.case_ids.back() + " is not a whole number of subjects");
        total += counts[p];
      }
      require(total == d.subjects, "case " + d.case_ids.back() + " counts do not sum to the subject total");
      d.case_counts.push_back(counts);
    }
    d.published_pooled = j.at("pooled_proportions").get<std::array<double, 4>>();
    d.hl_histogram = j.at("hl_histogram").get<std::array<long long, 10>>();
    long long hl_total = 0;
    for (long long h : d.hl_histogram) hl_total += h;
    require(hl_total == d.subjects, "HL histogram does not sum to the subject total");
    for (const auto& g : j.at("aa_by_safe_count")) {
      CrossTabGroup group;
      group.safe_count = g.at("s").get<int>();
      require(group.safe_count >= 0 && group.safe_count <= 9, "safe count out of range");
      group.subjects = d.hl_histogram[static_cast<std::size_t>(group.safe_count)];
      group.choices = group.subjects * static_cast<long long>(d.case_ids.size());
      const Rational share = parse_rational(g.at("share").get<std::string>());
      const Rational aa = share * group.choices;
      require(boost::multiprecision::denominator(aa) == 1, "(A,A) share is not a whole number of choices");
      group.aa_choices = boost::multiprecision::numerator(aa).convert_to<long long>();
      d.aa_by_safe_count.push_back(group);
    }
    d.published_aa_average = j.at("aa_average").get<double>();
    const auto& sl = j.at("subject_level");
    d.perfectly_consistent = sl.at("perfectly_consistent").get<long long>();
    d.majority_consistent = sl.at("majority_consistent").get<long long>();
    d.most_consistent = sl.at("most_consistent").get<long long>();
    d.most_consistent_red_share = sl.at("most_consistent_red_share").get<double>();
    d.most_consistent_yellow_green_share = sl.at("most_consistent_yellow_green_share").get<double>();
    d.published_hl_risk_averse_share = sl.at("hl_risk_averse_share").get<double>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("reference dataset: malformed JSON: ") + e.what());
  }
  long long grouped_aa = 0;
  for (const auto& g : d.aa_by_safe_count) grouped_aa += g.aa_choices;
  require(grouped_aa <= d.table().pooled[0], "(A,A) by safe count exceeds pooled (A,A)");
  return d;
}

const ReferenceData& load_reference_dataset() {
  static const ReferenceData data = parse_reference_dataset(reference_dataset_text(), reference_dataset_checksum());
  return data;
}

std::vector<ChoiceRecord> reconstruct_reference_records(const ReferenceData& data) {
  const std::size_t cases = data.case_ids.size();
  std::vector<int> safe_counts;
  for (int s = 0; s < static_cast<int>(data.hl_histogram.size()); ++s) {
    for (long long i = 0; i < data.hl_histogram[static_cast<std::size_t>(s)]; ++i) safe_counts.push_back(s);
  }
  const std::size_t n = safe_counts.size();
  require(static_cast<long long>(n) == data.subjects, "HL histogram does not cover every subject");

  // (A,A) demand per subject: each group's total spread as evenly as possible.
  // Groups without a published share take what the case totals leave over.
  std::map<int, long long> group_aa;
  long long assigned = 0;
  for (const auto& g : data.aa_by_safe_count) {
    group_aa[g.safe_count] = g.aa_choices;
    assigned += g.aa_choices;
  }
  std::vector<long long> demand(n, 0);
  std::vector<std::size_t> leftover_members;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && safe_counts[j] == safe_counts[i]) ++j;
    auto it = group_aa.find(safe_counts[i]);
    if (it == group_aa.end()) {
      for (std::size_t k = i; k < j; ++k) leftover_members.push_back(k);
    } else {
      const auto size = static_cast<long long>(j - i);
      for (std::size_t k = i; k < j; ++k) {
        demand[k] = it->second / size + (static_cast<long long>(k - i) < it->second % size ? 1 : 0);
      }
    }
    i = j;
  }
  long long total_aa = 0;
  for (const auto& row : data.case_counts) total_aa += row[0];
  long long rest = total_aa - assigned;
  require(rest >= 0, "(A,A) by safe count exceeds pooled (A,A)");
  for (std::size_t k = 0; rest > 0 && k < leftover_members.size(); ++k) {
    const long long take = std::min<long long>(rest, static_cast<long long>(cases));
    demand[leftover_members[k]] = take;
    rest -= take;
  }
  require(rest == 0, "too few subjects outside the published groups to hold the remaining (A,A) choices");

  // Gale-Ryser greedy: each case gives its (A,A) slots to the subjects with
  // the largest remaining demand.
  std::vector<std::vector<ChoicePattern>> patterns(n, std::vector<ChoicePattern>(cases, ChoicePattern::BA));
  std::vector<std::vector<bool>> is_aa(n, std::vector<bool>(cases, false));
  for (std::size_t c = 0; c < cases; ++c) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return demand[a] > demand[b]; });
    const long long slots = data.case_counts[c][0];
    for (long long k = 0; k < slots; ++k) {
      const std::size_t who = order[static_cast<std::size_t>(k)];
      require(demand[who] > 0, "no subject-level assignment matches the (A,A) aggregates");
      --demand[who];
      is_aa[who][c] = true;
    }
  }
  for (long long d : demand) require(d == 0, "no subject-level assignment matches the (A,A) aggregates");

  // The other three patterns have no subject-level constraint.
  for (std::size_t c = 0; c < cases; ++c) {
    std::vector<ChoicePattern> pool;
    for (ChoicePattern p : {ChoicePattern::BA, ChoicePattern::AC, ChoicePattern::BC}) {
      pool.insert(pool.end(), static_cast<std::size_t>(data.case_counts[c][static_cast<int>(p)]), p);
    }
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) patterns[i][c] = is_aa[i][c] ? ChoicePattern::AA : pool.at(next++);
  }

  std::vector<ChoiceRecord> records;
  records.reserve(n * (10 + 2 * cases));
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "R%03zu", i + 1);
    for (int row = 1; row <= 10; ++row) {
      records.push_back({"reference", id, 1, std::to_string(row), "", row <= safe_counts[i] ? "safe" : "risky", 0, 0});
    }
    for (std::size_t c = 0; c < cases; ++c) {
      const ChoicePattern p = patterns[i][c];
      const bool ab = p == ChoicePattern::AA || p == ChoicePattern::AC;
      const bool ac = p == ChoicePattern::AA || p == ChoicePattern::BA;
      records.push_back({"reference", id, 2, data.case_ids[c], "AB", ab ? "A" : "B", 0, 0});
      records.push_back({"reference", id, 2, data.case_ids[c], "AC", ac ? "A" : "C", 0, 0});
    }
  }
  return records;
}

// ----- reports -----

AnalysisReport analyze(const std::vector<ChoiceRecord>& records) {
  AnalysisReport r;
  r.summaries = summarize(records);
  r.patterns = pattern_table(r.summaries);
  std::vector<double> pooled(r.patterns.pooled.begin(), r.patterns.pooled.end());
  if (r.patterns.pooled_total() > 0) r.uniform_gof = chisq_goodness_of_fit_uniform(pooled);
  if (r.patterns.case_ids.size() >= 2 && r.patterns.subjects > 0) {
    try {
      r.homogeneity.result = chisq_homogeneity(r.patterns.pattern_by_case());
    } catch (const std::invalid_argument& e) {
      r.homogeneity.note = e.what();
    }
  } else {
    r.homogeneity.note = "needs at least two cases and one complete subject";
  }
  r.consistency = consistency_report(r.summaries);
  r.cross_tab = hl_cross_tab(r.summaries);
  r.aa_average = r.patterns.pooled_share(ChoicePattern::AA);
  if (r.cross_tab.groups.size() >= 2 && r.aa_average > 0.0) {
    r.cross_tab_gof_result = cross_tab_gof(r.cross_tab.groups, r.aa_average);
  }
  return r;
}

ReferenceReport reference_report(const ReferenceData& data) {
  ReferenceReport r;
  r.table = data.table();
  std::vector<double> pooled(r.table.pooled.begin(), r.table.pooled.end());
  r.uniform_gof = chisq_goodness_of_fit_uniform(pooled);
  r.homogeneity = chisq_homogeneity(r.table.pattern_by_case());
  r.aa_by_safe_count = data.aa_by_safe_count;
  r.aa_gof = cross_tab_gof(r.aa_by_safe_count, data.published_aa_average, DfConvention::CellsMinusOne);
  r.aa_gof_cells = cross_tab_gof(r.aa_by_safe_count, data.published_aa_average, DfConvention::Cells);
  long long at_least_5 = 0;
  for (int s = 5; s <= 9; ++s) at_least_5 += data.hl_histogram[static_cast<std::size_t>(s)];
  r.share_s_at_least_5 = static_cast<double>(at_least_5) / static_cast<double>(data.subjects);

  auto check = [&](std::string name, bool pass, std::string detail) {
    r.checks.push_back(ReferenceCheck{std::move(name), pass, std::move(detail)});
  };
  auto fmt = [](double v) {
    std::ostringstream o;
    o.precision(6);
    o << v;
    return o.str();
  };

  bool shares_ok = true;
  std::string shares;
  for (ChoicePattern p : kAllPatterns) {
    const double share = r.table.pooled_share(p);
    shares_ok = shares_ok && std::abs(100.0 * share - 100.0 * data.published_pooled[static_cast<int>(p)]) <= 0.1;
    shares += to_string(p) + "=" + fmt(100.0 * share) + "% ";
  }
  check("pooled pattern shares", shares_ok, shares);
  check("pooled patterns vs uniform",
        std::abs(r.uniform_gof.statistic - 49.6) <= 0.1 && r.uniform_gof.df == 3 && r.uniform_gof.p_value < 1e-4,
        "chi2=" + fmt(r.uniform_gof.statistic) + " df=3 p=" + fmt(r.uniform_gof.p_value));
  check("homogeneity across cases", std::abs(r.homogeneity.p_value - 0.0004) <= 0.0002,
        "chi2=" + fmt(r.homogeneity.statistic) + " df=" + std::to_string(r.homogeneity.df) +
            " p=" + fmt(r.homogeneity.p_value));
  check("(A,A) share constant across safe counts", std::abs(r.aa_gof.p_value - 0.64) <= 0.03,
        "chi2=" + fmt(r.aa_gof.statistic) + " df=" + std::to_string(r.aa_gof.df) + " p=" + fmt(r.aa_gof.p_value) +
            " (df=" + std::to_string(r.aa_gof_cells.df) + ": p=" + fmt(r.aa_gof_cells.p_value) + ")");
  check("share with s >= 5", std::abs(100.0 * r.share_s_at_least_5 - 69.4) <= 0.05,
        fmt(100.0 * r.share_s_at_least_5) + "%");
  return r;
}

}  // namespace mpsrisk
