#include "mpsrisk/report.hpp"

#include "mpsrisk/crra.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace mpsrisk {

namespace {

std::string csv_number(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string quoted(const std::string& text) { return "\"" + text + "\""; }

}  // namespace

void write_pattern_csv(std::ostream& out, const PatternTable& table) {
  out << "case,pattern,region,count,share\n";
  auto rows = [&](const std::string& name, const std::array<long long, 4>& counts) {
    long long total = 0;
    for (long long c : counts) total += c;
    for (ChoicePattern p : kAllPatterns) {
      const long long c = counts[static_cast<int>(p)];
      out << name << ',' << quoted(to_string(p)) << ',' << to_string(pattern_to_region(p)) << ',' << c << ','
          << csv_number(total == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(total)) << '\n';
    }
  };
  for (std::size_t i = 0; i < table.case_ids.size(); ++i) rows(table.case_ids[i], table.counts[i]);
  rows("pooled", table.pooled);
}

void write_hl_histogram_csv(std::ostream& out, std::span<const long long> histogram) {
  out << "s,subjects,r_lo,r_hi\n";
  for (std::size_t s = 0; s < histogram.size(); ++s) {
    out << s << ',' << histogram[s] << ',';
    if (s <= 9) {
      const CrraInterval interval = crra_interval(static_cast<int>(s));
      out << csv_number(interval.r_lo) << ',' << csv_number(interval.r_hi);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

void write_cross_tab_csv(std::ostream& out, const std::vector<CrossTabGroup>& groups) {
  out << "s,subjects,aa_choices,choices,share,share_decimal\n";
  for (const auto& g : groups) {
    out << g.safe_count << ',' << g.subjects << ',' << g.aa_choices << ',' << g.choices << ','
        << format_rational(g.share()) << ',' << csv_number(to_double(g.share())) << '\n';
  }
}

void write_crra_curve_csv(std::ostream& out, const std::vector<CurveSample>& samples) {
  out << "r,u1,u2,region\n";
  for (const auto& c : samples) {
    out << csv_number(c.r) << ',' << csv_number(c.point.u1) << ',' << csv_number(c.point.u2) << ','
        << to_string(classify_point(c.point)) << '\n';
  }
}

}  // namespace mpsrisk
