#pragma once

// CSV tables written by `analyze` and `regions`.

#include "mpsrisk/analysis.hpp"
#include "mpsrisk/kernels.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace mpsrisk {

// case,pattern,region,count,share: one row per case and pattern, then "pooled".
void write_pattern_csv(std::ostream& out, const PatternTable& table);

// s,subjects,r_lo,r_hi for s = 0..10 (s = 10 has no CRRA interval).
void write_hl_histogram_csv(std::ostream& out, std::span<const long long> histogram);

// s,subjects,aa_choices,choices,share,share_decimal
void write_cross_tab_csv(std::ostream& out, const std::vector<CrossTabGroup>& groups);

// r,u1,u2,region
void write_crra_curve_csv(std::ostream& out, const std::vector<CurveSample>& samples);

}  // namespace mpsrisk
