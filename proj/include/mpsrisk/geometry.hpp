#pragma once

#include "mpsrisk/lottery.hpp"
#include "mpsrisk/rational.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mpsrisk {

// Utilities over the four standard prizes normalized to (0, u1, u2, 1).
// Invariant: 0 <= u1 <= u2 <= 1.
struct NormalizedUtilityPoint {
  double u1 = 0.0;
  double u2 = 0.0;

  NormalizedUtilityPoint() = default;
  NormalizedUtilityPoint(double u1_, double u2_);

  friend bool operator==(const NormalizedUtilityPoint&, const NormalizedUtilityPoint&) = default;
};

// Exact point of the (u1, u2) plane.
struct Point {
  Rational u1;
  Rational u2;

  friend bool operator==(const Point&, const Point&) = default;
};

// Picks in the (A vs B, A vs C) decisions of one case. The enumerator order is
// the column order used in every table: (A,A), (B,A), (A,C), (B,C).
enum class ChoicePattern { AA = 0, BA = 1, AC = 2, BC = 3 };

enum class Region { Red = 0, Yellow = 1, Green = 2, Blue = 3 };

inline constexpr std::array<ChoicePattern, 4> kAllPatterns{ChoicePattern::AA, ChoicePattern::BA, ChoicePattern::AC,
                                                           ChoicePattern::BC};
inline constexpr std::array<Region, 4> kAllRegions{Region::Red, Region::Yellow, Region::Green, Region::Blue};

ChoicePattern make_pattern(bool base_over_b, bool base_over_c);
std::string to_string(ChoicePattern pattern);  // "(A,A)"
std::string to_string(Region region);          // "Red"
Region parse_region(std::string_view name);
ChoicePattern parse_pattern(std::string_view text);  // "(A,C)" or "AC"

// Convex polygon with exact vertices stored counterclockwise, lying in the
// simplex triangle (0,0), (1,1), (0,1). Positive area is required.
class Polygon {
 public:
  explicit Polygon(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const { return vertices_; }
  Rational area() const;
  Point centroid() const;
  // Closed containment (boundary counts as inside).
  bool contains(const Point& p) const;
  bool contains_strictly(const Point& p) const;

  // Same vertex cycle, any starting vertex.
  bool same_shape(const Polygon& other) const;

 private:
  std::vector<Point> vertices_;
};

NormalizedUtilityPoint normalize_utility(const TabulatedUtility& utility);

// Equalities count as satisfying the weak inequality, so boundary points go to
// the first matching region in the order Red, Yellow, Green, Blue.
Region classify_point(const NormalizedUtilityPoint& point);
Region classify_point(const Point& point);

Region pattern_to_region(ChoicePattern pattern);
ChoicePattern region_to_pattern(Region region);

Polygon region_polygon(Region region);

// Utility pairs compatible with s safe choices followed by a switch to risky.
// Throws std::out_of_range outside 0..9.
Polygon hl_triangle(int safe_count);

// Sutherland-Hodgman clip of a against every edge of b. Returns nullopt when
// the intersection has zero area (disjoint, or touching along an edge/vertex).
std::optional<Polygon> polygon_intersection(const Polygon& a, const Polygon& b);

// areas[s][region] = area(hl_triangle(s) ∩ region_polygon(region)).
struct OverlapReport {
  std::array<std::array<Rational, 4>, 10> areas;
};

OverlapReport overlap_report();

}  // namespace mpsrisk
