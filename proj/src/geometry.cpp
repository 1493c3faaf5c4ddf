#include "mpsrisk/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace mpsrisk {

namespace {

Rational cross(const Point& o, const Point& a, const Point& b) {
  return (a.u1 - o.u1) * (b.u2 - o.u2) - (a.u2 - o.u2) * (b.u1 - o.u1);
}

Rational twice_signed_area(const std::vector<Point>& v) {
  Rational sum = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& p = v[i];
    const Point& q = v[(i + 1) % v.size()];
    sum += p.u1 * q.u2 - q.u1 * p.u2;
  }
  return sum;
}

// Drops repeated vertices and vertices lying on the segment between their
// neighbours.
std::vector<Point> simplify(std::vector<Point> v) {
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point& prev = v[(i + v.size() - 1) % v.size()];
      const Point& next = v[(i + 1) % v.size()];
      if (v[i] == next || cross(prev, v[i], next) == 0) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  if (v.size() == 2 && v[0] == v[1]) v.pop_back();
  return v;
}

Point intersect(const Point& p, const Point& q, const Point& a, const Point& b) {
  // Point on segment p->q where it crosses the line a->b.
  const Rational cp = cross(a, b, p);
  const Rational cq = cross(a, b, q);
  const Rational t = cp / (cp - cq);
  return Point{p.u1 + t * (q.u1 - p.u1), p.u2 + t * (q.u2 - p.u2)};
}

}  // namespace

NormalizedUtilityPoint::NormalizedUtilityPoint(double u1_, double u2_) : u1(u1_), u2(u2_) {
  if (!(0.0 <= u1 && u1 <= u2 && u2 <= 1.0))
    throw std::invalid_argument("normalized utility point must satisfy 0 <= u1 <= u2 <= 1");
}

ChoicePattern make_pattern(bool base_over_b, bool base_over_c) {
  if (base_over_b) return base_over_c ? ChoicePattern::AA : ChoicePattern::AC;
  return base_over_c ? ChoicePattern::BA : ChoicePattern::BC;
}

std::string to_string(ChoicePattern pattern) {
  switch (pattern) {
    case ChoicePattern::AA: return "(A,A)";
    case ChoicePattern::BA: return "(B,A)";
    case ChoicePattern::AC: return "(A,C)";
    case ChoicePattern::BC: return "(B,C)";
  }
  return "?";
}

std::string to_string(Region region) {
  switch (region) {
    case Region::Red: return "Red";
    case Region::Yellow: return "Yellow";
    case Region::Green: return "Green";
    case Region::Blue: return "Blue";
  }
  return "?";
}

Region parse_region(std::string_view name) {
  for (Region r : kAllRegions) {
    if (to_string(r) == name) return r;
  }
  throw std::invalid_argument("unknown region '" + std::string(name) + "'");
}

ChoicePattern parse_pattern(std::string_view text) {
  for (ChoicePattern p : kAllPatterns) {
    const std::string full = to_string(p);
    const std::string compact{full[1], full[3]};
    if (text == full || text == compact) return p;
  }
  throw std::invalid_argument("unknown choice pattern '" + std::string(text) + "'");
}

Polygon::Polygon(std::vector<Point> vertices) {
  vertices = simplify(std::move(vertices));
  if (vertices.size() < 3) throw std::invalid_argument("polygon needs three non-collinear vertices");
  const Rational twice = twice_signed_area(vertices);
  if (twice == 0) throw std::invalid_argument("polygon has zero area");
  if (twice < 0) std::reverse(vertices.begin(), vertices.end());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Point& a = vertices[i];
    const Point& b = vertices[(i + 1) % vertices.size()];
    const Point& c = vertices[(i + 2) % vertices.size()];
    if (cross(a, b, c) < 0) throw std::invalid_argument("polygon is not convex");
    if (a.u1 < 0 || a.u2 < a.u1 || a.u2 > 1) throw std::invalid_argument("polygon leaves the utility simplex");
  }
  vertices_ = std::move(vertices);
}

Rational Polygon::area() const { return twice_signed_area(vertices_) / 2; }

Point Polygon::centroid() const {
  Rational cx = 0, cy = 0, twice = 0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Point& p = vertices_[i];
    const Point& q = vertices_[(i + 1) % vertices_.size()];
    const Rational w = p.u1 * q.u2 - q.u1 * p.u2;
    twice += w;
    cx += (p.u1 + q.u1) * w;
    cy += (p.u2 + q.u2) * w;
  }
  return Point{cx / (3 * twice), cy / (3 * twice)};
}

bool Polygon::contains(const Point& p) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (cross(vertices_[i], vertices_[(i + 1) % vertices_.size()], p) < 0) return false;
  }
  return true;
}

bool Polygon::contains_strictly(const Point& p) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (cross(vertices_[i], vertices_[(i + 1) % vertices_.size()], p) <= 0) return false;
  }
  return true;
}

bool Polygon::same_shape(const Polygon& other) const {
  const auto& a = vertices_;
  const auto& b = other.vertices_;
  if (a.size() != b.size()) return false;
  for (std::size_t shift = 0; shift < b.size(); ++shift) {
    bool match = true;
    for (std::size_t i = 0; i < a.size() && match; ++i) match = a[i] == b[(i + shift) % b.size()];
    if (match) return true;
  }
  return false;
}

NormalizedUtilityPoint normalize_utility(const TabulatedUtility& utility) {
  if (utility.size() != 4) throw std::invalid_argument("normalization is defined for four prizes");
  const double span = utility[3] - utility[0];
  if (!(span > 0.0)) throw std::domain_error("flat utility: u($38.5) == u($1), normalization undefined");
  const double u1 = std::clamp((utility[1] - utility[0]) / span, 0.0, 1.0);
  const double u2 = std::clamp((utility[2] - utility[0]) / span, u1, 1.0);
  return {u1, u2};
}

Region classify_point(const NormalizedUtilityPoint& point) {
  // A over B  <=>  u2 <= (4/3) u1 ;  A over C  <=>  u2 >= (7/9) u1 + 2/9
  const bool base_over_b = weakly_geq(4.0 * point.u1, 3.0 * point.u2, 4.0);
  const bool base_over_c = weakly_geq(9.0 * point.u2, 7.0 * point.u1 + 2.0, 9.0);
  return pattern_to_region(make_pattern(base_over_b, base_over_c));
}

Region classify_point(const Point& point) {
  const bool base_over_b = 4 * point.u1 >= 3 * point.u2;
  const bool base_over_c = 9 * point.u2 >= 7 * point.u1 + 2;
  return pattern_to_region(make_pattern(base_over_b, base_over_c));
}

Region pattern_to_region(ChoicePattern pattern) { return static_cast<Region>(static_cast<int>(pattern)); }

ChoicePattern region_to_pattern(Region region) { return static_cast<ChoicePattern>(static_cast<int>(region)); }

Polygon region_polygon(Region region) {
  const Point inner{Rational(2, 5), Rational(8, 15)};
  switch (region) {
    case Region::Red: return Polygon({inner, {Rational(3, 4), 1}, {1, 1}});
    case Region::Yellow: return Polygon({inner, {Rational(3, 4), 1}, {0, 1}, {0, Rational(2, 9)}});
    case Region::Green: return Polygon({inner, {1, 1}, {0, 0}});
    case Region::Blue: return Polygon({{0, 0}, inner, {0, Rational(2, 9)}});
  }
  throw std::invalid_argument("unknown region");
}

Polygon hl_triangle(int safe_count) {
  if (safe_count < 0 || safe_count > 9)
    throw std::out_of_range("safe-choice count " + std::to_string(safe_count) + " has no triangle (valid 0..9)");
  const Rational lo(safe_count, 10);
  const Rational hi(safe_count + 1, 10);
  return Polygon({{0, 1}, {lo, lo}, {hi, hi}});
}

std::optional<Polygon> polygon_intersection(const Polygon& a, const Polygon& b) {
  std::vector<Point> output = a.vertices();
  const auto& clip = b.vertices();
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Point& ea = clip[e];
    const Point& eb = clip[(e + 1) % clip.size()];
    std::vector<Point> input = std::move(output);
    output.clear();
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Point& cur = input[i];
      const Point& prev = input[(i + input.size() - 1) % input.size()];
      const Rational side_cur = cross(ea, eb, cur);
      const Rational side_prev = cross(ea, eb, prev);
      if (side_cur >= 0) {
        if (side_prev < 0) output.push_back(intersect(prev, cur, ea, eb));
        output.push_back(cur);
      } else if (side_prev > 0) {
        output.push_back(intersect(prev, cur, ea, eb));
      }
    }
  }
  output = simplify(std::move(output));
  if (output.size() < 3 || twice_signed_area(output) == 0) return std::nullopt;
  return Polygon(std::move(output));
}

OverlapReport overlap_report() {
  OverlapReport report;
  for (int s = 0; s < 10; ++s) {
    const Polygon triangle = hl_triangle(s);
    for (Region r : kAllRegions) {
      const auto piece = polygon_intersection(triangle, region_polygon(r));
      report.areas[s][static_cast<int>(r)] = piece ? piece->area() : Rational(0);
    }
  }
  return report;
}

}  // namespace mpsrisk
