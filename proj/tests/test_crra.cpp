#include "mpsrisk/crra.hpp"
#include "mpsrisk/kernels.hpp"
#include "mpsrisk/utility_family.hpp"

#include <doctest.h>

#include <cmath>

using namespace mpsrisk;

TEST_CASE("crra_point") {
  const auto neutral = crra_point(0.0);
  CHECK(neutral.u1 == doctest::Approx(0.4).epsilon(1e-13));
  CHECK(neutral.u2 == doctest::Approx(8.0 / 15.0).epsilon(1e-13));

  const auto log_point = crra_point(1.0);
  CHECK(log_point.u1 == doctest::Approx(std::log(16.0) / std::log(38.5)).epsilon(1e-13));
  CHECK(log_point.u2 == doctest::Approx(std::log(21.0) / std::log(38.5)).epsilon(1e-13));
  CHECK(log_point.u1 == doctest::Approx(0.7594763845265388).epsilon(1e-12));
  CHECK(log_point.u2 == doctest::Approx(0.8339653389862344).epsilon(1e-12));

  const auto half = crra_point(0.5);
  CHECK(half.u1 == doctest::Approx(0.5763869458396342).epsilon(1e-12));
  CHECK(half.u2 == doctest::Approx(0.6883166210183006).epsilon(1e-12));

  // Continuity through the log limit.
  const auto near = crra_point(1.0 + 1e-9);
  CHECK(near.u1 == doctest::Approx(log_point.u1).epsilon(1e-7));

  const auto very_negative = crra_point(-200.0);
  CHECK(very_negative.u1 < 1e-6);
  CHECK(very_negative.u2 < 1e-6);
  const auto very_positive = crra_point(200.0);
  CHECK(very_positive.u1 > 1 - 1e-6);
  CHECK(very_positive.u2 > 1 - 1e-6);

  CHECK_THROWS(crra_point(std::nan("")));
}

TEST_CASE("property: CRRA curve stays in the simplex and is monotone") {
  const auto curve = crra_curve(-10.0, 10.0, 0.01);
  CHECK(curve.size() == 2001);
  CHECK(curve == crra_curve_serial(-10.0, 10.0, 0.01));
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& p = curve[i].point;
    CHECK(0.0 <= p.u1);
    CHECK(p.u1 <= p.u2);
    CHECK(p.u2 <= 1.0);
    if (i > 0) {
      CHECK(curve[i - 1].point.u1 <= p.u1);
      CHECK(curve[i - 1].point.u2 <= p.u2);
    }
  }
}

TEST_CASE("indifference roots against an independent oracle") {
  const double expected[9] = {-1.7414861276941236, -0.9816827134533184, -0.524223104686201,
                              -0.18162577657374646, 0.10677286984398535, 0.37167473202658263,
                              0.6364131225641525,  0.9308642722696929,  1.3284207593133703};
  for (int s = 1; s <= 9; ++s) {
    const double root = crra_indifference_root(s / 10.0);
    CHECK(std::abs(root - expected[s - 1]) < 1e-8);
    CHECK(std::abs(hl_indifference_gap(root, s / 10.0)) < 1e-8);
  }
}

TEST_CASE("crra_interval") {
  const auto six = crra_interval(6);
  CHECK(round_to_cents(six.r_lo) == doctest::Approx(0.37));
  CHECK(round_to_cents(six.r_hi) == doctest::Approx(0.64));
  const auto four = crra_interval(4);
  CHECK(round_to_cents(four.r_lo) == doctest::Approx(-0.18));
  CHECK(round_to_cents(four.r_hi) == doctest::Approx(0.11));
  const auto nine = crra_interval(9);
  CHECK(round_to_cents(nine.r_lo) == doctest::Approx(1.33));
  CHECK(std::isinf(nine.r_hi));
  CHECK(nine.r_hi > 0);
  const auto zero = crra_interval(0);
  CHECK(std::isinf(zero.r_lo));
  CHECK(zero.r_lo < 0);
  CHECK(round_to_cents(zero.r_hi) == doctest::Approx(-1.74));
  CHECK_THROWS_AS(crra_interval(10), std::out_of_range);
  CHECK_THROWS_AS(crra_interval(-1), std::out_of_range);
}

TEST_CASE("property: intervals are adjacent and increasing") {
  for (int s = 0; s < 9; ++s) {
    const auto a = crra_interval(s);
    const auto b = crra_interval(s + 1);
    CHECK(a.r_lo < a.r_hi);
    CHECK(std::abs(a.r_hi - b.r_lo) <= 1e-9);
    CHECK(b.r_hi > a.r_hi);
  }
}

TEST_CASE("CRRA points inside an interval land in the matching triangle") {
  for (int s = 0; s <= 9; ++s) {
    const auto in = crra_interval(s);
    const double lo = std::isinf(in.r_lo) ? in.r_hi - 1.0 : in.r_lo;
    const double hi = std::isinf(in.r_hi) ? in.r_lo + 1.0 : in.r_hi;
    const double r = 0.5 * (lo + hi);
    const auto p = crra_point(r);
    const Point exact{from_double(p.u1), from_double(p.u2)};
    CHECK(hl_triangle(s).contains_strictly(exact));
  }
}

TEST_CASE("utility families") {
  const auto crra = tabulate(Crra{0.5}, standard_prizes());
  CHECK(crra[0] == 0.0);
  CHECK(crra[3] == 1.0);
  CHECK(crra[1] == doctest::Approx(0.5763869458396342));

  const auto cara0 = tabulate(Cara{0.0}, standard_prizes());
  CHECK(cara0[1] == doctest::Approx(0.4));
  const auto cara_big = tabulate(Cara{50.0}, standard_prizes());
  CHECK(cara_big[1] == doctest::Approx(1.0));
  const auto cara_neg = tabulate(Cara{-50.0}, standard_prizes());
  CHECK(cara_neg[2] == doctest::Approx(0.0).epsilon(1e-12));

  const auto pe0 = tabulate(PowerExpo{0.5, 0.0}, standard_prizes());
  const auto power = tabulate(Crra{0.5}, standard_prizes());
  CHECK(pe0[1] == doctest::Approx(power[1]));
  CHECK(pe0[2] == doctest::Approx(power[2]));
  const auto pe_small = tabulate(PowerExpo{0.5, 1e-12}, standard_prizes());
  CHECK(pe_small[1] == doctest::Approx(power[1]).epsilon(1e-9));
  CHECK_THROWS(tabulate(PowerExpo{1.5, 0.1}, standard_prizes()));
  CHECK_THROWS(tabulate(PowerExpo{0.3, -0.1}, standard_prizes()));

  const auto table = tabulate(Tabulated{{0, 0.3, 0.35, 1}}, standard_prizes());
  CHECK(table[2] == 0.35);
  CHECK_THROWS(tabulate(Tabulated{{0, 0.3, 1}}, standard_prizes()));

  CHECK(std::get<Crra>(parse_utility_family("crra:0.5")).r == 0.5);
  CHECK(std::get<Cara>(parse_utility_family("cara:0.1")).a == 0.1);
  const auto pe = std::get<PowerExpo>(parse_utility_family("powerexpo:0.3,0.03"));
  CHECK(pe.r == 0.3);
  CHECK(pe.alpha == 0.03);
  CHECK(std::get<Tabulated>(parse_utility_family("table:0,0.3,0.35,1")).values.size() == 4);
  CHECK_THROWS(parse_utility_family("logit:1"));
  CHECK_THROWS(parse_utility_family("crra:abc"));
  CHECK_THROWS(parse_utility_family("crra"));
  CHECK(to_string(parse_utility_family("crra:0.5")) == "crra:0.5");
}
