#include "mpsrisk/kernels.hpp"
#include "mpsrisk/lottery.hpp"
#include "mpsrisk/prf.hpp"
#include "mpsrisk/rational.hpp"

#include <doctest.h>

using namespace mpsrisk;

namespace {

Lottery pct(std::initializer_list<long long> p) {
  std::vector<long long> v(p);
  return Lottery::from_percentages(standard_prizes(), v);
}

Rational q(long long n, long long d = 1) { return Rational(n, d); }

TabulatedUtility tab(std::initializer_list<double> v) { return TabulatedUtility(std::vector<double>(v)); }

// Random lottery with K in 3..6 and every probability a positive multiple of 1/den.
Lottery random_lottery(CounterRng& rng) {
  const int k = 3 + static_cast<int>(rng.below(4));
  std::vector<Rational> prizes;
  Rational x = Rational(static_cast<long long>(rng.below(50)), 1 + static_cast<long long>(rng.below(7)));
  for (int i = 0; i < k; ++i) {
    prizes.push_back(x);
    x += Rational(1 + static_cast<long long>(rng.below(40)), 1 + static_cast<long long>(rng.below(9)));
  }
  std::vector<long long> weights;
  long long total = 0;
  for (int i = 0; i < k; ++i) {
    weights.push_back(1 + static_cast<long long>(rng.below(30)));
    total += weights.back();
  }
  std::vector<Rational> probs;
  for (long long w : weights) probs.push_back(Rational(w, total));
  return Lottery(PrizeVector(prizes), probs);
}

}  // namespace

TEST_CASE("rational parsing and formatting") {
  CHECK(parse_rational("77/2") == q(77, 2));
  CHECK(parse_rational("38.5") == q(77, 2));
  CHECK(parse_rational("-3") == q(-3));
  CHECK(parse_rational("0.25") == q(1, 4));
  CHECK(format_rational(q(77, 2)) == "77/2");
  CHECK(format_rational(q(4, 25)) == "4/25");
  CHECK(format_rational(q(0)) == "0");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("prize vectors must be strictly ascending with at least two prizes") {
  CHECK_THROWS_AS(PrizeVector({q(1)}), std::invalid_argument);
  CHECK_THROWS_AS(PrizeVector({q(1), q(1)}), std::invalid_argument);
  CHECK_THROWS_AS(PrizeVector({q(2), q(1)}), std::invalid_argument);
  CHECK(standard_prizes()[3] == q(77, 2));
}

TEST_CASE("lottery probabilities sum to exactly one") {
  CHECK_THROWS_AS(Lottery(standard_prizes(), {q(1, 4), q(1, 4), q(1, 4), q(1, 4) + q(1, 1000000000)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Lottery(standard_prizes(), {q(-1, 4), q(1, 2), q(1, 2), q(1, 4)}), std::invalid_argument);
  CHECK_THROWS_AS(Lottery(standard_prizes(), {q(1, 2), q(1, 2)}), std::invalid_argument);
  CHECK_NOTHROW(Lottery(standard_prizes(), {q(1, 3), q(1, 3), q(1, 3), q(0)}));
}

TEST_CASE("expected value") {
  CHECK(expected_value(pct({21, 16, 63, 0})) == q(16));
  CHECK(expected_value(pct({0, 0, 0, 100})) == q(77, 2));
  CHECK(expected_value(pct({25, 0, 75, 0})) == q(16));
}

TEST_CASE("expected utility") {
  const TabulatedUtility linear({0.0, 0.4, 8.0 / 15.0, 1.0});
  CHECK(expected_utility(pct({21, 16, 63, 0}), linear) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(expected_utility(pct({0, 0, 100, 0}), linear) == doctest::Approx(8.0 / 15.0));
  CHECK(expected_utility(pct({10, 20, 30, 40}), tab({0, 0, 0, 0})) == 0.0);
  CHECK_THROWS_AS(expected_utility(pct({10, 20, 30, 40}), tab({0, 1, 2})), std::invalid_argument);
}

TEST_CASE("tabulated utility must be finite and non-decreasing") {
  CHECK_THROWS_AS(tab({0, 0.5, 0.4, 1}), std::invalid_argument);
  CHECK_THROWS_AS(tab({0, std::nan(""), 1}), std::invalid_argument);
  CHECK_NOTHROW(tab({0, 0, 1, 1}));
}

TEST_CASE("mps_spread reproduces the C1 spreads") {
  const Lottery c1 = pct({21, 16, 63, 0});
  CHECK(mps_spread(c1, 2) == pct({25, 0, 75, 0}));
  CHECK(mps_spread(c1, 3) == pct({21, 65, 0, 14}));
}

TEST_CASE("mps_spread around a midpoint is symmetric") {
  const Lottery l(PrizeVector({q(0), q(1), q(2)}), {q(0), q(1), q(0)});
  const Lottery s = mps_spread(l, 2);
  CHECK(s.prob(0) == q(1, 2));
  CHECK(s.prob(1) == q(0));
  CHECK(s.prob(2) == q(1, 2));
}

TEST_CASE("mps_spread rejects endpoints and empty interior cells") {
  const Lottery c1 = pct({21, 16, 63, 0});
  CHECK_THROWS_AS(mps_spread(c1, 1), std::out_of_range);
  CHECK_THROWS_AS(mps_spread(c1, 4), std::out_of_range);
  CHECK_THROWS_AS(mps_spread(c1, 0), std::out_of_range);
  CHECK_THROWS_AS(mps_spread(pct({50, 0, 50, 0}), 2), std::domain_error);
}

TEST_CASE("mps_family") {
  const MpsFamily c4 = mps_family(pct({0, 16, 63, 21}));
  REQUIRE(c4.spreads().size() == 2);
  CHECK(c4.spreads().at(2) == pct({4, 0, 75, 21}));
  CHECK(c4.spreads().at(3) == pct({0, 65, 0, 35}));
  CHECK_FALSE(c4.partial());

  const MpsFamily c2 = mps_family(pct({27, 64, 9, 0}));
  CHECK(c2.spreads().at(2) == pct({43, 0, 57, 0}));
  CHECK(c2.spreads().at(3) == pct({27, 71, 0, 2}));

  const MpsFamily two = mps_family(Lottery(PrizeVector({q(1), q(2)}), {q(1, 2), q(1, 2)}));
  CHECK(two.empty());

  const MpsFamily partial = mps_family(pct({30, 40, 0, 30}));
  CHECK(partial.partial());
  CHECK(partial.spreads().size() == 1);
  CHECK(partial.spreads().count(2) == 1);
}

TEST_CASE("MpsFamily rejects families that break its invariants") {
  const Lottery base = pct({21, 16, 63, 0});
  CHECK_THROWS(MpsFamily(base, {{2, pct({21, 16, 63, 0})}}));
  CHECK_THROWS(MpsFamily(base, {{2, mps_spread(base, 3)}}));
  CHECK_THROWS(MpsFamily(base, {{1, mps_spread(base, 2)}}));
  CHECK_THROWS(MpsFamily(base, {{2, mps_spread(base, 2)}}));
  CHECK_NOTHROW(MpsFamily(base, {{2, mps_spread(base, 2)}, {3, mps_spread(base, 3)}}));
}

TEST_CASE("is_concave_on_grid") {
  CHECK(is_concave_on_grid(tab({0, 0.6, 0.75, 1}), standard_prizes()));
  CHECK_FALSE(is_concave_on_grid(tab({0, 0.1, 0.2, 1}), standard_prizes()));
  CHECK(is_concave_on_grid(tab({0, 0.4, 8.0 / 15.0, 1}), standard_prizes()));
  CHECK(is_concave_on_grid(tab({1, 16, 21, 38.5}), standard_prizes()));
  CHECK_THROWS_AS(is_concave_on_grid(tab({0, 1}), standard_prizes()), std::invalid_argument);
}

TEST_CASE("prefers_base_to_all_spreads") {
  const MpsFamily c1 = mps_family(pct({21, 16, 63, 0}));
  CHECK(prefers_base_to_all_spreads(tab({0, 0.6, 0.75, 1}), c1));

  const TabulatedUtility convex({0, 0.1, 0.2, 1});
  CHECK_FALSE(prefers_base_to_all_spreads(convex, c1));
  CHECK(expected_utility(c1.spreads().at(2), convex) > expected_utility(c1.base(), convex));
  CHECK(expected_utility(c1.spreads().at(3), convex) > expected_utility(c1.base(), convex));

  const TabulatedUtility steep_middle({0, 0.2, 0.6, 1});
  CHECK_FALSE(prefers_base_to_all_spreads(steep_middle, c1));
  CHECK(expected_utility(c1.spreads().at(2), steep_middle) > expected_utility(c1.base(), steep_middle));
  CHECK(expected_utility(c1.base(), steep_middle) >= expected_utility(c1.spreads().at(3), steep_middle));

  const MpsFamily empty = mps_family(Lottery(PrizeVector({q(1), q(2)}), {q(1, 2), q(1, 2)}));
  CHECK_THROWS_AS(prefers_base_to_all_spreads(tab({0, 1}), empty), std::invalid_argument);
}

TEST_CASE("property: spreads preserve mean and mass") {
  CounterRng rng(0xA11CE);
  for (int trial = 0; trial < 2000; ++trial) {
    const Lottery l = random_lottery(rng);
    const MpsFamily family = mps_family(l);
    REQUIRE(family.spreads().size() == l.size() - 2);
    for (const auto& [k, s] : family.spreads()) {
      CHECK(expected_value(s) == expected_value(l));
      Rational sum = 0;
      for (const auto& p : s.probs()) {
        CHECK(p >= 0);
        sum += p;
      }
      CHECK(sum == 1);
      CHECK(s.prob(static_cast<std::size_t>(k - 1)) == 0);
    }
  }
}

TEST_CASE("property: concavity oracle agrees with base-over-spread preference") {
  const ConcavitySweep sweep = concavity_sweep_serial(3000, 77);
  CHECK(sweep.counterexamples.empty());
  CHECK(sweep.concave > 0);
  CHECK(sweep.concave < sweep.instances);
}

TEST_CASE("property: expected utility is linear in probabilities") {
  CounterRng rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<long long> a(4), b(4);
    long long ta = 0, tb = 0;
    for (int i = 0; i < 4; ++i) {
      a[i] = static_cast<long long>(rng.below(20));
      b[i] = static_cast<long long>(rng.below(20));
      ta += a[i];
      tb += b[i];
    }
    a[0] += 1;
    b[3] += 1;
    ++ta;
    ++tb;
    std::vector<Rational> pa, pb;
    for (int i = 0; i < 4; ++i) {
      pa.push_back(Rational(a[i], ta));
      pb.push_back(Rational(b[i], tb));
    }
    const Lottery la(standard_prizes(), pa), lb(standard_prizes(), pb);
    const Rational alpha(static_cast<long long>(rng.below(101)), 100);
    const TabulatedUtility u({0.0, rng.uniform() * 0.5, 0.5 + rng.uniform() * 0.5, 1.0});
    const Lottery mix = mixture(alpha, la, lb);
    const double w = to_double(alpha);
    CHECK(expected_utility(mix, u) == doctest::Approx(w * expected_utility(la, u) + (1 - w) * expected_utility(lb, u)).epsilon(1e-12));
    CHECK(expected_value(mix) == alpha * expected_value(la) + (1 - alpha) * expected_value(lb));
  }
  CHECK_THROWS_AS(mixture(q(3, 2), pct({100, 0, 0, 0}), pct({0, 0, 0, 100})), std::invalid_argument);
}
