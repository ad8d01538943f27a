#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "qseqlab/lambda.hpp"

using namespace qseqlab;
using qseqlab::testing::brute_mean;
using qseqlab::testing::random_table_sequence;

namespace {
const DigitalSequence kOne = builder_linear(2, Phase::rational(0, 1));
}

TEST_CASE("lambda_exact basics") {
  for (auto I : {Interval{0, 1}, Interval{3, 7}, Interval{0, 12}}) {
    LambdaValue v = lambda_exact(kOne, I);
    CHECK(!v.infinite);
    CHECK(v.value == 0.0);
  }
  // Empty set: single term n = 0, f(0) = 1.
  LambdaValue empty = lambda_exact(kOne, IndexSet{});
  CHECK(empty.value == 0.0);

  DigitalSequence tm = thue_morse();
  for (int l : {0, 1, 5, 20}) {
    LambdaValue v = lambda_exact(tm, IndexSet({l}));
    CHECK(v.infinite);
  }

  DigitalSequence lin = builder_linear(2, Phase::rational(1, 3));
  LambdaValue v = lambda_exact(lin, Interval{0, 1});
  CHECK(!v.infinite);
  CHECK(v.value == doctest::Approx(std::log(2.0)));
}

TEST_CASE("lambda_exact agrees with direct complex summation") {
  CounterRng rng(31);
  for (int i = 0; i < 40; ++i) {
    std::uint32_t q = i % 2 ? 2 : 3;
    DigitalSequence f = random_table_sequence(rng, q, static_cast<int>(rng.next_below(3)),
                                              rng.next() & 1);
    std::vector<int> pos;
    for (int p = 0; p < 10; ++p)
      if (rng.next() & 1) pos.push_back(p);
    if (pos.empty()) pos.push_back(0);
    IndexSet I(pos);
    LambdaValue got = lambda_exact(f, I);
    double want = -std::log(std::abs(brute_mean(f, I)));
    if (got.infinite)
      CHECK(std::abs(brute_mean(f, I)) < 1e-9);
    else
      CHECK(got.value == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("lambda_exact cap") {
  DigitalSequence tm = thue_morse();
  CHECK_THROWS_AS(lambda_exact(tm, Interval{0, 30}), CapError);
  MeanOptions tiny;
  tiny.enumeration_cap = 4;
  CHECK_THROWS_AS(lambda_exact(tm, Interval{0, 3}, tiny), CapError);
}

TEST_CASE("lambda_bar clamps") {
  CHECK(lambda_bar(LambdaValue::finite(0.0)) == 0.0);
  CHECK(lambda_bar(LambdaValue::finite(0.3)) == doctest::Approx(0.3));
  CHECK(lambda_bar(LambdaValue::finite(7.0)) == 1.0);
  CHECK(lambda_bar(LambdaValue::inf()) == 1.0);
}

TEST_CASE("lambda_mc") {
  LambdaEstimate one = lambda_mc(kOne, IndexSet::interval(0, 20), 2000, 7);
  CHECK(one.value.value == doctest::Approx(0.0));
  CHECK(one.ci_halfwidth == doctest::Approx(0.0));

  // Thue-Morse over [0,8): true lambda is infinite; the estimate must be
  // large or flagged infinite.
  LambdaEstimate tm8 = lambda_mc(thue_morse(), IndexSet::interval(0, 8), 1 << 14, 7);
  CHECK((tm8.value.infinite || tm8.value.value >= 5.0));

  // Reproducible under a fixed seed.
  LambdaEstimate a = lambda_mc(rudin_shapiro(), IndexSet::interval(0, 9), 4096, 42);
  LambdaEstimate b = lambda_mc(rudin_shapiro(), IndexSet::interval(0, 9), 4096, 42);
  CHECK(a.value.value == b.value.value);
  CHECK(a.mean_abs == b.mean_abs);

  // Agreement with the exact value within 3 standard errors.
  CounterRng rng(32);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    DigitalSequence f = random_table_sequence(rng, 2, static_cast<int>(rng.next_below(3)),
                                              rng.next() & 1);
    IndexSet I = IndexSet::interval(0, 2 + static_cast<int>(rng.next_below(10)));
    LambdaValue exact = lambda_exact(f, I);
    LambdaEstimate mc = lambda_mc(f, I, 1 << 14, 1000 + static_cast<std::uint64_t>(i));
    if (exact.infinite || mc.value.infinite) continue;  // rare; covered above
    ++checked;
    CHECK(std::abs(mc.value.value - exact.value) <= 3.0 * mc.ci_halfwidth + 1e-9);
  }
  CHECK(checked >= 60);
}

TEST_CASE("additivity on separated families") {
  DigitalSequence rs = rudin_shapiro();
  AdditivityResult r = additivity_check(rs, {IndexSet({0, 1}), IndexSet({4, 5})});
  CHECK(r.consistent());
  CHECK(r.residual == doctest::Approx(0.0).epsilon(1e-9));

  AdditivityResult single = additivity_check(rs, {IndexSet({2, 3})});
  CHECK(single.consistent());

  DigitalSequence tm = thue_morse();
  AdditivityResult both_inf = additivity_check(tm, {IndexSet({0}), IndexSet({2})});
  CHECK(both_inf.whole.infinite);
  CHECK(both_inf.part_sum.infinite);
  CHECK(both_inf.consistent());

  // Gap 1 sequence needs gaps > 1 between sets.
  CHECK_THROWS_AS(additivity_check(rs, {IndexSet({0, 1}), IndexSet({2, 3})}),
                  std::invalid_argument);
  CHECK_THROWS_AS(additivity_check(rs, {IndexSet({0, 1}), IndexSet({1, 2})}),
                  std::invalid_argument);
}

TEST_CASE("additivity across the random corpus") {
  CounterRng rng(33);
  for (int i = 0; i < 60; ++i) {
    std::uint32_t q = i % 2 ? 2 : 3;
    int r = static_cast<int>(rng.next_below(3));
    DigitalSequence f = random_table_sequence(rng, q, r, rng.next() & 1);
    // Two or three blocks with gaps > r.
    std::vector<IndexSet> sets;
    int lo = 0;
    int blocks = 2 + static_cast<int>(rng.next_below(2));
    for (int b = 0; b < blocks; ++b) {
      int w = 1 + static_cast<int>(rng.next_below(3));
      sets.push_back(IndexSet::interval(lo, lo + w));
      lo += w + r + 1 + static_cast<int>(rng.next_below(2));
    }
    AdditivityResult res = additivity_check(f, sets);
    INFO("q=", q, " r=", r, " i=", i);
    CHECK(res.consistent());
  }
}

TEST_CASE("quadratic_form examples") {
  CHECK(quadratic_form(kOne, IndexSet::interval(0, 6)) == doctest::Approx(0.0));

  // Two equal-weight atoms at 0 and 1/2: best beta sits at distance 1/4 from
  // both, E = ((1/4)^2 + (1/4)^2) / 2.
  double two_atoms = quadratic_form_of_phases({0.0, 0.5});
  CHECK(two_atoms == doctest::Approx(1.0 / 16).epsilon(1e-12));

  double tm_q = quadratic_form(thue_morse(), IndexSet({0}));
  CHECK(tm_q == doctest::Approx(1.0 / 16).epsilon(1e-12));

  // Single atom: zero.
  CHECK(quadratic_form_of_phases({0.37}) == doctest::Approx(0.0));
  // Concentrated cluster: variance around its mean.
  double c = quadratic_form_of_phases({0.1, 0.2});
  CHECK(c == doctest::Approx(0.0025).epsilon(1e-9));
}

TEST_CASE("quadratic_form brute agreement") {
  CounterRng rng(34);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> phases;
    int k = 2 + static_cast<int>(rng.next_below(8));
    for (int i = 0; i < k; ++i) phases.push_back(rng.next_unit());
    double got = quadratic_form_of_phases(phases);
    // Dense beta grid with local refinement as an oracle.
    double best = 1e9;
    for (int g = 0; g < 20000; ++g) {
      double beta = g / 20000.0;
      double s = 0;
      for (double x : phases) {
        double d = std::fabs(x - beta);
        d = std::min(d, 1.0 - d);
        s += d * d;
      }
      best = std::min(best, s / static_cast<double>(k));
    }
    CHECK(got <= best + 1e-9);
    CHECK(got >= best - 1e-4);  // grid resolution slack
  }
}

TEST_CASE("envelope between lambda and the quadratic form") {
  constexpr double c1 = 8.0;
  const double c2 = 2 * std::numbers::pi * std::numbers::pi;
  CounterRng rng(35);
  int used = 0;
  for (int i = 0; i < 3000 && used < 100; ++i) {
    std::uint32_t q = i % 2 ? 2 : 3;
    DigitalSequence f = random_table_sequence(rng, q, static_cast<int>(rng.next_below(2)),
                                              rng.next() & 1);
    IndexSet I = IndexSet::interval(0, 2 + static_cast<int>(rng.next_below(6)));
    LambdaValue lv = lambda_exact(f, I);
    if (lv.infinite || lv.value > 1.0) continue;
    ++used;
    double Q = quadratic_form(f, I);
    double gap = 1.0 - std::exp(-lv.value);
    CHECK(c1 * Q <= gap + 1e-9);
    CHECK(gap <= c2 * Q + 1e-9);
  }
  CHECK(used == 100);
}

TEST_CASE("lambda invariances") {
  DigitalSequence rs = rudin_shapiro();
  IndexSet I = IndexSet::interval(0, 6);
  LambdaValue base = lambda_exact(rs, I);

  // Constant rotation: multiply by e(1/7) via a product with a rotated
  // constant built from a linear builder evaluated as f(n) e(beta n)? A
  // constant factor is outside the builder algebra, so rotate the phase
  // multiset directly through the quadratic/mean path: lambda of the product
  // with a constant-phase table on a disjoint position equals the base by
  // additivity with a zero part.
  CoefficientTable rot(2, 0, false);
  rot.set(8, {1}, Phase::rational(1, 7));
  DigitalSequence rotseq = from_coefficients(std::move(rot));
  DigitalSequence g = product(rs, rotseq);
  // On supp(n) within [0,6), the rotation table contributes 0; on {8} alone
  // it is the constant-per-digit rotation whose singleton lambda is 0.
  LambdaValue same = lambda_exact(g, I);
  CHECK(same.infinite == base.infinite);
  if (!base.infinite) CHECK(same.value == doctest::Approx(base.value).epsilon(1e-12));

  // Dilation shifts intervals by one digit.
  DigitalSequence drs = dilate(rs);
  for (auto iv : {Interval{0, 4}, Interval{2, 7}}) {
    LambdaValue a = lambda_exact(drs, iv);
    LambdaValue b = lambda_exact(rs, Interval{iv.lo + 1, iv.hi + 1});
    CHECK(a.infinite == b.infinite);
    if (!a.infinite) CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
  }

  // Translating every phase by a constant leaves the quadratic form alone;
  // this is the multiset-level face of the constant-rotation invariance.
  CounterRng rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> phases;
    for (int i = 0; i < 6; ++i) phases.push_back(rng.next_unit());
    double beta = rng.next_unit();
    std::vector<double> shifted;
    for (double x : phases) shifted.push_back(x + beta - std::floor(x + beta));
    CHECK(quadratic_form_of_phases(phases) ==
          doctest::Approx(quadratic_form_of_phases(shifted)).epsilon(1e-9));
  }
}

TEST_CASE("global_local_check") {
  DigitalSequence rs = rudin_shapiro();
  GlobalLocalResult r =
      global_local_check(rs, Interval{0, 10}, {Interval{1, 3}, Interval{7, 9}});
  CHECK(r.pass);
  CHECK(r.local_bars.size() == 2);
  CHECK(r.required_lower_bound ==
        doctest::Approx(r.local_bar_sum / (10.0 * 4.0)));  // q^{2r} = 4

  // f == 1: all zeros, trivially passes.
  GlobalLocalResult one = global_local_check(kOne, Interval{0, 8}, {Interval{1, 7}});
  CHECK(one.pass);
  CHECK(one.local_bar_sum == 0.0);

  // Geometry violations.
  CHECK_THROWS_AS(
      global_local_check(rs, Interval{0, 10}, {Interval{0, 2}, Interval{7, 9}}),
      std::invalid_argument);  // touches the left end, margin < r
  CHECK_THROWS_AS(
      global_local_check(rs, Interval{0, 10}, {Interval{1, 3}, Interval{4, 6}}),
      std::invalid_argument);  // inter-gap 1 is not > 2r
}

TEST_CASE("global_local on the random corpus") {
  CounterRng rng(36);
  for (int i = 0; i < 100; ++i) {
    DigitalSequence f = random_table_sequence(rng, 2, 1, rng.next() & 1);
    GlobalLocalResult r =
        global_local_check(f, Interval{0, 10}, {Interval{1, 3}, Interval{6, 8}});
    INFO("i=", i);
    CHECK(r.pass);
  }
}

TEST_CASE("lambda_profile mixes exact and mc") {
  DigitalSequence rs = rudin_shapiro();
  ProfileOptions opts;
  opts.mean.enumeration_cap = 1 << 10;
  opts.mc_samples = 1 << 12;
  opts.seed = 5;
  LambdaProfile p = lambda_profile(rs, {Interval{0, 4}, Interval{0, 16}}, opts);
  REQUIRE(p.rows.size() == 2);
  CHECK(p.rows[0].method == LambdaMethod::Exact);
  CHECK(p.rows[1].method == LambdaMethod::MonteCarlo);
  CHECK(p.rows[0].partial_bar_sum == doctest::Approx(p.rows[0].bar));
  CHECK(p.rows[1].partial_bar_sum ==
        doctest::Approx(p.rows[0].bar + p.rows[1].bar));
  // Partial sums nondecreasing with increments in [0,1].
  for (const auto& row : p.rows) {
    CHECK(row.bar >= 0.0);
    CHECK(row.bar <= 1.0);
  }
}
