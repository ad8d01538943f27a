#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "qseqlab/phase.hpp"

using namespace qseqlab;

TEST_CASE("rational construction reduces and normalizes mod 1") {
  Phase p = Phase::rational(14, 12);
  CHECK(p.is_exact());
  CHECK(p.num() == 1);
  CHECK(p.den() == 6);

  Phase n = Phase::rational(-1, 3);
  CHECK(n.num() == 2);
  CHECK(n.den() == 3);

  Phase z = Phase::rational(9, 3);
  CHECK(z.num() == 0);
  CHECK(z.den() == 1);

  CHECK_THROWS_AS(Phase::rational(1, 0), std::invalid_argument);
}

TEST_CASE("real construction wraps into [0,1)") {
  CHECK(Phase::real(1.25).to_double() == doctest::Approx(0.25));
  CHECK(Phase::real(-0.25).to_double() == doctest::Approx(0.75));
  CHECK(!Phase::real(0.3).is_exact());
}

TEST_CASE("exact arithmetic stays exact") {
  Phase a = Phase::rational(1, 3), b = Phase::rational(1, 6);
  Phase s = a + b;
  CHECK(s.is_exact());
  CHECK(s.num() == 1);
  CHECK(s.den() == 2);

  Phase d = a - b;
  CHECK(d.num() == 1);
  CHECK(d.den() == 6);

  Phase neg = -a;
  CHECK(neg.num() == 2);
  CHECK(neg.den() == 3);
  CHECK((a + neg).is_zero(0.0));
}

TEST_CASE("mixed arithmetic degrades to float") {
  Phase a = Phase::rational(1, 3), x = Phase::real(0.1);
  Phase s = a + x;
  CHECK(!s.is_exact());
  CHECK(s.to_double() == doctest::Approx(1.0 / 3 + 0.1));
}

TEST_CASE("scaled multiplies mod 1") {
  Phase a = Phase::rational(1, 3);
  CHECK(a.scaled(2).num() == 2);
  CHECK(a.scaled(3).num() == 0);
  CHECK(a.scaled(0).is_zero(0.0));

  // Huge multipliers stay exact through the modular path.
  Phase tiny = Phase::rational(1, 0x7fffffffffffLL);
  Phase big = tiny.scaled(0xffffffffffffffffULL);
  CHECK(big.is_exact());

  CounterRng rng(3);
  for (int i = 0; i < 2000; ++i) {
    std::int64_t den = 2 + static_cast<std::int64_t>(rng.next_below(1000));
    std::int64_t num = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(den)));
    std::uint64_t n = rng.next();
    Phase p = Phase::rational(num, den).scaled(n);
    // Compare against __int128 reference arithmetic.
    unsigned __int128 prod = static_cast<unsigned __int128>(num % den) * (n % static_cast<std::uint64_t>(den));
    std::int64_t want = static_cast<std::int64_t>(prod % static_cast<std::uint64_t>(den));
    CHECK(p.is_exact());
    std::int64_t got = p.num() * (den / p.den());
    CHECK(got == want);
  }
}

TEST_CASE("dist and is_zero use circle distance") {
  CHECK(Phase::dist(Phase::rational(1, 10), Phase::rational(9, 10)) == doctest::Approx(0.2));
  CHECK(Phase::real(0.9999999999).is_zero());
  CHECK(!Phase::rational(1, 2).is_zero());
  CHECK(Phase::rational(0, 1).is_zero(0.0));
  CHECK(Phase::rational(1, 2).dist_to_zero() == doctest::Approx(0.5));
}

TEST_CASE("unit produces points on the circle") {
  CHECK(Phase().unit() == std::complex<double>(1.0, 0.0));
  CHECK(Phase::rational(1, 2).unit().real() == doctest::Approx(-1.0));
  CHECK(Phase::rational(1, 4).unit().imag() == doctest::Approx(1.0));
  CHECK(std::abs(Phase::real(0.345).unit()) == doctest::Approx(1.0));
}

TEST_CASE("str renders fractions") {
  CHECK(Phase::rational(0, 1).str() == "0");
  CHECK(Phase::rational(1, 3).str() == "1/3");
  CHECK(Phase::rational(-1, 3).str() == "2/3");
}

TEST_CASE("denominator overflow falls back to float near the limit") {
  Phase p = Phase::rational(1, 0x7fffffffffffffffLL);
  Phase sum = p;
  for (int i = 0; i < 3; ++i) sum += Phase::rational(1, 0x7ffffffffffffff0LL);
  // Either representation is fine; the value must stay right.
  CHECK(sum.to_double() == doctest::Approx(0.0).epsilon(1e-9));
}
