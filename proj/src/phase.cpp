#include "qseqlab/phase.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qseqlab {

namespace {

using I128 = __int128;

std::int64_t gcd64(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

}  // namespace

double frac_part(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f -= 1.0;  // floor rounding at the seam
  if (f < 0.0) f += 1.0;
  return f;
}

double circ_dist(double x) {
  double f = frac_part(x);
  return f <= 0.5 ? f : 1.0 - f;
}

Phase Phase::rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("phase with zero denominator");
  if (den < 0) { den = -den; num = -num; }
  num %= den;
  if (num < 0) num += den;
  std::int64_t g = gcd64(num, den);
  if (g > 1) { num /= g; den /= g; }
  Phase p;
  p.exact_ = true;
  p.num_ = num;
  p.den_ = den;
  p.val_ = 0.0;
  return p;
}

Phase Phase::real(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("phase must be finite");
  Phase p;
  p.exact_ = false;
  p.num_ = 0;
  p.den_ = 1;
  p.val_ = frac_part(x);
  return p;
}

double Phase::to_double() const {
  return exact_ ? static_cast<double>(num_) / static_cast<double>(den_) : val_;
}

std::complex<double> Phase::unit() const {
  double x = to_double();
  return {std::cos(2.0 * std::numbers::pi * x), std::sin(2.0 * std::numbers::pi * x)};
}

Phase Phase::operator+(const Phase& o) const {
  if (exact_ && o.exact_) {
    std::int64_t g = gcd64(den_, o.den_);
    I128 den = static_cast<I128>(den_ / g) * o.den_;
    I128 num = static_cast<I128>(num_) * (o.den_ / g) + static_cast<I128>(o.num_) * (den_ / g);
    num %= den;
    if (num < 0) num += den;
    I128 a = num, b = den;
    while (b != 0) { I128 t = a % b; a = b; b = t; }
    if (a > 1) { num /= a; den /= a; }
    if (den <= std::numeric_limits<std::int64_t>::max()) {
      Phase p;
      p.exact_ = true;
      p.num_ = static_cast<std::int64_t>(num);
      p.den_ = static_cast<std::int64_t>(den);
      p.val_ = 0.0;
      return p;
    }
    return Phase::real(static_cast<double>(num) / static_cast<double>(den));
  }
  return Phase::real(to_double() + o.to_double());
}

Phase Phase::operator-() const {
  if (exact_) return Phase::rational(num_ == 0 ? 0 : den_ - num_, den_);
  return Phase::real(val_ == 0.0 ? 0.0 : 1.0 - val_);
}

Phase Phase::operator-(const Phase& o) const { return *this + (-o); }

Phase Phase::scaled(std::uint64_t n) const {
  if (exact_) {
    std::uint64_t nm = n % static_cast<std::uint64_t>(den_);
    I128 num = static_cast<I128>(num_) * static_cast<I128>(nm);
    num %= den_;
    return Phase::rational(static_cast<std::int64_t>(num), den_);
  }
  // Split n to keep the products within double precision as far as possible.
  long double x = static_cast<long double>(val_);
  std::uint64_t hi = n >> 32, lo = n & 0xffffffffULL;
  long double part = std::fmod(x * static_cast<long double>(lo), 1.0L);
  if (hi != 0) {
    long double xh = std::fmod(x * 4294967296.0L, 1.0L);
    part = std::fmod(part + std::fmod(xh * static_cast<long double>(hi), 1.0L), 1.0L);
  }
  return Phase::real(static_cast<double>(part));
}

double Phase::dist_to_zero() const {
  if (exact_) {
    std::int64_t m = num_ <= den_ - num_ ? num_ : den_ - num_;
    return static_cast<double>(m) / static_cast<double>(den_);
  }
  return circ_dist(val_);
}

bool Phase::is_zero(double tol) const {
  if (exact_) return num_ == 0;
  return circ_dist(val_) <= tol;
}

std::string Phase::str() const {
  char buf[64];
  if (exact_) {
    if (den_ == 1) return "0";
    std::snprintf(buf, sizeof buf, "%lld/%lld",
                  static_cast<long long>(num_), static_cast<long long>(den_));
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", val_);
  }
  return buf;
}

}  // namespace qseqlab
