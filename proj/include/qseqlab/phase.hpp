#pragma once

#include <complex>
#include <cstdint>
#include <string>

namespace qseqlab {

// Additive phase in R/Z. Carries either an exact reduced rational in [0,1)
// or a double in [0,1). Arithmetic stays exact while every operand is exact
// and the reduced denominator fits in 64 bits; otherwise it degrades to the
// float path. Comparisons on the float path use distance to the nearest
// integer with tolerance 1e-9.
class Phase {
 public:
  Phase() : exact_(true), num_(0), den_(1), val_(0.0) {}

  static Phase rational(std::int64_t num, std::int64_t den);
  static Phase real(double x);

  bool is_exact() const { return exact_; }
  // Reduced numerator/denominator; only meaningful when is_exact().
  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const;
  std::complex<double> unit() const;  // e(x) = exp(2*pi*i*x)

  Phase operator+(const Phase& o) const;
  Phase operator-(const Phase& o) const;
  Phase operator-() const;
  Phase& operator+=(const Phase& o) { *this = *this + o; return *this; }
  Phase& operator-=(const Phase& o) { *this = *this - o; return *this; }

  // n * x mod 1.
  Phase scaled(std::uint64_t n) const;

  // Distance to the nearest integer.
  double dist_to_zero() const;
  static double dist(const Phase& a, const Phase& b) { return (a - b).dist_to_zero(); }

  // Exactly 0 on the exact path; within tol of an integer on the float path.
  bool is_zero(double tol = kTol) const;

  // "1/3" or a decimal rendering for float phases.
  std::string str() const;

  static constexpr double kTol = 1e-9;

 private:
  bool exact_;
  std::int64_t num_, den_;
  double val_;
};

// x - floor(x), result in [0,1).
double frac_part(double x);

// Distance from x to the nearest integer.
double circ_dist(double x);

}  // namespace qseqlab
