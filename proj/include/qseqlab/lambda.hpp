#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qseqlab/digits.hpp"
#include "qseqlab/sequence.hpp"

namespace qseqlab {

// Digit-position interval [lo, hi).
struct Interval {
  int lo = 0;
  int hi = 0;
  int length() const { return hi - lo; }
  IndexSet to_index_set() const { return IndexSet::interval(lo, hi); }
  bool operator==(const Interval&) const = default;
};

// Cancellation exponent: |mean of f over supp(n) in I| = exp(-value),
// with an explicit marker for full cancellation.
struct LambdaValue {
  double value = 0.0;
  bool infinite = false;

  static LambdaValue inf() { return {0.0, true}; }
  static LambdaValue finite(double v) { return {v, false}; }
  // min(lambda, 1); infinity clamps to 1.
  double bar() const { return infinite ? 1.0 : (value < 1.0 ? value : 1.0); }
  double or_large(double large = 1e18) const { return infinite ? large : value; }
};

double lambda_bar(const LambdaValue& v);

struct MeanResult {
  std::complex<double> mean{0.0, 0.0};
  std::uint64_t count = 0;
  bool exact_path = false;  // histogram over a common denominator was used
  bool exact_zero = false;  // the mean vanishes exactly (certified)
};

struct MeanOptions {
  std::uint64_t enumeration_cap = 1ULL << 20;
  std::int64_t exact_den_cap = 1 << 16;  // largest common denominator for the exact path
};

// Mean of f(n) over all n with supp(n) contained in I (|I| digits free).
MeanResult cancellation_mean(const DigitalSequence& f, const IndexSet& I,
                             const MeanOptions& opts = {});

LambdaValue lambda_from_mean(const MeanResult& m);

LambdaValue lambda_exact(const DigitalSequence& f, const IndexSet& I, const MeanOptions& opts = {});
LambdaValue lambda_exact(const DigitalSequence& f, const Interval& I, const MeanOptions& opts = {});

struct LambdaEstimate {
  LambdaValue value;
  double ci_halfwidth = 0.0;  // one standard error, on the lambda scale
  double mean_abs = 0.0;
};

LambdaEstimate lambda_mc(const DigitalSequence& f, const IndexSet& I, std::uint64_t samples,
                         std::uint64_t seed);

struct AdditivityResult {
  LambdaValue whole;
  LambdaValue part_sum;            // infinite if any part is
  bool infinity_consistent = true; // whole infinite iff some part infinite
  double residual = 0.0;           // |whole - sum| when finite, 0 when consistently infinite
  bool consistent(double tol = 1e-9) const { return infinity_consistent && residual <= tol; }
};

// Requires pairwise digit gaps > f.gap() between the sets.
AdditivityResult additivity_check(const DigitalSequence& f, const std::vector<IndexSet>& sets,
                                  const MeanOptions& opts = {});

// inf over beta of the mean squared circular distance of the phases on I to
// beta; exact piecewise-quadratic minimization via a breakpoint sweep.
double quadratic_form(const DigitalSequence& f, const IndexSet& I, const MeanOptions& opts = {});
double quadratic_form_of_phases(std::vector<double> phases);

struct GlobalLocalResult {
  LambdaValue whole;
  std::vector<double> local_bars;
  double local_bar_sum = 0.0;
  double required_lower_bound = 0.0;  // local_bar_sum / (10 q^{2r})
  bool pass = false;
};

struct GlobalLocalOptions {
  MeanOptions mean;
  std::uint64_t mc_samples = 1ULL << 16;  // fallback when the whole interval is over cap
  std::uint64_t seed = 0;
};

// Checks lambda(I) >= sum of local lambda-bars scaled by 1/(10 q^{2r}).
// Subintervals need margins >= r from the ends of I and gaps > 2r apart.
GlobalLocalResult global_local_check(const DigitalSequence& f, const Interval& I,
                                     const std::vector<Interval>& subs,
                                     const GlobalLocalOptions& opts = {});

enum class LambdaMethod { Exact, MonteCarlo };

struct LambdaProfileRow {
  Interval interval;
  LambdaValue lambda;
  double bar = 0.0;
  double partial_bar_sum = 0.0;
  LambdaMethod method = LambdaMethod::Exact;
  double ci_halfwidth = 0.0;
};

struct LambdaProfile {
  std::vector<LambdaProfileRow> rows;
};

struct ProfileOptions {
  MeanOptions mean;
  std::uint64_t mc_samples = 1ULL << 16;
  std::uint64_t seed = 0;
};

// Lambda over each interval (exact when the enumeration fits the cap, Monte
// Carlo otherwise) with running partial sums of lambda-bar.
LambdaProfile lambda_profile(const DigitalSequence& f, const std::vector<Interval>& intervals,
                             const ProfileOptions& opts = {});

}  // namespace qseqlab
