#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qseqlab/lambda.hpp"
#include "qseqlab/phase.hpp"
#include "qseqlab/sequence.hpp"
#include "qseqlab/sieve.hpp"

namespace qseqlab {

struct ConcentrationResult {
  double beta = 0.0;      // argument of the complex mean, in [0,1)
  double mean_abs = 0.0;
};

// If mean_abs >= 1 - eps then for every delta > 0 at most (eps/(8 delta^2)) N
// of the phases lie further than delta from beta.
ConcentrationResult concentration_center(const std::vector<double>& phases);

// Raised when shadow's orbit hypothesis fails; index is the first i with
// ||alpha_{i+1} - q alpha_i|| > eps_i.
class HypothesisError : public std::runtime_error {
 public:
  HypothesisError(const std::string& what, std::size_t index)
      : std::runtime_error(what), index(index) {}
  std::size_t index;
};

// Single real number whose x q orbit tracks the given almost-orbit:
// ||q^i beta - alpha_i|| <= eps_i for every i. Requires the hypothesis
// ||alpha_{i+1} - q alpha_i|| <= eps_i and nonincreasing eps; the guarantee
// is re-checked before returning. alphas and epsilons have equal length.
double shadow(const std::vector<double>& alphas, const std::vector<double>& epsilons,
              std::uint32_t q);

struct SnapResult {
  std::int64_t num = 0;
  std::int64_t den = 1;     // reduced, positive, coprime to q
  double distance = 0.0;    // ||x - num/den||
  std::string family;       // "divisor", "multiple", or "both"
};

// Best rational approximation to x among denominators b with gcd(b, q) = 1
// drawn from two families: divisors of |p-p'|^t and multiples of |p-p'| up
// to |p-p'|^t. Ties break to the smaller b, then the smaller |a|.
SnapResult rational_snap(double x, std::uint64_t p, std::uint64_t pp, std::uint32_t q,
                         int max_power = 6);

struct ExtractionResult {
  bool inconclusive = false;
  std::string reason;          // set when inconclusive
  std::int64_t alpha_num = 0;
  std::int64_t alpha_den = 1;
  int k0 = 0;
  Interval window;             // J
  double psi_spread = 0.0;     // max ||psi(n) - center|| over supp(n) in I
  double epsilon0 = 0.0;       // uniqueness threshold 1/(8 (p-p')^2)
  double beta = 0.0;           // shadowed orbit value before snapping
  double snap_distance = 0.0;
  std::string snap_family;
  double residual = 0.0;       // max ||phi(n) - alpha n|| / s_q(n), supp(n) in J
};

struct ExtractOptions {
  int k0 = -1;                           // -1: 3r + ceil(log_q max(p,p')) + 4
  std::uint64_t enumeration_cap = 1ULL << 20;
  std::uint64_t samples = 1ULL << 14;    // psi spread sampling beyond the cap
  std::uint64_t seed = 0;
  int snap_max_power = 6;
};

// Linear-phase extraction: measures the spread of psi(n) = phi(pn) - phi(p'n)
// on supp(n) in I, reads phi(q^l) along the inner window J, shadows those
// into a single beta, snaps to an admissible rational, and divides out q^min J.
ExtractionResult extract_linear_phase(const DigitalSequence& f, std::uint64_t p,
                                      std::uint64_t pp, Interval I,
                                      const ExtractOptions& opts = {});

// Least m such that the fraction of length-m base-q words with no run of r
// consecutive zeros is <= eps. Exact arbitrary-precision counting.
// eps >= 1 gives 0; requires r >= 1 and eps > 0.
int min_window_for_zero_run(std::uint32_t q, int r, double eps);

struct PeriodicApprox {
  int K = 0;                       // calm-tail threshold position
  int M = 0;                       // period exponent; period q^M
  std::vector<double> table;       // g(n) phases, n < q^M
  double epsilon = 0.0;
  double fraction_exceeding = 0.0; // share of n < q^L with ||phi(n)-g(n mod q^M)|| > eps
  std::uint64_t tested_range = 0;  // q^L
  double g_at(std::uint64_t n) const { return table[n % table.size()]; }
};

struct ApproxOptions {
  int probe_width = 0;                    // 0: 2r + 2
  int horizon = -1;                       // max K tried; -1: L - zero-run window
  MeanOptions mean;                       // lambda probes and tail centers
  std::uint64_t center_samples = 1ULL << 14;  // tail-center sampling beyond the cap
  std::uint64_t test_cap = 1ULL << 20;    // full error scan while q^L <= this
  std::uint64_t test_samples = 1ULL << 14;
  std::uint64_t seed = 0;
};

// Explicit q^M-periodic approximant: splits phi at the first run of r zeros
// after K and replaces the tail by its concentration center. Returns nothing
// when no K below the horizon has a calm tail (every short interval's lambda
// <= eps^3); that absence is the not-almost-periodic signal.
std::optional<PeriodicApprox> periodic_approx(const DigitalSequence& f, double eps, int L,
                                              const ApproxOptions& opts = {});

struct SampleSpec {
  std::uint64_t count = 1024;       // sampled start positions
  std::uint64_t limit = 1ULL << 30; // positions drawn from [0, limit)
  std::uint64_t stride = 0;         // 0: seeded uniform draws; else n_j = j*stride
  std::uint64_t seed = 0;
};

// Greedy eps-net size over the factor vectors (phi(n+j))_{j<d} in sup
// circular distance, visiting sampled positions in order.
std::uint64_t factor_cover_count(const DigitalSequence& f, int d, double eps,
                                 const SampleSpec& spec = {});

struct SeriesOptions {
  int block_width = 0;   // 0: 2r + 1
  int separation = -1;   // -1: 2r + 1
  MeanOptions mean;
  std::uint64_t mc_samples = 1ULL << 14;
  std::uint64_t seed = 0;
};

// Lambda-bar partial sums over the blocks I_i = [i(w+s), i(w+s)+w) that fit
// inside [0, L).
LambdaProfile lambda_sum_series(const DigitalSequence& f, int L,
                                const SeriesOptions& opts = {});

struct ClassifyParams {
  double plateau_theta = 0.05;     // bounded when last-half increase < theta
  double growth_fraction = 0.4;    // growing when last-half increase >= 0.4 * blocks
  double kbsz_threshold = 0.25;    // scan max below this confirms kbsz-like
  int L = 0;                       // series length; 0: largest safe for (q, p, p')
  Interval extract_interval{0, 16};
  std::uint32_t scan_prime_lo = 3, scan_prime_hi = 14;
  std::uint64_t scan_N = 1ULL << 16;
  double approx_eps = 0.05;
  int approx_L = 16;
  std::uint64_t seed = 0;
};

struct DichotomyReport {
  LambdaProfile series;                  // lambda_sum_series of g = f(pn) conj(f(p'n))
  double last_half_increase = 0.0;
  double kbsz_max = -1.0;                // -1 when the scan did not run
  bool has_alpha = false;
  std::int64_t alpha_num = 0;
  std::int64_t alpha_den = 1;
  LambdaProfile quotient_series;         // series of f e(-alpha n) on the plateau branch
  std::optional<PeriodicApprox> approx;  // approximant of the quotient
  std::string verdict;                   // almost-periodic-like | kbsz-like | inconclusive
  std::string diagnostics;               // thresholds and branch evidence; heuristic label
};

// Heuristic dichotomy probe: plateauing lambda-bar sums of g route to linear
// phase extraction and a periodic approximant of the quotient; growing sums
// route to a KBSZ bilinear scan. Inconclusive is a valid outcome.
DichotomyReport classify(const DigitalSequence& f, std::uint64_t p, std::uint64_t pp,
                         const ClassifyParams& params = {});

}  // namespace qseqlab
