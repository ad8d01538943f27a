#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qseqlab/phase.hpp"
#include "qseqlab/sequence.hpp"

namespace qseqlab {

// mu(n) for 0 <= n < limit; mu(0) = 0 by convention so averages over
// [0, N) can start at n = 0 with a vanishing first term.
struct MobiusTable {
  std::uint64_t limit = 0;
  std::vector<std::int8_t> values;

  int at(std::uint64_t n) const { return values[n]; }
};

// Linear sieve. limit <= 2^31.
MobiusTable mobius_table(std::uint64_t limit);

// Primes in [lo, hi). hi <= 2^31.
std::vector<std::uint32_t> primes_in(std::uint32_t lo, std::uint32_t hi);

// Partial Cesaro averages (1/N') sum_{n<N'} a_n at each checkpoint N'.
struct CorrelationSeries {
  std::vector<std::uint64_t> checkpoints;       // ascending, last entry = N
  std::vector<std::complex<double>> partials;
  std::string summand_label;
};

// Checkpoints for mobius_correlation: powers of 10 and powers of q up to N,
// with N itself always last.
std::vector<std::uint64_t> default_checkpoints(std::uint64_t N, std::uint32_t q);

// Averages f(n) mu(n). Deterministic chunked summation; threads > 1 splits
// into the same fixed chunks and reduces them in ascending order, so the
// result is identical at any thread count.
CorrelationSeries mobius_correlation(const DigitalSequence& f, std::uint64_t N,
                                     std::vector<std::uint64_t> checkpoints = {},
                                     int threads = 1);

// E_{n<N} f(pn) conj(f(p'n)). Phases subtract on the exact rational path
// before the complex exponential, so identities like f = e(n/(p-p'))
// average to exactly 1.
std::complex<double> kbsz_correlation(const DigitalSequence& f, std::uint64_t p,
                                      std::uint64_t pp, std::uint64_t N);

struct KbszPair {
  std::uint32_t p = 0, pp = 0;
  std::complex<double> value;
};

struct KbszScanResult {
  std::vector<KbszPair> pairs;  // all unordered pairs p < pp
  double max_abs = 0.0;
  std::uint32_t argmax_p = 0, argmax_pp = 0;
};

// All unordered pairs of distinct primes in [primeLo, primeHi).
KbszScanResult kbsz_scan(const DigitalSequence& f, std::uint32_t prime_lo,
                         std::uint32_t prime_hi, std::uint64_t N);

// Partial sums over l < L of sum_{a<q} Re(1 - f(a q^l) e(-gamma a q^l)).
// Entry t is the sum through level t. Requires a multiplicative class tag.
std::vector<double> ik_series(const DigitalSequence& f, const Phase& gamma, int L);

}  // namespace qseqlab
