#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qseqlab/common.hpp"
#include "qseqlab/digits.hpp"
#include "qseqlab/phase.hpp"
#include "qseqlab/sequence.hpp"

namespace qseqlab::testing {

// Random rational coefficient table: denominators stay small so every phase
// below any N shares an lcm well under 2^32 and the exact paths stay active.
inline CoefficientTable random_table(CounterRng& rng, std::uint32_t q, int r, bool strong,
                                     int positional_rows = 6) {
  CoefficientTable t(q, r, strong);
  static const std::int64_t dens[] = {2, 3, 4, 5, 6, 8, 12};
  std::uint64_t states = 1;
  for (int i = 0; i <= r; ++i) states *= q;
  int rows = strong ? 1 : positional_rows;
  for (int pos = 0; pos < rows; ++pos)
    for (std::uint64_t code = 1; code < states; ++code) {
      std::int64_t den = dens[rng.next_below(7)];
      std::int64_t num = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(den)));
      std::vector<std::uint32_t> w;
      std::uint64_t c = code;
      for (int i = 0; i <= r; ++i) {
        w.push_back(static_cast<std::uint32_t>(c % q));
        c /= q;
      }
      if (strong)
        t.set(w, Phase::rational(num, den));
      else
        t.set(pos, w, Phase::rational(num, den));
    }
  return t;
}

inline DigitalSequence random_table_sequence(CounterRng& rng, std::uint32_t q, int r,
                                             bool strong) {
  return from_coefficients(random_table(rng, q, r, strong));
}

inline std::uint64_t brute_digit_sum(std::uint64_t n, std::uint32_t q) {
  std::uint64_t s = 0;
  while (n) {
    s += n % q;
    n /= q;
  }
  return s;
}

// Pattern occurrences by scanning the written string with |p|-1 zeros in
// front, entirely independent of the library's windowed counter.
inline std::uint64_t brute_block_count(std::uint64_t n, const std::string& pattern,
                                       std::uint32_t q) {
  std::string digits;  // most significant first
  std::uint64_t m = n;
  while (m) {
    digits.insert(digits.begin(), static_cast<char>('0' + m % q));
    m /= q;
  }
  digits.insert(0, pattern.size() - 1, '0');
  std::uint64_t count = 0;
  if (digits.size() >= pattern.size())
    for (std::size_t i = 0; i + pattern.size() <= digits.size(); ++i)
      if (digits.compare(i, pattern.size(), pattern) == 0) ++count;
  return count;
}

inline int brute_mobius(std::uint64_t n) {
  if (n == 0) return 0;
  int factors = 0;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      ++factors;
    }
  if (n > 1) ++factors;
  return factors % 2 == 0 ? 1 : -1;
}

// Words of length m over {0..q-1} avoiding a run of r zeros, scanning every
// word directly. Only called while q^m is small.
inline std::uint64_t enumerate_avoid_count(std::uint32_t q, int r, int m) {
  std::uint64_t avoid = 0;
  std::vector<std::uint32_t> w(static_cast<std::size_t>(m), 0);
  for (;;) {
    int run = 0, best = 0;
    for (int i = 0; i < m; ++i) {
      run = w[static_cast<std::size_t>(i)] == 0 ? run + 1 : 0;
      best = run > best ? run : best;
    }
    if (best < r) ++avoid;
    int j = 0;
    while (j < m && w[static_cast<std::size_t>(j)] == q - 1) w[static_cast<std::size_t>(j++)] = 0;
    if (j == m) break;
    ++w[static_cast<std::size_t>(j)];
  }
  return avoid;
}

// Least m with (words of length m over {0..q-1} avoiding a run of r zeros)
// <= eps * q^m; -1 when no m <= horizon works. Counts with a trailing-run
// state vector in uint64 (safe while q^horizon < 2^63) and cross-checks the
// count against direct word enumeration while q^m <= 2^14.
inline int brute_min_window(std::uint32_t q, int r, double eps, int horizon) {
  // state[j] = words avoiding the run that end in exactly j zeros
  std::vector<std::uint64_t> state(static_cast<std::size_t>(r), 0);
  state[0] = 1;
  std::uint64_t qm = 1;
  for (int m = 0; m <= horizon; ++m) {
    std::uint64_t avoid = 0;
    for (std::uint64_t s : state) avoid += s;
    if (qm <= (1ULL << 14) && avoid != enumerate_avoid_count(q, r, m))
      throw std::logic_error("brute_min_window: state count disagrees with enumeration");
    if (static_cast<double>(avoid) <= eps * static_cast<double>(qm)) return m;
    std::vector<std::uint64_t> next(static_cast<std::size_t>(r), 0);
    for (int j = 0; j < r; ++j) next[0] += state[static_cast<std::size_t>(j)] * (q - 1);
    for (int j = 0; j + 1 < r; ++j) next[static_cast<std::size_t>(j + 1)] = state[static_cast<std::size_t>(j)];
    state = std::move(next);
    qm *= q;
  }
  return -1;
}

// Mean of f over supp(n) in I by direct complex summation, no exact paths.
inline std::complex<double> brute_mean(const DigitalSequence& f, const IndexSet& I) {
  std::complex<double> acc = 0;
  std::uint64_t count = 0;
  enumerate_support(f.base(), I, [&](std::uint64_t n) {
    acc += f.eval(n);
    ++count;
  });
  return acc / static_cast<double>(count);
}

}  // namespace qseqlab::testing
