#include "qseqlab/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "qseqlab/common.hpp"

namespace qseqlab {

namespace {

constexpr std::uint64_t kSieveCap = 1ULL << 31;
constexpr std::uint64_t kChunk = 1ULL << 16;

}  // namespace

MobiusTable mobius_table(std::uint64_t limit) {
  if (limit > kSieveCap) throw CapError("mobius_table: limit exceeds 2^31");
  MobiusTable t;
  t.limit = limit;
  t.values.assign(limit, 0);
  if (limit > 1) t.values[1] = 1;

  std::vector<std::uint32_t> primes;
  std::vector<std::uint8_t> composite(limit, 0);
  for (std::uint64_t i = 2; i < limit; ++i) {
    if (!composite[i]) {
      primes.push_back(static_cast<std::uint32_t>(i));
      t.values[i] = -1;
    }
    for (std::uint32_t p : primes) {
      if (i * p >= limit) break;
      composite[i * p] = 1;
      if (i % p == 0) {
        t.values[i * p] = 0;
        break;
      }
      t.values[i * p] = static_cast<std::int8_t>(-t.values[i]);
    }
  }
  return t;
}

std::vector<std::uint32_t> primes_in(std::uint32_t lo, std::uint32_t hi) {
  if (hi > kSieveCap) throw CapError("primes_in: hi exceeds 2^31");
  std::vector<std::uint32_t> out;
  if (hi <= 2 || hi <= lo) return out;
  std::vector<std::uint8_t> composite(hi, 0);
  for (std::uint64_t i = 2; i < hi; ++i) {
    if (composite[i]) continue;
    if (i >= lo) out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j < hi; j += i) composite[j] = 1;
  }
  return out;
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t N, std::uint32_t q) {
  std::vector<std::uint64_t> cps;
  for (std::uint64_t c = 10; c < N; c *= 10) {
    cps.push_back(c);
    if (c > N / 10) break;
  }
  for (std::uint64_t c = q; c < N; c *= q) {
    cps.push_back(c);
    if (c > N / q) break;
  }
  cps.push_back(N);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

CorrelationSeries mobius_correlation(const DigitalSequence& f, std::uint64_t N,
                                     std::vector<std::uint64_t> checkpoints, int threads) {
  if (checkpoints.empty()) checkpoints = default_checkpoints(N, f.base());
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  if (checkpoints.empty() || checkpoints.back() != N)
    throw std::invalid_argument("mobius_correlation: checkpoints must end at N");
  if (!checkpoints.empty() && checkpoints.front() == 0)
    throw std::invalid_argument("mobius_correlation: checkpoints must be positive");

  MobiusTable mu = mobius_table(N);

  // Fixed chunk grid; chunks are summed independently and reduced in
  // ascending order so any thread count reproduces the same floats.
  // Checkpoints are forced onto chunk boundaries by splitting at them.
  std::vector<std::uint64_t> bounds;
  bounds.push_back(0);
  std::size_t ci = 0;
  std::uint64_t at = 0;
  while (at < N) {
    std::uint64_t next = std::min(at + kChunk, N);
    while (ci < checkpoints.size() && checkpoints[ci] <= at) ++ci;
    if (ci < checkpoints.size() && checkpoints[ci] < next) next = checkpoints[ci];
    bounds.push_back(next);
    at = next;
  }

  const std::size_t chunk_count = bounds.size() - 1;
  std::vector<std::complex<double>> chunk_sum(chunk_count);
  auto run = [&](std::size_t c) {
    std::complex<double> s{0.0, 0.0};
    for (std::uint64_t n = bounds[c]; n < bounds[c + 1]; ++n) {
      int m = mu.at(n);
      if (m == 0) continue;
      std::complex<double> v = f.eval(n);
      s += (m > 0) ? v : -v;
    }
    chunk_sum[c] = s;
  };

  const int workers = std::max(1, threads);
  if (workers == 1 || chunk_count < 2) {
    for (std::size_t c = 0; c < chunk_count; ++c) run(c);
  } else {
    std::vector<std::thread> pool;
    std::size_t per = (chunk_count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      std::size_t lo = per * static_cast<std::size_t>(w);
      std::size_t hi = std::min(chunk_count, lo + per);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] { for (std::size_t c = lo; c < hi; ++c) run(c); });
    }
    for (auto& th : pool) th.join();
  }

  CorrelationSeries out;
  out.summand_label = "f(n)*mu(n)";
  out.checkpoints = checkpoints;
  std::complex<double> total{0.0, 0.0};
  ci = 0;
  for (std::size_t c = 0; c < chunk_count; ++c) {
    total += chunk_sum[c];
    while (ci < checkpoints.size() && checkpoints[ci] == bounds[c + 1]) {
      out.partials.push_back(total / static_cast<double>(checkpoints[ci]));
      ++ci;
    }
  }
  return out;
}

std::complex<double> kbsz_correlation(const DigitalSequence& f, std::uint64_t p,
                                      std::uint64_t pp, std::uint64_t N) {
  if (p == pp) throw std::invalid_argument("kbsz_correlation: p and p' must differ");
  if (N == 0) throw std::invalid_argument("kbsz_correlation: empty range");
  const std::uint64_t lim = max_representable(f.base());
  if (N - 1 > lim / std::max(p, pp))
    throw std::overflow_error("kbsz_correlation: p*n exceeds the digit range");

  std::complex<double> sum{0.0, 0.0};
  std::complex<double> chunk{0.0, 0.0};
  std::uint64_t in_chunk = 0;
  for (std::uint64_t n = 0; n < N; ++n) {
    Phase d = f.eval_phase(p * n) - f.eval_phase(pp * n);
    chunk += d.unit();
    if (++in_chunk == 4096) {
      sum += chunk;
      chunk = {0.0, 0.0};
      in_chunk = 0;
    }
  }
  sum += chunk;
  return sum / static_cast<double>(N);
}

KbszScanResult kbsz_scan(const DigitalSequence& f, std::uint32_t prime_lo,
                         std::uint32_t prime_hi, std::uint64_t N) {
  std::vector<std::uint32_t> ps = primes_in(prime_lo, prime_hi);
  if (ps.size() < 2) throw std::invalid_argument("kbsz_scan: need two primes in range");
  KbszScanResult out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = i + 1; j < ps.size(); ++j) {
      KbszPair pair;
      pair.p = ps[i];
      pair.pp = ps[j];
      pair.value = kbsz_correlation(f, ps[i], ps[j], N);
      double a = std::abs(pair.value);
      if (a > out.max_abs) {
        out.max_abs = a;
        out.argmax_p = pair.p;
        out.argmax_pp = pair.pp;
      }
      out.pairs.push_back(pair);
    }
  }
  return out;
}

std::vector<double> ik_series(const DigitalSequence& f, const Phase& gamma, int L) {
  if (f.cls() != SeqClass::Multiplicative)
    throw std::invalid_argument("ik_series: sequence must carry the multiplicative class tag");
  if (L < 0) throw std::invalid_argument("ik_series: negative length");
  const std::uint32_t q = f.base();
  const std::uint64_t lim = max_representable(q);

  std::vector<double> partial(static_cast<std::size_t>(L));
  double running = 0.0;
  std::uint64_t ql = 1;  // 0 marks overflow past the digit range
  for (int l = 0; l < L; ++l) {
    if (ql == 0 || ql > lim / (q - 1)) throw CapError("ik_series: level exceeds the digit range");
    double term = 0.0;
    for (std::uint32_t a = 1; a < q; ++a) {
      std::uint64_t n = static_cast<std::uint64_t>(a) * ql;
      Phase d = f.eval_phase(n) - gamma.scaled(n);
      if (d.is_exact() && d.num() == 0) continue;  // summand exactly 0
      term += 1.0 - std::cos(2.0 * std::numbers::pi * d.to_double());
    }
    running += term;
    partial[static_cast<std::size_t>(l)] = running;
    ql = (ql > lim / q) ? 0 : ql * q;
  }
  return partial;
}

}  // namespace qseqlab
