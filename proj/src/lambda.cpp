#include "qseqlab/lambda.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qseqlab {

namespace {

constexpr double kZeroMeanThreshold = 1e-12;

std::uint64_t checked_pow(std::uint64_t q, std::size_t e, std::uint64_t cap, const char* what) {
  std::uint64_t v = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (v > cap / q) throw CapError(what);
    v *= q;
  }
  return v;
}

// Nonnegative integer combination of the D-th roots of unity vanishes iff it
// peels apart into rotated complete p-cycles over the primes p dividing D.
// Peeling any full cycle leaves the complex sum unchanged, and a vanishing
// nonnegative combination always contains a full cycle, so greedy peeling
// decides exactly.
bool histogram_vanishes(std::vector<std::uint64_t> hist, std::uint64_t D) {
  std::vector<std::uint64_t> primes;
  std::uint64_t d = D;
  for (std::uint64_t p = 2; p * p <= d; ++p) {
    if (d % p == 0) {
      primes.push_back(p);
      while (d % p == 0) d /= p;
    }
  }
  if (d > 1) primes.push_back(d);

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint64_t p : primes) {
      const std::uint64_t step = D / p;
      for (std::uint64_t j = 0; j < step; ++j) {
        std::uint64_t m = hist[j];
        for (std::uint64_t t = 1; t < p && m > 0; ++t) m = std::min(m, hist[j + t * step]);
        if (m > 0) {
          for (std::uint64_t t = 0; t < p; ++t) hist[j + t * step] -= m;
          changed = true;
        }
      }
    }
  }
  return std::all_of(hist.begin(), hist.end(), [](std::uint64_t h) { return h == 0; });
}

}  // namespace

double lambda_bar(const LambdaValue& v) { return v.bar(); }

MeanResult cancellation_mean(const DigitalSequence& f, const IndexSet& I,
                             const MeanOptions& opts) {
  const std::uint32_t q = f.base();
  const std::uint64_t total =
      checked_pow(q, I.size(), opts.enumeration_cap, "interval too large for exact enumeration");

  MeanResult out;
  out.count = total;

  // First try the exact histogram path.
  std::vector<std::uint64_t> hist;
  std::uint64_t lcm = 1;
  bool exact = true;
  std::vector<Phase> phases;
  phases.reserve(total);
  enumerate_support(q, I, [&](std::uint64_t n) {
    if (!exact) return;
    Phase p = f.eval_phase(n);
    if (!p.is_exact()) { exact = false; return; }
    std::uint64_t den = static_cast<std::uint64_t>(p.den());
    std::uint64_t g = std::gcd(lcm, den);
    if (lcm / g > static_cast<std::uint64_t>(opts.exact_den_cap) / den) { exact = false; return; }
    lcm = lcm / g * den;
    phases.push_back(p);
  });

  if (exact) {
    hist.assign(lcm, 0);
    for (const Phase& p : phases)
      ++hist[static_cast<std::uint64_t>(p.num()) * (lcm / static_cast<std::uint64_t>(p.den()))];
    std::complex<double> sum{0.0, 0.0};
    for (std::uint64_t j = 0; j < lcm; ++j) {
      if (hist[j] == 0) continue;
      double x = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(lcm);
      sum += static_cast<double>(hist[j]) * std::complex<double>(std::cos(x), std::sin(x));
    }
    out.mean = sum / static_cast<double>(total);
    out.exact_path = true;
    out.exact_zero = histogram_vanishes(hist, lcm);
    return out;
  }

  // Float path: chunked deterministic summation.
  std::complex<double> sum{0.0, 0.0};
  std::complex<double> chunk{0.0, 0.0};
  std::uint64_t in_chunk = 0;
  enumerate_support(q, I, [&](std::uint64_t n) {
    chunk += f.eval(n);
    if (++in_chunk == 4096) {
      sum += chunk;
      chunk = {0.0, 0.0};
      in_chunk = 0;
    }
  });
  sum += chunk;
  out.mean = sum / static_cast<double>(total);
  out.exact_path = false;
  out.exact_zero = false;
  return out;
}

LambdaValue lambda_from_mean(const MeanResult& m) {
  double a = std::abs(m.mean);
  if (m.exact_zero) return LambdaValue::inf();
  if (!m.exact_path && a < kZeroMeanThreshold) return LambdaValue::inf();
  if (m.exact_path && a < kZeroMeanThreshold) {
    // Exact path says the mean does not vanish but it is numerically tiny;
    // report the (large, finite) exponent.
    return LambdaValue::finite(-std::log(std::max(a, 1e-300)));
  }
  if (a >= 1.0) return LambdaValue::finite(0.0);
  return LambdaValue::finite(-std::log(a));
}

LambdaValue lambda_exact(const DigitalSequence& f, const IndexSet& I, const MeanOptions& opts) {
  return lambda_from_mean(cancellation_mean(f, I, opts));
}

LambdaValue lambda_exact(const DigitalSequence& f, const Interval& I, const MeanOptions& opts) {
  return lambda_exact(f, I.to_index_set(), opts);
}

LambdaEstimate lambda_mc(const DigitalSequence& f, const IndexSet& I, std::uint64_t samples,
                         std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("lambda_mc: need at least one sample");
  const std::uint32_t q = f.base();
  const std::vector<std::uint64_t> weight = position_weights(q, I);
  CounterRng rng(seed);
  std::complex<double> sum{0.0, 0.0};
  double sum_re2 = 0.0, sum_im2 = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::uint64_t n = 0;
    for (std::size_t j = 0; j < weight.size(); ++j) n += weight[j] * rng.next_below(q);
    std::complex<double> v = f.eval(n);
    sum += v;
    sum_re2 += v.real() * v.real();
    sum_im2 += v.imag() * v.imag();
  }
  const double ns = static_cast<double>(samples);
  std::complex<double> mean = sum / ns;
  double var_re = std::max(0.0, sum_re2 / ns - mean.real() * mean.real());
  double var_im = std::max(0.0, sum_im2 / ns - mean.imag() * mean.imag());
  double se_abs = std::sqrt((var_re + var_im) / ns);
  double a = std::abs(mean);

  LambdaEstimate est;
  est.mean_abs = a;
  if (a < kZeroMeanThreshold) {
    est.value = LambdaValue::inf();
    est.ci_halfwidth = std::numeric_limits<double>::infinity();
    return est;
  }
  est.value = LambdaValue::finite(a >= 1.0 ? 0.0 : -std::log(a));
  est.ci_halfwidth = se_abs / a;  // delta method on -log|mean|
  return est;
}

AdditivityResult additivity_check(const DigitalSequence& f, const std::vector<IndexSet>& sets,
                                  const MeanOptions& opts) {
  if (sets.empty()) throw std::invalid_argument("additivity_check: no sets");
  const int r = f.gap();
  // Pairwise gaps must exceed the gap of f.
  std::vector<std::pair<int, std::size_t>> tagged;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (int p : sets[i].positions()) tagged.emplace_back(p, i);
  std::sort(tagged.begin(), tagged.end());
  for (std::size_t t = 1; t < tagged.size(); ++t) {
    if (tagged[t].second != tagged[t - 1].second && tagged[t].first - tagged[t - 1].first <= r)
      throw std::invalid_argument("additivity_check: sets are not separated by gaps > r");
    if (tagged[t].first == tagged[t - 1].first)
      throw std::invalid_argument("additivity_check: sets overlap");
  }

  IndexSet whole;
  for (const auto& s : sets) whole = whole.unite(s);

  AdditivityResult out;
  out.whole = lambda_exact(f, whole, opts);
  bool any_inf = false;
  double sum = 0.0;
  for (const auto& s : sets) {
    LambdaValue v = lambda_exact(f, s, opts);
    if (v.infinite) any_inf = true;
    else sum += v.value;
  }
  out.part_sum = any_inf ? LambdaValue::inf() : LambdaValue::finite(sum);
  out.infinity_consistent = (out.whole.infinite == any_inf);
  if (!out.infinity_consistent) {
    out.residual = std::numeric_limits<double>::infinity();
  } else if (out.whole.infinite) {
    out.residual = 0.0;
  } else {
    out.residual = std::abs(out.whole.value - sum);
  }
  return out;
}

double quadratic_form_of_phases(std::vector<double> phases) {
  const std::size_t n = phases.size();
  if (n == 0) throw std::invalid_argument("quadratic_form: no phases");
  for (double& x : phases) x = frac_part(x);

  // Breakpoints: beta = x_j + 1/2, where the nearest representative of x_j
  // switches. Between breakpoints the objective is a parabola in beta.
  std::vector<double> brk(n);
  for (std::size_t j = 0; j < n; ++j) brk[j] = frac_part(phases[j] + 0.5);
  std::sort(brk.begin(), brk.end());

  const double b0 = brk[0];
  // Representatives y_j = x_j + k_j nearest to the start of the first arc.
  // S1 = sum y_j, S2 = sum y_j^2, updated as arcs advance.
  double S1 = 0.0, S2 = 0.0;
  std::vector<double> y(n);
  {
    // Order phases by their breakpoint so crossings line up with brk[].
    std::vector<double> xs = phases;
    std::sort(xs.begin(), xs.end(),
              [](double a, double b) { return frac_part(a + 0.5) < frac_part(b + 0.5); });
    phases.swap(xs);
  }
  for (std::size_t j = 0; j < n; ++j) {
    double k = std::round(b0 + 1e-15 - phases[j]);
    y[j] = phases[j] + k;
    S1 += y[j];
    S2 += y[j] * y[j];
  }

  double best = std::numeric_limits<double>::infinity();
  const double N = static_cast<double>(n);
  std::size_t t = 0;
  double lo = b0;
  while (t < n) {
    // Arc [lo, hi] with the current assignment.
    std::size_t t2 = t;
    while (t2 < n && brk[t2] <= lo + 1e-18) ++t2;  // consume breakpoints at lo
    double hi = t2 < n ? brk[t2] : b0 + 1.0;
    double center = std::clamp(S1 / N, lo, hi);
    double cost = (S2 - 2.0 * center * S1 + N * center * center) / N;
    best = std::min(best, cost);
    // Cross the breakpoints at hi: those phases pick the next representative.
    while (t2 < n && brk[t2] <= hi + 1e-18) {
      S2 += 2.0 * y[t2] + 1.0;
      S1 += 1.0;
      y[t2] += 1.0;
      ++t2;
    }
    lo = hi;
    t = t2;
  }
  // Closing arc back to b0 + 1.
  double center = std::clamp(S1 / N, lo, b0 + 1.0);
  double cost = (S2 - 2.0 * center * S1 + N * center * center) / N;
  best = std::min(best, cost);
  return std::max(0.0, best);
}

double quadratic_form(const DigitalSequence& f, const IndexSet& I, const MeanOptions& opts) {
  const std::uint32_t q = f.base();
  checked_pow(q, I.size(), opts.enumeration_cap, "interval too large for exact enumeration");
  std::vector<double> xs;
  enumerate_support(q, I, [&](std::uint64_t n) { xs.push_back(f.eval_phase(n).to_double()); });
  return quadratic_form_of_phases(std::move(xs));
}

GlobalLocalResult global_local_check(const DigitalSequence& f, const Interval& I,
                                     const std::vector<Interval>& subs,
                                     const GlobalLocalOptions& opts) {
  if (subs.empty()) throw std::invalid_argument("global_local_check: no subintervals");
  const int r = f.gap();
  std::vector<Interval> sorted = subs;
  std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const Interval& s : sorted) {
    if (s.length() <= 0) throw std::invalid_argument("global_local_check: empty subinterval");
  }
  if (sorted.front().lo - I.lo < r || I.hi - sorted.back().hi < r)
    throw std::invalid_argument("global_local_check: margin to the ends of I must be >= gap");
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].lo - sorted[i - 1].hi <= 2 * r)
      throw std::invalid_argument("global_local_check: subintervals need gaps > 2*gap");
  }
  if (sorted.front().lo < I.lo || sorted.back().hi > I.hi)
    throw std::invalid_argument("global_local_check: subinterval outside I");

  GlobalLocalResult out;
  // Whole-interval lambda: exact when it fits, Monte Carlo otherwise.
  std::uint64_t total = 1;
  bool fits = true;
  for (int i = 0; i < I.length(); ++i) {
    if (total > opts.mean.enumeration_cap / f.base()) { fits = false; break; }
    total *= f.base();
  }
  if (fits) {
    out.whole = lambda_exact(f, I, opts.mean);
  } else {
    out.whole = lambda_mc(f, I.to_index_set(), opts.mc_samples, opts.seed).value;
  }

  for (const Interval& s : sorted) {
    LambdaValue v = lambda_exact(f, s, opts.mean);
    out.local_bars.push_back(v.bar());
    out.local_bar_sum += v.bar();
  }
  double rho_inv = 1.0;
  for (int i = 0; i < 2 * r; ++i) rho_inv *= f.base();
  out.required_lower_bound = out.local_bar_sum / (10.0 * rho_inv);
  out.pass = out.whole.infinite ||
             out.whole.value + 1e-9 >= out.required_lower_bound * (1.0 - 1e-9);
  return out;
}

LambdaProfile lambda_profile(const DigitalSequence& f, const std::vector<Interval>& intervals,
                             const ProfileOptions& opts) {
  LambdaProfile prof;
  double running = 0.0;
  for (const Interval& iv : intervals) {
    if (iv.length() < 0) throw std::invalid_argument("lambda_profile: bad interval");
    LambdaProfileRow row;
    row.interval = iv;
    std::uint64_t total = 1;
    bool fits = true;
    for (int i = 0; i < iv.length(); ++i) {
      if (total > opts.mean.enumeration_cap / f.base()) { fits = false; break; }
      total *= f.base();
    }
    if (fits) {
      row.lambda = lambda_exact(f, iv, opts.mean);
      row.method = LambdaMethod::Exact;
      row.ci_halfwidth = 0.0;
    } else {
      LambdaEstimate est = lambda_mc(f, iv.to_index_set(), opts.mc_samples, opts.seed);
      row.lambda = est.value;
      row.method = LambdaMethod::MonteCarlo;
      row.ci_halfwidth = est.ci_halfwidth;
    }
    row.bar = row.lambda.bar();
    running += row.bar;
    row.partial_bar_sum = running;
    prof.rows.push_back(row);
  }
  return prof;
}

}  // namespace qseqlab
