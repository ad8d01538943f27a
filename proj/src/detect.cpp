#include "qseqlab/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "qseqlab/common.hpp"

namespace qseqlab {

namespace {

using boost::multiprecision::cpp_int;

// Signed distance from x to the nearest integer, in [-1/2, 1/2].
long double signed_residue(long double x) { return x - std::round(x); }

int ceil_log(std::uint32_t q, std::uint64_t x) {
  int e = 0;
  std::uint64_t v = 1;
  while (v < x) {
    v *= q;
    ++e;
  }
  return e;
}

std::uint64_t pow_checked(std::uint32_t q, int e, std::uint64_t cap, const char* what) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (v > cap / q) throw CapError(what);
    v *= q;
  }
  return v;
}

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m) {
  // extended Euclid; gcd(a, m) = 1 assumed
  std::int64_t t = 0, nt = 1;
  std::int64_t r = static_cast<std::int64_t>(m), nr = static_cast<std::int64_t>(a % m);
  while (nr != 0) {
    std::int64_t qq = r / nr;
    std::int64_t tmp = t - qq * nt;
    t = nt;
    nt = tmp;
    tmp = r - qq * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) throw std::logic_error("mod_inverse: arguments not coprime");
  if (t < 0) t += static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(t);
}

std::uint64_t draw_supported(CounterRng& rng, std::uint32_t q,
                             const std::vector<std::uint64_t>& weights) {
  std::uint64_t n = 0;
  for (std::uint64_t w : weights) n += w * rng.next_below(q);
  return n;
}

}  // namespace

ConcentrationResult concentration_center(const std::vector<double>& phases) {
  if (phases.empty()) throw std::invalid_argument("concentration_center: empty input");
  double re = 0.0, im = 0.0;
  for (double x : phases) {
    re += std::cos(2.0 * std::numbers::pi * x);
    im += std::sin(2.0 * std::numbers::pi * x);
  }
  ConcentrationResult out;
  out.mean_abs = std::hypot(re, im) / static_cast<double>(phases.size());
  out.beta = out.mean_abs == 0.0 ? 0.0 : frac_part(std::atan2(im, re) / (2.0 * std::numbers::pi));
  return out;
}

double shadow(const std::vector<double>& alphas, const std::vector<double>& epsilons,
              std::uint32_t q) {
  check_base(q);
  if (alphas.empty()) throw std::invalid_argument("shadow: empty orbit");
  if (epsilons.size() != alphas.size())
    throw std::invalid_argument("shadow: need one epsilon per alpha");
  for (std::size_t i = 0; i + 1 < epsilons.size(); ++i)
    if (epsilons[i + 1] > epsilons[i])
      throw std::invalid_argument("shadow: epsilons must be nonincreasing");

  const std::size_t s = alphas.size() - 1;
  constexpr double kSlack = 1e-9;

  // By construction q^{i+1} beta_i - lift(alpha_{i+1}) sits at signed distance
  // r_i = <<q alpha_i - alpha_{i+1}>> from the nearest integer, so the whole
  // correction chain reduces to these unit-scale residues; no large powers of
  // q are ever formed.
  std::vector<long double> r(s);
  for (std::size_t i = 0; i < s; ++i) {
    r[i] = signed_residue(static_cast<long double>(q) * alphas[i] - alphas[i + 1]);
    if (std::fabs(static_cast<double>(r[i])) > epsilons[i] + kSlack) {
      std::ostringstream msg;
      msg << "shadow: orbit hypothesis fails at index " << i << " (residue "
          << static_cast<double>(std::fabs(static_cast<double>(r[i]))) << " > " << epsilons[i]
          << ")";
      throw HypothesisError(msg.str(), i);
    }
  }

  // e_i = q^i beta - alpha_i (mod 1): suffix recursion e_i = (r_i + e_{i+1})/q.
  std::vector<long double> e(s + 1, 0.0L);
  for (std::size_t i = s; i-- > 0;) e[i] = (r[i] + e[i + 1]) / q;

  long double a0 = alphas[0] - std::floor(alphas[0]);
  if (a0 >= 0.5L) a0 -= 1.0L;
  const long double beta = a0 - e[0];

  // Guarantee check before returning; also directly for small powers where
  // q^i beta is still exact enough in long double.
  long double qi = 1.0L;
  for (std::size_t i = 0; i <= s; ++i) {
    long double err = std::fabs(e[i]);
    err = std::min(err, 1.0L - err);
    if (static_cast<double>(err) > epsilons[i] + kSlack)
      throw std::logic_error("shadow: guarantee check failed");
    if (qi <= 1024.0L * 1024.0L * 1024.0L) {
      long double direct = signed_residue(qi * beta - alphas[i]);
      if (std::fabs(static_cast<double>(direct)) > epsilons[i] + kSlack)
        throw std::logic_error("shadow: guarantee check failed");
      qi *= q;
    }
  }
  return static_cast<double>(beta);
}

SnapResult rational_snap(double x, std::uint64_t p, std::uint64_t pp, std::uint32_t q,
                         int max_power) {
  check_base(q);
  if (p == pp) throw std::invalid_argument("rational_snap: p and p' must differ");
  if (max_power < 1 || max_power > 6)
    throw std::invalid_argument("rational_snap: power must lie in [1,6]");
  const std::uint64_t D = p > pp ? p - pp : pp - p;

  std::uint64_t Dt = 1;
  for (int i = 0; i < max_power; ++i) {
    if (Dt > (1ULL << 40) / D) throw CapError("rational_snap: denominator family too large");
    Dt *= D;
  }
  if (D > 1 && Dt / D > (1ULL << 20))
    throw CapError("rational_snap: denominator family too large");

  x = frac_part(x);
  std::vector<std::uint64_t> candidates;
  for (std::uint64_t b = 1; b * b <= Dt; ++b) {
    if (Dt % b == 0) {
      candidates.push_back(b);
      candidates.push_back(Dt / b);
    }
  }
  for (std::uint64_t b = D; b <= Dt; b += D) candidates.push_back(b);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  bool found = false;
  SnapResult best;
  std::uint64_t best_b = 1, best_a = 0;
  for (std::uint64_t b : candidates) {
    if (std::gcd(b, static_cast<std::uint64_t>(q)) != 1) continue;
    std::uint64_t a = static_cast<std::uint64_t>(
        std::llround(static_cast<long double>(x) * static_cast<long double>(b)));
    double dist = std::fabs(static_cast<double>(
        static_cast<long double>(x) - static_cast<long double>(a) / static_cast<long double>(b)));
    std::uint64_t am = a % b;  // value mod 1
    if (!found || dist < best.distance ||
        (dist == best.distance && (b < best_b || (b == best_b && am < best_a)))) {
      found = true;
      best.distance = dist;
      best_b = b;
      best_a = am;
      bool div = (Dt % b == 0), mul = (b % D == 0);
      best.family = div && mul ? "both" : (div ? "divisor" : "multiple");
    }
  }
  if (!found) throw std::logic_error("rational_snap: no coprime denominator (q shares every factor)");

  std::uint64_t g = std::gcd(best_a, best_b);
  if (best_a == 0) g = best_b;
  best.num = static_cast<std::int64_t>(best_a / g);
  best.den = static_cast<std::int64_t>(best_b / g);
  return best;
}

ExtractionResult extract_linear_phase(const DigitalSequence& f, std::uint64_t p,
                                      std::uint64_t pp, Interval I,
                                      const ExtractOptions& opts) {
  const std::uint32_t q = f.base();
  if (p == pp) throw std::invalid_argument("extract_linear_phase: p and p' must differ");
  // Only the snapped denominator must be coprime to q (rational_snap filters
  // for that); p and p' themselves carry no base condition.
  if (p == 0 || pp == 0) throw std::invalid_argument("extract_linear_phase: p, p' positive");
  const int r = f.gap();
  const std::uint64_t maxp = std::max(p, pp);
  const std::uint64_t D = p > pp ? p - pp : pp - p;

  ExtractionResult res;
  res.k0 = opts.k0 >= 0 ? opts.k0 : 3 * r + ceil_log(q, maxp) + 4;
  res.epsilon0 = 1.0 / (8.0 * static_cast<double>(D) * static_cast<double>(D));
  if (I.length() <= 2 * res.k0 + 1)
    throw std::invalid_argument("extract_linear_phase: interval too small for the margin");
  res.window = Interval{I.lo + res.k0, I.hi - res.k0};

  // p * n must stay in the digit range for every supp(n) in I.
  const std::uint64_t lim = max_representable(q);
  const IndexSet iset = I.to_index_set();
  const std::vector<std::uint64_t> weights = position_weights(q, iset);
  {
    std::uint64_t maxn = 0;
    for (std::uint64_t w : weights) maxn += w * (q - 1);
    if (maxn > lim / maxp) throw CapError("extract_linear_phase: p*n leaves the digit range");
  }

  // Spread of psi(n) = phi(pn) - phi(p'n) over supp(n) in I.
  std::vector<double> psis;
  std::uint64_t total = 1;
  bool fits = true;
  for (std::size_t i = 0; i < iset.size(); ++i) {
    if (total > opts.enumeration_cap / q) {
      fits = false;
      break;
    }
    total *= q;
  }
  auto psi_at = [&](std::uint64_t n) {
    return (f.eval_phase(p * n) - f.eval_phase(pp * n)).to_double();
  };
  if (fits) {
    enumerate_support(q, iset, [&](std::uint64_t n) { psis.push_back(psi_at(n)); });
  } else {
    CounterRng rng(opts.seed);
    for (std::uint64_t i = 0; i < opts.samples; ++i)
      psis.push_back(psi_at(draw_supported(rng, q, weights)));
  }
  ConcentrationResult center = concentration_center(psis);
  double spread = 0.0;
  for (double x : psis) spread = std::max(spread, circ_dist(x - center.beta));
  res.psi_spread = spread;
  if (spread > res.epsilon0) {
    res.inconclusive = true;
    res.reason = "psi spread above the uniqueness threshold";
    return res;
  }

  // phi(q^l) along J, shadowed into one orbit value.
  std::vector<double> alphas;
  for (int l = res.window.lo; l < res.window.hi; ++l)
    alphas.push_back(f.eval_phase(pow_checked(q, l, lim, "extract_linear_phase: window power"))
                         .to_double());
  double eps_orbit = 0.0;
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i)
    eps_orbit = std::max(eps_orbit, static_cast<double>(std::fabs(static_cast<double>(
                                        signed_residue(static_cast<long double>(q) * alphas[i] -
                                                       alphas[i + 1])))));
  std::vector<double> eps(alphas.size(), eps_orbit + 1e-15);
  res.beta = shadow(alphas, eps, q);

  SnapResult snap = rational_snap(frac_part(res.beta), p, pp, q, opts.snap_max_power);
  res.snap_distance = snap.distance;
  res.snap_family = snap.family;
  if (snap.distance > res.epsilon0) {
    res.inconclusive = true;
    res.reason = "no admissible rational near the orbit value";
    return res;
  }

  // beta tracks phi(q^{min J}) ~ alpha q^{min J}; divide the power back out
  // mod the denominator (coprime to q, so the map a -> a q^{min J} is a
  // bijection mod b).
  const std::uint64_t b = static_cast<std::uint64_t>(snap.den);
  std::uint64_t a = static_cast<std::uint64_t>(snap.num) % b;
  std::uint64_t qpow_mod = 1;
  for (int l = 0; l < res.window.lo; ++l) qpow_mod = (qpow_mod * q) % b;
  std::uint64_t alpha_num = b == 1 ? 0 : (a * mod_inverse(qpow_mod, b)) % b;
  std::uint64_t g = alpha_num == 0 ? b : std::gcd(alpha_num, b);
  res.alpha_num = static_cast<std::int64_t>(alpha_num / g);
  res.alpha_den = static_cast<std::int64_t>(b / g);

  // Residual of phi against the recovered linear phase on the inner window.
  const Phase alpha = Phase::rational(res.alpha_num, res.alpha_den);
  const IndexSet jset = res.window.to_index_set();
  const std::vector<std::uint64_t> jweights = position_weights(q, jset);
  double residual = 0.0;
  auto probe = [&](std::uint64_t n) {
    if (n == 0) return;
    double err = Phase::dist(f.eval_phase(n), alpha.scaled(n));
    residual = std::max(residual, err / static_cast<double>(sum_digits(n, q)));
  };
  std::uint64_t jtotal = 1;
  bool jfits = true;
  for (std::size_t i = 0; i < jset.size(); ++i) {
    if (jtotal > opts.enumeration_cap / q) {
      jfits = false;
      break;
    }
    jtotal *= q;
  }
  if (jfits) {
    enumerate_support(q, jset, probe);
  } else {
    CounterRng rng(opts.seed + 1);
    for (std::uint64_t i = 0; i < opts.samples; ++i) probe(draw_supported(rng, q, jweights));
  }
  res.residual = residual;
  return res;
}

int min_window_for_zero_run(std::uint32_t q, int r, double eps) {
  check_base(q);
  if (r < 1) throw std::invalid_argument("min_window_for_zero_run: run length must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("min_window_for_zero_run: eps must be positive");
  if (eps >= 1.0) return 0;

  // eps exactly as a binary rational num / 2^shift.
  int exp2 = 0;
  double mant = std::frexp(eps, &exp2);
  cpp_int num = static_cast<std::uint64_t>(std::ldexp(mant, 62));
  const int shift = 62 - exp2;

  // A(m): length-m words with no run of r zeros. A(m) = q^m for m < r,
  // then A(m) = sum_{j<r} (q-1) A(m-1-j), conditioning on the first nonzero.
  std::vector<cpp_int> a;
  a.push_back(1);
  cpp_int qm = 1;
  for (int m = 1; m <= 1 << 20; ++m) {
    qm *= q;
    cpp_int am;
    if (m < r) {
      am = qm;
    } else {
      am = 0;
      for (int j = 0; j < r && j < m; ++j) am += (q - 1) * a[static_cast<std::size_t>(m - 1 - j)];
    }
    a.push_back(am);
    // A(m)/q^m <= eps  <=>  A(m) * 2^shift <= num * q^m
    if ((am << shift) <= num * qm) return m;
  }
  throw CapError("min_window_for_zero_run: no window below the search cap");
}

std::optional<PeriodicApprox> periodic_approx(const DigitalSequence& f, double eps, int L,
                                              const ApproxOptions& opts) {
  const std::uint32_t q = f.base();
  if (!(eps > 0.0) || eps >= 1.0)
    throw std::invalid_argument("periodic_approx: eps must lie in (0,1)");
  if (L < 1) throw std::invalid_argument("periodic_approx: L must be positive");
  const std::uint64_t lim = max_representable(q);
  pow_checked(q, L, lim, "periodic_approx: L leaves the digit range");

  const int r = f.gap();
  const int w = opts.probe_width > 0 ? opts.probe_width : 2 * r + 2;
  const int minwin = r >= 1 ? min_window_for_zero_run(q, r, eps) : 0;
  // The default horizon leaves the split window (and at least one tail
  // position) inside [0, L); a K beyond it would make the approximant a
  // verbatim copy of the tested range.
  const int horizon = opts.horizon >= 0 ? opts.horizon : L - std::max(minwin, 1);
  if (horizon < 0)
    throw std::invalid_argument("periodic_approx: L is below the zero-run window for this eps");
  const double eps3 = eps * eps * eps;

  // Calm tail: every interval of width <= w anchored at or after K has
  // lambda <= eps^3. Probe all anchors once; K is one past the last bad one.
  int last_bad = -1;
  for (int anchor = 0; anchor < L; ++anchor) {
    for (int wd = 1; wd <= w && anchor + wd <= L; ++wd) {
      LambdaValue v = lambda_exact(f, Interval{anchor, anchor + wd}, opts.mean);
      if (v.infinite || v.value > eps3) {
        last_bad = anchor;
        break;
      }
    }
  }
  const int K = last_bad + 1;
  if (K > horizon) return std::nullopt;

  const int M = r >= 1 ? K + minwin : K;
  if (M > L) throw std::invalid_argument("periodic_approx: L below the period exponent");

  PeriodicApprox ap;
  ap.K = K;
  ap.M = M;
  ap.epsilon = eps;
  ap.tested_range = pow_checked(q, L, lim, "periodic_approx: L leaves the digit range");

  // Concentration center of the tail phases on [cut, L) per split point.
  auto tail_center = [&](int cut) -> double {
    if (cut >= L) return 0.0;
    IndexSet tail = IndexSet::interval(cut, L);
    std::uint64_t count = 1;
    bool fits = true;
    for (std::size_t i = 0; i < tail.size(); ++i) {
      if (count > opts.mean.enumeration_cap / q) {
        fits = false;
        break;
      }
      count *= q;
    }
    std::vector<double> phases;
    if (fits) {
      enumerate_support(q, tail, [&](std::uint64_t n) {
        phases.push_back(f.eval_phase(n).to_double());
      });
    } else {
      std::vector<std::uint64_t> weights = position_weights(q, tail);
      CounterRng rng(opts.seed + static_cast<std::uint64_t>(cut) + 1);
      for (std::uint64_t i = 0; i < opts.center_samples; ++i)
        phases.push_back(f.eval_phase(draw_supported(rng, q, weights)).to_double());
    }
    return concentration_center(phases).beta;
  };

  std::vector<double> centers(static_cast<std::size_t>(M - K) + 1, 0.0);
  if (r >= 1) {
    for (int l = K; l <= M - r; ++l) centers[static_cast<std::size_t>(l - K)] = tail_center(l + r);
  } else {
    centers[0] = tail_center(K);
  }

  // Splits (n)_q at the first run of r zeros inside [K, M): the head keeps
  // its exact phase, the tail collapses to its concentration center.
  const std::uint64_t period = pow_checked(q, M, std::min(lim, std::uint64_t{1} << 20),
                                           "periodic_approx: period table exceeds cap");
  auto g_of = [&](std::uint64_t m) -> double {
    int l = -1;
    if (r == 0) {
      l = K;
    } else {
      for (int cand = K; cand <= M - r; ++cand) {
        bool zeros = true;
        for (int t = 0; t < r; ++t)
          if (digit_at(m, q, cand + t) != 0) {
            zeros = false;
            break;
          }
        if (zeros) {
          l = cand;
          break;
        }
      }
    }
    if (l < 0) return 0.0;
    std::uint64_t head = m % pow_checked(q, l, lim, "periodic_approx: split power");
    return frac_part(f.eval_phase(head).to_double() + centers[static_cast<std::size_t>(l - K)]);
  };

  ap.table.resize(period);
  for (std::uint64_t m = 0; m < period; ++m) ap.table[m] = g_of(m);

  // Error fraction over n < q^L.
  std::uint64_t exceed = 0, tested = 0;
  auto check = [&](std::uint64_t n) {
    double err = circ_dist(f.eval_phase(n).to_double() - ap.table[n % period]);
    if (err > eps) ++exceed;
    ++tested;
  };
  if (ap.tested_range <= opts.test_cap) {
    for (std::uint64_t n = 0; n < ap.tested_range; ++n) check(n);
  } else {
    IndexSet all = IndexSet::interval(0, L);
    std::vector<std::uint64_t> weights = position_weights(q, all);
    CounterRng rng(opts.seed);
    for (std::uint64_t i = 0; i < opts.test_samples; ++i) check(draw_supported(rng, q, weights));
  }
  ap.fraction_exceeding = static_cast<double>(exceed) / static_cast<double>(tested);
  return ap;
}

std::uint64_t factor_cover_count(const DigitalSequence& f, int d, double eps,
                                 const SampleSpec& spec) {
  if (d < 1) throw std::invalid_argument("factor_cover_count: factor length must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("factor_cover_count: eps must be positive");
  if (spec.count == 0) throw std::invalid_argument("factor_cover_count: no samples");
  if (static_cast<std::uint64_t>(d) > (1ULL << 22) / spec.count)
    throw CapError("factor_cover_count: budget exceeded");
  const std::uint64_t lim = max_representable(f.base());
  if (spec.limit == 0 || spec.limit - 1 > lim - static_cast<std::uint64_t>(d))
    throw std::invalid_argument("factor_cover_count: positions leave the digit range");

  CounterRng rng(spec.seed);
  std::vector<double> factors;
  factors.reserve(spec.count * static_cast<std::uint64_t>(d));
  for (std::uint64_t j = 0; j < spec.count; ++j) {
    std::uint64_t n = spec.stride > 0 ? j * spec.stride : rng.next_below(spec.limit);
    if (spec.stride > 0 && n >= spec.limit)
      throw std::invalid_argument("factor_cover_count: stride leaves the sample range");
    for (int t = 0; t < d; ++t)
      factors.push_back(f.eval_phase(n + static_cast<std::uint64_t>(t)).to_double());
  }

  std::vector<std::size_t> centers;
  for (std::uint64_t j = 0; j < spec.count; ++j) {
    const double* v = &factors[j * static_cast<std::uint64_t>(d)];
    bool covered = false;
    for (std::size_t c : centers) {
      const double* u = &factors[c * static_cast<std::uint64_t>(d)];
      bool within = true;
      for (int t = 0; t < d; ++t) {
        if (circ_dist(v[t] - u[t]) > eps) {
          within = false;
          break;
        }
      }
      if (within) {
        covered = true;
        break;
      }
    }
    if (!covered) centers.push_back(j);
  }
  return centers.size();
}

LambdaProfile lambda_sum_series(const DigitalSequence& f, int L, const SeriesOptions& opts) {
  const int r = f.gap();
  const int w = opts.block_width > 0 ? opts.block_width : 2 * r + 1;
  const int s = opts.separation >= 0 ? opts.separation : 2 * r + 1;
  if (w < 1) throw std::invalid_argument("lambda_sum_series: block width must be positive");

  std::vector<Interval> blocks;
  for (int i = 0;; ++i) {
    int lo = i * (w + s);
    int hi = lo + w;
    if (hi > L) break;
    blocks.push_back({lo, hi});
  }
  ProfileOptions po;
  po.mean = opts.mean;
  po.mc_samples = opts.mc_samples;
  po.seed = opts.seed;
  return lambda_profile(f, blocks, po);
}

DichotomyReport classify(const DigitalSequence& f, std::uint64_t p, std::uint64_t pp,
                         const ClassifyParams& params) {
  const std::uint32_t q = f.base();
  if (p == pp || p == 0 || pp == 0)
    throw std::invalid_argument("classify: p and p' must be distinct and positive");
  const std::uint64_t maxp = std::max(p, pp);
  const std::uint64_t lim = max_representable(q);

  DichotomyReport rep;
  std::ostringstream diag;
  diag << "heuristic verdict; plateau_theta=" << params.plateau_theta
       << " growth_fraction=" << params.growth_fraction
       << " kbsz_threshold=" << params.kbsz_threshold;

  DigitalSequence g = product(subsequence(f, p, 0), conjugate(subsequence(f, pp, 0)));

  int L = params.L;
  if (L == 0) {
    std::uint64_t v = 1;
    while (L < 62 && v <= (lim / maxp) / q) {
      v *= q;
      ++L;
    }
  }

  SeriesOptions so;
  so.seed = params.seed;
  rep.series = lambda_sum_series(g, L, so);
  const std::size_t B = rep.series.rows.size();
  diag << "; blocks=" << B << " L=" << L;
  if (B < 2) {
    rep.verdict = "inconclusive";
    diag << "; series too short to read a trend";
    rep.diagnostics = diag.str();
    return rep;
  }
  const double pb = rep.series.rows.back().partial_bar_sum;
  const double ph = rep.series.rows[B / 2 - 1].partial_bar_sum;
  rep.last_half_increase = pb - ph;
  diag << "; last_half_increase=" << rep.last_half_increase;

  if (rep.last_half_increase < params.plateau_theta) {
    ExtractOptions eo;
    eo.seed = params.seed;
    ExtractionResult ext = extract_linear_phase(f, p, pp, params.extract_interval, eo);
    if (ext.inconclusive) {
      rep.verdict = "inconclusive";
      diag << "; plateau but extraction failed: " << ext.reason;
      rep.diagnostics = diag.str();
      return rep;
    }
    rep.has_alpha = true;
    rep.alpha_num = ext.alpha_num;
    rep.alpha_den = ext.alpha_den;
    diag << "; alpha=" << ext.alpha_num << "/" << ext.alpha_den
         << " extraction residual=" << ext.residual;

    DigitalSequence h =
        product(f, conjugate(builder_linear(q, Phase::rational(ext.alpha_num, ext.alpha_den))));
    rep.quotient_series = lambda_sum_series(h, std::min(L, 62), so);
    ApproxOptions ao;
    ao.seed = params.seed;
    rep.approx = periodic_approx(h, params.approx_eps, params.approx_L, ao);
    if (rep.approx.has_value()) {
      rep.verdict = "almost-periodic-like";
      diag << "; quotient approximant M=" << rep.approx->M
           << " fraction_exceeding=" << rep.approx->fraction_exceeding;
    } else {
      rep.verdict = "inconclusive";
      diag << "; quotient approximant not found below the horizon";
    }
    rep.diagnostics = diag.str();
    return rep;
  }

  if (rep.last_half_increase >= params.growth_fraction * static_cast<double>(B)) {
    KbszScanResult scan = kbsz_scan(f, params.scan_prime_lo, params.scan_prime_hi, params.scan_N);
    rep.kbsz_max = scan.max_abs;
    diag << "; kbsz scan max=" << scan.max_abs << " at (" << scan.argmax_p << ","
         << scan.argmax_pp << ") over primes [" << params.scan_prime_lo << ","
         << params.scan_prime_hi << ") N=" << params.scan_N;
    rep.verdict = scan.max_abs < params.kbsz_threshold ? "kbsz-like" : "inconclusive";
    rep.diagnostics = diag.str();
    return rep;
  }

  rep.verdict = "inconclusive";
  diag << "; series neither plateaus nor grows linearly";
  rep.diagnostics = diag.str();
  return rep;
}

}  // namespace qseqlab
