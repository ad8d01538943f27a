#include "qseqlab/sequence.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qseqlab {

namespace {

constexpr std::uint64_t kEvalLimit = (1ULL << 63) - 1;
constexpr std::uint64_t kWindowStatesCap = 1ULL << 20;

// q^e, saturating at 2^63 (enough for range comparisons).
std::uint64_t pow_sat(std::uint32_t q, int e) {
  std::uint64_t v = 1;
  const std::uint64_t cap = 1ULL << 63;
  for (int i = 0; i < e; ++i) {
    if (v >= cap / q) return cap;
    v *= q;
  }
  return v;
}

int rank(SeqClass c) {
  switch (c) {
    case SeqClass::Multiplicative: return 0;
    case SeqClass::SemiMultiplicative: return 1;
    case SeqClass::QuasiMultiplicative: return 2;
  }
  return 2;
}

SeqClass from_rank(int r) {
  return r == 0 ? SeqClass::Multiplicative
                : r == 1 ? SeqClass::SemiMultiplicative : SeqClass::QuasiMultiplicative;
}

}  // namespace

std::string to_string(SeqClass c) {
  switch (c) {
    case SeqClass::Multiplicative: return "M";
    case SeqClass::SemiMultiplicative: return "SM";
    case SeqClass::QuasiMultiplicative: return "QM";
  }
  return "?";
}

CoefficientTable::CoefficientTable(std::uint32_t base, int gap, bool strong)
    : base_(base), gap_(gap), strong_(strong) {
  check_base(base);
  if (gap < 0) throw std::invalid_argument("table gap must be nonnegative");
  std::uint64_t states = 1;
  for (int i = 0; i <= gap; ++i) {
    if (states > kWindowStatesCap / base) throw CapError("window state space exceeds cap");
    states *= base;
  }
  states_ = states;
  if (strong_) rows_.assign(1, std::vector<Phase>(states_));
}

std::uint64_t CoefficientTable::encode_window(const std::vector<std::uint32_t>& window) const {
  if (static_cast<int>(window.size()) != gap_ + 1)
    throw std::invalid_argument("window must have gap+1 digits");
  std::uint64_t code = 0, scale = 1;
  for (std::uint32_t d : window) {
    if (d >= base_) throw std::invalid_argument("window digit out of range for base");
    code += d * scale;
    scale *= base_;
  }
  return code;
}

std::vector<std::uint32_t> CoefficientTable::decode_window(std::uint64_t code) const {
  std::vector<std::uint32_t> w(static_cast<std::size_t>(gap_) + 1);
  for (auto& d : w) {
    d = static_cast<std::uint32_t>(code % base_);
    code /= base_;
  }
  return w;
}

void CoefficientTable::set(const std::vector<std::uint32_t>& window, const Phase& ph) {
  if (!strong_) throw std::invalid_argument("positional table entry needs a position");
  std::uint64_t code = encode_window(window);
  if (code == 0 && !ph.is_zero(0.0))
    throw std::invalid_argument("all-zero window must have phase 0");
  rows_[0][code] = ph;
}

void CoefficientTable::set(int pos, const std::vector<std::uint32_t>& window, const Phase& ph) {
  if (strong_) throw std::invalid_argument("strong table entries are position-independent");
  if (pos < 0 || pos > 62) throw std::invalid_argument("entry position out of range [0,62]");
  std::uint64_t code = encode_window(window);
  if (code == 0 && !ph.is_zero(0.0))
    throw std::invalid_argument("all-zero window must have phase 0");
  if (pos >= row_count()) rows_.resize(static_cast<std::size_t>(pos) + 1,
                                       std::vector<Phase>(states_));
  rows_[static_cast<std::size_t>(pos)][code] = ph;
}

Phase CoefficientTable::entry(int pos, std::uint64_t code) const {
  if (pos < 0) throw std::invalid_argument("entry position must be nonnegative");
  if (code >= states_) throw std::invalid_argument("window code out of range");
  if (strong_) return rows_[0][code];
  if (pos >= row_count()) return Phase();
  return rows_[static_cast<std::size_t>(pos)][code];
}

TableSeq::TableSeq(CoefficientTable table) : table_(std::move(table)) {
  // Precompute integer numerators over a shared denominator when possible.
  std::uint64_t lcm = 1;
  bool ok = true;
  for (int i = 0; ok && i < table_.row_count(); ++i) {
    for (const Phase& p : table_.row(i)) {
      if (!p.is_exact()) { ok = false; break; }
      std::uint64_t d = static_cast<std::uint64_t>(p.den());
      std::uint64_t g = std::gcd(lcm, d);
      if (lcm / g > (1ULL << 32) / d) { ok = false; break; }
      lcm = lcm / g * d;
    }
  }
  if (!ok || lcm > (1ULL << 32)) return;
  fast_ = true;
  den_ = lcm;
  scaled_.resize(static_cast<std::size_t>(table_.row_count()));
  for (int i = 0; i < table_.row_count(); ++i) {
    const auto& row = table_.row(i);
    auto& out = scaled_[static_cast<std::size_t>(i)];
    out.resize(row.size());
    for (std::size_t c = 0; c < row.size(); ++c)
      out[c] = static_cast<std::uint64_t>(row[c].num()) * (lcm / static_cast<std::uint64_t>(row[c].den()));
  }
}

Phase TableSeq::phase_at(std::uint64_t n) const {
  const std::uint32_t q = table_.base();
  const int gap = table_.gap();
  // Digits with gap extra zeros on top so every window read is in range;
  // gap can reach 19 (base 2, state cap 2^20) so 64 + 19 + 1 slots are live.
  std::uint32_t d[96] = {0};
  int len = 0;
  while (n > 0) {
    d[len++] = static_cast<std::uint32_t>(n % q);
    n /= q;
  }
  if (len == 0) return Phase();

  std::uint64_t code = 0, top = 1;
  for (int j = 0; j <= gap; ++j) {
    code += d[j] * top;
    if (j < gap) top *= q;
  }
  // top == q^gap; slide the window upward from position 0.
  if (fast_) {
    std::uint64_t acc = 0;
    const int declared = static_cast<int>(scaled_.size());
    for (int i = 0; i < len; ++i) {
      if (code != 0) {
        if (table_.strong()) acc += scaled_[0][code];
        else if (i < declared) acc += scaled_[static_cast<std::size_t>(i)][code];
      }
      code = code / q + static_cast<std::uint64_t>(d[i + gap + 1]) * top;
    }
    return Phase::rational(static_cast<std::int64_t>(acc % den_),
                           static_cast<std::int64_t>(den_));
  }
  Phase acc;
  for (int i = 0; i < len; ++i) {
    if (code != 0) acc += table_.entry(table_.strong() ? 0 : i, code);
    code = code / q + static_cast<std::uint64_t>(d[i + gap + 1]) * top;
  }
  return acc;
}

Phase DilateSeq::phase_at(std::uint64_t n) const {
  if (n > kEvalLimit / base_) throw std::overflow_error("dilate: q*n exceeds 63-digit range");
  return of_->phase_at(n * base_);
}

Phase SubseqSeq::phase_at(std::uint64_t n) const {
  unsigned __int128 v = static_cast<unsigned __int128>(a_) * n + b_;
  if (v > kEvalLimit) throw std::overflow_error("subsequence: a*n+b exceeds 63-digit range");
  return of_->phase_at(static_cast<std::uint64_t>(v));
}

DigitalSequence::DigitalSequence(SeqNodePtr node, std::uint32_t base, SeqClass cls, int gap,
                                 bool strong)
    : node_(std::move(node)), base_(base), cls_(cls), gap_(gap), strong_(strong) {
  check_base(base);
  if (gap_ < 0) throw std::invalid_argument("gap must be nonnegative");
  if (cls_ == SeqClass::Multiplicative && gap_ != 0)
    throw std::invalid_argument("multiplicative sequences have gap 0");
}

DigitalSequence from_coefficients(CoefficientTable table) {
  std::uint32_t q = table.base();
  int gap = table.gap();
  // Dilation invariance needs position-independent coefficients that also
  // vanish on every window whose low digit is 0: phi(qn) - phi(n) is the
  // entry of the window (0, d_0, ..., d_{gap-1}).
  bool strong = table.strong();
  if (strong) {
    for (std::uint64_t code = 0; code < table.window_states(); code += q)
      if (!table.entry(0, code).is_zero(0.0)) {
        strong = false;
        break;
      }
  }
  auto node = std::make_shared<TableSeq>(std::move(table));
  SeqClass cls = gap == 0 ? SeqClass::Multiplicative : SeqClass::SemiMultiplicative;
  return DigitalSequence(std::move(node), q, cls, gap, strong);
}

DigitalSequence builder_linear(std::uint32_t base, Phase alpha) {
  check_base(base);
  return DigitalSequence(std::make_shared<LinearSeq>(base, alpha), base,
                         SeqClass::Multiplicative, 0, false);
}

DigitalSequence builder_digit_sum(std::uint32_t base, Phase alpha) {
  check_base(base);
  return DigitalSequence(std::make_shared<DigitSumSeq>(base, alpha), base,
                         SeqClass::Multiplicative, 0, true);
}

DigitalSequence builder_block(DigitWord pattern, Phase alpha) {
  check_base(pattern.base);
  if (pattern.digits.empty()) throw std::invalid_argument("empty pattern");
  std::uint32_t q = pattern.base;
  int gap = static_cast<int>(pattern.digits.size()) - 1;
  // A pattern with low digit 0 gains an occurrence at the bottom of qn, so
  // only patterns starting on a nonzero digit are dilation invariant.
  bool strong = pattern.digits.front() != 0 || alpha.is_zero(0.0);
  auto node = std::make_shared<BlockSeq>(std::move(pattern), alpha);
  SeqClass cls = gap == 0 ? SeqClass::Multiplicative : SeqClass::SemiMultiplicative;
  return DigitalSequence(std::move(node), q, cls, gap, strong);
}

DigitalSequence builder_block(std::uint32_t base, const std::string& pattern, Phase alpha) {
  return builder_block(parse_pattern(pattern, base), alpha);
}

DigitalSequence product(const DigitalSequence& f, const DigitalSequence& g) {
  if (f.base() != g.base()) throw std::invalid_argument("product: base mismatch");
  SeqClass cls = from_rank(std::max(rank(f.cls()), rank(g.cls())));
  int gap = std::max(f.gap(), g.gap());
  return DigitalSequence(std::make_shared<ProductSeq>(f.node(), g.node()), f.base(), cls, gap,
                         f.strong() && g.strong());
}

DigitalSequence conjugate(const DigitalSequence& f) {
  return DigitalSequence(std::make_shared<ConjugateSeq>(f.node()), f.base(), f.cls(), f.gap(),
                         f.strong());
}

DigitalSequence dilate(const DigitalSequence& f) {
  return DigitalSequence(std::make_shared<DilateSeq>(f.node(), f.base()), f.base(), f.cls(),
                         f.gap(), f.strong());
}

int gap_increment(std::uint32_t base, std::uint64_t a, std::uint64_t b) {
  check_base(base);
  if (a < 1) throw std::invalid_argument("subsequence: a must be positive");
  unsigned __int128 target = static_cast<unsigned __int128>(a) * (static_cast<unsigned __int128>(b) + 1);
  int g = 0;
  unsigned __int128 v = 1;
  while (v < target) { v *= base; ++g; }
  return g + 2;
}

DigitalSequence subsequence(const DigitalSequence& f, std::uint64_t a, std::uint64_t b) {
  if (a < 1) throw std::invalid_argument("subsequence: a must be positive");
  int gap = f.gap() + gap_increment(f.base(), a, b);
  bool strong = (a == 1 && b == 0) ? f.strong() : false;
  return DigitalSequence(std::make_shared<SubseqSeq>(f.node(), a, b), f.base(),
                         SeqClass::QuasiMultiplicative, gap, strong);
}

DigitalSequence thue_morse() { return builder_digit_sum(2, Phase::rational(1, 2)); }

DigitalSequence rudin_shapiro() { return builder_block(2, "11", Phase::rational(1, 2)); }

namespace {

// Phase cache for verify_class: exact integer congruences over a common
// denominator when possible, doubles otherwise.
struct PhaseCache {
  bool exact = false;
  std::uint64_t den = 1;
  std::vector<std::uint64_t> num;
  std::vector<double> val;

  // residual of (a + b) - (c + d), as circular distance; exact path returns
  // 0 only on exact equality.
  double residual4(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) const {
    if (exact) {
      std::uint64_t lhs = (num[a] + num[b]) % den;
      std::uint64_t rhs = (num[c] + num[d]) % den;
      if (lhs == rhs) return 0.0;
      std::uint64_t diff = lhs >= rhs ? lhs - rhs : lhs + den - rhs;
      double x = static_cast<double>(diff) / static_cast<double>(den);
      return x <= 0.5 ? x : 1.0 - x;
    }
    return circ_dist(val[a] + val[b] - val[c] - val[d]);
  }
};

PhaseCache build_cache(const DigitalSequence& f, std::uint64_t N) {
  // Two passes keep peak memory at one 8-byte word per n: pass one discovers
  // exactness and the common denominator, pass two fills the table.
  PhaseCache c;
  bool all_exact = true;
  std::uint64_t lcm = 1;
  for (std::uint64_t n = 0; n < N && all_exact; ++n) {
    Phase p = f.eval_phase(n);
    if (!p.is_exact()) { all_exact = false; break; }
    std::uint64_t d = static_cast<std::uint64_t>(p.den());
    std::uint64_t g = std::gcd(lcm, d);
    if (lcm / g > (1ULL << 32) / d) { all_exact = false; break; }
    lcm = lcm / g * d;
  }
  if (all_exact) {
    c.exact = true;
    c.den = lcm;
    c.num.resize(N);
    for (std::uint64_t n = 0; n < N; ++n) {
      Phase p = f.eval_phase(n);
      c.num[n] = static_cast<std::uint64_t>(p.num()) *
                 (lcm / static_cast<std::uint64_t>(p.den()));
    }
    return c;
  }
  c.val.resize(N);
  for (std::uint64_t n = 0; n < N; ++n) c.val[n] = f.eval_phase(n).to_double();
  return c;
}

void record(ClassReport& rep, int l, std::uint64_t n, std::uint64_t m, std::uint64_t k,
            double residual) {
  ++rep.violation_count;
  if (rep.witnesses.size() < 100) rep.witnesses.push_back({l, n, m, k, residual});
}

}  // namespace

ClassReport verify_class(const DigitalSequence& f, SeqClass cls, int r, std::uint64_t N,
                         double tol) {
  if (N == 0) return {};
  if (N > (1ULL << 24)) throw CapError("verify_class: N exceeds cap 2^24");
  if (r < 0) throw std::invalid_argument("verify_class: negative gap");
  const std::uint32_t q = f.base();
  PhaseCache cache = build_cache(f, N);
  const double eff_tol = cache.exact ? 0.0 : tol;
  ClassReport rep;

  // l runs until q^l covers [0, N); beyond that the admissible tuples repeat
  // the l = ceil(log_q N) layer.
  int lmax = 0;
  while (pow_sat(q, lmax) < N) ++lmax;

  if (cls == SeqClass::Multiplicative || cls == SeqClass::QuasiMultiplicative) {
    const int rr = cls == SeqClass::Multiplicative ? 0 : r;
    for (int l = 0; l <= lmax; ++l) {
      const std::uint64_t ql = pow_sat(q, l);
      const std::uint64_t step = pow_sat(q, l + rr);
      for (std::uint64_t n = 0; n < N; n += step) {
        const std::uint64_t mcap = std::min(ql, N - n);
        for (std::uint64_t m = 0; m < mcap; ++m) {
          ++rep.checked;
          double res = cache.residual4(n + m, 0, n, m);
          if (res > eff_tol) record(rep, l, n, m, 0, res);
        }
        if (step >= N) break;  // only n = 0 fits
      }
    }
    return rep;
  }

  // SemiMultiplicative: f(n+m+k) f(m) = f(n+m) f(m+k).
  for (int l = 0; l <= lmax; ++l) {
    const std::uint64_t ql = pow_sat(q, l);
    const std::uint64_t qlr = pow_sat(q, l + r);
    for (std::uint64_t n = 0; n < N; n += qlr) {
      const std::uint64_t mlim = std::min(qlr, N - n);
      for (std::uint64_t m = 0; m < mlim; m += ql) {
        const std::uint64_t kcap = std::min(ql, N - n - m);
        for (std::uint64_t k = 0; k < kcap; ++k) {
          ++rep.checked;
          double res = cache.residual4(n + m + k, m, n + m, m + k);
          if (res > eff_tol) record(rep, l, n, m, k, res);
        }
        if (ql >= N) break;
      }
      if (qlr >= N) break;
    }
  }
  return rep;
}

Phase reconstruct_check(const DigitalSequence& f, const std::array<IndexSet, 3>& parts,
                        std::uint64_t n) {
  if (f.cls() == SeqClass::QuasiMultiplicative)
    throw std::invalid_argument("reconstruct_check needs an M or SM sequence");
  const std::uint32_t q = f.base();
  const int r = f.gap();

  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (!parts[static_cast<std::size_t>(i)].disjoint_from(parts[static_cast<std::size_t>(j)]))
        throw std::invalid_argument("partition parts overlap");
    }
  }
  IndexSet all = parts[0].unite(parts[1]).unite(parts[2]);
  if (all.empty()) throw std::invalid_argument("empty partition");
  auto cover = all.runs();
  if (cover.size() != 1 || cover[0].first != 0)
    throw std::invalid_argument("partition must cover an interval [0, L)");
  const int L = cover[0].second;
  for (const auto& part : parts) {
    for (auto [lo, hi] : part.runs()) {
      if (hi - lo < r) throw std::invalid_argument("partition interval shorter than gap");
    }
  }
  if (!support(n, q).empty() && support(n, q).max() >= L)
    throw std::invalid_argument("n has digits outside the partitioned range");

  const IndexSet& i1 = parts[0];
  const IndexSet& i2 = parts[1];
  const IndexSet& i3 = parts[2];
  auto phi = [&](const IndexSet& s) { return f.eval_phase(restrict_digits(n, q, s)); };
  Phase rhs = phi(i1.unite(i2)) + phi(i2.unite(i3)) + phi(i3.unite(i1)) - phi(i1) - phi(i2) - phi(i3);
  return f.eval_phase(n) - rhs;
}

}  // namespace qseqlab
