#include "qseqlab/digits.hpp"

#include <algorithm>
#include <stdexcept>

namespace qseqlab {

void check_base(std::uint32_t q) {
  if (q < 2) throw std::invalid_argument("base must be at least 2");
}

std::uint64_t max_representable(std::uint32_t q) {
  check_base(q);
  // min(q^63, 2^63) - 1, computed without overflow.
  const std::uint64_t cap = 1ULL << 63;
  std::uint64_t v = 1;
  for (int i = 0; i < 63; ++i) {
    if (v > (cap - 1) / q) return cap - 1;
    v *= q;
  }
  return v - 1;
}

IndexSet::IndexSet(std::vector<int> positions) : pos_(std::move(positions)) {
  for (int p : pos_) {
    if (p < 0 || p > 62) throw std::invalid_argument("digit position out of range [0,62]");
  }
  std::sort(pos_.begin(), pos_.end());
  pos_.erase(std::unique(pos_.begin(), pos_.end()), pos_.end());
}

IndexSet IndexSet::interval(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("interval with lo > hi");
  std::vector<int> v;
  v.reserve(static_cast<std::size_t>(hi - lo));
  for (int p = lo; p < hi; ++p) v.push_back(p);
  return IndexSet(std::move(v));
}

bool IndexSet::contains(int p) const {
  return std::binary_search(pos_.begin(), pos_.end(), p);
}

int IndexSet::min() const {
  if (pos_.empty()) throw std::invalid_argument("min of empty index set");
  return pos_.front();
}

int IndexSet::max() const {
  if (pos_.empty()) throw std::invalid_argument("max of empty index set");
  return pos_.back();
}

IndexSet IndexSet::unite(const IndexSet& other) const {
  std::vector<int> v = pos_;
  v.insert(v.end(), other.pos_.begin(), other.pos_.end());
  return IndexSet(std::move(v));
}

bool IndexSet::disjoint_from(const IndexSet& other) const {
  std::size_t i = 0, j = 0;
  while (i < pos_.size() && j < other.pos_.size()) {
    if (pos_[i] == other.pos_[j]) return false;
    if (pos_[i] < other.pos_[j]) ++i; else ++j;
  }
  return true;
}

std::vector<std::pair<int, int>> IndexSet::runs() const {
  std::vector<std::pair<int, int>> out;
  std::size_t i = 0;
  while (i < pos_.size()) {
    int lo = pos_[i];
    int hi = lo + 1;
    ++i;
    while (i < pos_.size() && pos_[i] == hi) { ++hi; ++i; }
    out.emplace_back(lo, hi);
  }
  return out;
}

DigitWord expand(std::uint64_t n, std::uint32_t q) {
  check_base(q);
  if (n > max_representable(q)) throw std::overflow_error("expand: more than 63 base-q digits");
  DigitWord w;
  w.base = q;
  while (n > 0) {
    w.digits.push_back(static_cast<std::uint32_t>(n % q));
    n /= q;
  }
  return w;
}

std::uint64_t value(const DigitWord& w) {
  check_base(w.base);
  if (w.digits.size() > 63) throw std::overflow_error("value: more than 63 digits");
  const std::uint64_t limit = max_representable(w.base);
  std::uint64_t acc = 0;
  for (std::size_t i = w.digits.size(); i-- > 0;) {
    std::uint32_t d = w.digits[i];
    if (d >= w.base) throw std::invalid_argument("value: digit out of range for base");
    if (acc > (limit - d) / w.base) throw std::overflow_error("value: exceeds 63 base-q digits");
    acc = acc * w.base + d;
  }
  return acc;
}

std::uint32_t digit_at(std::uint64_t n, std::uint32_t q, int position) {
  check_base(q);
  if (position < 0) throw std::invalid_argument("digit_at: negative position");
  for (int i = 0; i < position; ++i) {
    n /= q;
    if (n == 0) return 0;
  }
  return static_cast<std::uint32_t>(n % q);
}

IndexSet support(std::uint64_t n, std::uint32_t q) {
  check_base(q);
  std::vector<int> v;
  int pos = 0;
  while (n > 0) {
    if (n % q != 0) v.push_back(pos);
    n /= q;
    ++pos;
  }
  return IndexSet(std::move(v));
}

std::uint64_t restrict_digits(std::uint64_t n, std::uint32_t q, const IndexSet& I) {
  check_base(q);
  std::uint64_t out = 0;
  std::uint64_t scale = 1;
  int pos = 0;
  while (n > 0) {
    std::uint64_t d = n % q;
    if (d != 0 && I.contains(pos)) out += d * scale;
    n /= q;
    ++pos;
    if (n > 0) scale *= q;
  }
  return out;
}

std::uint64_t sum_digits(std::uint64_t n, std::uint32_t q) {
  check_base(q);
  std::uint64_t s = 0;
  while (n > 0) { s += n % q; n /= q; }
  return s;
}

int digit_length(std::uint64_t n, std::uint32_t q) {
  check_base(q);
  int len = 0;
  while (n > 0) { n /= q; ++len; }
  return len;
}

DigitWord parse_pattern(const std::string& text, std::uint32_t q) {
  check_base(q);
  if (text.empty()) throw std::invalid_argument("empty pattern");
  std::vector<std::uint32_t> msd_first;
  if (q <= 10) {
    for (char c : text) {
      if (c < '0' || c > '9') throw std::invalid_argument("pattern digit not in 0-9");
      msd_first.push_back(static_cast<std::uint32_t>(c - '0'));
    }
  } else {
    std::size_t i = 0;
    while (i < text.size()) {
      std::size_t j = text.find(',', i);
      if (j == std::string::npos) j = text.size();
      if (j == i) throw std::invalid_argument("empty digit in pattern");
      msd_first.push_back(static_cast<std::uint32_t>(std::stoul(text.substr(i, j - i))));
      i = j + 1;
    }
  }
  DigitWord w;
  w.base = q;
  bool all_zero = true;
  for (std::size_t i = msd_first.size(); i-- > 0;) {
    if (msd_first[i] >= q) throw std::invalid_argument("pattern digit out of range for base");
    if (msd_first[i] != 0) all_zero = false;
    w.digits.push_back(msd_first[i]);
  }
  if (all_zero) throw std::invalid_argument("all-zero pattern has no finite block count");
  return w;
}

std::uint64_t block_count(std::uint64_t n, const DigitWord& pattern) {
  check_base(pattern.base);
  if (pattern.digits.empty()) throw std::invalid_argument("empty pattern");
  bool all_zero = true;
  for (std::uint32_t d : pattern.digits) {
    if (d >= pattern.base) throw std::invalid_argument("pattern digit out of range for base");
    if (d != 0) all_zero = false;
  }
  if (all_zero) throw std::invalid_argument("all-zero pattern has no finite block count");

  const std::uint32_t q = pattern.base;
  const int m = static_cast<int>(pattern.digits.size());
  const int len = digit_length(n, q);
  // Writing (n)_q most significant first with m-1 zeros prepended and scanning
  // windows of width m is the same as matching the LSD-first pattern word at
  // window starts i = 0 .. len-1, where digits above the top read as zero.
  std::uint64_t count = 0;
  for (int i = 0; i < len; ++i) {
    bool match = true;
    for (int j = 0; j < m; ++j) {
      if (digit_at(n, q, i + j) != pattern.digits[static_cast<std::size_t>(j)]) {
        match = false;
        break;
      }
    }
    if (match) ++count;
  }
  return count;
}

std::uint64_t block_count(std::uint64_t n, const std::string& pattern, std::uint32_t q) {
  return block_count(n, parse_pattern(pattern, q));
}

std::vector<std::uint64_t> position_weights(std::uint32_t q, const IndexSet& I) {
  check_base(q);
  const std::uint64_t lim = max_representable(q);
  std::vector<std::uint64_t> weight;
  weight.reserve(I.size());
  std::uint64_t maxv = 0;  // largest enumerable value: all digits q-1
  for (int p : I.positions()) {
    std::uint64_t w = 1;
    for (int t = 0; t < p; ++t) {
      if (w > lim / q) throw CapError("digit position leaves the 63-digit range");
      w *= q;
    }
    std::uint64_t top = w * (q - 1);
    if (top / (q - 1) != w || maxv > lim - top)
      throw CapError("digit position leaves the 63-digit range");
    maxv += top;
    weight.push_back(w);
  }
  return weight;
}

}  // namespace qseqlab
