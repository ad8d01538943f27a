#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qseqlab/common.hpp"

namespace qseqlab {

// Base-q digit word, least significant digit first, no trailing zeros.
// The word for 0 is empty.
struct DigitWord {
  std::uint32_t base = 2;
  std::vector<std::uint32_t> digits;

  std::size_t size() const { return digits.size(); }
  bool operator==(const DigitWord&) const = default;
};

// Finite set of digit positions, kept sorted ascending without duplicates.
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::vector<int> positions);
  // Interval [lo, hi).
  static IndexSet interval(int lo, int hi);

  const std::vector<int>& positions() const { return pos_; }
  bool contains(int p) const;
  std::size_t size() const { return pos_.size(); }
  bool empty() const { return pos_.empty(); }
  int min() const;
  int max() const;

  IndexSet unite(const IndexSet& other) const;
  bool disjoint_from(const IndexSet& other) const;

  // Maximal runs of consecutive positions as [lo, hi) pairs.
  std::vector<std::pair<int, int>> runs() const;

  bool operator==(const IndexSet&) const = default;

 private:
  std::vector<int> pos_;
};

void check_base(std::uint32_t q);

// Largest n representable here: 63 base-q digits (and always < 2^63).
std::uint64_t max_representable(std::uint32_t q);

// (n)_q, least significant digit first.
DigitWord expand(std::uint64_t n, std::uint32_t q);

// [w]_q; rejects values needing more than 63 base-q digits or >= 2^63.
std::uint64_t value(const DigitWord& w);

std::uint32_t digit_at(std::uint64_t n, std::uint32_t q, int position);

// Positions of nonzero digits of (n)_q.
IndexSet support(std::uint64_t n, std::uint32_t q);

// Keeps the digits of n at positions in I, zeroes the rest.
std::uint64_t restrict_digits(std::uint64_t n, std::uint32_t q, const IndexSet& I);

std::uint64_t sum_digits(std::uint64_t n, std::uint32_t q);

// Number of digits of (n)_q; 0 for n = 0.
int digit_length(std::uint64_t n, std::uint32_t q);

// Parses a pattern written most significant digit first ("011").
// Bases above 10 take comma-separated digits ("10,3,0").
DigitWord parse_pattern(const std::string& text, std::uint32_t q);

// Occurrences of the pattern in (n)_q written most significant digit first
// with |pattern|-1 zeros prepended; overlaps count. The all-zero pattern is
// rejected (its count would be infinite under the prepend rule).
std::uint64_t block_count(std::uint64_t n, const DigitWord& pattern);
std::uint64_t block_count(std::uint64_t n, const std::string& pattern, std::uint32_t q);

// q^p for each position p in I; throws CapError when a digit at p would
// leave the 63-digit range.
std::vector<std::uint64_t> position_weights(std::uint32_t q, const IndexSet& I);

// Calls sink(n) for every n with supp(n) in I, q^{|I|} values total, the
// lowest listed position cycling fastest.
template <typename Sink>
void enumerate_support(std::uint32_t q, const IndexSet& I, Sink&& sink) {
  const std::vector<std::uint64_t> weight = position_weights(q, I);
  const std::size_t k = weight.size();
  std::vector<std::uint32_t> digit(k, 0);
  std::uint64_t n = 0;
  for (;;) {
    sink(n);
    std::size_t j = 0;
    while (j < k) {
      if (digit[j] + 1 < q) {
        ++digit[j];
        n += weight[j];
        break;
      }
      n -= static_cast<std::uint64_t>(digit[j]) * weight[j];
      digit[j] = 0;
      ++j;
    }
    if (j == k) break;
  }
}

}  // namespace qseqlab
