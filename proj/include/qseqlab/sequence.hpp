#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qseqlab/digits.hpp"
#include "qseqlab/phase.hpp"

namespace qseqlab {

enum class SeqClass { Multiplicative, SemiMultiplicative, QuasiMultiplicative };

std::string to_string(SeqClass c);

// Window coefficients for a semimultiplicative phase: entry (i, w) is the
// phase contributed by digit window w = (d_i, ..., d_{i+gap}) read least
// significant first. Strong tables are position independent (one row);
// positional tables are zero beyond their declared rows. The all-zero window
// must carry phase 0 at every position.
class CoefficientTable {
 public:
  CoefficientTable(std::uint32_t base, int gap, bool strong);

  std::uint32_t base() const { return base_; }
  int gap() const { return gap_; }
  bool strong() const { return strong_; }
  std::uint64_t window_states() const { return states_; }

  std::uint64_t encode_window(const std::vector<std::uint32_t>& window) const;
  std::vector<std::uint32_t> decode_window(std::uint64_t code) const;

  // Strong tables only.
  void set(const std::vector<std::uint32_t>& window, const Phase& ph);
  // Positional tables only; rows grow to cover pos.
  void set(int pos, const std::vector<std::uint32_t>& window, const Phase& ph);

  // Phase of window `code` at position pos (0 beyond declared rows).
  Phase entry(int pos, std::uint64_t code) const;

  int row_count() const { return static_cast<int>(rows_.size()); }
  const std::vector<Phase>& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }

 private:
  std::uint32_t base_;
  int gap_;
  bool strong_;
  std::uint64_t states_;
  std::vector<std::vector<Phase>> rows_;
};

// Evaluator node; concrete kinds below are exposed so the JSON layer can
// serialize provenance.
class SeqNode {
 public:
  virtual ~SeqNode() = default;
  virtual Phase phase_at(std::uint64_t n) const = 0;
};

using SeqNodePtr = std::shared_ptr<const SeqNode>;

// Unimodular base-q digital sequence f(n) = e(phi(n)), phi(0) = 0.
// Immutable; copies share the evaluator.
class DigitalSequence {
 public:
  DigitalSequence() = default;
  DigitalSequence(SeqNodePtr node, std::uint32_t base, SeqClass cls, int gap, bool strong);

  std::uint32_t base() const { return base_; }
  SeqClass cls() const { return cls_; }
  int gap() const { return gap_; }
  bool strong() const { return strong_; }
  const SeqNodePtr& node() const { return node_; }

  Phase eval_phase(std::uint64_t n) const { return node_->phase_at(n); }
  std::complex<double> eval(std::uint64_t n) const { return node_->phase_at(n).unit(); }

 private:
  SeqNodePtr node_;
  std::uint32_t base_ = 2;
  SeqClass cls_ = SeqClass::Multiplicative;
  int gap_ = 0;
  bool strong_ = false;
};

class TableSeq : public SeqNode {
 public:
  explicit TableSeq(CoefficientTable table);
  Phase phase_at(std::uint64_t n) const override;
  const CoefficientTable& table() const { return table_; }

 private:
  CoefficientTable table_;
  // Common-denominator fast path when every entry is rational with small lcm.
  bool fast_ = false;
  std::uint64_t den_ = 1;
  std::vector<std::vector<std::uint64_t>> scaled_;
};

class LinearSeq : public SeqNode {
 public:
  LinearSeq(std::uint32_t base, Phase alpha) : base_(base), alpha_(alpha) {}
  Phase phase_at(std::uint64_t n) const override { return alpha_.scaled(n); }
  Phase alpha() const { return alpha_; }
  std::uint32_t base() const { return base_; }

 private:
  std::uint32_t base_;
  Phase alpha_;
};

class DigitSumSeq : public SeqNode {
 public:
  DigitSumSeq(std::uint32_t base, Phase alpha) : base_(base), alpha_(alpha) {}
  Phase phase_at(std::uint64_t n) const override { return alpha_.scaled(sum_digits(n, base_)); }
  Phase alpha() const { return alpha_; }
  std::uint32_t base() const { return base_; }

 private:
  std::uint32_t base_;
  Phase alpha_;
};

class BlockSeq : public SeqNode {
 public:
  BlockSeq(DigitWord pattern, Phase alpha) : pattern_(std::move(pattern)), alpha_(alpha) {}
  Phase phase_at(std::uint64_t n) const override { return alpha_.scaled(block_count(n, pattern_)); }
  const DigitWord& pattern() const { return pattern_; }
  Phase alpha() const { return alpha_; }

 private:
  DigitWord pattern_;
  Phase alpha_;
};

class ProductSeq : public SeqNode {
 public:
  ProductSeq(SeqNodePtr left, SeqNodePtr right) : left_(std::move(left)), right_(std::move(right)) {}
  Phase phase_at(std::uint64_t n) const override {
    return left_->phase_at(n) + right_->phase_at(n);
  }
  const SeqNodePtr& left() const { return left_; }
  const SeqNodePtr& right() const { return right_; }

 private:
  SeqNodePtr left_, right_;
};

class ConjugateSeq : public SeqNode {
 public:
  explicit ConjugateSeq(SeqNodePtr of) : of_(std::move(of)) {}
  Phase phase_at(std::uint64_t n) const override { return -of_->phase_at(n); }
  const SeqNodePtr& of() const { return of_; }

 private:
  SeqNodePtr of_;
};

class DilateSeq : public SeqNode {
 public:
  DilateSeq(SeqNodePtr of, std::uint32_t base) : of_(std::move(of)), base_(base) {}
  Phase phase_at(std::uint64_t n) const override;
  const SeqNodePtr& of() const { return of_; }

 private:
  SeqNodePtr of_;
  std::uint32_t base_;
};

class SubseqSeq : public SeqNode {
 public:
  SubseqSeq(SeqNodePtr of, std::uint64_t a, std::uint64_t b) : of_(std::move(of)), a_(a), b_(b) {}
  Phase phase_at(std::uint64_t n) const override;
  const SeqNodePtr& of() const { return of_; }
  std::uint64_t a() const { return a_; }
  std::uint64_t b() const { return b_; }

 private:
  SeqNodePtr of_;
  std::uint64_t a_, b_;
};

DigitalSequence from_coefficients(CoefficientTable table);
DigitalSequence builder_linear(std::uint32_t base, Phase alpha);
DigitalSequence builder_digit_sum(std::uint32_t base, Phase alpha);
DigitalSequence builder_block(std::uint32_t base, const std::string& pattern, Phase alpha);
DigitalSequence builder_block(DigitWord pattern, Phase alpha);

DigitalSequence product(const DigitalSequence& f, const DigitalSequence& g);
DigitalSequence conjugate(const DigitalSequence& f);
DigitalSequence dilate(const DigitalSequence& f);
DigitalSequence subsequence(const DigitalSequence& f, std::uint64_t a, std::uint64_t b);

// Extra window positions a subsequence n -> f(an+b) may need: carries from
// an+b reach at most ceil(log_q(a(b+1))) digits past the block, plus margin 2.
int gap_increment(std::uint32_t base, std::uint64_t a, std::uint64_t b);

DigitalSequence thue_morse();
DigitalSequence rudin_shapiro();

struct ClassViolation {
  int l = 0;
  std::uint64_t n = 0, m = 0, k = 0;
  double residual = 0;
};

struct ClassReport {
  std::uint64_t checked = 0;
  std::uint64_t violation_count = 0;
  std::vector<ClassViolation> witnesses;  // first 100
  bool pass() const { return violation_count == 0; }
};

// Exhaustively checks the defining relation of `cls` (with gap r) over all
// admissible (n, m, k, l) with n+m+k < N. Exact comparisons when every phase
// below N is rational with a common denominator < 2^32, else tolerance tol.
ClassReport verify_class(const DigitalSequence& f, SeqClass cls, int r, std::uint64_t N,
                         double tol = Phase::kTol);

// phi(n) - [phi(n|I12) + phi(n|I23) + phi(n|I31) - phi(n|I1) - phi(n|I2) - phi(n|I3)].
// Parts must partition [0, L) into unions of intervals of length >= f.gap().
Phase reconstruct_check(const DigitalSequence& f, const std::array<IndexSet, 3>& parts,
                        std::uint64_t n);

}  // namespace qseqlab
