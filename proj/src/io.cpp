#include "qseqlab/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace qseqlab {

namespace {

using nlohmann::ordered_json;

std::string lambda_text(const LambdaValue& v) {
  return v.infinite ? "inf" : fmt_double(v.value);
}

ordered_json lambda_json_value(const LambdaValue& v) {
  if (v.infinite) return "inf";
  return v.value;
}

ordered_json profile_rows(const LambdaProfile& p) {
  ordered_json rows = ordered_json::array();
  for (const LambdaProfileRow& r : p.rows)
    rows.push_back({{"interval_lo", r.interval.lo},
                    {"interval_hi", r.interval.hi},
                    {"lambda", lambda_json_value(r.lambda)},
                    {"lambda_bar", r.bar},
                    {"partial_bar_sum", r.partial_bar_sum},
                    {"method", r.method == LambdaMethod::Exact ? "exact" : "mc"},
                    {"ci_halfwidth", r.ci_halfwidth}});
  return rows;
}

ordered_json series_rows(const CorrelationSeries& s) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < s.checkpoints.size(); ++i)
    rows.push_back({{"checkpoint_N", s.checkpoints[i]},
                    {"re", s.partials[i].real()},
                    {"im", s.partials[i].imag()},
                    {"abs", std::abs(s.partials[i])}});
  return rows;
}

}  // namespace

std::string fmt_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_lambda_profile_csv(std::ostream& out, const LambdaProfile& p, std::uint64_t seed) {
  out << "# seed=" << seed << '\n';
  out << "interval_lo,interval_hi,lambda,lambda_bar,partial_bar_sum,method,ci_halfwidth\n";
  for (const LambdaProfileRow& r : p.rows)
    out << r.interval.lo << ',' << r.interval.hi << ',' << lambda_text(r.lambda) << ','
        << fmt_double(r.bar) << ',' << fmt_double(r.partial_bar_sum) << ','
        << (r.method == LambdaMethod::Exact ? "exact" : "mc") << ','
        << fmt_double(r.ci_halfwidth) << '\n';
}

void write_correlation_csv(std::ostream& out, const CorrelationSeries& s, std::uint64_t seed) {
  out << "# seed=" << seed << '\n';
  out << "checkpoint_N,re,im,abs\n";
  for (std::size_t i = 0; i < s.checkpoints.size(); ++i)
    out << s.checkpoints[i] << ',' << fmt_double(s.partials[i].real()) << ','
        << fmt_double(s.partials[i].imag()) << ',' << fmt_double(std::abs(s.partials[i]))
        << '\n';
}

void write_kbsz_csv(std::ostream& out, const KbszScanResult& r, std::uint64_t seed) {
  out << "# seed=" << seed << '\n';
  out << "p,pprime,re,im,abs\n";
  for (const KbszPair& pr : r.pairs)
    out << pr.p << ',' << pr.pp << ',' << fmt_double(pr.value.real()) << ','
        << fmt_double(pr.value.imag()) << ',' << fmt_double(std::abs(pr.value)) << '\n';
}

void write_approx_csv(std::ostream& out, const PeriodicApprox& a, std::uint64_t seed) {
  out << "# seed=" << seed << '\n';
  out << "n,g_phase\n";
  for (std::size_t n = 0; n < a.table.size(); ++n)
    out << n << ',' << fmt_double(a.table[n]) << '\n';
}

void write_verify_csv(std::ostream& out, const ClassReport& r, std::uint64_t seed) {
  out << "# seed=" << seed << '\n';
  out << "l,n,m,k,residual\n";
  for (const ClassViolation& v : r.witnesses)
    out << v.l << ',' << v.n << ',' << v.m << ',' << v.k << ',' << fmt_double(v.residual)
        << '\n';
}

nlohmann::ordered_json lambda_profile_json(const LambdaProfile& p, std::uint64_t seed) {
  return {{"seed", seed}, {"rows", profile_rows(p)}};
}

nlohmann::ordered_json correlation_json(const CorrelationSeries& s, std::uint64_t seed) {
  return {{"seed", seed}, {"summand", s.summand_label}, {"rows", series_rows(s)}};
}

nlohmann::ordered_json kbsz_json(const KbszScanResult& r, std::uint64_t seed) {
  ordered_json pairs = ordered_json::array();
  for (const KbszPair& pr : r.pairs)
    pairs.push_back({{"p", pr.p},
                     {"pprime", pr.pp},
                     {"re", pr.value.real()},
                     {"im", pr.value.imag()},
                     {"abs", std::abs(pr.value)}});
  return {{"seed", seed},
          {"max_abs", r.max_abs},
          {"argmax_p", r.argmax_p},
          {"argmax_pprime", r.argmax_pp},
          {"pairs", std::move(pairs)}};
}

nlohmann::ordered_json approx_json(const PeriodicApprox& a, std::uint64_t seed) {
  return {{"seed", seed},
          {"K", a.K},
          {"M", a.M},
          {"epsilon", a.epsilon},
          {"fraction_exceeding", a.fraction_exceeding},
          {"tested_range", a.tested_range},
          {"period", a.table.size()},
          {"table", a.table}};
}

nlohmann::ordered_json verify_json(const ClassReport& r, std::uint64_t seed) {
  ordered_json witnesses = ordered_json::array();
  for (const ClassViolation& v : r.witnesses)
    witnesses.push_back(
        {{"l", v.l}, {"n", v.n}, {"m", v.m}, {"k", v.k}, {"residual", v.residual}});
  return {{"seed", seed},
          {"checked", r.checked},
          {"violations", r.violation_count},
          {"pass", r.pass()},
          {"witnesses", std::move(witnesses)}};
}

nlohmann::ordered_json report_json(const DichotomyReport& r, std::uint64_t seed) {
  ordered_json j;
  j["seed"] = seed;
  j["verdict"] = r.verdict;
  j["diagnostics"] = r.diagnostics;
  j["series"] = profile_rows(r.series);
  j["last_half_increase"] = r.last_half_increase;
  if (r.kbsz_max >= 0) j["kbsz_max"] = r.kbsz_max;
  if (r.has_alpha) j["alpha"] = ordered_json{{"num", r.alpha_num}, {"den", r.alpha_den}};
  if (!r.quotient_series.rows.empty()) j["quotient_series"] = profile_rows(r.quotient_series);
  if (r.approx)
    j["approx"] = {{"K", r.approx->K},
                   {"M", r.approx->M},
                   {"epsilon", r.approx->epsilon},
                   {"fraction_exceeding", r.approx->fraction_exceeding},
                   {"tested_range", r.approx->tested_range}};
  return j;
}

}  // namespace qseqlab
