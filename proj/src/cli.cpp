#include "qseqlab/cli.hpp"

#include <cstdint>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qseqlab/common.hpp"
#include "qseqlab/detect.hpp"
#include "qseqlab/io.hpp"
#include "qseqlab/lambda.hpp"
#include "qseqlab/sequence.hpp"
#include "qseqlab/sieve.hpp"
#include "qseqlab/spec_json.hpp"

namespace qseqlab {

namespace {

struct CommonOpts {
  std::string spec_path;
  std::string spec_inline;
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 0;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  auto* spec = cmd->add_option("--spec", o.spec_path, "sequence spec JSON file");
  cmd->add_option("--json", o.spec_inline, "inline sequence spec JSON")->excludes(spec);
  cmd->add_option("--out", o.out_path, "output file (default stdout)");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", o.seed, "seed for all sampling (default 0)");
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::Range(1, 1024));
}

DigitalSequence load_spec(const CommonOpts& o) {
  if (!o.spec_path.empty()) return parse_sequence_spec_file(o.spec_path);
  if (!o.spec_inline.empty()) return parse_sequence_spec(o.spec_inline);
  throw std::invalid_argument("a sequence spec is required (--spec FILE or --json TEXT)");
}

void emit(const CommonOpts& o, std::ostream& fallback,
          const std::function<void(std::ostream&)>& writer) {
  if (o.out_path.empty()) {
    writer(fallback);
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file: " + o.out_path);
  writer(f);
}

void emit_json(const CommonOpts& o, std::ostream& fallback, const nlohmann::ordered_json& j) {
  emit(o, fallback, [&](std::ostream& s) { s << j.dump(2) << '\n'; });
}

Interval parse_interval(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("interval must be lo:hi, got \"" + text + "\"");
  try {
    int lo = std::stoi(text.substr(0, colon));
    int hi = std::stoi(text.substr(colon + 1));
    if (lo < 0 || hi <= lo) throw std::invalid_argument("");
    return {lo, hi};
  } catch (const std::exception&) {
    throw std::invalid_argument("interval must be lo:hi with 0 <= lo < hi, got \"" + text +
                                "\"");
  }
}

void setup_eval(CLI::App& app, CommonOpts& o, std::ostream& out) {
  auto cmd = app.add_subcommand("eval", "evaluate a sequence at given indices");
  add_common(cmd, o);
  auto ns = std::make_shared<std::vector<std::uint64_t>>();
  auto range = std::make_shared<std::string>();
  cmd->add_option("-n,--n", *ns, "indices to evaluate");
  cmd->add_option("--range", *range, "index range lo:hi (half open)");
  cmd->callback([&, ns, range] {
    DigitalSequence f = load_spec(o);
    std::vector<std::uint64_t> points = *ns;
    if (!range->empty()) {
      Interval iv = parse_interval(*range);
      for (std::int64_t n = iv.lo; n < iv.hi; ++n)
        points.push_back(static_cast<std::uint64_t>(n));
    }
    if (points.empty()) throw std::invalid_argument("eval needs -n or --range");
    if (o.format == "csv") {
      emit(o, out, [&](std::ostream& s) {
        s << "# seed=" << o.seed << '\n';
        s << "n,phase,re,im\n";
        for (std::uint64_t n : points) {
          Phase ph = f.eval_phase(n);
          auto z = ph.unit();
          s << n << ',' << ph.str() << ',' << fmt_double(z.real()) << ','
            << fmt_double(z.imag()) << '\n';
        }
      });
    } else {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (std::uint64_t n : points) {
        Phase ph = f.eval_phase(n);
        auto z = ph.unit();
        nlohmann::ordered_json row;
        row["n"] = n;
        if (ph.is_exact())
          row["phase"] = {{"num", ph.num()}, {"den", ph.den()}};
        else
          row["phase_real"] = ph.to_double();
        row["re"] = z.real();
        row["im"] = z.imag();
        rows.push_back(std::move(row));
      }
      emit_json(o, out, {{"seed", o.seed}, {"rows", std::move(rows)}});
    }
  });
}

void setup_verify(CLI::App& app, CommonOpts& o, std::ostream& out) {
  auto cmd = app.add_subcommand("verify", "check a class relation exhaustively");
  add_common(cmd, o);
  auto cls = std::make_shared<std::string>("SM");
  auto gap = std::make_shared<int>(-1);
  auto N = std::make_shared<std::uint64_t>(1ULL << 16);
  cmd->add_option("--class", *cls, "M, SM, or QM")->check(CLI::IsMember({"M", "SM", "QM"}));
  cmd->add_option("--gap", *gap, "window gap r (default: the spec's own)");
  cmd->add_option("-N,--limit", *N, "check all admissible triples with n+m+k < N");
  cmd->callback([&, cls, gap, N] {
    DigitalSequence f = load_spec(o);
    SeqClass c = *cls == "M"    ? SeqClass::Multiplicative
                 : *cls == "SM" ? SeqClass::SemiMultiplicative
                                : SeqClass::QuasiMultiplicative;
    int r = *gap >= 0 ? *gap : f.gap();
    ClassReport rep = verify_class(f, c, r, *N);
    out << (rep.pass() ? "pass" : "fail") << " checked=" << rep.checked
        << " violations=" << rep.violation_count << '\n';
    if (!o.out_path.empty()) {
      if (o.format == "csv")
        emit(o, out, [&](std::ostream& s) { write_verify_csv(s, rep, o.seed); });
      else
        emit_json(o, out, verify_json(rep, o.seed));
    }
  });
}

void setup_lambda(CLI::App& app, CommonOpts& o, std::ostream& out) {
  auto cmd = app.add_subcommand("lambda", "cancellation profile over digit intervals");
  add_common(cmd, o);
  auto ivs = std::make_shared<std::vector<std::string>>();
  auto L = std::make_shared<int>(0);
  auto width = std::make_shared<int>(0);
  auto sep = std::make_shared<int>(-1);
  auto samples = std::make_shared<std::uint64_t>(1ULL << 16);
  cmd->add_option("--interval", *ivs, "digit interval lo:hi (repeatable)");
  cmd->add_option("--series-L", *L, "block series over [0, L) instead of explicit intervals");
  cmd->add_option("--width", *width, "series block width (default 2r+1)");
  cmd->add_option("--sep", *sep, "series block separation (default 2r+1)");
  cmd->add_option("--mc-samples", *samples, "Monte Carlo samples past the enumeration cap");
  cmd->callback([&, ivs, L, width, sep, samples] {
    DigitalSequence f = load_spec(o);
    LambdaProfile profile;
    if (*L > 0) {
      if (!ivs->empty())
        throw std::invalid_argument("--series-L and --interval are exclusive");
      SeriesOptions so;
      so.block_width = *width;
      so.separation = *sep;
      so.mc_samples = *samples;
      so.seed = o.seed;
      profile = lambda_sum_series(f, *L, so);
    } else {
      if (ivs->empty()) throw std::invalid_argument("lambda needs --interval or --series-L");
      std::vector<Interval> intervals;
      for (const std::string& t : *ivs) intervals.push_back(parse_interval(t));
      ProfileOptions po;
      po.mc_samples = *samples;
      po.seed = o.seed;
      profile = lambda_profile(f, intervals, po);
    }
    if (o.format == "csv")
      emit(o, out, [&](std::ostream& s) { write_lambda_profile_csv(s, profile, o.seed); });
    else
      emit_json(o, out, lambda_profile_json(profile, o.seed));
  });
}

void setup_mobius(CLI::App& app, CommonOpts& o, std::ostream& out) {
  auto cmd = app.add_subcommand("mobius", "Mobius correlation series E f(n) mu(n)");
  add_common(cmd, o);
  auto N = std::make_shared<std::uint64_t>(1000000);
  auto checkpoints = std::make_shared<std::vector<std::uint64_t>>();
  cmd->add_option("-N,--limit", *N, "average over n < N");
  cmd->add_option("--checkpoint", *checkpoints, "partial-sum checkpoints (repeatable)");
  cmd->callback([&, N, checkpoints] {
    DigitalSequence f = load_spec(o);
    CorrelationSeries s = mobius_correlation(f, *N, *checkpoints, o.threads);
    if (o.format == "csv")
      emit(o, out, [&](std::ostream& os) { write_correlation_csv(os, s, o.seed); });
    else
      emit_json(o, out, correlation_json(s, o.seed));
  });
}

void setup_kbsz(CLI::App& app, CommonOpts& o, std::ostream& out) {
  auto cmd = app.add_subcommand("kbsz", "bilinear prime correlations E f(pn) conj(f(p'n))");
  add_common(cmd, o);
  auto lo = std::make_shared<std::uint32_t>(3);
  auto hi = std::make_shared<std::uint32_t>(14);
  auto N = std::make_shared<std::uint64_t>(1ULL << 16);
  auto p = std::make_shared<std::uint64_t>(0);
  auto pp = std::make_shared<std::uint64_t>(0);
  cmd->add_option("--prime-lo", *lo, "scan primes from here");
  cmd->add_option("--prime-hi", *hi, "scan primes below here");
  cmd->add_option("-N,--limit", *N, "average over n < N");
  cmd->add_option("-p", *p, "single pair: first prime");
  cmd->add_option("--pprime", *pp, "single pair: second prime");
  cmd->callback([&, lo, hi, N, p, pp] {
    DigitalSequence f = load_spec(o);
    KbszScanResult r;
    if (*p != 0 || *pp != 0) {
      if (*p == 0 || *pp == 0 || *p == *pp)
        throw std::invalid_argument("single-pair mode needs distinct -p and --pprime");
      KbszPair pair;
      pair.p = static_cast<std::uint32_t>(*p);
      pair.pp = static_cast<std::uint32_t>(*pp);
      pair.value = kbsz_correlation(f, *p, *pp, *N);
      r.max_abs = std::abs(pair.value);
      r.argmax_p = pair.p;
      r.argmax_pp = pair.pp;
      r.pairs.push_back(pair);
    } else {
      r = kbsz_scan(f, *lo, *hi, *N);
    }
    if (o.format == "csv")
      emit(o, out, [&](std::ostream& os) { write_kbsz_csv(os, r, o.seed); });
    else
      emit_json(o, out, kbsz_json(r, o.seed));
  });
}

void setup_classify(CLI::App& app, CommonOpts& o, std::ostream& out) {
  auto cmd = app.add_subcommand("classify", "almost-periodic vs KBSZ dichotomy probe");
  add_common(cmd, o);
  auto p = std::make_shared<std::uint64_t>(5);
  auto pp = std::make_shared<std::uint64_t>(2);
  auto params = std::make_shared<ClassifyParams>();
  cmd->add_option("-p", *p, "first prime");
  cmd->add_option("--pprime", *pp, "second prime");
  cmd->add_option("--plateau-theta", params->plateau_theta, "plateau threshold");
  cmd->add_option("--growth-fraction", params->growth_fraction, "growth threshold factor");
  cmd->add_option("--kbsz-threshold", params->kbsz_threshold, "scan maximum for kbsz-like");
  cmd->add_option("-L,--series-L", params->L, "series length (0: largest safe)");
  cmd->add_option("--scan-N", params->scan_N, "KBSZ scan average length");
  cmd->add_option("--approx-eps", params->approx_eps, "quotient approximant epsilon");
  cmd->add_option("--approx-L", params->approx_L, "quotient approximant range exponent");
  cmd->callback([&, p, pp, params] {
    DigitalSequence f = load_spec(o);
    params->seed = o.seed;
    DichotomyReport rep = classify(f, *p, *pp, *params);
    nlohmann::ordered_json j = report_json(rep, o.seed);
    j["thresholds"] = {{"plateau_theta", params->plateau_theta},
                       {"growth_fraction", params->growth_fraction},
                       {"kbsz_threshold", params->kbsz_threshold},
                       {"scan_N", params->scan_N},
                       {"approx_eps", params->approx_eps},
                       {"approx_L", params->approx_L}};
    emit_json(o, out, j);
    if (!o.out_path.empty()) {
      std::ofstream cs(o.out_path + ".series.csv", std::ios::binary);
      if (!cs)
        throw std::invalid_argument("cannot open output file: " + o.out_path + ".series.csv");
      write_lambda_profile_csv(cs, rep.series, o.seed);
    }
  });
}

void setup_approx(CLI::App& app, CommonOpts& o, std::ostream& out) {
  auto cmd = app.add_subcommand("approx", "periodic approximant of a sequence's phase");
  add_common(cmd, o);
  auto eps = std::make_shared<double>(0.05);
  auto L = std::make_shared<int>(16);
  auto probe = std::make_shared<int>(0);
  auto horizon = std::make_shared<int>(-1);
  cmd->add_option("--eps", *eps, "tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("-L", *L, "test range [0, q^L)")->check(CLI::Range(1, 62));
  cmd->add_option("--probe-width", *probe, "max probed interval width (default 2r+2)");
  cmd->add_option("--horizon", *horizon, "largest K tried (default L minus window)");
  cmd->callback([&, eps, L, probe, horizon] {
    DigitalSequence f = load_spec(o);
    ApproxOptions ao;
    ao.probe_width = *probe;
    ao.horizon = *horizon;
    ao.seed = o.seed;
    std::optional<PeriodicApprox> a = periodic_approx(f, *eps, *L, ao);
    if (!a) {
      out << "not-almost-periodic: no calm tail below the horizon\n";
      return;
    }
    out << "K=" << a->K << " M=" << a->M << " period=" << a->table.size()
        << " fraction_exceeding=" << fmt_double(a->fraction_exceeding)
        << " tested_range=" << a->tested_range << '\n';
    if (!o.out_path.empty()) {
      if (o.format == "csv")
        emit(o, out, [&](std::ostream& s) { write_approx_csv(s, *a, o.seed); });
      else
        emit_json(o, out, approx_json(*a, o.seed));
    }
  });
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"base-q digital sequence laboratory"};
  app.require_subcommand(1);
  CommonOpts o;
  setup_eval(app, o, out);
  setup_verify(app, o, out);
  setup_lambda(app, o, out);
  setup_mobius(app, o, out);
  setup_kbsz(app, o, out);
  setup_classify(app, o, out);
  setup_approx(app, o, out);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const SpecParseError& e) {
    err << "spec error: " << e.what() << '\n';
    return 2;
  } catch (const CapError& e) {
    err << "resource cap: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace qseqlab
