#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "qseqlab/detect.hpp"
#include "qseqlab/lambda.hpp"
#include "qseqlab/sequence.hpp"
#include "qseqlab/sieve.hpp"

namespace qseqlab {

// Shortest decimal text that parses back to the same double. Locale free;
// infinities render as "inf"/"-inf".
std::string fmt_double(double x);

// Every emitted file opens with the run seed so outputs are self-describing.
// CSV gets a "# seed=N" comment line, JSON a "seed" field.

void write_lambda_profile_csv(std::ostream& out, const LambdaProfile& p, std::uint64_t seed);
void write_correlation_csv(std::ostream& out, const CorrelationSeries& s, std::uint64_t seed);
void write_kbsz_csv(std::ostream& out, const KbszScanResult& r, std::uint64_t seed);
void write_approx_csv(std::ostream& out, const PeriodicApprox& a, std::uint64_t seed);
void write_verify_csv(std::ostream& out, const ClassReport& r, std::uint64_t seed);

nlohmann::ordered_json lambda_profile_json(const LambdaProfile& p, std::uint64_t seed);
nlohmann::ordered_json correlation_json(const CorrelationSeries& s, std::uint64_t seed);
nlohmann::ordered_json kbsz_json(const KbszScanResult& r, std::uint64_t seed);
nlohmann::ordered_json approx_json(const PeriodicApprox& a, std::uint64_t seed);
nlohmann::ordered_json verify_json(const ClassReport& r, std::uint64_t seed);
nlohmann::ordered_json report_json(const DichotomyReport& r, std::uint64_t seed);

}  // namespace qseqlab
