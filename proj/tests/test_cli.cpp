#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qseqlab/cli.hpp"

using namespace qseqlab;

namespace {

const char* kTm = R"({"base":2,"kind":"digit_sum","alpha":{"num":1,"den":2}})";
const char* kRs = R"({"base":2,"kind":"block","pattern":"11","alpha":{"num":1,"den":2}})";
const char* kOne = R"({"base":2,"kind":"linear","alpha":{"num":0,"den":1}})";
const char* kLin13 = R"({"base":2,"kind":"linear","alpha":{"num":1,"den":3}})";

struct RunResult {
  int code = 0;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = run_command(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("eval emits exact rational phases") {
  RunResult r = run({"eval", "--json", kTm, "--range", "0:8"});
  REQUIRE(r.code == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 10);
  CHECK(lines[0] == "# seed=0");
  CHECK(lines[1] == "n,phase,re,im");
  const char* phases[8] = {"0", "1/2", "1/2", "0", "1/2", "0", "0", "1/2"};
  for (int n = 0; n < 8; ++n) {
    std::string prefix = std::to_string(n) + "," + phases[n] + ",";
    CHECK(lines[static_cast<std::size_t>(n + 2)].substr(0, prefix.size()) == prefix);
  }

  RunResult rs = run({"eval", "--json", kRs, "-n", "3"});
  REQUIRE(rs.code == 0);
  CHECK(lines_of(rs.out)[2].substr(0, 6) == "3,1/2,");

  RunResult one = run({"eval", "--json", kOne, "-n", "0", "5", "999"});
  REQUIRE(one.code == 0);
  for (std::size_t i = 2; i < 5; ++i) {
    auto l = lines_of(one.out)[i];
    CHECK(l.find(",0,1,0") != std::string::npos);
  }
}

TEST_CASE("eval json format carries rational phases and the seed") {
  RunResult r = run({"eval", "--json", kTm, "-n", "0", "1", "--format", "json", "--seed", "7"});
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["seed"] == 7);
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["phase"]["num"] == 0);
  CHECK(j["rows"][0]["phase"]["den"] == 1);
  CHECK(j["rows"][1]["phase"]["num"] == 1);
  CHECK(j["rows"][1]["phase"]["den"] == 2);
}

TEST_CASE("exit codes") {
  // Usage problems: unknown command, missing spec, exclusive flags, bad range.
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"eval", "-n", "0"}).code == 1);
  CHECK(run({"eval", "--json", kTm}).code == 1);  // no -n / --range
  CHECK(run({"eval", "--json", kTm, "--range", "8:2"}).code == 1);
  CHECK(run({"eval", "--json", kTm, "-n", "0", "--threads", "2000"}).code == 1);
  CHECK(run({"--help"}).code == 0);

  // Spec parse errors.
  RunResult bad = run({"eval", "--json", "{broken", "-n", "0"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("spec error") != std::string::npos);
  CHECK(run({"eval", "--spec", "no_such_spec_file.json", "-n", "0"}).code == 2);
  CHECK(run({"eval", "--json", R"({"base":2,"kind":"nope"})", "-n", "0"}).code == 2);

  // Resource caps.
  RunResult cap = run({"mobius", "--json", kOne, "-N", "3000000000"});
  CHECK(cap.code == 3);
  CHECK(cap.err.find("resource cap") != std::string::npos);
}

TEST_CASE("mobius command output is exact for f = 1") {
  RunResult r = run({"mobius", "--json", kOne, "-N", "10"});
  REQUIRE(r.code == 0);
  CHECK(r.out ==
        "# seed=0\n"
        "checkpoint_N,re,im,abs\n"
        "2,0.5,0,0.5\n"
        "4,-0.25,0,0.25\n"
        "8,-0.25,0,0.25\n"
        "10,-0.2,0,0.2\n");

  // Explicit checkpoints and thread counts leave the bytes unchanged.
  RunResult t4 = run({"mobius", "--json", kOne, "-N", "10", "--threads", "4"});
  CHECK(t4.out == r.out);
  RunResult ck = run({"mobius", "--json", kOne, "-N", "10", "--checkpoint", "5",
                      "--checkpoint", "10"});
  REQUIRE(ck.code == 0);
  CHECK(lines_of(ck.out)[2].substr(0, 2) == "5,");
}

TEST_CASE("kbsz command: exact pair and scan table") {
  RunResult pair = run({"kbsz", "--json", kLin13, "-p", "5", "--pprime", "2", "-N", "1000"});
  REQUIRE(pair.code == 0);
  auto lines = lines_of(pair.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[1] == "p,pprime,re,im,abs");
  CHECK(lines[2] == "5,2,1,0,1");

  RunResult scan = run({"kbsz", "--json", kRs, "--prime-lo", "3", "--prime-hi", "8", "-N",
                        "4096"});
  REQUIRE(scan.code == 0);
  CHECK(lines_of(scan.out).size() == 2 + 3);  // (3,5) (3,7) (5,7)

  CHECK(run({"kbsz", "--json", kRs, "-p", "5", "--pprime", "5"}).code == 1);
}

TEST_CASE("verify command reports pass and fail") {
  RunResult tm = run({"verify", "--json", kTm, "--class", "M", "-N", "4096"});
  REQUIRE(tm.code == 0);
  CHECK(tm.out.substr(0, 5) == "pass ");
  CHECK(tm.out.find("violations=0") != std::string::npos);

  RunResult rs = run({"verify", "--json", kRs, "--class", "M", "--gap", "0", "-N", "4096"});
  REQUIRE(rs.code == 0);  // violations are data, not errors
  CHECK(rs.out.substr(0, 5) == "fail ");

  RunResult sm = run({"verify", "--json", kRs, "--class", "SM", "-N", "4096"});
  CHECK(sm.out.substr(0, 5) == "pass ");
}

TEST_CASE("lambda command: explicit intervals and series") {
  RunResult iv = run({"lambda", "--json", kTm, "--interval", "0:1", "--interval", "2:4"});
  REQUIRE(iv.code == 0);
  auto lines = lines_of(iv.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[1] == "interval_lo,interval_hi,lambda,lambda_bar,partial_bar_sum,method,ci_halfwidth");
  CHECK(lines[2].substr(0, 8) == "0,1,inf,");
  CHECK(lines[3].substr(0, 8) == "2,4,inf,");

  RunResult series = run({"lambda", "--json", kOne, "--series-L", "10"});
  REQUIRE(series.code == 0);
  CHECK(lines_of(series.out).size() == 2 + 5);

  CHECK(run({"lambda", "--json", kTm}).code == 1);
  CHECK(run({"lambda", "--json", kTm, "--interval", "0:1", "--series-L", "4"}).code == 1);
  CHECK(run({"lambda", "--json", kTm, "--interval", "zap"}).code == 1);
}

TEST_CASE("approx command") {
  RunResult quarter = run({"approx", "--json",
                           R"({"base":2,"kind":"linear","alpha":{"num":1,"den":4}})", "--eps",
                           "0.05", "-L", "16"});
  REQUIRE(quarter.code == 0);
  CHECK(quarter.out ==
        "K=2 M=2 period=4 fraction_exceeding=0 tested_range=65536\n");

  RunResult tm = run({"approx", "--json", kTm, "--eps", "0.1", "-L", "16"});
  REQUIRE(tm.code == 0);  // the signal is data, not an error
  CHECK(tm.out == "not-almost-periodic: no calm tail below the horizon\n");
}

TEST_CASE("classify command emits a full JSON report") {
  RunResult r = run({"classify", "--json", kLin13, "-p", "5", "--pprime", "2"});
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  CHECK(j["seed"] == 0);
  CHECK(j["verdict"] == "almost-periodic-like");
  CHECK(j["alpha"]["num"] == 1);
  CHECK(j["alpha"]["den"] == 3);
  CHECK(j["thresholds"]["kbsz_threshold"] == 0.25);
  CHECK(j.contains("series"));
  CHECK(j.contains("approx"));

  RunResult tm = run({"classify", "--json", kTm, "-p", "3", "--pprime", "5"});
  nlohmann::json tj = nlohmann::json::parse(tm.out);
  CHECK(tj["verdict"] == "kbsz-like");
  CHECK(tj["kbsz_max"].get<double>() < 0.25);

  // Byte-identical rerun for a fixed seed.
  RunResult again = run({"classify", "--json", kTm, "-p", "3", "--pprime", "5"});
  CHECK(again.out == tm.out);
}

TEST_CASE("output files") {
  std::string path = "cli_test_out.csv";
  RunResult r = run({"eval", "--json", kTm, "--range", "0:4", "--out", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::string content = slurp(path);
  CHECK(content.substr(0, 22) == "# seed=0\nn,phase,re,im");
  RunResult again = run({"eval", "--json", kTm, "--range", "0:4", "--out", path});
  CHECK(slurp(path) == content);
  std::remove(path.c_str());

  std::string report = "cli_test_report.json";
  RunResult c = run({"classify", "--json", kLin13, "-p", "5", "--pprime", "2", "--out", report});
  REQUIRE(c.code == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(report));
  CHECK(j["verdict"] == "almost-periodic-like");
  std::string series = slurp(report + ".series.csv");
  CHECK(series.substr(0, 8) == "# seed=0");
  std::remove(report.c_str());
  std::remove((report + ".series.csv").c_str());

  CHECK(run({"eval", "--json", kTm, "-n", "0", "--out", "no_dir/x.csv"}).code == 1);
}

TEST_CASE("spec file input") {
  std::string path = "cli_test_spec.json";
  {
    std::ofstream out(path);
    out << kRs;
  }
  RunResult r = run({"eval", "--spec", path, "-n", "3"});
  REQUIRE(r.code == 0);
  CHECK(lines_of(r.out)[2].substr(0, 6) == "3,1/2,");
  std::remove(path.c_str());
}
