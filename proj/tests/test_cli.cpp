// Copyright 2026 The rbcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rbcert/cli.hpp"
#include "rbcert/error.hpp"

using namespace rbcert;
using namespace rbcert::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "rbcert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path workdir() {
  const auto dir = fs::temp_directory_path() / "rbcert_test_cli";
  fs::create_directories(dir);
  return dir;
}

std::string fixture(const char* name) { return std::string(RBCERT_FIXTURE_DIR) + "/" + name; }

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(invoke({}).code == kExitError);
  CHECK(invoke({"simulate", "temporal", "--mode-index", "1", "--seed", "7"}).code == kExitError);
  CHECK(invoke({"simulate", "temporal", "--mode-index", "1", "-o", "x.json"}).code == kExitError);
  CHECK(invoke({"bogus"}).code == kExitError);
  CHECK(invoke({"--help"}).code == kExitSuccess);
}

TEST_CASE("simulate temporal writes the requested bases") {
  const auto path = (workdir() / "d.json").string();
  const auto r = invoke({"simulate", "temporal", "--mode-index", "1", "--bases", "11", "--copies",
                         "10000", "--dmax", "10", "--seed", "7", "-o", path});
  REQUIRE(r.code == kExitSuccess);
  const auto j = io::read_json(path);
  CHECK(j.at("bases").size() == 11);
  CHECK(j.at("provenance").at("seed") == 7);
  std::ifstream a(path);
  const std::string first((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  REQUIRE(invoke({"simulate", "temporal", "--mode-index", "1", "--bases", "11", "--copies", "10000",
                  "--dmax", "10", "--seed", "7", "-o", path})
              .code == kExitSuccess);
  std::ifstream b(path);
  const std::string second((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(first == second);
}

TEST_CASE("simulate polarimetry writes a diagonal dataset") {
  const auto path = (workdir() / "p.json").string();
  const auto r = invoke({"simulate", "polarimetry", "--source", "tmsv", "--squeezing-db", "2.12",
                         "--eta", "0.9", "--n0", "8", "--copies", "1000000", "--seed", "1", "-o", path});
  REQUIRE(r.code == kExitSuccess);
  CHECK(r.out.find("tail mass") != std::string::npos);
  const auto j = io::read_json(path);
  CHECK(j.at("kind") == "diagonal");
  CHECK(j.at("dim_max") == 9);
  CHECK(invoke({"simulate", "polarimetry", "--source", "laser", "--squeezing-db", "1", "--seed",
                "1", "-o", path})
            .code == kExitError);
}

TEST_CASE("certify a likelihood fixture and render the report") {
  const auto report = (workdir() / "t2.json").string();
  const auto r = invoke({"certify", fixture("table2.json"), "--prior", "uniform", "-o", report});
  REQUIRE(r.code == kExitSuccess);
  const auto j = io::read_json(report);
  CHECK(j.at("d_rb") == 5);
  for (int i = 3; i < 8; ++i) {
    CHECK(xprec::render_decimal(xprec::parse_decimal(j.at("dimensions")[i].at("posterior").get<std::string>()), 40) ==
          "2.000000000000000000000000000000000000000e-1");
  }
  CHECK(fs::exists(workdir() / "t2.txt"));

  const auto t1 = (workdir() / "t1.json").string();
  REQUIRE(invoke({"certify", fixture("table1.json"), "--prior", "gaussian:2", "-o", t1}).code == kExitSuccess);
  const auto rep = invoke({"report", t1, "--digits", "64", "--csv-prefix", (workdir() / "t1").string()});
  REQUIRE(rep.code == kExitSuccess);
  const auto table = io::read_json(fixture("table1.json"));
  for (const auto& l : table.at("likelihoods")) {
    CHECK(rep.out.find(l.get<std::string>()) != std::string::npos);
  }
  const auto csv = lines_of(workdir() / "t1_loglik.csv");
  CHECK(csv.size() == 1 + 9);
  CHECK(lines_of(workdir() / "t1_rb.csv").size() == 1 + 9);
  CHECK(lines_of(workdir() / "t1_credibility.csv").size() == 1 + 3);

  const auto short_rep = invoke({"report", t1, "--digits", "3", "--csv-prefix", (workdir() / "t1s").string()});
  CHECK(short_rep.out.find("1.91e-149752") != std::string::npos);
  CHECK(invoke({"report", t1, "--digits", "81"}).code == kExitError);
  CHECK(invoke({"report", (workdir() / "nope.json").string()}).code == kExitError);
}

TEST_CASE("display digits honour the environment override") {
  ::setenv(kDigitsEnv, "5", 1);
  CHECK(display_digits(std::nullopt) == 5);
  CHECK(display_digits(7) == 7);
  ::setenv(kDigitsEnv, "x", 1);
  CHECK_THROWS_AS(display_digits(std::nullopt), DomainError);
  ::unsetenv(kDigitsEnv);
  CHECK(display_digits(std::nullopt) == kDefaultDigits);
}

TEST_CASE("certify error paths") {
  const auto zeros = workdir() / "zeros.json";
  std::ofstream(zeros) << R"({"schema":"rbcert-likelihoods-v1","d_min":2,"likelihoods":["0","0","0"]})";
  CHECK(invoke({"certify", zeros.string(), "-o", (workdir() / "z.json").string()}).code == kExitError);

  const auto flat = workdir() / "flat.json";
  std::ofstream(flat) << R"({"schema":"rbcert-likelihoods-v1","d_min":2,"likelihoods":["1e-9","1e-9","1e-9"]})";
  CHECK(invoke({"certify", flat.string(), "-o", (workdir() / "f.json").string()}).code == kExitNoDimension);

  const auto garbage = workdir() / "garbage.json";
  std::ofstream(garbage) << "{not json";
  CHECK(invoke({"certify", garbage.string(), "-o", (workdir() / "g.json").string()}).code == kExitError);

  const auto prior_file = workdir() / "prior.json";
  std::ofstream(prior_file) << R"({"d_min":2,"weights":[1,1,1,1,1,1,1,2]})";
  const auto pf = invoke({"certify", fixture("table3.json"), "--prior", "file:" + prior_file.string(), "-o",
                          (workdir() / "pf.json").string()});
  CHECK(pf.code == kExitSuccess);
  CHECK(invoke({"certify", fixture("table3.json"), "--prior", "gaussian:", "-o", (workdir() / "x.json").string()})
            .code == kExitError);
}

TEST_CASE("certify a simulated dataset end to end") {
  const auto data = (workdir() / "sim.json").string();
  REQUIRE(invoke({"simulate", "temporal", "--mode-index", "2", "--bases", "5", "--copies", "100000", "--dmax", "6",
                  "--seed", "3", "-o", data})
              .code == kExitSuccess);
  const auto out = (workdir() / "sim_report.json").string();
  // Random restarts need a seed.
  CHECK(invoke({"certify", data, "--bias-threshold", "0.01", "-o", out}).code == kExitError);
  const auto r = invoke({"certify", data, "--bias-threshold", "0.01", "--seed", "5", "-o", out});
  REQUIRE(r.code == kExitSuccess);
  const auto j = io::read_json(out);
  CHECK(j.at("d_rb") == 3);
  CHECK(j.at("fidelity").at("kind") == "uhlmann");
  CHECK(j.at("fidelity").at("value").get<double>() > 0.99);
  CHECK(j.at("estimator").at("dim") == 3);
  CHECK(j.at("information_criteria").at("bic").at("d") == 3);
  CHECK(invoke({"report", out, "--csv-prefix", (workdir() / "sim").string()}).code == kExitSuccess);
  CHECK(invoke({"certify", data, "--dmax", "7", "-o", out}).code == kExitError);
}
