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


#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "rbcert/error.hpp"
#include "rbcert/io.hpp"
#include "rbcert/simulate.hpp"

using namespace rbcert;
using namespace rbcert::io;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "rbcert_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("povm dataset round trip") {
  simulate::SimConfig c;
  c.seed = 3;
  c.copies_per_basis = 50;
  c.num_bases = 2;
  c.dim_max = 3;
  const mle::Dataset ds = simulate::simulate_temporal(1, c);
  const Json prov = {{"generator", "temporal"}, {"mode_index", 1}};
  const Json j = dataset_to_json(ds, prov);
  CHECK(j.at("schema") == kDatasetSchema);
  CHECK(j.at("kind") == "povm");
  const auto back = dataset_from_json(j);
  const auto& a = std::get<quantum::MeasurementDataset>(ds);
  const auto& b = std::get<quantum::MeasurementDataset>(back.dataset);
  REQUIRE(b.bases().size() == 2);
  CHECK(b.bases()[1].counts == a.bases()[1].counts);
  CHECK(b.bases()[0].basis.elements()[2].matrix() == a.bases()[0].basis.elements()[2].matrix());
  CHECK(back.provenance.at("mode_index") == 1);
}

TEST_CASE("diagonal dataset round trip") {
  const quantum::DiagonalDataset d(Eigen::MatrixXd::Identity(3, 3), {1, 2, 3}, {1, 2, 2}, 2);
  const auto back = dataset_from_json(dataset_to_json(d));
  const auto& b = std::get<quantum::DiagonalDataset>(back.dataset);
  CHECK(b.dim_max() == 2);
  CHECK(b.column_levels() == std::vector<int>{1, 2, 2});
  CHECK(b.counts() == std::vector<quantum::Count>{1, 2, 3});
}

TEST_CASE("malformed datasets are parse errors") {
  CHECK_THROWS_AS(dataset_from_json(Json::parse(R"({"schema":"other"})")), ParseError);
  CHECK_THROWS_AS(dataset_from_json(Json::parse(R"({"schema":"rbcert-dataset-v1","kind":"povm","dim_max":2})")),
                  ParseError);
  CHECK_THROWS_AS(dataset_from_json(Json::parse(
                      R"({"schema":"rbcert-dataset-v1","kind":"diagonal","dim_max":2,"response":[[1,0],[0]],"counts":[1,1]})")),
                  ParseError);
  CHECK_THROWS_AS(dataset_from_json(Json::parse(R"({"schema":"rbcert-dataset-v1","kind":"cube","dim_max":2})")),
                  ParseError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1, 2]]")), ParseError);
  CHECK_THROWS_AS(read_json(scratch("missing.json")), ParseError);
}

TEST_CASE("likelihood fixtures and priors") {
  const Json j = read_json(std::string(RBCERT_FIXTURE_DIR) + "/table3.json");
  CHECK(is_likelihood_fixture(j));
  const auto f = fixture_from_json(j);
  CHECK(f.d_min == 2);
  CHECK(f.likelihoods.size() == 8);
  const auto again = fixture_from_json(fixture_to_json(f));
  for (std::size_t i = 0; i < 8; ++i) CHECK(again.likelihoods[i] == f.likelihoods[i]);
  CHECK_THROWS_AS(fixture_from_json(Json::parse(R"({"schema":"rbcert-likelihoods-v1","likelihoods":["-1e-3","1"]})")),
                  DomainError);

  const auto prior = prior_from_json(Json::parse(R"({"d_min":2,"weights":[1, "3", 4]})"), "file:x");
  CHECK(prior.d_max() == 4);
  CHECK(prior.weight(3) == xprec::Decimal("0.375"));
}

TEST_CASE("atomic writes replace the target") {
  const auto p = scratch("atomic.json");
  write_json_atomic(p, Json{{"a", 1}});
  write_json_atomic(p, Json{{"a", 2}});
  CHECK(read_json(p).at("a") == 2);
  int leftovers = 0;
  for (const auto& e : std::filesystem::directory_iterator(p.parent_path())) {
    if (e.path().string().find(".tmp.") != std::string::npos) ++leftovers;
  }
  CHECK(leftovers == 0);
}

TEST_CASE("report serialization keeps 80-digit strings and nulls") {
  const Json j = read_json(std::string(RBCERT_FIXTURE_DIR) + "/table1.json");
  const auto f = fixture_from_json(j);
  const auto report = certify::build_report_from_likelihoods(f.likelihoods, certify::Prior::uniform(2, 10));
  const Json r = report_to_json(report);
  CHECK(r.at("d_rb") == 5);
  const std::string l2 = r.at("dimensions")[0].at("likelihood");
  CHECK(l2.starts_with("1.910200961849743785030610224731732032006327450641135205959787153"));
  CHECK(l2.size() == std::string("1.").size() + 79 + std::string("e-149752").size());
  CHECK(r.at("information_criteria").at("bic").is_null());
  CHECK(r.at("information_criteria").at("log_base") == "natural");
  CHECK(r.at("estimator").is_null());
}
