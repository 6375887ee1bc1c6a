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

// JSON (de)serialization for datasets, likelihood fixtures, priors and
// certification reports.

#ifndef RBCERT_IO_HPP_
#define RBCERT_IO_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rbcert/certify.hpp"
#include "rbcert/mle.hpp"

namespace rbcert::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kDatasetSchema = "rbcert-dataset-v1";
inline constexpr const char* kLikelihoodSchema = "rbcert-likelihoods-v1";
inline constexpr const char* kPriorSchema = "rbcert-prior-v1";
inline constexpr const char* kReportSchema = "rbcert-report-v1";

/// Extended-precision values are stored as decimal strings at this many
/// significant digits.
inline constexpr int kStoredDigits = 80;

Json read_json(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_atomic(const std::filesystem::path& path, const Json& value);

Json matrix_to_json(const quantum::Matrix& m);
quantum::Matrix matrix_from_json(const Json& j);

Json dataset_to_json(const mle::Dataset& dataset, const Json& provenance = Json::object());

struct LoadedDataset {
  mle::Dataset dataset;
  Json provenance = Json::object();
};

/// Throws ParseError for schema or shape violations.
LoadedDataset dataset_from_json(const Json& j);

struct LikelihoodFixture {
  int d_min = 2;
  std::vector<xprec::BigLog> likelihoods;
  certify::KappaKind kappa_kind = certify::KappaKind::kFullState;
  std::optional<quantum::Count> total_copies;
};

/// True when the document declares the likelihood-fixture schema.
bool is_likelihood_fixture(const Json& j);
LikelihoodFixture fixture_from_json(const Json& j);
Json fixture_to_json(const LikelihoodFixture& fixture);

/// {"d_min": 2, "weights": [...]} with numbers or decimal strings.
certify::Prior prior_from_json(const Json& j, const std::string& label);

Json report_to_json(const certify::CertificationReport& report,
                    const Json& provenance = Json::object());

}  // namespace rbcert::io

#endif  // RBCERT_IO_HPP_
