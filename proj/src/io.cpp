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

#include "rbcert/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "rbcert/error.hpp"

namespace rbcert::io {
namespace {

using xprec::BigLog;
using xprec::Decimal;

std::string stored(const BigLog& x) { return xprec::render_decimal(x, kStoredDigits); }

std::string stored(const Decimal& x) {
  return x.str(kStoredDigits, std::ios_base::scientific);
}

// JSON has no infinities; -inf log-likelihoods become null.
Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

template <class T>
T get_as(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("field '") + what + "' has the wrong type");
  }
}

std::vector<quantum::Count> counts_from_json(const Json& j) {
  auto counts = get_as<std::vector<quantum::Count>>(j, "counts");
  for (auto n : counts) {
    if (n < 0) throw ParseError("negative count");
  }
  return counts;
}

Json povm_to_json(const quantum::MeasurementDataset& ds) {
  Json bases = Json::array();
  for (const auto& b : ds.bases()) {
    Json elements = Json::array();
    for (const auto& e : b.basis.elements()) elements.push_back(matrix_to_json(e.matrix()));
    bases.push_back({{"elements", elements}, {"counts", b.counts}});
  }
  return bases;
}

Json diagonal_response_to_json(const Eigen::MatrixXd& r) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < r.cols(); ++c) row.push_back(r(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

void write_json_atomic(const std::filesystem::path& path, const Json& value) {
  write_text_atomic(path, value.dump(1) + "\n");
}

Json matrix_to_json(const quantum::Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(Json::array({m(i, c).real(), m(i, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

quantum::Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  quantum::Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ParseError("matrix must be square");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      const Json& z = row[static_cast<std::size_t>(c)];
      if (z.is_number()) {
        m(i, c) = z.get<double>();
      } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
        m(i, c) = quantum::Complex(z[0].get<double>(), z[1].get<double>());
      } else {
        throw ParseError("matrix entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

Json dataset_to_json(const mle::Dataset& dataset, const Json& provenance) {
  Json j;
  j["schema"] = kDatasetSchema;
  if (const auto* povm = std::get_if<quantum::MeasurementDataset>(&dataset)) {
    j["kind"] = "povm";
    j["dim_max"] = povm->dim_max();
    j["bases"] = povm_to_json(*povm);
  } else {
    const auto& diag = std::get<quantum::DiagonalDataset>(dataset);
    j["kind"] = "diagonal";
    j["dim_max"] = diag.dim_max();
    j["response"] = diagonal_response_to_json(diag.response());
    j["counts"] = diag.counts();
    j["column_levels"] = diag.column_levels();
  }
  j["provenance"] = provenance;
  return j;
}

LoadedDataset dataset_from_json(const Json& j) {
  if (!j.is_object() || j.value("schema", "") != std::string(kDatasetSchema)) {
    throw ParseError(std::string("expected schema '") + kDatasetSchema + "'");
  }
  const auto kind = get_as<std::string>(require(j, "kind"), "kind");
  const int dim_max = get_as<int>(require(j, "dim_max"), "dim_max");
  Json provenance = j.contains("provenance") ? j.at("provenance") : Json::object();
  try {
    if (kind == "povm") {
      const Json& bases = require(j, "bases");
      if (!bases.is_array() || bases.empty()) throw ParseError("'bases' must be a nonempty array");
      std::vector<quantum::BasisCounts> out;
      for (const auto& b : bases) {
        std::vector<quantum::HermitianOperator> elements;
        for (const auto& e : require(b, "elements")) elements.emplace_back(matrix_from_json(e));
        out.push_back({quantum::PovmBasis(std::move(elements)), counts_from_json(require(b, "counts"))});
      }
      return {quantum::MeasurementDataset(dim_max, std::move(out)), std::move(provenance)};
    }
    if (kind == "diagonal") {
      const auto rows = get_as<std::vector<std::vector<double>>>(require(j, "response"), "response");
      if (rows.empty() || rows.front().empty()) throw ParseError("empty response matrix");
      Eigen::MatrixXd response(rows.size(), rows.front().size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw ParseError("ragged response matrix");
        for (std::size_t c = 0; c < rows[i].size(); ++c) {
          response(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
        }
      }
      std::vector<int> levels;
      if (j.contains("column_levels")) {
        levels = get_as<std::vector<int>>(j.at("column_levels"), "column_levels");
      }
      return {quantum::DiagonalDataset(std::move(response), counts_from_json(require(j, "counts")),
                                       std::move(levels), dim_max),
              std::move(provenance)};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed dataset: ") + e.what());
  }
  throw ParseError("unknown dataset kind '" + kind + "'");
}

bool is_likelihood_fixture(const Json& j) {
  return j.is_object() && j.value("schema", "") == std::string(kLikelihoodSchema);
}

LikelihoodFixture fixture_from_json(const Json& j) {
  if (!is_likelihood_fixture(j)) {
    throw ParseError(std::string("expected schema '") + kLikelihoodSchema + "'");
  }
  LikelihoodFixture f;
  f.d_min = j.contains("d_min") ? get_as<int>(j.at("d_min"), "d_min") : 2;
  for (const auto& s : require(j, "likelihoods")) {
    if (!s.is_string()) throw ParseError("likelihoods must be decimal strings");
    f.likelihoods.push_back(xprec::parse_decimal(s.get<std::string>()));
  }
  if (f.likelihoods.size() < 2) throw ParseError("a fixture needs at least two likelihoods");
  if (j.contains("kappa_kind")) {
    f.kappa_kind = certify::kappa_kind_from_string(get_as<std::string>(j.at("kappa_kind"), "kappa_kind"));
  }
  if (j.contains("total_copies")) {
    f.total_copies = get_as<quantum::Count>(j.at("total_copies"), "total_copies");
  }
  return f;
}

Json fixture_to_json(const LikelihoodFixture& fixture) {
  Json j;
  j["schema"] = kLikelihoodSchema;
  j["d_min"] = fixture.d_min;
  Json ls = Json::array();
  for (const auto& l : fixture.likelihoods) ls.push_back(stored(l));
  j["likelihoods"] = ls;
  j["kappa_kind"] = certify::to_string(fixture.kappa_kind);
  if (fixture.total_copies) j["total_copies"] = *fixture.total_copies;
  return j;
}

certify::Prior prior_from_json(const Json& j, const std::string& label) {
  const int d_min = j.contains("d_min") ? get_as<int>(j.at("d_min"), "d_min") : 2;
  std::vector<Decimal> weights;
  for (const auto& w : require(j, "weights")) {
    if (w.is_number()) {
      weights.emplace_back(w.get<double>());
    } else if (w.is_string()) {
      weights.push_back(xprec::parse_decimal(w.get<std::string>()).to_decimal());
    } else {
      throw ParseError("prior weights must be numbers or decimal strings");
    }
  }
  return certify::Prior::from_weights(d_min, std::move(weights), label);
}

Json report_to_json(const certify::CertificationReport& report, const Json& provenance) {
  Json j;
  j["schema"] = kReportSchema;
  j["d_min"] = report.d_min();
  j["d_max"] = report.d_max();
  j["d_rb"] = report.d_rb ? Json(*report.d_rb) : Json(nullptr);
  j["warning"] = report.warning;

  Json weights = Json::array();
  for (const auto& w : report.prior_weights) weights.push_back(stored(w));
  j["prior"] = {{"label", report.prior_label}, {"weights", weights}};

  const auto& ev = report.evidence;
  Json dims = Json::array();
  for (std::size_t i = 0; i < ev.likelihoods.size(); ++i) {
    const auto& l = ev.likelihoods[i];
    Json row;
    row["d"] = ev.d_min + static_cast<int>(i);
    row["likelihood"] = stored(l);
    row["log10_likelihood"] = l.is_zero() ? Json(nullptr) : Json(stored(l.log10_magnitude()));
    row["log_likelihood_nat"] = finite_or_null(report.log_likelihoods_nat.at(i));
    const bool have_posterior = i < ev.posteriors.size();
    row["posterior"] = have_posterior ? Json(stored(ev.posteriors[i])) : Json(nullptr);
    row["rb_ratio"] = have_posterior ? Json(stored(ev.rb_ratios[i])) : Json(nullptr);
    row["plausible"] = have_posterior && certify::is_plausible(ev.rb_ratios[i]);
    dims.push_back(std::move(row));
  }
  j["dimensions"] = dims;

  Json intervals = Json::array();
  for (const auto& iv : report.intervals) {
    intervals.push_back({{"delta", iv.delta},
                         {"d_low", *report.d_rb},
                         {"d_high", *report.d_rb + iv.delta},
                         {"credibility", stored(iv.credibility)}});
  }
  j["intervals"] = intervals;

  Json ic;
  ic["kappa_kind"] = certify::to_string(report.kappa_kind);
  ic["log_base"] = "natural";
  ic["aic"] = report.d_aic ? Json{{"alpha", report.alpha_aic}, {"d", *report.d_aic}} : Json(nullptr);
  ic["bic"] = report.d_bic ? Json{{"alpha", *report.alpha_bic}, {"d", *report.d_bic}} : Json(nullptr);
  j["information_criteria"] = ic;
  j["total_copies"] = report.total_copies ? Json(*report.total_copies) : Json(nullptr);

  Json solver = Json::array();
  for (const auto& s : report.solver) {
    solver.push_back({{"d", s.d},
                      {"log_likelihood_nat", finite_or_null(s.log_likelihood_nat)},
                      {"iterations", s.iterations},
                      {"converged", s.converged},
                      {"padded_from_lower_dim", s.padded_from_lower_dim},
                      {"feasible", s.feasible}});
  }
  j["solver"] = solver;
  j["estimator"] = report.estimator
                       ? Json{{"dim", report.estimator->dim()},
                              {"matrix", matrix_to_json(report.estimator->matrix())}}
                       : Json(nullptr);
  j["fidelity"] = report.fidelity
                      ? Json{{"kind", report.fidelity->kind}, {"value", report.fidelity->value}}
                      : Json(nullptr);
  j["provenance"] = provenance;
  return j;
}

}  // namespace rbcert::io
