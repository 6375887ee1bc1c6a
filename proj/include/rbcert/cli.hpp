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

// The `rbcert` command line. Each subcommand is also callable in-process
// with a plain options struct; all of them return the process exit code.
//
// Exit codes: 0 success (certify: a dimension was certified), 2 certify
// found no plausible dimension, 1 any error.

#ifndef RBCERT_CLI_HPP_
#define RBCERT_CLI_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbcert/io.hpp"
#include "rbcert/quantum.hpp"

namespace rbcert::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoDimension = 2;

inline constexpr int kDefaultDigits = 64;
inline constexpr const char* kDigitsEnv = "RBCERT_PRECISION_DIGITS";

struct SimulateTemporalOptions {
  int mode_index = 1;
  int bases = 11;
  quantum::Count copies = 10000;
  int dmax = 10;
  double dark_rate = 0.0;
  std::uint64_t seed = 0;
  std::string output;
};

struct SimulatePolarimetryOptions {
  std::string source = "tmsv";
  double squeezing_db = 0.0;
  double eta = 0.9;
  int n0 = 8;
  quantum::Count copies = 1000000;
  std::optional<int> cutoff;
  std::uint64_t seed = 0;
  std::string output;
};

struct CertifyOptions {
  std::string input;
  /// "uniform", "gaussian:<center>" or "file:<path>".
  std::string prior = "uniform";
  std::vector<int> deltas = {0, 1, 2};
  int d_min = 2;
  std::optional<int> d_max;
  std::optional<double> bias_threshold;
  std::optional<int> restarts;
  int max_iterations = 5000;
  double tolerance = 1e-10;
  /// Required whenever the fit uses random restarts.
  std::optional<std::uint64_t> seed;
  std::string output;
  /// Text table path; defaults to the report path with a .txt extension.
  std::optional<std::string> table;
  std::optional<int> digits;
};

struct ReportOptions {
  std::string input;
  std::optional<int> digits;
  /// CSV files are <prefix>_loglik.csv, <prefix>_rb.csv and
  /// <prefix>_credibility.csv; the default prefix is the input path without
  /// its extension.
  std::optional<std::string> csv_prefix;
  std::optional<std::string> output;
};

int cmd_simulate_temporal(const SimulateTemporalOptions& options, std::ostream& out);
int cmd_simulate_polarimetry(const SimulatePolarimetryOptions& options, std::ostream& out);
int cmd_certify(const CertifyOptions& options, std::ostream& out);
int cmd_report(const ReportOptions& options, std::ostream& out);

/// Mantissa digits for display: the explicit value if given, else the
/// environment override, else the fallback. Throws DomainError outside
/// [1, 80].
int display_digits(std::optional<int> explicit_digits, int fallback = kDefaultDigits);

/// Aligned text rendering of a report document.
std::string render_report_table(const io::Json& report, int digits);

/// Full argument parsing and dispatch. Errors are printed to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rbcert::cli

#endif  // RBCERT_CLI_HPP_
