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

#include "rbcert/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rbcert/certify.hpp"
#include "rbcert/error.hpp"
#include "rbcert/mle.hpp"
#include "rbcert/polarimetry.hpp"
#include "rbcert/random.hpp"
#include "rbcert/simulate.hpp"

namespace rbcert::cli {
namespace {

namespace fs = std::filesystem;
using io::Json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string table_path_for(const CertifyOptions& o) {
  if (o.table) return *o.table;
  fs::path p(o.output);
  p.replace_extension(".txt");
  return p.string();
}

std::string csv_prefix_for(const ReportOptions& o) {
  if (o.csv_prefix) return *o.csv_prefix;
  fs::path p(o.input);
  p.replace_extension();
  return p.string();
}

certify::Prior prior_for(const std::string& spec, int d_min, int d_max) {
  constexpr std::string_view kFile = "file:";
  if (spec.starts_with(kFile)) {
    const std::string path = spec.substr(kFile.size());
    return io::prior_from_json(io::read_json(path), spec);
  }
  return certify::parse_prior(spec, d_min, d_max);
}

// Reinterprets the diagonal estimator (one entry per active column) as a
// distribution over every column of the dataset.
std::vector<double> spread_over_columns(const quantum::DiagonalDataset& ds, int d,
                                        const quantum::DensityOperator& estimator) {
  std::vector<double> full(static_cast<std::size_t>(ds.response().cols()), 0.0);
  const auto cols = ds.active_columns(d);
  const Eigen::VectorXd diag = estimator.diagonal_entries();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    full[static_cast<std::size_t>(cols[i])] = diag(static_cast<Eigen::Index>(i));
  }
  return full;
}

// Fidelity against the generating state when the provenance identifies one.
std::optional<certify::Fidelity> fidelity_to_truth(const io::LoadedDataset& loaded,
                                                   const certify::CertificationReport& report) {
  if (!report.d_rb || !report.estimator) return std::nullopt;
  const Json& prov = loaded.provenance;
  const std::string generator = prov.value("generator", "");
  if (const auto* povm = std::get_if<quantum::MeasurementDataset>(&loaded.dataset)) {
    if (generator != "temporal" || !prov.contains("mode_index")) return std::nullopt;
    const int n = prov.at("mode_index").get<int>();
    const int dim = povm->dim_max();
    if (n < 0 || n >= dim) return std::nullopt;
    const auto truth = simulate::mode_state(n, dim);
    const auto estimate = quantum::embed(*report.estimator, dim);
    return certify::Fidelity{"uhlmann", quantum::uhlmann_fidelity(estimate, truth)};
  }
  const auto& diag = std::get<quantum::DiagonalDataset>(loaded.dataset);
  if (generator != "polarimetry" || !prov.contains("r") || !prov.contains("cutoff")) {
    return std::nullopt;
  }
  const int cutoff = prov.at("cutoff").get<int>();
  if ((cutoff + 1) * (cutoff + 1) != diag.response().cols()) return std::nullopt;
  const auto dist = polarimetry::source_distribution(
      {polarimetry::SourceKind::kTmsv, prov.at("r").get<double>()}, cutoff);
  std::vector<double> truth;
  for (int m = 0; m <= cutoff; ++m) {
    for (int mp = 0; mp <= cutoff; ++mp) truth.push_back(dist.p(m, mp));
  }
  const auto estimate = spread_over_columns(diag, *report.d_rb, *report.estimator);
  return certify::Fidelity{"bhattacharyya", quantum::bhattacharyya_fidelity(estimate, truth)};
}

Json solver_config_json(const mle::MlConfig& c) {
  Json j;
  j["max_iterations"] = c.max_iterations;
  j["convergence_tol"] = c.convergence_tol;
  j["backtracking_factor"] = c.backtracking_factor;
  j["restarts"] = c.effective_restarts();
  j["bias_threshold"] = c.bias_threshold ? Json(*c.bias_threshold) : Json(nullptr);
  return j;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string rerender(const Json& stored, int digits) {
  if (stored.is_null()) return "-";
  return xprec::render_decimal(xprec::parse_decimal(stored.get<std::string>()), digits);
}

std::string log10_of(const Json& stored) {
  if (stored.is_null()) return "";
  const auto x = xprec::parse_decimal(stored.get<std::string>());
  if (x.is_zero()) return "";
  return x.log10_magnitude().str(20, std::ios_base::fixed);
}

}  // namespace

int display_digits(std::optional<int> explicit_digits, int fallback) {
  int digits = fallback;
  if (explicit_digits) {
    digits = *explicit_digits;
  } else if (const char* env = std::getenv(kDigitsEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0') throw DomainError(std::string(kDigitsEnv) + " must be an integer");
    digits = static_cast<int>(v);
  }
  if (digits < 1 || digits > xprec::kMaxRenderDigits) {
    throw DomainError("display digits must lie in [1, 80]");
  }
  return digits;
}

int cmd_simulate_temporal(const SimulateTemporalOptions& o, std::ostream& out) {
  if (o.output.empty()) throw UsageError("an output path (-o) is required");
  simulate::SimConfig config;
  config.seed = o.seed;
  config.copies_per_basis = o.copies;
  config.num_bases = o.bases;
  config.dim_max = o.dmax;
  config.dark_rate = o.dark_rate;
  const auto ds = simulate::simulate_temporal(o.mode_index, config);
  Json prov;
  prov["generator"] = "temporal";
  prov["mode_index"] = o.mode_index;
  prov["num_bases"] = o.bases;
  prov["copies_per_basis"] = o.copies;
  prov["dim_max"] = o.dmax;
  prov["dark_rate"] = o.dark_rate;
  prov["seed"] = o.seed;
  prov["rng"] = "splitmix64";
  io::write_json_atomic(o.output, io::dataset_to_json(ds, prov));
  out << "wrote " << o.output << ": povm dataset, " << ds.bases().size() << " bases, D = "
      << ds.dim_max() << ", total copies " << ds.total_copies() << "\n";
  return kExitSuccess;
}

int cmd_simulate_polarimetry(const SimulatePolarimetryOptions& o, std::ostream& out) {
  if (o.output.empty()) throw UsageError("an output path (-o) is required");
  polarimetry::TwoModeSource source;
  if (o.source == "tmsv") {
    source.kind = polarimetry::SourceKind::kTmsv;
  } else if (o.source == "bell") {
    source.kind = polarimetry::SourceKind::kBell;
  } else {
    throw UsageError("--source must be 'tmsv' or 'bell'");
  }
  source.r = polarimetry::squeezing_db_to_r(o.squeezing_db);
  const polarimetry::PnrdModel model{o.eta, o.n0};
  Rng rng(o.seed);
  const auto data = simulate::simulate_polarimetry(source, model, o.copies, rng, o.cutoff);
  Json prov;
  prov["generator"] = "polarimetry";
  prov["source"] = o.source;
  prov["squeezing_db"] = o.squeezing_db;
  prov["r"] = source.r;
  prov["db_convention"] = "dB = 10 log10(exp(2 r))";
  prov["eta"] = o.eta;
  prov["n0"] = o.n0;
  prov["copies"] = o.copies;
  prov["cutoff"] = data.cutoff;
  prov["tail_mass"] = data.tail_mass;
  prov["seed"] = o.seed;
  prov["rng"] = "splitmix64";
  io::write_json_atomic(o.output, io::dataset_to_json(data.dataset, prov));
  out << "wrote " << o.output << ": diagonal dataset, " << data.dataset.counts().size()
      << " outcomes, D = " << data.dataset.dim_max() << ", total copies "
      << data.dataset.total_copies() << ", photon cutoff " << data.cutoff << ", tail mass "
      << std::setprecision(3) << data.tail_mass << "\n";
  return kExitSuccess;
}

int cmd_certify(const CertifyOptions& o, std::ostream& out) {
  if (o.output.empty()) throw UsageError("an output path (-o) is required");
  if (o.input.empty()) throw UsageError("an input file is required");
  const int digits = display_digits(o.digits);
  const Json doc = io::read_json(o.input);

  Json prov;
  prov["input"] = o.input;
  prov["prior_spec"] = o.prior;
  Json deltas = o.deltas;
  prov["interval_deltas"] = deltas;

  certify::CertificationReport report;
  if (io::is_likelihood_fixture(doc)) {
    const auto fixture = io::fixture_from_json(doc);
    const int d_max = fixture.d_min + static_cast<int>(fixture.likelihoods.size()) - 1;
    const auto prior = prior_for(o.prior, fixture.d_min, d_max);
    if (prior.d_min() != fixture.d_min || prior.d_max() != d_max) {
      throw DomainError("prior domain differs from the fixture's dimension range");
    }
    prov["input_kind"] = "likelihoods";
    report = certify::build_report_from_likelihoods(fixture.likelihoods, prior, o.deltas,
                                                    fixture.kappa_kind, fixture.total_copies);
  } else {
    const auto loaded = io::dataset_from_json(doc);
    const int dataset_dim = mle::dim_max(loaded.dataset);
    const int d_max = o.d_max.value_or(dataset_dim);
    if (d_max > dataset_dim) throw DimensionError("--dmax exceeds the dataset dimension");
    const auto prior = prior_for(o.prior, o.d_min, d_max);

    mle::MlConfig config;
    config.max_iterations = o.max_iterations;
    config.convergence_tol = o.tolerance;
    config.restarts = o.restarts;
    config.bias_threshold = o.bias_threshold;
    config.validate();
    if (config.effective_restarts() > 1 && !o.seed) {
      throw UsageError("random restarts are in use; pass an explicit --seed");
    }
    const std::uint64_t seed = o.seed.value_or(0);
    const auto sweep =
        mle::sweep_dimensions(loaded.dataset, prior.d_min(), prior.d_max(), config, seed);
    report = certify::build_report(loaded.dataset, sweep, prior, o.deltas);
    report.fidelity = fidelity_to_truth(loaded, report);

    prov["input_kind"] = "dataset";
    prov["seed"] = o.seed ? Json(*o.seed) : Json(nullptr);
    prov["solver"] = solver_config_json(config);
    prov["dataset_provenance"] = loaded.provenance;
  }
  prov["working_digits"] = xprec::kWorkingDigits;

  const Json doc_out = io::report_to_json(report, prov);
  io::write_json_atomic(o.output, doc_out);
  const std::string table = render_report_table(doc_out, digits);
  io::write_text_atomic(table_path_for(o), table);

  if (report.d_rb) {
    out << "d_rb = " << *report.d_rb << " (prior " << report.prior_label << ")\n";
  } else {
    out << "warning: " << report.warning << "\n";
  }
  out << "report: " << o.output << "\ntable: " << table_path_for(o) << "\n";
  return report.d_rb ? kExitSuccess : kExitNoDimension;
}

std::string render_report_table(const Json& report, int digits) {
  std::ostringstream os;
  const auto& dims = report.at("dimensions");
  std::vector<std::array<std::string, 4>> rows;
  rows.push_back({"d", "L_d", "pr(d|data)", "RB(d)"});
  for (const auto& row : dims) {
    rows.push_back({std::to_string(row.at("d").get<int>()), rerender(row.at("likelihood"), digits),
                    rerender(row.at("posterior"), digits), rerender(row.at("rb_ratio"), digits)});
  }
  std::array<std::size_t, 4> width{};
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], r[c].size());
  }
  os << "prior: " << report.at("prior").at("label").get<std::string>() << "\n";
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < 4; ++c) os << (c ? "  " : "") << pad(r[c], width[c]);
    os << "\n";
  }
  if (report.at("d_rb").is_null()) {
    os << "d_rb: none (" << report.at("warning").get<std::string>() << ")\n";
  } else {
    os << "d_rb: " << report.at("d_rb").get<int>() << "\n";
    for (const auto& iv : report.at("intervals")) {
      os << "C[" << iv.at("d_low").get<int>() << ", " << iv.at("d_high").get<int>()
         << "] = " << rerender(iv.at("credibility"), digits) << "\n";
    }
  }
  const auto& ic = report.at("information_criteria");
  os << "information criteria (" << ic.at("kappa_kind").get<std::string>()
     << " parameter count, natural log):";
  os << " d_AIC = " << (ic.at("aic").is_null() ? "-" : std::to_string(ic.at("aic").at("d").get<int>()));
  os << ", d_BIC = " << (ic.at("bic").is_null() ? "-" : std::to_string(ic.at("bic").at("d").get<int>()))
     << "\n";
  if (report.contains("fidelity") && !report.at("fidelity").is_null()) {
    os << "fidelity (" << report.at("fidelity").at("kind").get<std::string>()
       << "): " << std::setprecision(10) << report.at("fidelity").at("value").get<double>() << "\n";
  }
  return os.str();
}

int cmd_report(const ReportOptions& o, std::ostream& out) {
  if (o.input.empty()) throw UsageError("a report file is required");
  const int digits = display_digits(o.digits);
  const Json report = io::read_json(o.input);
  if (report.value("schema", "") != std::string(io::kReportSchema)) {
    throw ParseError(std::string("expected schema '") + io::kReportSchema + "'");
  }
  const std::string table = render_report_table(report, digits);
  out << table;
  if (o.output) io::write_text_atomic(*o.output, table);

  const std::string prefix = csv_prefix_for(o);
  std::ostringstream loglik, rb, cred;
  loglik << "d,log_likelihood_nat,log10_likelihood\n";
  rb << "d,rb_ratio,log10_rb_ratio\n";
  for (const auto& row : report.at("dimensions")) {
    const int d = row.at("d").get<int>();
    const auto& lnl = row.at("log_likelihood_nat");
    loglik << d << ",";
    if (!lnl.is_null()) loglik << std::setprecision(17) << lnl.get<double>();
    loglik << "," << log10_of(row.at("likelihood")) << "\n";
    rb << d << "," << rerender(row.at("rb_ratio"), digits) << "," << log10_of(row.at("rb_ratio"))
       << "\n";
  }
  cred << "delta,d_low,d_high,credibility\n";
  for (const auto& iv : report.at("intervals")) {
    cred << iv.at("delta").get<int>() << "," << iv.at("d_low").get<int>() << ","
         << iv.at("d_high").get<int>() << "," << rerender(iv.at("credibility"), digits) << "\n";
  }
  io::write_text_atomic(prefix + "_loglik.csv", loglik.str());
  io::write_text_atomic(prefix + "_rb.csv", rb.str());
  io::write_text_atomic(prefix + "_credibility.csv", cred.str());
  out << "csv: " << prefix << "_{loglik,rb,credibility}.csv\n";
  return kExitSuccess;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relative-belief certification of Hilbert-space dimension", "rbcert"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Generate a seeded dataset");
  sim->require_subcommand(1);

  SimulateTemporalOptions temporal;
  std::uint64_t temporal_seed = 0;
  auto* tmp = sim->add_subcommand("temporal", "Random-basis tomography of a mode state");
  tmp->add_option("--mode-index", temporal.mode_index, "Index n of the state |n>")->required();
  tmp->add_option("--bases", temporal.bases, "Number of Haar-random bases K")
      ->capture_default_str();
  tmp->add_option("--copies", temporal.copies, "Copies per basis")->capture_default_str();
  tmp->add_option("--dmax", temporal.dmax, "Space dimension D")->capture_default_str();
  tmp->add_option("--dark-rate", temporal.dark_rate, "Uniform background fraction in [0, 1)")
      ->capture_default_str();
  tmp->add_option("--seed", temporal_seed, "RNG seed")->required();
  tmp->add_option("-o,--output", temporal.output, "Dataset JSON path")->required();

  SimulatePolarimetryOptions pol;
  std::uint64_t pol_seed = 0;
  auto* polc = sim->add_subcommand("polarimetry", "Photon-number-resolved polarimetry counts");
  polc->add_option("--source", pol.source, "tmsv or bell")->capture_default_str();
  polc->add_option("--squeezing-db", pol.squeezing_db, "Squeezing in dB")->required();
  polc->add_option("--eta", pol.eta, "Detector efficiency")->capture_default_str();
  polc->add_option("--n0", pol.n0, "Detector bins per port")->capture_default_str();
  polc->add_option("--copies", pol.copies, "Number of detection events")->capture_default_str();
  polc->add_option("--cutoff", pol.cutoff, "Photon-number cutoff per mode (default: automatic)");
  polc->add_option("--seed", pol_seed, "RNG seed")->required();
  polc->add_option("-o,--output", pol.output, "Dataset JSON path")->required();

  CertifyOptions cert;
  std::optional<std::uint64_t> cert_seed;
  auto* certc = app.add_subcommand("certify", "Certify the dimension of a dataset or fixture");
  certc->add_option("input", cert.input, "Dataset or likelihood-fixture JSON")->required();
  certc->add_option("--prior", cert.prior, "uniform, gaussian:<center> or file:<path>")
      ->capture_default_str();
  certc->add_option("--deltas", cert.deltas, "Plausible-interval widths")->delimiter(',');
  certc->add_option("--dmin", cert.d_min, "Smallest candidate dimension")->capture_default_str();
  certc->add_option("--dmax", cert.d_max, "Largest candidate dimension (default: dataset D)");
  certc->add_option("--bias-threshold", cert.bias_threshold,
                    "Background-subtraction threshold for tomographic data");
  certc->add_option("--restarts", cert.restarts, "Independent solver starts");
  certc->add_option("--max-iterations", cert.max_iterations)->capture_default_str();
  certc->add_option("--tol", cert.tolerance, "Relative convergence tolerance")
      ->capture_default_str();
  certc->add_option("--seed", cert_seed, "Seed for random solver restarts");
  certc->add_option("-o,--output", cert.output, "Report JSON path")->required();
  certc->add_option("--table", cert.table, "Text table path");
  certc->add_option("--digits", cert.digits, "Mantissa digits in the text table");

  ReportOptions rep;
  auto* repc = app.add_subcommand("report", "Render tables and CSV plot data from a report");
  repc->add_option("input", rep.input, "Report JSON")->required();
  repc->add_option("--digits", rep.digits, "Mantissa digits (default 64)");
  repc->add_option("--csv-prefix", rep.csv_prefix, "Prefix for CSV outputs");
  repc->add_option("-o,--output", rep.output, "Also write the text table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitSuccess;
    }
    err << "usage error: " << e.what() << "\nrun with --help for usage\n";
    return kExitError;
  }

  try {
    if (*tmp) {
      temporal.seed = temporal_seed;
      return cmd_simulate_temporal(temporal, out);
    }
    if (*polc) {
      pol.seed = pol_seed;
      return cmd_simulate_polarimetry(pol, out);
    }
    if (*certc) {
      cert.seed = cert_seed;
      return cmd_certify(cert, out);
    }
    if (*repc) return cmd_report(rep, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  err << "usage error: no command\n";
  return kExitError;
}

}  // namespace rbcert::cli
