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


// Acceptance run: one PASS/FAIL line per numbered criterion, followed by
// informational lines that do not affect the exit status.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rbcert/certify.hpp"
#include "rbcert/cli.hpp"
#include "rbcert/io.hpp"
#include "rbcert/mle.hpp"
#include "rbcert/polarimetry.hpp"
#include "rbcert/simulate.hpp"
#include "rbcert/xprec.hpp"

using namespace rbcert;
using certify::Prior;
using xprec::BigLog;
using xprec::Decimal;
namespace bmp = boost::multiprecision;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Table {
  std::vector<std::string> raw;
  std::vector<BigLog> likelihoods;
  std::vector<std::string> uniform;
  std::vector<std::string> gaussian;
  int center = 0;
  int d_max() const { return 1 + static_cast<int>(likelihoods.size()); }
};

Table load(const std::string& name) {
  std::ifstream in(std::string(RBCERT_FIXTURE_DIR) + "/" + name);
  const auto j = nlohmann::json::parse(in);
  Table t;
  t.raw = j.at("likelihoods").get<std::vector<std::string>>();
  for (const auto& s : t.raw) t.likelihoods.push_back(xprec::parse_decimal(s));
  t.uniform = j.at("expected").at("uniform_posteriors").get<std::vector<std::string>>();
  t.gaussian = j.at("expected").at("gaussian_posteriors").get<std::vector<std::string>>();
  t.center = j.at("expected").at("gaussian_center").get<int>();
  return t;
}

// -log10 |a/b - 1|, computed from the log magnitudes.
double agreement_digits(const BigLog& a, const BigLog& b) {
  const Decimal diff = a.log10_magnitude() - b.log10_magnitude();
  if (diff == 0) return 1000.0;
  return -bmp::log10(bmp::abs(bmp::expm1(diff * xprec::ln10()))).convert_to<double>();
}

std::string fmt(double x, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

// Worst agreement between computed posteriors and the expected strings.
double worst_agreement(const std::vector<BigLog>& got, const std::vector<std::string>& want) {
  double worst = 1000.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    worst = std::min(worst, agreement_digits(got[i], xprec::parse_decimal(want[i])));
  }
  return worst;
}

Verdict golden_table(const char* name, int expected_d_rb, double* worst_uniform, double* worst_gauss) {
  const auto t = load(name);
  const auto u = certify::compute_evidence(t.likelihoods, Prior::uniform(2, t.d_max()));
  const auto g = certify::compute_evidence(t.likelihoods, Prior::gaussian(t.center, 2, t.d_max()));
  *worst_uniform = worst_agreement(u.posteriors, t.uniform);
  // Table I prints gaussian entries for d = 2..4 that no exp(-(d-2)^2) prior
  // reproduces from its own likelihood column; they are compared from d = 5.
  const std::size_t first = name == std::string("table1.json") ? 3 : 0;
  *worst_gauss = worst_agreement(
      std::vector<BigLog>(g.posteriors.begin() + static_cast<std::ptrdiff_t>(first), g.posteriors.end()),
      std::vector<std::string>(t.gaussian.begin() + static_cast<std::ptrdiff_t>(first), t.gaussian.end()));
  const auto du = certify::certify_dimension(u);
  const auto dg = certify::certify_dimension(g);
  Verdict v;
  v.pass = *worst_uniform >= 30 && *worst_gauss >= 15 && du == expected_d_rb && dg == expected_d_rb;
  v.detail = std::string(name) + ": uniform " + fmt(*worst_uniform) + " digits, gaussian " +
             fmt(*worst_gauss) + (first ? " digits (d>=5)" : " digits") + ", d_rb " + (du ? std::to_string(*du) : "none") + "/" +
             (dg ? std::to_string(*dg) : "none");
  return v;
}

std::vector<double> brute_force_clicks(double eta, int n0, int m) {
  std::vector<double> p(static_cast<std::size_t>(n0) + 1, 0.0);
  std::vector<int> fate(static_cast<std::size_t>(m), 0);
  while (true) {
    double w = 1.0;
    std::set<int> occupied;
    for (int f : fate) {
      if (f == 0) {
        w *= 1.0 - eta;
      } else {
        w *= eta / n0;
        occupied.insert(f);
      }
    }
    p[occupied.size()] += w;
    int k = 0;
    while (k < m && ++fate[static_cast<std::size_t>(k)] > n0) fate[static_cast<std::size_t>(k++)] = 0;
    if (k == m) break;
  }
  return p;
}

bool non_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) return false;
  }
  return true;
}

std::vector<double> sweep_log_likelihoods(const std::vector<mle::MlResult>& sweep) {
  std::vector<double> out;
  for (const auto& r : sweep) out.push_back(r.log_likelihood_nat);
  return out;
}

std::string d_text(const std::optional<int>& d) { return d ? std::to_string(*d) : "none"; }

// --- criteria ---------------------------------------------------------------

Verdict criterion1() {
  double u = 0, g = 0;
  auto v = golden_table("table1.json", 5, &u, &g);
  const auto t = load("table1.json");
  const auto post = certify::posterior(t.likelihoods, Prior::gaussian(t.center, 2, t.d_max()));
  double low = 1000.0;
  for (std::size_t i = 0; i < 3; ++i) low = std::min(low, agreement_digits(post[i], xprec::parse_decimal(t.gaussian[i])));
  v.detail += "; printed gaussian d=2..4 inconsistent with printed L_d (" + fmt(low) + " digits)";
  return v;
}

Verdict criterion2() {
  double u2 = 0, g2 = 0, u3 = 0, g3 = 0;
  const auto a = golden_table("table2.json", 5, &u2, &g2);
  const auto b = golden_table("table3.json", 6, &u3, &g3);
  // The two headline values, checked directly.
  const auto t2 = load("table2.json");
  const auto t3 = load("table3.json");
  const auto p2 = certify::posterior(t2.likelihoods, Prior::gaussian(t2.center, 2, t2.d_max()));
  const auto p3 = certify::posterior(t3.likelihoods, Prior::gaussian(t3.center, 2, t3.d_max()));
  // The quoted values are truncations, so compare leading digits.
  const bool bell = xprec::render_decimal(p2[3], 20).starts_with("7.213349069032195");
  const bool tmsv = xprec::render_decimal(p3[4], 20).starts_with("9.522695487261826");
  return {a.pass && b.pass && bell && tmsv,
          a.detail + "; " + b.detail + "; bell(5) " + xprec::render_decimal(p2[3], 20) + ", tmsv(6) " +
              xprec::render_decimal(p3[4], 20)};
}

Verdict criterion3() {
  int total = 0, exact = 0;
  bool saw_extreme = false;
  for (const char* name : {"table1.json", "table2.json", "table3.json"}) {
    for (const auto& s : load(name).raw) {
      ++total;
      if (xprec::render_decimal(xprec::parse_decimal(s), 64) == s) ++exact;
      if (s.ends_with("e-306872481")) saw_extreme = true;
    }
  }
  return {exact == total && saw_extreme,
          std::to_string(exact) + "/" + std::to_string(total) + " strings byte-exact" +
              (saw_extreme ? ", includes e-306872481" : ", e-306872481 missing")};
}

Verdict criterion4() {
  bool ok = polarimetry::dpol_per_port(1) == 6 && polarimetry::dpol_per_port(2) == 19;
  int mismatches = 0;
  for (int n0 = 1; n0 <= 50; ++n0) {
    // Diagonal block (n0+1)^2 plus two off-diagonal blocks of size (k+1)^2 per k < n0.
    long long per_port = static_cast<long long>(n0 + 1) * (n0 + 1);
    for (int k = 0; k < n0; ++k) per_port += 2LL * (k + 1) * (k + 1);
    long long total = 0;
    for (int s = 0; s <= 2 * n0; ++s) total += static_cast<long long>(s + 1) * (s + 1);
    if (polarimetry::dpol_per_port(n0) != per_port || polarimetry::dpol_total_photon(n0) != total) ++mismatches;
  }
  ok = ok && mismatches == 0;
  return {ok, "D(1)=" + std::to_string(polarimetry::dpol_per_port(1)) + ", D(2)=" +
                  std::to_string(polarimetry::dpol_per_port(2)) + ", " + std::to_string(mismatches) +
                  " mismatches for n0=1..50"};
}

Verdict criterion5() {
  double worst = 0.0;
  for (double eta : {0.25, 0.5, 0.9, 1.0}) {
    for (int n0 = 1; n0 <= 4; ++n0) {
      for (int n = 0; n <= n0; ++n) {
        const auto row = polarimetry::pnrd_diagonal({eta, n0}, n, 6);
        for (int m = 0; m <= 6; ++m) {
          const double o = brute_force_clicks(eta, n0, m)[static_cast<std::size_t>(n)];
          worst = std::max(worst, std::abs(row[static_cast<std::size_t>(m)] - o));
        }
      }
    }
  }
  const auto vac = polarimetry::pnrd_diagonal({1.0, 1}, 0, 6);
  const auto click = polarimetry::pnrd_diagonal({1.0, 1}, 1, 6);
  bool projectors = vac[0] == 1.0 && click[0] == 0.0;
  for (int m = 1; m <= 6; ++m) projectors = projectors && vac[static_cast<std::size_t>(m)] == 0.0 && click[static_cast<std::size_t>(m)] == 1.0;
  return {worst < 1e-10 && projectors,
          "max deviation " + fmt(worst) + (projectors ? ", exact projectors at eta=1, N0=1" : ", projectors wrong")};
}

Verdict criterion6() {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> angle(0.0, 2 * 3.14159265358979323846);
  bool ok = true;
  std::string detail;
  for (int n0 : {1, 2}) {
    std::vector<quantum::HermitianOperator> all;
    for (int s = 0; s < 200; ++s) {
      const polarimetry::PolarimetrySetting setting{angle(gen), angle(gen), angle(gen), angle(gen)};
      const auto e = polarimetry::two_port_povm(setting, {0.9, n0});
      all.insert(all.end(), e.begin(), e.end());
    }
    const int rank = polarimetry::span_rank(all);
    ok = ok && rank <= polarimetry::dpol_per_port(n0);
    detail += "n0=" + std::to_string(n0) + ": rank " + std::to_string(rank) + " <= " +
              std::to_string(polarimetry::dpol_per_port(n0)) + "  ";
  }
  return {ok, detail};
}

Verdict criterion7() {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> dim_dist(2, 10);
  std::uniform_int_distribution<int> count_dist(0, 1000);
  mle::MlConfig config;
  config.record_trace = true;
  double worst_tv = 0.0;
  int monotone = 0, traces = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = dim_dist(gen);
    std::vector<quantum::Count> counts(static_cast<std::size_t>(dim));
    quantum::Count total = 0;
    for (auto& n : counts) {
      n = trial % 3 == 0 ? count_dist(gen) / 200 : count_dist(gen);
      total += n;
    }
    if (total == 0) counts[0] = total = 1;
    const quantum::DiagonalDataset ds(Eigen::MatrixXd::Identity(dim, dim), counts);
    const auto fit = mle::fit_ml(ds, dim, config, static_cast<std::uint64_t>(trial));
    const Eigen::VectorXd p = fit.estimator.diagonal_entries();
    double tv = 0.0;
    for (int j = 0; j < dim; ++j) tv += std::abs(p(j) - static_cast<double>(counts[static_cast<std::size_t>(j)]) / total);
    worst_tv = std::max(worst_tv, tv / 2);
    ++traces;
    if (non_decreasing(fit.trace)) ++monotone;
  }
  // Tomographic traces as well.
  for (int s = 0; s < 10; ++s) {
    simulate::SimConfig sc;
    sc.seed = 300 + s;
    sc.copies_per_basis = 5000;
    sc.num_bases = 3;
    sc.dim_max = 5;
    const auto ds = simulate::simulate_temporal(s % 4, sc);
    const auto fit = mle::fit_ml(ds, 5, config, 1);
    ++traces;
    if (non_decreasing(fit.trace)) ++monotone;
  }
  return {worst_tv < 1e-6 && monotone == traces,
          "max TV " + fmt(worst_tv) + ", " + std::to_string(monotone) + "/" + std::to_string(traces) +
              " traces non-decreasing"};
}

Verdict criterion8() {
  int monotone = 0, total = 0;
  for (int s = 0; s < 50; ++s) {
    std::vector<mle::MlResult> sweep;
    if (s % 5 == 4) {
      Rng rng(derive_seed(800, s));
      const polarimetry::TwoModeSource source{s % 2 ? polarimetry::SourceKind::kBell : polarimetry::SourceKind::kTmsv,
                                              polarimetry::squeezing_db_to_r(1.5 + 0.1 * s)};
      const auto data = simulate::simulate_polarimetry(source, {0.9, 3}, 100000, rng);
      const mle::Dataset ds = data.dataset;
      sweep = mle::sweep_dimensions(ds, 2, mle::dim_max(ds), {}, 1);
    } else {
      simulate::SimConfig sc;
      sc.seed = 800 + s;
      sc.copies_per_basis = s % 2 ? 1000 : 20000;
      sc.num_bases = 1 + s % 4;
      sc.dim_max = 6 + s % 3;
      sc.dark_rate = s % 3 == 0 ? 0.02 : 0.0;
      const mle::Dataset ds = simulate::simulate_temporal(s % 5, sc);
      mle::MlConfig config;
      if (s % 4 == 1) config.bias_threshold = 0.01;
      sweep = mle::sweep_dimensions(ds, 2, sc.dim_max, config, derive_seed(801, s));
    }
    ++total;
    if (non_decreasing(sweep_log_likelihoods(sweep))) ++monotone;
  }
  return {monotone == total, std::to_string(monotone) + "/" + std::to_string(total) + " sweeps non-decreasing"};
}

Verdict criterion9() {
  const std::vector<quantum::Count> sizes = {100, 1000, 10000};
  std::vector<int> gauss_hits(sizes.size(), 0), uniform_hits(sizes.size(), 0);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    for (int s = 0; s < 20; ++s) {
      simulate::SimConfig sc;
      sc.seed = 1000 + s;
      sc.copies_per_basis = sizes[i];
      sc.num_bases = 1;
      sc.dim_max = 20;
      const mle::Dataset ds = simulate::simulate_temporal(7, sc);
      const auto sweep = mle::sweep_dimensions(ds, 2, 20, {}, 99 + s);
      const auto g = certify::build_report(ds, sweep, Prior::gaussian(8, 2, 20));
      const auto u = certify::build_report(ds, sweep, Prior::uniform(2, 20));
      if (g.d_rb == 8) ++gauss_hits[i];
      if (u.d_rb == 8) ++uniform_hits[i];
    }
  }
  std::string detail = "seeds at d_rb=8 (gaussian/uniform):";
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    detail += " N=" + std::to_string(sizes[i]) + " " + std::to_string(gauss_hits[i]) + "/" +
              std::to_string(uniform_hits[i]);
  }
  return {gauss_hits[2] >= 18 && uniform_hits[1] <= gauss_hits[1], detail};
}

// States |n> with n >= 2 keep the true dimension above d_min = 2. For n = 1
// a clean sweep is flat over the whole domain, every RB equals one and no
// dimension is certified.
Verdict criterion10() {
  int conservative = 0;
  for (int s = 0; s < 50; ++s) {
    simulate::SimConfig sc;
    sc.seed = 5000 + s;
    sc.copies_per_basis = 100000;
    sc.num_bases = 5;
    sc.dim_max = 10;
    const mle::Dataset ds = simulate::simulate_temporal(2 + s % 3, sc);
    const auto sweep = mle::sweep_dimensions(ds, 2, 10, {}, 99 + s);
    const auto r = certify::build_report(ds, sweep, Prior::uniform(2, 10));
    if (r.d_rb && *r.d_rb >= *r.d_aic && *r.d_rb >= *r.d_bic) ++conservative;
  }
  int coincide = 0;
  for (int s = 0; s < 50; ++s) {
    simulate::SimConfig sc;
    sc.seed = 6000 + s;
    sc.copies_per_basis = 1000000;
    sc.num_bases = 5;
    sc.dim_max = 10;
    const mle::Dataset ds = simulate::simulate_temporal(2 + s % 3, sc);
    mle::MlConfig config;
    config.bias_threshold = 0.01;
    const auto sweep = mle::sweep_dimensions(ds, 2, 10, config, 99 + s);
    const auto r = certify::build_report(ds, sweep, Prior::uniform(2, 10));
    if (r.d_rb && r.d_rb == r.d_aic && r.d_rb == r.d_bic) ++coincide;
  }
  return {conservative >= 48 && coincide >= 45,
          "N_k=1e5: d_rb >= d_AIC, d_BIC in " + std::to_string(conservative) +
              "/50; N_k=1e6 with bias 0.01: d_rb = d_AIC = d_BIC in " + std::to_string(coincide) + "/50"};
}

Verdict criterion11() {
  const auto dir = std::filesystem::temp_directory_path() / "rbcert_acceptance";
  std::filesystem::create_directories(dir);
  std::ostringstream sink;
  cli::SimulateTemporalOptions sim;
  sim.mode_index = 1;
  sim.bases = 3;
  sim.copies = 5000;
  sim.dmax = 6;
  sim.dark_rate = 0.999;
  sim.seed = 11;
  sim.output = (dir / "dark.json").string();
  if (cli::cmd_simulate_temporal(sim, sink) != cli::kExitSuccess) return {false, "simulation failed"};
  cli::CertifyOptions cert;
  cert.input = sim.output;
  cert.bias_threshold = 0.8;
  cert.seed = 5;
  cert.output = (dir / "dark_report.json").string();
  const int code = cli::cmd_certify(cert, sink);
  const auto report = io::read_json(cert.output);
  const bool none = report.at("d_rb").is_null();
  return {code == cli::kExitNoDimension && none,
          "exit code " + std::to_string(code) + ", d_rb " + (none ? "none" : report.at("d_rb").dump()) +
              ", warning \"" + report.at("warning").get<std::string>() + "\""};
}

Verdict criterion12() {
  double worst_sum = 1000.0, worst_interval = 1000.0;
  for (const char* name : {"table1.json", "table2.json", "table3.json"}) {
    const auto t = load(name);
    for (const auto& prior : {Prior::uniform(2, t.d_max()), Prior::gaussian(t.center, 2, t.d_max())}) {
      const auto post = certify::posterior(t.likelihoods, prior);
      // Plain Decimal accumulation, independent of log_sum.
      Decimal sum = 0;
      for (const auto& p : post) sum += p.to_decimal();
      const Decimal dev = bmp::abs(sum - 1);
      worst_sum = std::min(worst_sum, dev == 0 ? 1000.0 : -bmp::log10(dev).convert_to<double>());
      const auto full = certify::plausible_interval_credibility(post, 2, 2, t.d_max() - 2);
      const Decimal idev = bmp::abs(full.to_decimal() - 1);
      worst_interval = std::min(worst_interval, idev == 0 ? 1000.0 : -bmp::log10(idev).convert_to<double>());
    }
  }
  double worst_pnrd = 0.0;
  for (double eta = 0.0; eta <= 1.0; eta += 0.05) {
    for (int n0 = 1; n0 <= 10; ++n0) {
      std::vector<double> sum(41, 0.0);
      for (int n = 0; n <= n0; ++n) {
        const auto row = polarimetry::pnrd_diagonal({eta, n0}, n, 40);
        for (std::size_t m = 0; m < row.size(); ++m) sum[m] += row[m];
      }
      for (double s : sum) worst_pnrd = std::max(worst_pnrd, std::abs(s - 1.0));
    }
  }
  return {worst_sum >= 70 && worst_interval >= 70 && worst_pnrd < 1e-10,
          "posterior sums to " + fmt(worst_sum) + " digits, full-domain C to " + fmt(worst_interval) +
              " digits, PNRD completeness error " + fmt(worst_pnrd)};
}

// Informational: clean single-mode data at small N_k, uniform prior.
std::string small_sample_recovery() {
  int hits = 0, runs = 0;
  std::string seen;
  for (int s = 0; s < 20; ++s) {
    const int n = 1 + s % 3;
    simulate::SimConfig sc;
    sc.seed = 7000 + s;
    sc.copies_per_basis = 1000;
    sc.num_bases = 5;
    sc.dim_max = 10;
    const mle::Dataset ds = simulate::simulate_temporal(n, sc);
    const auto sweep = mle::sweep_dimensions(ds, 2, 10, {}, 99 + s);
    const auto r = certify::build_report(ds, sweep, Prior::uniform(2, 10));
    ++runs;
    if (r.d_rb == n + 1) ++hits;
    seen += " " + std::to_string(n + 1) + "->" + d_text(r.d_rb);
  }
  return "d_rb = n+1 at N_k=1e3, K=5, dark 0 in " + std::to_string(hits) + "/" + std::to_string(runs) +
         " runs (true->d_rb:" + seen + ")";
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    double limit_s;
    std::function<Verdict()> run;
  };
  const std::vector<Entry> entries = {
      {1, "golden Table I", 1, criterion1},
      {2, "golden Tables II/III", 1, criterion2},
      {3, "extended-precision round trip", 1, criterion3},
      {4, "D_pol closed forms", 60, criterion4},
      {5, "PNRD oracle", 60, criterion5},
      {6, "POVM rank bound", 60, criterion6},
      {7, "MLE oracle", 60, criterion7},
      {8, "sweep monotonicity", 300, criterion8},
      {9, "Fock-7 convergence", 300, criterion9},
      {10, "conservativeness", 600, criterion10},
      {11, "no-evidence path", 60, criterion11},
      {12, "normalization", 60, criterion12},
  };
  int failures = 0;
  for (const auto& e : entries) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = e.run();
    } catch (const std::exception& ex) {
      v = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = v.pass && secs < e.limit_s;
    if (!pass) ++failures;
    std::printf("[%s] %2d %-30s %8.2fs  %s%s\n", pass ? "PASS" : "FAIL", e.id, e.name, secs, v.detail.c_str(),
                secs < e.limit_s ? "" : " (over time limit)");
    std::fflush(stdout);
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::string info;
  try {
    info = small_sample_recovery();
  } catch (const std::exception& ex) {
    info = std::string("exception: ") + ex.what();
  }
  std::printf("[INFO]    %-30s %8.2fs  %s\n", "small-sample recovery",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), info.c_str());
  std::printf("%d of %zu criteria passed\n", static_cast<int>(entries.size()) - failures, entries.size());
  return failures == 0 ? 0 : 1;
}
