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

#include "rbcert/certify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <utility>

#include "rbcert/error.hpp"

namespace rbcert::certify {
namespace {

// |log10 RB| at or below this is an exact tie with one.
const Decimal& plausibility_margin() {
  static const Decimal margin("1e-70");
  return margin;
}

constexpr double kTieTolerance = 1e-9;

void check_domain(std::span<const BigLog> likelihoods, const Prior& prior) {
  if (likelihoods.size() != prior.size()) {
    throw DomainError("likelihoods and prior cover different dimension ranges");
  }
}

BigLog evidence_denominator(std::span<const BigLog> likelihoods, const Prior& prior) {
  check_domain(likelihoods, prior);
  BigLog denominator = xprec::log_sum(likelihoods, prior.weights());
  if (denominator.is_zero()) {
    throw DomainError("every likelihood is zero; no posterior exists");
  }
  return denominator;
}

CertificationReport assemble(std::vector<BigLog> likelihoods,
                             std::vector<double> log_likelihoods_nat, const Prior& prior,
                             std::span<const int> deltas, KappaKind kappa_kind,
                             std::optional<quantum::Count> total_copies) {
  CertificationReport report;
  report.prior_label = prior.label();
  report.prior_weights = prior.weights();
  report.kappa_kind = kappa_kind;
  report.total_copies = total_copies;
  report.log_likelihoods_nat = std::move(log_likelihoods_nat);
  report.evidence = compute_evidence(likelihoods, prior);
  report.d_rb = certify_dimension(report.evidence);
  if (!report.d_rb) {
    report.warning = std::string(kNoDimensionWarning);
  } else {
    for (int delta : deltas) {
      if (delta < 0 || *report.d_rb + delta > prior.d_max()) continue;
      report.intervals.push_back(
          {delta, plausible_interval_credibility(report.evidence.posteriors, prior.d_min(),
                                                 *report.d_rb, delta)});
    }
  }
  report.d_aic = information_criterion(report.log_likelihoods_nat, prior.d_min(),
                                       report.alpha_aic, kappa_kind);
  if (total_copies && *total_copies > 1) {
    report.alpha_bic = bic_alpha(*total_copies);
    report.d_bic = information_criterion(report.log_likelihoods_nat, prior.d_min(),
                                         *report.alpha_bic, kappa_kind);
  }
  return report;
}

}  // namespace

Prior::Prior(int d_min, std::vector<Decimal> weights, std::string label)
    : d_min_(d_min), weights_(std::move(weights)), label_(std::move(label)) {}

Prior Prior::uniform(int d_min, int d_max) {
  if (d_min < 1 || d_min >= d_max) throw DomainError("prior needs 1 <= d_min < d_max");
  const auto n = static_cast<std::size_t>(d_max - d_min + 1);
  return Prior(d_min, std::vector<Decimal>(n, Decimal(1) / Decimal(n)), "uniform");
}

Prior Prior::gaussian(int center, int d_min, int d_max) {
  if (d_min < 1 || d_min >= d_max) throw DomainError("prior needs 1 <= d_min < d_max");
  std::vector<Decimal> w;
  for (int d = d_min; d <= d_max; ++d) {
    const Decimal offset(d - center);
    w.push_back(boost::multiprecision::exp(-offset * offset));
  }
  return from_weights(d_min, std::move(w), "gaussian:" + std::to_string(center));
}

Prior Prior::from_weights(int d_min, std::vector<Decimal> weights, std::string label) {
  if (d_min < 1) throw DomainError("prior domain must start at d >= 1");
  if (weights.size() < 2) throw DomainError("prior needs at least two dimensions");
  Decimal total = 0;
  for (const auto& w : weights) {
    // A zero weight would let the prior overrule any amount of data.
    if (!(w > 0) || !boost::multiprecision::isfinite(w)) {
      throw DomainError("prior weights must be finite and strictly positive");
    }
    total += w;
  }
  for (auto& w : weights) w /= total;
  return Prior(d_min, std::move(weights), std::move(label));
}

const Decimal& Prior::weight(int d) const {
  if (d < d_min() || d > d_max()) throw DimensionError("dimension outside prior domain");
  return weights_[static_cast<std::size_t>(d - d_min_)];
}

Prior make_prior(PriorKind kind, int d_min, int d_max, int center) {
  switch (kind) {
    case PriorKind::kUniform:
      return Prior::uniform(d_min, d_max);
    case PriorKind::kGaussian:
      return Prior::gaussian(center, d_min, d_max);
  }
  throw DomainError("unknown prior kind");
}

Prior parse_prior(std::string_view spec, int d_min, int d_max) {
  if (spec == "uniform") return Prior::uniform(d_min, d_max);
  constexpr std::string_view kGaussian = "gaussian:";
  if (spec.starts_with(kGaussian)) {
    const std::string_view number = spec.substr(kGaussian.size());
    int center = 0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), center);
    if (ec != std::errc() || ptr != number.data() + number.size()) {
      throw ParseError("bad gaussian prior center in '" + std::string(spec) + "'");
    }
    return Prior::gaussian(center, d_min, d_max);
  }
  throw ParseError("unknown prior '" + std::string(spec) + "'");
}

std::vector<BigLog> posterior(std::span<const BigLog> likelihoods, const Prior& prior) {
  const BigLog denominator = evidence_denominator(likelihoods, prior);
  std::vector<BigLog> out;
  out.reserve(likelihoods.size());
  for (std::size_t i = 0; i < likelihoods.size(); ++i) {
    const BigLog weighted = xprec::mul(
        likelihoods[i], BigLog::from_log10(boost::multiprecision::log10(prior.weights()[i])));
    out.push_back(xprec::div(weighted, denominator));
  }
  return out;
}

std::vector<BigLog> rb_ratios(std::span<const BigLog> likelihoods, const Prior& prior) {
  const BigLog denominator = evidence_denominator(likelihoods, prior);
  std::vector<BigLog> out;
  out.reserve(likelihoods.size());
  for (const auto& l : likelihoods) out.push_back(xprec::div(l, denominator));
  return out;
}

DimensionEvidence compute_evidence(std::span<const BigLog> likelihoods, const Prior& prior) {
  DimensionEvidence ev;
  ev.d_min = prior.d_min();
  ev.likelihoods.assign(likelihoods.begin(), likelihoods.end());
  ev.posteriors = posterior(likelihoods, prior);
  ev.rb_ratios = rb_ratios(likelihoods, prior);
  return ev;
}

bool is_plausible(const BigLog& rb_ratio) {
  return !rb_ratio.is_zero() && rb_ratio.log10_magnitude() > plausibility_margin();
}

std::optional<int> certify_dimension(const DimensionEvidence& evidence) {
  for (std::size_t i = 0; i < evidence.rb_ratios.size(); ++i) {
    if (is_plausible(evidence.rb_ratios[i])) return evidence.d_min + static_cast<int>(i);
  }
  return std::nullopt;
}

BigLog plausible_interval_credibility(std::span<const BigLog> posteriors, int d_min,
                                      int d_rb, int delta) {
  const int d_max = d_min + static_cast<int>(posteriors.size()) - 1;
  if (delta < 0 || d_rb < d_min || d_rb + delta > d_max) {
    throw DimensionError("plausible interval leaves the prior domain");
  }
  return xprec::log_sum(
      posteriors.subspan(static_cast<std::size_t>(d_rb - d_min),
                         static_cast<std::size_t>(delta + 1)));
}

std::string_view to_string(KappaKind kind) {
  return kind == KappaKind::kFullState ? "full_state" : "diagonal";
}

KappaKind kappa_kind_from_string(std::string_view name) {
  if (name == "full_state") return KappaKind::kFullState;
  if (name == "diagonal") return KappaKind::kDiagonal;
  throw ParseError("unknown kappa kind '" + std::string(name) + "'");
}

double kappa(KappaKind kind, int d) {
  return kind == KappaKind::kFullState ? static_cast<double>(d) * d - 1.0
                                       : static_cast<double>(d) - 1.0;
}

int information_criterion(std::span<const double> log_likelihoods_nat, int d_min,
                          double alpha, KappaKind kind) {
  if (!(alpha > 0.0)) throw DomainError("information criterion needs alpha > 0");
  std::vector<double> values(log_likelihoods_nat.size(),
                             std::numeric_limits<double>::infinity());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double ll = log_likelihoods_nat[i];
    if (std::isnan(ll)) throw DomainError("NaN log-likelihood");
    if (!std::isfinite(ll)) continue;
    values[i] = alpha * kappa(kind, d_min + static_cast<int>(i)) - ll;
    best = std::min(best, values[i]);
  }
  if (!std::isfinite(best)) throw DomainError("every log-likelihood is -inf");
  for (std::size_t i = values.size(); i-- > 0;) {
    if (values[i] <= best + kTieTolerance) return d_min + static_cast<int>(i);
  }
  throw DomainError("information criterion: no minimum");
}

double bic_alpha(quantum::Count total_copies) {
  if (total_copies < 1) throw DomainError("BIC needs a positive copy count");
  return std::log(static_cast<double>(total_copies)) / 2.0;
}

CertificationReport build_report(const mle::Dataset& dataset,
                                 std::span<const mle::MlResult> sweep, const Prior& prior,
                                 std::span<const int> interval_deltas) {
  if (sweep.size() != prior.size()) {
    throw DimensionError("sweep does not cover the prior domain");
  }
  if (prior.d_max() > mle::dim_max(dataset)) {
    throw DimensionError("prior domain exceeds the dataset dimension");
  }
  const KappaKind kind = std::holds_alternative<quantum::MeasurementDataset>(dataset)
                             ? KappaKind::kFullState
                             : KappaKind::kDiagonal;
  const quantum::Count copies = mle::total_copies(dataset);

  std::vector<SolverSummary> solver;
  std::vector<BigLog> likelihoods;
  std::vector<double> log_nat;
  bool any_feasible = false;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const auto& r = sweep[i];
    solver.push_back({prior.d_min() + static_cast<int>(i), r.log_likelihood_nat,
                      r.iterations_used, r.converged, r.padded_from_lower_dim, r.feasible});
    any_feasible = any_feasible || r.feasible;
    const double ll = r.feasible ? r.log_likelihood_nat : -std::numeric_limits<double>::infinity();
    log_nat.push_back(ll);
    likelihoods.push_back(xprec::from_natural_log(ll));
  }

  CertificationReport report;
  if (!any_feasible) {
    // Background subtraction left no admissible state in any dimension.
    report.prior_label = prior.label();
    report.prior_weights = prior.weights();
    report.kappa_kind = kind;
    report.total_copies = copies;
    report.evidence.d_min = prior.d_min();
    report.evidence.likelihoods = std::move(likelihoods);
    report.log_likelihoods_nat = std::move(log_nat);
    report.warning = std::string(kNoDimensionWarning);
  } else {
    report = assemble(std::move(likelihoods), std::move(log_nat), prior, interval_deltas,
                      kind, copies);
  }
  report.solver = std::move(solver);
  if (report.d_rb) {
    report.estimator = sweep[static_cast<std::size_t>(*report.d_rb - prior.d_min())].estimator;
  }
  return report;
}

CertificationReport build_report_from_likelihoods(std::span<const BigLog> likelihoods,
                                                  const Prior& prior,
                                                  std::span<const int> interval_deltas,
                                                  KappaKind kappa_kind,
                                                  std::optional<quantum::Count> total_copies) {
  std::vector<double> log_nat;
  log_nat.reserve(likelihoods.size());
  for (const auto& l : likelihoods) {
    log_nat.push_back(l.is_zero() ? -std::numeric_limits<double>::infinity()
                                  : l.natural_log().convert_to<double>());
  }
  return assemble(std::vector<BigLog>(likelihoods.begin(), likelihoods.end()),
                  std::move(log_nat), prior, interval_deltas, kappa_kind, total_copies);
}

}  // namespace rbcert::certify
