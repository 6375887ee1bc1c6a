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

// Relative-belief dimension certification.
//
// Given the maximized likelihood L_d of the data in every truncation
// dimension d of a prior domain [d_min, D], the posterior is
//
//   pr(d | data) = L_d pr(d) / sum_d' L_d' pr(d'),
//
// and the relative-belief ratio RB(d) = pr(d | data) / pr(d). A dimension is
// plausible when RB(d) > 1; the certified dimension is the smallest
// plausible one. All of this runs on BigLog values because L_d underflows
// any hardware float for realistic datasets.

#ifndef RBCERT_CERTIFY_HPP_
#define RBCERT_CERTIFY_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbcert/mle.hpp"
#include "rbcert/quantum.hpp"
#include "rbcert/xprec.hpp"

namespace rbcert::certify {

using xprec::BigLog;
using xprec::Decimal;

/// Strictly positive weights over [d_min, d_max], normalized to one.
class Prior {
 public:
  static Prior uniform(int d_min, int d_max);
  /// Weights proportional to exp(-(d - center)^2).
  static Prior gaussian(int center, int d_min, int d_max);
  /// Normalizes arbitrary positive weights; the domain starts at d_min.
  static Prior from_weights(int d_min, std::vector<Decimal> weights,
                            std::string label = "custom");

  int d_min() const { return d_min_; }
  int d_max() const { return d_min_ + static_cast<int>(weights_.size()) - 1; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<Decimal>& weights() const { return weights_; }
  const Decimal& weight(int d) const;
  /// "uniform", "gaussian:<center>" or the label given to from_weights().
  const std::string& label() const { return label_; }

 private:
  Prior(int d_min, std::vector<Decimal> weights, std::string label);

  int d_min_ = 2;
  std::vector<Decimal> weights_;
  std::string label_;
};

enum class PriorKind { kUniform, kGaussian };

/// make_prior(kUniform, ...) or make_prior(kGaussian, ..., center).
Prior make_prior(PriorKind kind, int d_min, int d_max, int center = 0);

/// Parses "uniform" or "gaussian:<center>".
Prior parse_prior(std::string_view spec, int d_min, int d_max);

struct DimensionEvidence {
  int d_min = 2;
  std::vector<BigLog> likelihoods;
  std::vector<BigLog> posteriors;
  std::vector<BigLog> rb_ratios;

  int d_max() const { return d_min + static_cast<int>(likelihoods.size()) - 1; }
};

/// Posterior probabilities at extended precision. Throws DomainError when the
/// domains differ or every likelihood is zero.
std::vector<BigLog> posterior(std::span<const BigLog> likelihoods, const Prior& prior);

/// RB(d) = L_d / sum_d' L_d' pr(d').
std::vector<BigLog> rb_ratios(std::span<const BigLog> likelihoods, const Prior& prior);

DimensionEvidence compute_evidence(std::span<const BigLog> likelihoods, const Prior& prior);

/// True when RB strictly exceeds one. Ratios within 1e-70 (in log10) of one
/// are working-precision noise around an exact tie and do not count.
bool is_plausible(const BigLog& rb_ratio);

/// Smallest d with RB(d) > 1, or nothing.
std::optional<int> certify_dimension(const DimensionEvidence& evidence);

/// Posterior mass of [d_rb, d_rb + delta]. Throws DimensionError when the
/// interval leaves the domain.
BigLog plausible_interval_credibility(std::span<const BigLog> posteriors, int d_min,
                                      int d_rb, int delta);

enum class KappaKind { kFullState, kDiagonal };

std::string_view to_string(KappaKind kind);
KappaKind kappa_kind_from_string(std::string_view name);

/// Free parameters of a d-dimensional model: d^2 - 1 or d - 1.
double kappa(KappaKind kind, int d);

/// argmin_d alpha * kappa_d - log L_d; near-ties (1e-9) go to the largest d.
/// Throws DomainError when every log-likelihood is -inf or alpha <= 0.
int information_criterion(std::span<const double> log_likelihoods_nat, int d_min,
                          double alpha, KappaKind kind);

/// ln(N) / 2.
double bic_alpha(quantum::Count total_copies);

struct IntervalCredibility {
  int delta = 0;
  BigLog credibility;
};

struct SolverSummary {
  int d = 0;
  double log_likelihood_nat = 0.0;
  int iterations = 0;
  bool converged = false;
  bool padded_from_lower_dim = false;
  bool feasible = true;
};

struct Fidelity {
  std::string kind;  // "uhlmann" or "bhattacharyya"
  double value = 0.0;
};

inline constexpr std::string_view kNoDimensionWarning = "no dimension supported by data";

struct CertificationReport {
  std::optional<int> d_rb;
  DimensionEvidence evidence;
  std::string prior_label;
  std::vector<Decimal> prior_weights;
  std::vector<IntervalCredibility> intervals;
  std::vector<double> log_likelihoods_nat;
  std::optional<int> d_aic;
  std::optional<int> d_bic;
  double alpha_aic = 1.0;
  std::optional<double> alpha_bic;
  std::optional<quantum::Count> total_copies;
  KappaKind kappa_kind = KappaKind::kFullState;
  std::vector<SolverSummary> solver;
  std::optional<quantum::DensityOperator> estimator;  // at d_rb
  std::optional<Fidelity> fidelity;
  std::string warning;

  int d_min() const { return evidence.d_min; }
  int d_max() const { return evidence.d_max(); }
};

inline const std::vector<int> kDefaultDeltas = {0, 1, 2};

/// Certification from a dimension sweep; the sweep must cover the prior
/// domain in ascending order.
CertificationReport build_report(const mle::Dataset& dataset,
                                 std::span<const mle::MlResult> sweep, const Prior& prior,
                                 std::span<const int> interval_deltas = kDefaultDeltas);

/// Certification from precomputed likelihoods (no solver involved). BIC is
/// reported only when total_copies is known.
CertificationReport build_report_from_likelihoods(
    std::span<const BigLog> likelihoods, const Prior& prior,
    std::span<const int> interval_deltas = kDefaultDeltas,
    KappaKind kappa_kind = KappaKind::kFullState,
    std::optional<quantum::Count> total_copies = std::nullopt);

}  // namespace rbcert::certify

#endif  // RBCERT_CERTIFY_HPP_
