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

// Maximum-likelihood state reconstruction in a truncated Hilbert space.
//
// The solver is a projected-gradient ascent: take a step along the
// trace-constrained likelihood gradient, then map the result back to the
// state space by clipping negative eigenvalues and renormalizing the trace.
// An optional background-subtraction constraint additionally removes every
// diagonal population below a threshold (together with its row and column),
// which keeps detector dark counts from leaking weight into every level.

#ifndef RBCERT_MLE_HPP_
#define RBCERT_MLE_HPP_

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "rbcert/quantum.hpp"

namespace rbcert::mle {

using quantum::DensityOperator;
using quantum::DiagonalDataset;
using quantum::HermitianOperator;
using quantum::MeasurementDataset;

using Dataset = std::variant<MeasurementDataset, DiagonalDataset>;

int dim_max(const Dataset& dataset);
quantum::Count total_copies(const Dataset& dataset);

struct MlConfig {
  int max_iterations = 5000;
  /// Initial step; defaults to 1/N with N the total number of copies.
  std::optional<double> step_size;
  double backtracking_factor = 0.5;
  /// Stop once an accepted step improves log L by less than
  /// convergence_tol * max(1, |log L|).
  double convergence_tol = 1e-10;
  /// Independent starts; defaults to 5 with a bias threshold, 1 without.
  std::optional<int> restarts;
  /// Background-subtraction threshold in [0, 1); only used for
  /// MeasurementDataset fits.
  std::optional<double> bias_threshold;
  /// Keep the per-iteration log-likelihood trace of the returned run.
  bool record_trace = false;

  /// Throws DomainError for out-of-range fields.
  void validate() const;
  int effective_restarts() const;
};

struct MlResult {
  DensityOperator estimator;
  /// Natural-log likelihood of the data under the estimator; -inf when an
  /// observed outcome is impossible in this dimension.
  double log_likelihood_nat = 0.0;
  int iterations_used = 0;
  bool converged = false;
  bool padded_from_lower_dim = false;
  /// False when no start survived the background-subtraction constraint. The
  /// estimator is then the maximally mixed placeholder and the likelihood is
  /// -inf.
  bool feasible = true;
  /// Accepted-iterate log-likelihoods (only with MlConfig::record_trace).
  std::vector<double> trace;
};

/// Clips negative eigenvalues to zero and renormalizes the trace. Throws
/// DegenerateInputError if no eigenvalue is positive.
DensityOperator project_psd(const HermitianOperator& h);

/// Zeroes every diagonal entry below `threshold` together with its row and
/// column, then renormalizes. Throws DegenerateInputError if nothing
/// survives.
DensityOperator subtract_bias(const DensityOperator& state, double threshold);

/// Log-likelihood of the data for a d-dimensional state (d = state.dim()).
double log_likelihood(const MeasurementDataset& dataset, const DensityOperator& state);
/// Diagonal case: `state` is diagonal over the columns active at dimension d.
double log_likelihood(const DiagonalDataset& dataset, int d,
                      const DensityOperator& state);

/// || R rho - rho ||_F with R = (1/N) sum_jk (n_jk / p_jk) Pi_jk restricted
/// to the state's dimension. Zero at an interior likelihood maximum.
double stationarity_residual(const MeasurementDataset& dataset,
                             const DensityOperator& state);

MlResult fit_ml(const MeasurementDataset& dataset, int d, const MlConfig& config,
                std::uint64_t seed);
/// The bias threshold is ignored for diagonal data.
MlResult fit_ml(const DiagonalDataset& dataset, int d, const MlConfig& config,
                std::uint64_t seed);
MlResult fit_ml(const Dataset& dataset, int d, const MlConfig& config,
                std::uint64_t seed);

/// Fits every d in [d_min, d_max] and enforces a non-decreasing likelihood:
/// a fit that ends below the previous dimension is replaced by the previous
/// estimator zero-padded into d.
std::vector<MlResult> sweep_dimensions(const Dataset& dataset, int d_min, int d_max,
                                       const MlConfig& config, std::uint64_t seed);

/// Zero-pads a diagonal-data estimator from the columns active at d_from to
/// those active at d_to.
DensityOperator embed_diagonal(const DiagonalDataset& dataset,
                               const DensityOperator& state, int d_from, int d_to);

}  // namespace rbcert::mle

#endif  // RBCERT_MLE_HPP_
