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

#include "rbcert/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/QR>

#include "rbcert/error.hpp"

namespace rbcert::simulate {
namespace {

void check_distribution(std::span<const double> p) {
  if (p.empty()) throw DomainError("empty probability vector");
  double total = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("invalid probability entry");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("probabilities do not sum to 1");
}

}  // namespace

void SimConfig::validate() const {
  if (copies_per_basis < 1) throw DomainError("copies per basis must be positive");
  if (num_bases < 1) throw DomainError("number of bases must be positive");
  if (dim_max < 2) throw DomainError("dim_max must be at least 2");
  if (!(dark_rate >= 0.0 && dark_rate < 1.0)) throw DomainError("dark rate must lie in [0, 1)");
}

quantum::PovmBasis haar_basis(int dim, Rng& rng) {
  if (dim < 2) throw DomainError("Haar basis needs dim >= 2");
  std::normal_distribution<double> normal(0.0, 1.0);
  quantum::Matrix z(dim, dim);
  for (int c = 0; c < dim; ++c) {
    for (int r = 0; r < dim; ++r) z(r, c) = quantum::Complex(normal(rng), normal(rng));
  }
  const Eigen::HouseholderQR<quantum::Matrix> qr(z);
  quantum::Matrix q = qr.householderQ();
  const quantum::Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Dividing out the phases of diag(R) makes the law exactly Haar.
  for (int c = 0; c < dim; ++c) {
    const double mag = std::abs(r(c, c));
    if (mag > 0.0) q.col(c) *= r(c, c) / mag;
  }
  std::vector<quantum::HermitianOperator> elements;
  elements.reserve(static_cast<std::size_t>(dim));
  for (int c = 0; c < dim; ++c) {
    const quantum::Matrix proj = q.col(c) * q.col(c).adjoint();
    elements.emplace_back(0.5 * (proj + proj.adjoint()));
  }
  return quantum::PovmBasis(std::move(elements));
}

quantum::DensityOperator mode_state(int n, int dim) {
  if (n < 0 || n >= dim) throw DimensionError("mode index outside the space");
  return quantum::DensityOperator::basis_state(n, dim);
}

std::vector<double> apply_dark_counts(std::span<const double> probabilities, double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) throw DomainError("dark rate must lie in [0, 1)");
  check_distribution(probabilities);
  const double floor = rate / static_cast<double>(probabilities.size());
  std::vector<double> out;
  out.reserve(probabilities.size());
  for (double p : probabilities) out.push_back((1.0 - rate) * p + floor);
  return out;
}

std::vector<Count> sample_counts(std::span<const double> probabilities, Count n_copies,
                                 Rng& rng) {
  if (n_copies < 1) throw DomainError("number of copies must be positive");
  check_distribution(probabilities);
  std::vector<Count> counts(probabilities.size(), 0);
  Count remaining = n_copies;
  double mass_left = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  // Conditional binomials: outcome j given that earlier outcomes took their share.
  for (std::size_t j = 0; j + 1 < probabilities.size() && remaining > 0; ++j) {
    const double q = mass_left > 0.0 ? std::clamp(probabilities[j] / mass_left, 0.0, 1.0) : 0.0;
    std::binomial_distribution<Count> binom(remaining, q);
    counts[j] = binom(rng);
    remaining -= counts[j];
    mass_left -= probabilities[j];
  }
  counts.back() += remaining;
  return counts;
}

quantum::MeasurementDataset simulate_temporal(int n, const SimConfig& config) {
  config.validate();
  const auto state = mode_state(n, config.dim_max);
  Rng rng(config.seed);
  std::vector<quantum::BasisCounts> bases;
  bases.reserve(static_cast<std::size_t>(config.num_bases));
  for (int k = 0; k < config.num_bases; ++k) {
    auto basis = haar_basis(config.dim_max, rng);
    auto p = quantum::born_probabilities(state, basis);
    // Renormalize the round-off before mixing.
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x /= total;
    if (config.dark_rate > 0.0) p = apply_dark_counts(p, config.dark_rate);
    auto counts = sample_counts(p, config.copies_per_basis, rng);
    bases.push_back({std::move(basis), std::move(counts)});
  }
  return quantum::MeasurementDataset(config.dim_max, std::move(bases));
}

PolarimetryData simulate_polarimetry(const polarimetry::TwoModeSource& source,
                                     const polarimetry::PnrdModel& model, Count n_copies,
                                     Rng& rng, std::optional<int> cutoff) {
  model.validate();
  const int c = cutoff ? *cutoff : polarimetry::auto_cutoff(source);
  const auto dist = polarimetry::source_distribution(source, c);
  const Eigen::MatrixXd response = polarimetry::response_matrix(model, c);
  const int side = c + 1;
  Eigen::VectorXd pairs(side * side);
  for (int m = 0; m < side; ++m) {
    for (int mp = 0; mp < side; ++mp) pairs(m * side + mp) = dist.p(m, mp);
  }
  // The truncated distribution is renormalized; its tail is reported.
  pairs /= pairs.sum();
  Eigen::VectorXd outcomes = response * pairs;
  outcomes /= outcomes.sum();
  std::vector<double> p(outcomes.data(), outcomes.data() + outcomes.size());
  auto counts = sample_counts(p, n_copies, rng);
  PolarimetryData out{
      quantum::DiagonalDataset(response, std::move(counts), polarimetry::pair_column_levels(c),
                               model.n0 + 1),
      c, dist.tail_mass, std::vector<double>(pairs.data(), pairs.data() + pairs.size())};
  return out;
}

}  // namespace rbcert::simulate
