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

// Seeded data generators. Every function draws only from the Rng it is
// handed, so a dataset is a pure function of its seed.

#ifndef RBCERT_SIMULATE_HPP_
#define RBCERT_SIMULATE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rbcert/polarimetry.hpp"
#include "rbcert/quantum.hpp"
#include "rbcert/random.hpp"

namespace rbcert::simulate {

using quantum::Count;

struct SimConfig {
  std::uint64_t seed = 0;
  Count copies_per_basis = 1000;
  int num_bases = 11;
  int dim_max = 10;
  double dark_rate = 0.0;

  void validate() const;
};

/// Rank-one projectors onto the columns of a Haar-random unitary.
quantum::PovmBasis haar_basis(int dim, Rng& rng);

/// |n><n| in dimension dim.
quantum::DensityOperator mode_state(int n, int dim);

/// (1 - rate) p + rate / len.
std::vector<double> apply_dark_counts(std::span<const double> probabilities, double rate);

/// One multinomial draw of n_copies trials.
std::vector<Count> sample_counts(std::span<const double> probabilities, Count n_copies,
                                 Rng& rng);

/// K Haar bases measured on |n><n|, with optional uniform background.
quantum::MeasurementDataset simulate_temporal(int n, const SimConfig& config);

struct PolarimetryData {
  quantum::DiagonalDataset dataset;
  int cutoff = 0;
  double tail_mass = 0.0;
  /// Photon-pair distribution the counts were drawn from, column-ordered
  /// like the response matrix.
  std::vector<double> pair_distribution;
};

/// Counts over the (n0 + 1)^2 click outcomes. The candidate dimensions run
/// up to n0 + 1 photon levels per mode; the cutoff defaults to auto_cutoff.
PolarimetryData simulate_polarimetry(const polarimetry::TwoModeSource& source,
                                     const polarimetry::PnrdModel& model, Count n_copies,
                                     Rng& rng, std::optional<int> cutoff = std::nullopt);

}  // namespace rbcert::simulate

#endif  // RBCERT_SIMULATE_HPP_
