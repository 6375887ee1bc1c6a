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

// Two-mode polarimetry with imperfect photon-number-resolving detectors.
//
// A detector of efficiency eta multiplexes the incoming light over n0 bins
// and reports how many bins clicked. Its "n clicks" element is diagonal in
// the Fock basis. Wave plates act on a (H, V) mode pair through the
// angular-momentum generators J2 and J3, which conserve total photon number.

#ifndef RBCERT_POLARIMETRY_HPP_
#define RBCERT_POLARIMETRY_HPP_

#include <vector>

#include <Eigen/Dense>

#include "rbcert/quantum.hpp"

namespace rbcert::polarimetry {

using quantum::HermitianOperator;
using quantum::Matrix;

struct PnrdModel {
  double eta = 1.0;
  int n0 = 1;

  /// Throws DomainError unless eta is in [0, 1] and n0 >= 1.
  void validate() const;
};

enum class SourceKind { kBell, kTmsv };

struct TwoModeSource {
  SourceKind kind = SourceKind::kTmsv;
  double r = 0.0;  // squeezing parameter
};

/// Half-wave (theta) and quarter-wave (phi) plate angles for both arms.
struct PolarimetrySetting {
  double theta_a = 0.0;
  double phi_a = 0.0;
  double theta_b = 0.0;
  double phi_b = 0.0;
};

/// <m|Pi_n|m> for m = 0..m_max.
std::vector<double> pnrd_diagonal(const PnrdModel& model, int n, int m_max);

struct SourceDistribution {
  Eigen::MatrixXd p;  // p(m, m'), (cutoff + 1) x (cutoff + 1)
  double tail_mass = 0.0;

  int cutoff() const { return static_cast<int>(p.rows()) - 1; }
};

/// p_mn = sech^4(r) tanh^{2(m+n)}(r) for m, n <= cutoff.
SourceDistribution source_distribution(const TwoModeSource& source, int cutoff);

inline constexpr double kTailTarget = 1e-12;
inline constexpr int kMaxAutoCutoff = 60;

/// Smallest cutoff whose tail mass is below kTailTarget, capped at
/// kMaxAutoCutoff.
int auto_cutoff(const TwoModeSource& source);

/// Outcome (n1, n2) is row n1 * (n0 + 1) + n2; photon pair (m, m') is
/// column m * (cutoff + 1) + m'.
Eigen::MatrixXd response_matrix(const PnrdModel& model, int cutoff);

/// Smallest truncation dimension containing each photon pair column:
/// max(m, m') + 1.
std::vector<int> pair_column_levels(int cutoff);

struct AngularMomentum {
  HermitianOperator j2;
  HermitianOperator j3;
};

/// Generators on the two-mode space truncated at n0 photons per mode;
/// |n_H, n_V> is index n_H * (n0 + 1) + n_V.
AngularMomentum angular_momentum_ops(int n0);

/// exp(-i phi J3) exp(-i theta J2) on one arm.
Matrix waveplate_unitary(double theta, double phi, int n0);

/// U (Pi_n1 (x) Pi_n2) U^dagger on one arm for all (n1, n2), where Pi acts
/// on H and V respectively. Element index n1 * (n0 + 1) + n2.
std::vector<HermitianOperator> two_port_povm(double theta, double phi,
                                             const PnrdModel& model);
/// Arm A elements of a full setting.
std::vector<HermitianOperator> two_port_povm(const PolarimetrySetting& setting,
                                             const PnrdModel& model);

/// Number of singular values of the stacked vectorized operators above
/// `threshold` times the largest.
int span_rank(const std::vector<HermitianOperator>& ops, double threshold = 1e-8);

/// (1/3)(n0 + 1)(2 n0^2 + 4 n0 + 3).
long long dpol_per_port(int n0);
/// (1/3)(n0 + 1)(2 n0 + 1)(4 n0 + 3).
long long dpol_total_photon(int n0);

/// r = dB ln(10) / 20.
double squeezing_db_to_r(double db);

}  // namespace rbcert::polarimetry

#endif  // RBCERT_POLARIMETRY_HPP_
