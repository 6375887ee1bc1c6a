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

// Finite-dimensional quantum states, measurements and likelihoods.
//
// All operators live in a truncated computational (Fock / mode-index)
// basis. Truncating to dimension d always means keeping the top-left d x d
// block, so a d-dimensional state is the same object as its zero-padded
// embedding into any larger space.

#ifndef RBCERT_QUANTUM_HPP_
#define RBCERT_QUANTUM_HPP_

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rbcert::quantum {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Count = std::int64_t;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kCompletenessTol = 1e-10;
inline constexpr double kProbabilityClamp = 1e-12;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors as
/// columns.
struct Eigensystem {
  Eigen::VectorXd values;
  Matrix vectors;
};

/// Eigendecomposition of a Hermitian matrix. Only the lower triangle is read.
Eigensystem hermitian_eigen(const Matrix& m);

/// True when m equals its adjoint within `tol` entrywise.
bool is_hermitian(const Matrix& m, double tol = kHermitianTol);

class HermitianOperator {
 public:
  /// Validates Hermiticity within kHermitianTol, then stores the exactly
  /// symmetrized matrix (m + m^dagger) / 2.
  explicit HermitianOperator(const Matrix& m);

  static HermitianOperator zero(int dim);
  static HermitianOperator identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Eigensystem eigen() const { return hermitian_eigen(m_); }

 private:
  Matrix m_;
};

class DensityOperator {
 public:
  /// Validates Hermiticity (1e-12), positivity (eigenvalues >= -1e-10) and
  /// unit trace (1e-10).
  explicit DensityOperator(const Matrix& m);

  static DensityOperator maximally_mixed(int dim);
  /// |index><index| in dimension dim.
  static DensityOperator basis_state(int index, int dim);
  /// |psi><psi| / <psi|psi>.
  static DensityOperator pure(const Eigen::VectorXcd& psi);
  /// diag(p); p must be a probability vector.
  static DensityOperator diagonal(std::span<const double> p);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Eigen::VectorXd diagonal_entries() const { return m_.diagonal().real(); }

 private:
  Matrix m_;
};

/// One measured basis / POVM: PSD elements summing to the identity.
class PovmBasis {
 public:
  explicit PovmBasis(std::vector<HermitianOperator> elements);

  int dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<HermitianOperator>& elements() const { return elements_; }

 private:
  int dim_ = 0;
  std::vector<HermitianOperator> elements_;
};

struct BasisCounts {
  PovmBasis basis;
  std::vector<Count> counts;

  Count copies() const;
};

/// Tomographic data: K measured bases on a D-dimensional space, each with
/// per-outcome click counts.
class MeasurementDataset {
 public:
  MeasurementDataset(int dim_max, std::vector<BasisCounts> bases);

  int dim_max() const { return dim_max_; }
  const std::vector<BasisCounts>& bases() const { return bases_; }
  Count total_copies() const;

 private:
  int dim_max_ = 0;
  std::vector<BasisCounts> bases_;
};

/// Data that only probes a photon-number distribution. Column c of the
/// response matrix is the outcome distribution produced by the c-th
/// photon-number configuration; column_levels[c] is the smallest truncation
/// dimension containing that configuration.
class DiagonalDataset {
 public:
  /// column_levels defaults to 1, 2, ..., columns; dim_max defaults to the
  /// largest level.
  DiagonalDataset(Eigen::MatrixXd response, std::vector<Count> counts,
                  std::vector<int> column_levels = {}, int dim_max = 0);

  int dim_max() const { return dim_max_; }
  const Eigen::MatrixXd& response() const { return response_; }
  const std::vector<Count>& counts() const { return counts_; }
  const std::vector<int>& column_levels() const { return column_levels_; }
  Count total_copies() const;
  /// Indices of the columns whose level is <= d, in column order.
  std::vector<int> active_columns(int d) const;

 private:
  Eigen::MatrixXd response_;
  std::vector<Count> counts_;
  std::vector<int> column_levels_;
  int dim_max_ = 0;
};

/// p_j = tr(rho Pi_j), with tiny negative round-off clamped to zero. Elements
/// may be truncated blocks, so the result need not sum to one.
std::vector<double> born_probabilities(const DensityOperator& state,
                                       std::span<const HermitianOperator> elements);
/// Same, for a complete basis; additionally checks that the result sums to 1.
std::vector<double> born_probabilities(const DensityOperator& state,
                                       const PovmBasis& basis);

/// sum_j n_j ln p_j with 0 ln 0 = 0; -inf if some observed outcome has p = 0.
double log_likelihood(std::span<const double> probabilities,
                      std::span<const Count> counts);

/// Zero-pads a state into a larger space (top-left block).
DensityOperator embed(const DensityOperator& state, int target_dim);

/// Restricts every element to its top-left d x d block.
std::vector<HermitianOperator> truncate_basis(const PovmBasis& basis, int d);

/// sum_i sqrt(p_i q_i).
double bhattacharyya_fidelity(std::span<const double> p,
                              std::span<const double> q);

/// (tr sqrt(sqrt(a) b sqrt(a)))^2.
double uhlmann_fidelity(const DensityOperator& a, const DensityOperator& b);

/// Hermitian square root of a PSD matrix (negative round-off clipped).
Matrix psd_sqrt(const Matrix& m);

}  // namespace rbcert::quantum

#endif  // RBCERT_QUANTUM_HPP_
