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

#include "rbcert/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rbcert/error.hpp"

namespace rbcert::quantum {
namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + " must be a non-empty square matrix");
  }
}

}  // namespace

Eigensystem hermitian_eigen(const Matrix& m) {
  require_square(m, "eigendecomposition input");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw DegenerateInputError("Hermitian eigendecomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

HermitianOperator::HermitianOperator(const Matrix& m) {
  require_square(m, "Hermitian operator");
  if (!is_hermitian(m)) {
    throw DomainError("operator is not Hermitian within 1e-12");
  }
  m_ = (m + m.adjoint()) / 2.0;
}

HermitianOperator HermitianOperator::zero(int dim) {
  return HermitianOperator(Matrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(Matrix::Identity(dim, dim));
}

DensityOperator::DensityOperator(const Matrix& m) {
  require_square(m, "density operator");
  if (!is_hermitian(m)) {
    throw DomainError("density operator is not Hermitian within 1e-12");
  }
  m_ = (m + m.adjoint()) / 2.0;
  const double trace = m_.trace().real();
  if (std::abs(trace - 1.0) > kTraceTol) {
    throw DomainError("density operator trace " + std::to_string(trace) +
                      " differs from 1");
  }
  if (hermitian_eigen(m_).values.minCoeff() < -kPsdTol) {
    throw DomainError("density operator has a negative eigenvalue");
  }
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  if (dim < 1) throw DimensionError("dimension must be positive");
  return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::basis_state(int index, int dim) {
  if (dim < 1 || index < 0 || index >= dim) {
    throw DimensionError("basis index out of range");
  }
  Matrix m = Matrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return DensityOperator(m);
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd& psi) {
  const double norm = psi.squaredNorm();
  if (psi.size() == 0 || norm == 0.0) {
    throw DomainError("pure state needs a nonzero vector");
  }
  return DensityOperator(psi * psi.adjoint() / norm);
}

DensityOperator DensityOperator::diagonal(std::span<const double> p) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(p.size()),
                          static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p[i];
  }
  return DensityOperator(m);
}

PovmBasis::PovmBasis(std::vector<HermitianOperator> elements)
    : elements_(std::move(elements)) {
  if (elements_.empty()) throw DimensionError("POVM needs at least one element");
  dim_ = elements_.front().dim();
  Matrix sum = Matrix::Zero(dim_, dim_);
  for (const auto& e : elements_) {
    if (e.dim() != dim_) throw DimensionError("POVM elements differ in dimension");
    if (e.eigen().values.minCoeff() < -kPsdTol) {
      throw DomainError("POVM element is not positive semidefinite");
    }
    sum += e.matrix();
  }
  const double defect =
      (sum - Matrix::Identity(dim_, dim_)).cwiseAbs().maxCoeff();
  if (defect > kCompletenessTol) {
    throw DomainError("POVM elements do not sum to the identity (defect " +
                      std::to_string(defect) + ")");
  }
}

Count BasisCounts::copies() const {
  return std::accumulate(counts.begin(), counts.end(), Count{0});
}

MeasurementDataset::MeasurementDataset(int dim_max, std::vector<BasisCounts> bases)
    : dim_max_(dim_max), bases_(std::move(bases)) {
  if (dim_max_ < 1) throw DimensionError("dataset dimension must be positive");
  for (const auto& b : bases_) {
    if (b.basis.dim() != dim_max_) {
      throw DimensionError("basis dimension differs from dataset dimension");
    }
    if (b.counts.size() != b.basis.size()) {
      throw DimensionError("counts length differs from number of POVM elements");
    }
    for (Count n : b.counts) {
      if (n < 0) throw DomainError("negative count");
    }
  }
}

Count MeasurementDataset::total_copies() const {
  Count total = 0;
  for (const auto& b : bases_) total += b.copies();
  return total;
}

DiagonalDataset::DiagonalDataset(Eigen::MatrixXd response, std::vector<Count> counts,
                                 std::vector<int> column_levels, int dim_max)
    : response_(std::move(response)),
      counts_(std::move(counts)),
      column_levels_(std::move(column_levels)),
      dim_max_(dim_max) {
  const auto outcomes = static_cast<std::size_t>(response_.rows());
  const auto columns = static_cast<std::size_t>(response_.cols());
  if (outcomes == 0 || columns == 0) throw DimensionError("empty response matrix");
  if (counts_.size() != outcomes) {
    throw DimensionError("counts length differs from number of outcomes");
  }
  if (column_levels_.empty()) {
    column_levels_.resize(columns);
    std::iota(column_levels_.begin(), column_levels_.end(), 1);
  }
  if (column_levels_.size() != columns) {
    throw DimensionError("column_levels length differs from response columns");
  }
  if (dim_max_ == 0) {
    dim_max_ = *std::max_element(column_levels_.begin(), column_levels_.end());
  }
  if (dim_max_ < 1) throw DimensionError("dataset dimension must be positive");
  for (int level : column_levels_) {
    if (level < 1) throw DomainError("column levels must be positive");
  }
  if (response_.minCoeff() < 0.0 || response_.maxCoeff() > 1.0 + 1e-12) {
    throw DomainError("response entries must lie in [0, 1]");
  }
  for (Eigen::Index c = 0; c < response_.cols(); ++c) {
    if (response_.col(c).sum() > 1.0 + 1e-10) {
      throw DomainError("response column sums exceed 1");
    }
  }
  for (Count n : counts_) {
    if (n < 0) throw DomainError("negative count");
  }
}

Count DiagonalDataset::total_copies() const {
  return std::accumulate(counts_.begin(), counts_.end(), Count{0});
}

std::vector<int> DiagonalDataset::active_columns(int d) const {
  std::vector<int> out;
  for (std::size_t c = 0; c < column_levels_.size(); ++c) {
    if (column_levels_[c] <= d) out.push_back(static_cast<int>(c));
  }
  return out;
}

std::vector<double> born_probabilities(const DensityOperator& state,
                                       std::span<const HermitianOperator> elements) {
  std::vector<double> p;
  p.reserve(elements.size());
  for (const auto& e : elements) {
    if (e.dim() != state.dim()) {
      throw DimensionError("state and POVM element dimensions differ");
    }
    // tr(rho Pi) = sum_ab rho_ab Pi_ba
    double value = state.matrix().cwiseProduct(e.matrix().transpose()).sum().real();
    if (value < 0.0) {
      if (value < -kProbabilityClamp) {
        throw DomainError("negative Born probability; POVM is broken");
      }
      value = 0.0;
    }
    p.push_back(value);
  }
  return p;
}

std::vector<double> born_probabilities(const DensityOperator& state,
                                       const PovmBasis& basis) {
  auto p = born_probabilities(state, std::span<const HermitianOperator>(basis.elements()));
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("Born probabilities of a complete basis do not sum to 1");
  }
  return p;
}

double log_likelihood(std::span<const double> probabilities,
                      std::span<const Count> counts) {
  if (probabilities.size() != counts.size()) {
    throw DimensionError("probabilities and counts differ in length");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) continue;
    if (probabilities[j] <= 0.0) return -std::numeric_limits<double>::infinity();
    total += static_cast<double>(counts[j]) * std::log(probabilities[j]);
  }
  return total;
}

DensityOperator embed(const DensityOperator& state, int target_dim) {
  if (target_dim < state.dim()) {
    throw DimensionError("cannot embed into a smaller dimension");
  }
  Matrix m = Matrix::Zero(target_dim, target_dim);
  m.topLeftCorner(state.dim(), state.dim()) = state.matrix();
  return DensityOperator(m);
}

std::vector<HermitianOperator> truncate_basis(const PovmBasis& basis, int d) {
  if (d < 1 || d > basis.dim()) throw DimensionError("truncation dimension out of range");
  std::vector<HermitianOperator> out;
  out.reserve(basis.size());
  for (const auto& e : basis.elements()) {
    out.emplace_back(Matrix(e.matrix().topLeftCorner(d, d)));
  }
  return out;
}

double bhattacharyya_fidelity(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("distributions differ in length");
  double sum_p = 0.0;
  double sum_q = 0.0;
  double f = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || q[i] < 0.0) throw DomainError("negative probability");
    sum_p += p[i];
    sum_q += q[i];
    f += std::sqrt(p[i] * q[i]);
  }
  if (sum_p > 1.0 + 1e-9 || sum_q > 1.0 + 1e-9) {
    throw DomainError("distribution sums exceed 1");
  }
  return std::min(f, 1.0);
}

Matrix psd_sqrt(const Matrix& m) {
  const Eigensystem es = hermitian_eigen(m);
  // Round-off eigenvalues near zero would otherwise turn into ~1e-8 roots.
  const double floor = 1e-14 * std::max(1.0, es.values.cwiseAbs().maxCoeff());
  Eigen::VectorXd roots(es.values.size());
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    roots(i) = es.values(i) > floor ? std::sqrt(es.values(i)) : 0.0;
  }
  return es.vectors * roots.cast<Complex>().asDiagonal() * es.vectors.adjoint();
}

double uhlmann_fidelity(const DensityOperator& a, const DensityOperator& b) {
  if (a.dim() != b.dim()) throw DimensionError("states differ in dimension");
  // tr sqrt(sqrt(a) b sqrt(a)) is the trace norm of sqrt(a) sqrt(b).
  const Matrix product = psd_sqrt(a.matrix()) * psd_sqrt(b.matrix());
  Eigen::JacobiSVD<Matrix> svd(product);
  const double trace_norm = svd.singularValues().sum();
  return std::clamp(trace_norm * trace_norm, 0.0, 1.0);
}

}  // namespace rbcert::quantum
