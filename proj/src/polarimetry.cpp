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

#include "rbcert/polarimetry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include "rbcert/error.hpp"

namespace rbcert::polarimetry {
namespace {

constexpr double kNegativeClamp = 1e-12;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

// x^m with 0^0 = 1.
double power(double x, int m) { return m == 0 ? 1.0 : std::pow(x, m); }

Matrix annihilation(int n0) {
  Matrix a = Matrix::Zero(n0 + 1, n0 + 1);
  for (int n = 1; n <= n0; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// exp(-i t H) for Hermitian H.
Matrix unitary_exp(const Matrix& h, double t) {
  const auto es = quantum::hermitian_eigen(h);
  Eigen::VectorXcd phases(es.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases(i) = std::polar(1.0, -t * es.values(i));
  }
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

}  // namespace

void PnrdModel::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("detector efficiency must lie in [0, 1]");
  if (n0 < 1) throw DomainError("n0 must be at least 1");
}

std::vector<double> pnrd_diagonal(const PnrdModel& model, int n, int m_max) {
  model.validate();
  if (n < 0 || n > model.n0) {
    throw DomainError("click number " + std::to_string(n) + " outside [0, n0]");
  }
  if (m_max < 0) throw DomainError("m_max must be nonnegative");
  const int n0 = model.n0;
  std::vector<double> out(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m) {
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double base = 1.0 - model.eta * (n0 - n + k) / n0;
      sum += (k % 2 == 0 ? 1.0 : -1.0) * binomial(n, k) * power(base, m);
    }
    double value = binomial(n0, n) * sum;
    if (value < -kNegativeClamp) {
      throw DomainError("PNRD element has a negative diagonal entry");
    }
    out[static_cast<std::size_t>(m)] = std::clamp(value, 0.0, 1.0);
  }
  return out;
}

SourceDistribution source_distribution(const TwoModeSource& source, int cutoff) {
  if (!(source.r >= 0.0) || !std::isfinite(source.r)) {
    throw DomainError("squeezing parameter must be finite and nonnegative");
  }
  if (cutoff < 0) throw DomainError("cutoff must be nonnegative");
  // Both source kinds share the traced-out photon-pair statistics.
  const double x = std::pow(std::tanh(source.r), 2);
  const double sech2 = 1.0 - x;
  SourceDistribution out;
  out.p.resize(cutoff + 1, cutoff + 1);
  for (int m = 0; m <= cutoff; ++m) {
    for (int k = 0; k <= cutoff; ++k) out.p(m, k) = sech2 * sech2 * power(x, m + k);
  }
  // Closed form of 1 - (1 - x^{c+1})^2, free of cancellation.
  const double head = power(x, cutoff + 1);
  out.tail_mass = head * (2.0 - head);
  return out;
}

int auto_cutoff(const TwoModeSource& source) {
  for (int c = 0; c < kMaxAutoCutoff; ++c) {
    if (source_distribution(source, c).tail_mass < kTailTarget) return c;
  }
  return kMaxAutoCutoff;
}

Eigen::MatrixXd response_matrix(const PnrdModel& model, int cutoff) {
  model.validate();
  if (cutoff < 0) throw DomainError("cutoff must be nonnegative");
  const int clicks = model.n0 + 1;
  const int photons = cutoff + 1;
  Eigen::MatrixXd single(clicks, photons);
  for (int n = 0; n < clicks; ++n) {
    const auto row = pnrd_diagonal(model, n, cutoff);
    for (int m = 0; m < photons; ++m) single(n, m) = row[static_cast<std::size_t>(m)];
  }
  Eigen::MatrixXd r(clicks * clicks, photons * photons);
  for (int n1 = 0; n1 < clicks; ++n1) {
    for (int n2 = 0; n2 < clicks; ++n2) {
      for (int m = 0; m < photons; ++m) {
        for (int mp = 0; mp < photons; ++mp) {
          r(n1 * clicks + n2, m * photons + mp) = single(n1, m) * single(n2, mp);
        }
      }
    }
  }
  return r;
}

std::vector<int> pair_column_levels(int cutoff) {
  std::vector<int> levels;
  levels.reserve(static_cast<std::size_t>((cutoff + 1) * (cutoff + 1)));
  for (int m = 0; m <= cutoff; ++m) {
    for (int mp = 0; mp <= cutoff; ++mp) levels.push_back(std::max(m, mp) + 1);
  }
  return levels;
}

AngularMomentum angular_momentum_ops(int n0) {
  if (n0 < 1) throw DomainError("n0 must be at least 1");
  const Matrix a = annihilation(n0);
  const Matrix id = Matrix::Identity(n0 + 1, n0 + 1);
  // H is the first tensor factor.
  const Matrix a_h = Eigen::kroneckerProduct(a, id);
  const Matrix a_v = Eigen::kroneckerProduct(id, a);
  const quantum::Complex i(0.0, 1.0);
  const Matrix j2 = 0.5 * i * (a_v.adjoint() * a_h - a_h.adjoint() * a_v);
  const Matrix j3 = 0.5 * (a_h.adjoint() * a_h - a_v.adjoint() * a_v);
  return {HermitianOperator(j2), HermitianOperator(j3)};
}

Matrix waveplate_unitary(double theta, double phi, int n0) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw DomainError("wave-plate angles must be finite");
  }
  const auto ops = angular_momentum_ops(n0);
  return unitary_exp(ops.j3.matrix(), phi) * unitary_exp(ops.j2.matrix(), theta);
}

std::vector<HermitianOperator> two_port_povm(double theta, double phi,
                                             const PnrdModel& model) {
  model.validate();
  const int n0 = model.n0;
  const int side = n0 + 1;
  const Matrix u = waveplate_unitary(theta, phi, n0);
  std::vector<std::vector<double>> diag;
  for (int n = 0; n <= n0; ++n) diag.push_back(pnrd_diagonal(model, n, n0));
  std::vector<HermitianOperator> out;
  out.reserve(static_cast<std::size_t>(side * side));
  for (int n1 = 0; n1 < side; ++n1) {
    for (int n2 = 0; n2 < side; ++n2) {
      Eigen::VectorXcd d(side * side);
      for (int mh = 0; mh < side; ++mh) {
        for (int mv = 0; mv < side; ++mv) {
          d(mh * side + mv) = diag[static_cast<std::size_t>(n1)][static_cast<std::size_t>(mh)] *
                              diag[static_cast<std::size_t>(n2)][static_cast<std::size_t>(mv)];
        }
      }
      const Matrix element = u * d.asDiagonal() * u.adjoint();
      out.emplace_back(0.5 * (element + element.adjoint()));
    }
  }
  return out;
}

std::vector<HermitianOperator> two_port_povm(const PolarimetrySetting& setting,
                                             const PnrdModel& model) {
  return two_port_povm(setting.theta_a, setting.phi_a, model);
}

int span_rank(const std::vector<HermitianOperator>& ops, double threshold) {
  if (ops.empty()) return 0;
  const int dim = ops.front().dim();
  Matrix stacked(dim * dim, static_cast<Eigen::Index>(ops.size()));
  for (std::size_t c = 0; c < ops.size(); ++c) {
    if (ops[c].dim() != dim) throw DimensionError("operators of different dimension");
    stacked.col(static_cast<Eigen::Index>(c)) =
        Eigen::Map<const Eigen::VectorXcd>(ops[c].matrix().data(), dim * dim);
  }
  const Eigen::BDCSVD<Matrix> svd(stacked);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return static_cast<int>((s.array() > threshold * s(0)).count());
}

long long dpol_per_port(int n0) {
  if (n0 < 1) throw DomainError("n0 must be at least 1");
  const long long n = n0;
  return (n + 1) * (2 * n * n + 4 * n + 3) / 3;
}

long long dpol_total_photon(int n0) {
  if (n0 < 1) throw DomainError("n0 must be at least 1");
  const long long n = n0;
  return (n + 1) * (2 * n + 1) * (4 * n + 3) / 3;
}

double squeezing_db_to_r(double db) {
  if (!(db >= 0.0) || !std::isfinite(db)) throw DomainError("squeezing must be finite and >= 0 dB");
  return db * std::log(10.0) / 20.0;
}

}  // namespace rbcert::polarimetry
