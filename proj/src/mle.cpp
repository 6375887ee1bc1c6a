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

#include "rbcert/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rbcert/error.hpp"
#include "rbcert/random.hpp"

namespace rbcert::mle {
namespace {

using quantum::Complex;
using quantum::Count;
using quantum::Matrix;

constexpr double kInf = std::numeric_limits<double>::infinity();
// Probabilities are floored here only inside the gradient.
constexpr double kGradientFloor = 1e-300;
// A truncated POVM block this small cannot produce a click.
constexpr double kNullBlock = 1e-14;
// Weight of the random pure component in restart states.
constexpr double kRestartMixing = 0.5;
// Steps shrunk below step0 * kMinStepRatio count as "no ascent direction".
constexpr double kMinStepRatio = 1e-24;
// Upper bound on step growth relative to the initial step.
constexpr double kMaxStepRatio = 1e8;
// Consecutive small-change steps required before declaring convergence.
constexpr int kConvergencePatience = 3;

Matrix project_matrix(const Matrix& h) {
  const quantum::Eigensystem es = quantum::hermitian_eigen(h);
  const Eigen::VectorXd clipped = es.values.cwiseMax(0.0);
  const double total = clipped.sum();
  if (!(total > 0.0)) {
    throw DegenerateInputError("projection: no positive eigenvalue");
  }
  Matrix out = es.vectors * (clipped / total).cast<Complex>().asDiagonal() *
               es.vectors.adjoint();
  return (out + out.adjoint()) / 2.0;
}

Matrix bias_matrix(const Matrix& rho, double threshold) {
  const auto n = rho.rows();
  std::vector<bool> keep(static_cast<std::size_t>(n));
  bool any = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    keep[static_cast<std::size_t>(i)] = !(rho(i, i).real() < threshold);
    any = any || keep[static_cast<std::size_t>(i)];
  }
  if (!any) {
    throw DegenerateInputError("bias subtraction: every population is below threshold");
  }
  Matrix out = rho;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (keep[static_cast<std::size_t>(i)]) continue;
    out.row(i).setZero();
    out.col(i).setZero();
  }
  const double trace = out.trace().real();
  if (!(trace > 0.0)) {
    throw DegenerateInputError("bias subtraction: nothing left to renormalize");
  }
  return out / trace;
}

// Outcomes with at least one click at truncation dimension d.
struct MatrixModel {
  std::vector<Matrix> blocks;
  std::vector<double> counts;
  double total = 0.0;
  bool impossible = false;
  int dim = 0;

  MatrixModel(const MeasurementDataset& dataset, int d) : dim(d) {
    for (const auto& bc : dataset.bases()) {
      for (std::size_t j = 0; j < bc.counts.size(); ++j) {
        if (bc.counts[j] == 0) continue;
        Matrix block = bc.basis.elements()[j].matrix().topLeftCorner(d, d);
        if (block.cwiseAbs().maxCoeff() < kNullBlock) {
          impossible = true;
          continue;
        }
        blocks.push_back(std::move(block));
        counts.push_back(static_cast<double>(bc.counts[j]));
        total += counts.back();
      }
    }
  }

  double probability(std::size_t i, const Matrix& rho) const {
    return rho.cwiseProduct(blocks[i].conjugate()).sum().real();
  }

  double log_likelihood(const Matrix& rho) const {
    double f = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const double p = probability(i, rho);
      if (!(p > 0.0)) return -kInf;
      f += counts[i] * std::log(p);
    }
    return f;
  }

  // Gradient of log L minus its trace-constraint multiplier N * identity.
  Matrix ascent_direction(const Matrix& rho) const {
    Matrix g = Matrix::Identity(dim, dim) * Complex(-total, 0.0);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const double p = std::max(probability(i, rho), kGradientFloor);
      g += blocks[i] * (counts[i] / p);
    }
    return (g + g.adjoint()) / 2.0;
  }
};

struct DiagonalModel {
  Eigen::MatrixXd response;  // counted outcomes x active columns
  Eigen::VectorXd counts;
  double total = 0.0;
  bool impossible = false;

  DiagonalModel(const DiagonalDataset& dataset, const std::vector<int>& active) {
    std::vector<Eigen::Index> rows;
    for (std::size_t o = 0; o < dataset.counts().size(); ++o) {
      if (dataset.counts()[o] == 0) continue;
      const auto r = static_cast<Eigen::Index>(o);
      double row_max = 0.0;
      for (int c : active) row_max = std::max(row_max, dataset.response()(r, c));
      if (row_max <= 0.0) {
        impossible = true;
        continue;
      }
      rows.push_back(r);
    }
    response.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(active.size()));
    counts.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (std::size_t c = 0; c < active.size(); ++c) {
        response(ii, static_cast<Eigen::Index>(c)) = dataset.response()(rows[i], active[c]);
      }
      counts(ii) = static_cast<double>(dataset.counts()[static_cast<std::size_t>(rows[i])]);
    }
    total = counts.sum();
  }

  double log_likelihood(const Eigen::VectorXd& p) const {
    const Eigen::VectorXd q = response * p;
    double f = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      if (!(q(i) > 0.0)) return -kInf;
      f += counts(i) * std::log(q(i));
    }
    return f;
  }

  // Gradient scaled by p, so a step of 1/N is exactly one EM update and an
  // identity response is solved in a single step. The plain gradient has
  // curvature N^2 / n_j per coordinate and crawls when counts are uneven.
  Eigen::VectorXd ascent_direction(const Eigen::VectorXd& p) const {
    const Eigen::VectorXd q = (response * p).cwiseMax(kGradientFloor);
    const Eigen::VectorXd g = response.transpose() * counts.cwiseQuotient(q);
    return p.cwiseProduct(g) - total * p;
  }
};

Eigen::VectorXd project_simplex_clip(const Eigen::VectorXd& v) {
  const Eigen::VectorXd clipped = v.cwiseMax(0.0);
  const double total = clipped.sum();
  if (!(total > 0.0)) throw DegenerateInputError("projection: no positive entry");
  return clipped / total;
}

// Real inner product <a, b> = Re tr(a^H b).
double inner(const Matrix& a, const Matrix& b) {
  return (a.conjugate().cwiseProduct(b)).sum().real();
}
double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(b); }

template <class State>
struct RunOutcome {
  State state;
  double log_likelihood = -kInf;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

// Projected-gradient ascent with backtracking. Every accepted iterate has a
// log-likelihood no smaller than its predecessor. The trial step of each
// iteration is the Barzilai-Borwein estimate |s|^2 / -<s, y> from the last
// accepted move; the likelihood is badly conditioned when counts differ by
// orders of magnitude and a fixed step would crawl.
template <class Model, class State, class Project>
RunOutcome<State> ascend(const Model& model, State start, Project project,
                         const MlConfig& config, double step0) {
  RunOutcome<State> out;
  out.state = std::move(start);
  double f = model.log_likelihood(out.state);
  out.log_likelihood = f;
  if (config.record_trace) out.trace.push_back(f);
  const double step_min = step0 * kMinStepRatio;
  const double step_max = step0 * kMaxStepRatio;
  double step = step0;
  State direction = model.ascent_direction(out.state);
  int quiet_steps = 0;
  for (int it = 0; it < config.max_iterations; ++it) {
    bool accepted = false;
    State candidate;
    double fc = -kInf;
    while (step >= step_min) {
      try {
        candidate = project(State(out.state + step * direction));
        fc = model.log_likelihood(candidate);
        if (fc >= f) {
          accepted = true;
          break;
        }
      } catch (const DegenerateInputError&) {
      }
      step *= config.backtracking_factor;
    }
    out.iterations = it + 1;
    if (!accepted) {
      out.converged = true;
      break;
    }
    const double change = (std::isfinite(f) ? fc - f : kInf);
    const State moved = candidate - out.state;
    out.state = std::move(candidate);
    f = fc;
    out.log_likelihood = f;
    if (config.record_trace) out.trace.push_back(f);
    // One short Barzilai-Borwein step says little; wait for a run of them.
    if (change <= config.convergence_tol * std::max(1.0, std::abs(f))) {
      if (++quiet_steps >= kConvergencePatience) {
        out.converged = true;
        break;
      }
    } else {
      quiet_steps = 0;
    }
    State next = model.ascent_direction(out.state);
    const double sy = -inner(moved, State(next - direction));
    if (sy > 0.0) {
      step = std::clamp(inner(moved, moved) / sy, step_min, step_max);
    } else {
      step = std::min(step / config.backtracking_factor, step_max);
    }
    direction = std::move(next);
  }
  return out;
}

Eigen::VectorXcd random_ket(int dim, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd psi(dim);
  for (int i = 0; i < dim; ++i) psi(i) = Complex(normal(rng), normal(rng));
  return psi / psi.norm();
}

Matrix restart_state(int dim, int restart, Rng& rng) {
  const Matrix mixed = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  if (restart == 0) return mixed;
  const Eigen::VectorXcd psi = random_ket(dim, rng);
  return (1.0 - kRestartMixing) * mixed + kRestartMixing * (psi * psi.adjoint());
}

void check_dimension(int d, int dim_max) {
  if (d < 2 || d > dim_max) {
    throw DimensionError("fit dimension " + std::to_string(d) + " outside [2, " +
                         std::to_string(dim_max) + "]");
  }
}

}  // namespace

int dim_max(const Dataset& dataset) {
  return std::visit([](const auto& ds) { return ds.dim_max(); }, dataset);
}

quantum::Count total_copies(const Dataset& dataset) {
  return std::visit([](const auto& ds) { return ds.total_copies(); }, dataset);
}

void MlConfig::validate() const {
  if (max_iterations < 1) throw DomainError("max_iterations must be positive");
  if (step_size && !(*step_size > 0.0)) throw DomainError("step_size must be positive");
  if (!(backtracking_factor > 0.0 && backtracking_factor < 1.0)) {
    throw DomainError("backtracking_factor must lie in (0, 1)");
  }
  if (!(convergence_tol > 0.0)) throw DomainError("convergence_tol must be positive");
  if (restarts && *restarts < 1) throw DomainError("restarts must be positive");
  if (bias_threshold && !(*bias_threshold >= 0.0 && *bias_threshold < 1.0)) {
    throw DomainError("bias_threshold must lie in [0, 1)");
  }
}

int MlConfig::effective_restarts() const {
  if (restarts) return *restarts;
  return bias_threshold ? 5 : 1;
}

DensityOperator project_psd(const HermitianOperator& h) {
  return DensityOperator(project_matrix(h.matrix()));
}

DensityOperator subtract_bias(const DensityOperator& state, double threshold) {
  return DensityOperator(bias_matrix(state.matrix(), threshold));
}

double log_likelihood(const MeasurementDataset& dataset, const DensityOperator& state) {
  const int d = state.dim();
  if (d > dataset.dim_max()) throw DimensionError("state larger than dataset dimension");
  double total = 0.0;
  for (const auto& bc : dataset.bases()) {
    const auto blocks = quantum::truncate_basis(bc.basis, d);
    const auto p = quantum::born_probabilities(state, blocks);
    total += quantum::log_likelihood(p, bc.counts);
    if (std::isinf(total)) return total;
  }
  return total;
}

double log_likelihood(const DiagonalDataset& dataset, int d, const DensityOperator& state) {
  const auto active = dataset.active_columns(d);
  if (static_cast<int>(active.size()) != state.dim()) {
    throw DimensionError("state size differs from the active column count");
  }
  const Eigen::VectorXd p = state.diagonal_entries();
  std::vector<double> q(dataset.counts().size(), 0.0);
  for (std::size_t o = 0; o < q.size(); ++o) {
    for (std::size_t c = 0; c < active.size(); ++c) {
      q[o] += dataset.response()(static_cast<Eigen::Index>(o), active[c]) *
              p(static_cast<Eigen::Index>(c));
    }
  }
  return quantum::log_likelihood(q, dataset.counts());
}

double stationarity_residual(const MeasurementDataset& dataset,
                             const DensityOperator& state) {
  const MatrixModel model(dataset, state.dim());
  const Matrix& rho = state.matrix();
  Matrix r = Matrix::Zero(state.dim(), state.dim());
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    r += model.blocks[i] * (model.counts[i] / model.probability(i, rho));
  }
  r /= model.total;
  return (r * rho - rho).norm();
}

MlResult fit_ml(const MeasurementDataset& dataset, int d, const MlConfig& config,
                std::uint64_t seed) {
  config.validate();
  check_dimension(d, dataset.dim_max());
  const Count n_total = dataset.total_copies();
  if (n_total == 0) throw DomainError("dataset has no counts");

  const MatrixModel model(dataset, d);
  const double step0 = config.step_size.value_or(1.0 / static_cast<double>(n_total));
  const auto mixed = DensityOperator::maximally_mixed(d);
  if (model.blocks.empty()) {
    return MlResult{mixed, -kInf, 0, true, false, true, {}};
  }

  const auto plain = [](const Matrix& h) { return project_matrix(h); };
  Rng rng(seed);
  std::optional<RunOutcome<Matrix>> best;
  const auto consider = [&](RunOutcome<Matrix> run) {
    if (!best || run.log_likelihood > best->log_likelihood) best = std::move(run);
  };

  if (!config.bias_threshold) {
    for (int r = 0; r < config.effective_restarts(); ++r) {
      consider(ascend(model, restart_state(d, r, rng), plain, config, step0));
    }
  } else {
    const double threshold = *config.bias_threshold;
    const auto constrained = [threshold](const Matrix& h) {
      return bias_matrix(project_matrix(h), threshold);
    };
    // Besides the requested starts, begin once from the unconstrained optimum,
    // so a dataset whose estimate has no population above the threshold is
    // reported as infeasible.
    std::vector<Matrix> starts;
    for (int r = 0; r < config.effective_restarts(); ++r) {
      starts.push_back(restart_state(d, r, rng));
    }
    starts.push_back(ascend(model, Matrix(mixed.matrix()), plain, config, step0).state);
    for (const Matrix& start : starts) {
      Matrix feasible_start;
      try {
        feasible_start = bias_matrix(start, threshold);
      } catch (const DegenerateInputError&) {
        continue;
      }
      consider(ascend(model, std::move(feasible_start), constrained, config, step0));
    }
    if (!best) {
      MlResult out{mixed, -kInf, 0, false, false, false, {}};
      return out;
    }
  }

  MlResult out{DensityOperator(best->state), best->log_likelihood, best->iterations,
               best->converged, false, true, std::move(best->trace)};
  if (model.impossible) out.log_likelihood_nat = -kInf;
  return out;
}

MlResult fit_ml(const DiagonalDataset& dataset, int d, const MlConfig& config,
                std::uint64_t seed) {
  config.validate();
  check_dimension(d, dataset.dim_max());
  const Count n_total = dataset.total_copies();
  if (n_total == 0) throw DomainError("dataset has no counts");

  const auto active = dataset.active_columns(d);
  if (active.empty()) throw DimensionError("no response columns at this dimension");
  const DiagonalModel model(dataset, active);
  const double step0 = config.step_size.value_or(1.0 / static_cast<double>(n_total));
  const auto width = static_cast<Eigen::Index>(active.size());
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(width, 1.0 / static_cast<double>(width));
  const auto to_state = [](const Eigen::VectorXd& p) {
    return DensityOperator::diagonal(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
  };
  if (model.counts.size() == 0) {
    return MlResult{to_state(uniform), -kInf, 0, true, false, true, {}};
  }

  Rng rng(seed);
  std::optional<RunOutcome<Eigen::VectorXd>> best;
  for (int r = 0; r < config.effective_restarts(); ++r) {
    Eigen::VectorXd start = uniform;
    if (r > 0) {
      std::exponential_distribution<double> exponential;
      Eigen::VectorXd corner(width);
      for (Eigen::Index i = 0; i < width; ++i) corner(i) = exponential(rng);
      start = (1.0 - kRestartMixing) * uniform + kRestartMixing * corner / corner.sum();
    }
    auto run = ascend(model, std::move(start), project_simplex_clip, config, step0);
    if (!best || run.log_likelihood > best->log_likelihood) best = std::move(run);
  }
  MlResult out{to_state(best->state), best->log_likelihood, best->iterations,
               best->converged, false, true, std::move(best->trace)};
  if (model.impossible) out.log_likelihood_nat = -kInf;
  return out;
}

MlResult fit_ml(const Dataset& dataset, int d, const MlConfig& config, std::uint64_t seed) {
  return std::visit([&](const auto& ds) { return fit_ml(ds, d, config, seed); }, dataset);
}

DensityOperator embed_diagonal(const DiagonalDataset& dataset, const DensityOperator& state,
                               int d_from, int d_to) {
  const auto from = dataset.active_columns(d_from);
  const auto to = dataset.active_columns(d_to);
  if (static_cast<int>(from.size()) != state.dim() || d_to < d_from) {
    throw DimensionError("embed_diagonal: inconsistent dimensions");
  }
  std::vector<double> p(to.size(), 0.0);
  const Eigen::VectorXd diag = state.diagonal_entries();
  for (std::size_t i = 0; i < from.size(); ++i) {
    const auto pos = std::find(to.begin(), to.end(), from[i]) - to.begin();
    p[static_cast<std::size_t>(pos)] = diag(static_cast<Eigen::Index>(i));
  }
  return DensityOperator::diagonal(p);
}

std::vector<MlResult> sweep_dimensions(const Dataset& dataset, int d_min, int d_max,
                                       const MlConfig& config, std::uint64_t seed) {
  const int top = dim_max(dataset);
  if (d_min < 2 || d_min > d_max || d_max > top) {
    throw DimensionError("sweep range must satisfy 2 <= d_min <= d_max <= D");
  }
  std::vector<MlResult> results;
  results.reserve(static_cast<std::size_t>(d_max - d_min + 1));
  for (int d = d_min; d <= d_max; ++d) {
    results.push_back(fit_ml(dataset, d, config, derive_seed(seed, static_cast<std::uint64_t>(d))));
  }
  // Padding pass, ascending in d: the likelihood sequence must not decrease.
  for (std::size_t i = 1; i < results.size(); ++i) {
    const MlResult& prev = results[i - 1];
    MlResult& cur = results[i];
    const bool worse = !cur.feasible ? prev.feasible
                                     : cur.log_likelihood_nat < prev.log_likelihood_nat;
    if (!worse) continue;
    const int d = d_min + static_cast<int>(i);
    DensityOperator padded =
        std::holds_alternative<MeasurementDataset>(dataset)
            ? quantum::embed(prev.estimator, d)
            : embed_diagonal(std::get<DiagonalDataset>(dataset), prev.estimator, d - 1, d);
    MlResult replacement{std::move(padded), prev.log_likelihood_nat, cur.iterations_used,
                         cur.converged, true, prev.feasible, {}};
    cur = std::move(replacement);
  }
  return results;
}

}  // namespace rbcert::mle
