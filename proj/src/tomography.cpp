// Copyright 2026 The densim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "densim/tomography.hpp"

#include <cmath>
#include <stdexcept>

namespace densim {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;

CVec unit(Eigen::Index dim, Eigen::Index j) {
  CVec v = CVec::Zero(dim);
  v(j) = 1.0;
  return v;
}
}  // namespace

TestSuite::TestSuite(Eigen::Index dim) : dim_(dim) {
  if (dim < 2) throw std::invalid_argument("TestSuite: dim must be >= 2");
  tests_.reserve(static_cast<std::size_t>(dim * dim - 1));
  for (Eigen::Index j = 0; j + 1 < dim; ++j) tests_.push_back(unit(dim, j));
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = j + 1; k < dim; ++k)
      tests_.push_back(kInvSqrt2 * (unit(dim, j) + unit(dim, k)));
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = j + 1; k < dim; ++k)
      tests_.push_back(kInvSqrt2 * (unit(dim, j) + Cplx(0, 1) * unit(dim, k)));
}

FrequencyTable measure_suite(const DensityOperator& rho, const TestSuite& suite,
                             std::optional<std::uint64_t> n, std::uint64_t seed,
                             const Tolerances& tol) {
  require_same_dim(rho.dim(), suite.dim(), "measure_suite");
  FrequencyTable table;
  table.values.reserve(suite.size());
  table.sample_sizes.reserve(suite.size());
  for (std::size_t t = 0; t < suite.size(); ++t) {
    const CVec& phi = suite.tests()[t];
    const double p = std::clamp((phi.adjoint() * rho.entries() * phi)(0).real(), 0.0, 1.0);
    if (!n) {
      table.values.push_back(p);
      table.sample_sizes.push_back(std::nullopt);
      continue;
    }
    Rng rng(Rng::split(seed, t));
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < *n; ++i)
      if (rng.uniform() < p) ++hits;
    table.values.push_back(static_cast<double>(hits) / static_cast<double>(*n));
    table.sample_sizes.push_back(n);
  }
  (void)tol;
  return table;
}

Reconstruction reconstruct_state(const FrequencyTable& table, Eigen::Index dim,
                                 const Tolerances& tol) {
  const std::size_t expected = static_cast<std::size_t>(dim * dim - 1);
  if (table.values.size() != expected)
    throw std::invalid_argument("reconstruct_state: table length " +
                                std::to_string(table.values.size()) + ", expected " +
                                std::to_string(expected));

  CMat est = CMat::Zero(dim, dim);
  double diag_sum = 0.0;
  for (Eigen::Index j = 0; j + 1 < dim; ++j) {
    est(j, j) = table.values[static_cast<std::size_t>(j)];
    diag_sum += table.values[static_cast<std::size_t>(j)];
  }
  est(dim - 1, dim - 1) = 1.0 - diag_sum;

  std::size_t t = static_cast<std::size_t>(dim - 1);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = j + 1; k < dim; ++k, ++t) {
      const double half_diag = 0.5 * (est(j, j).real() + est(k, k).real());
      const double re = table.values[t] - half_diag;
      est(j, k) += Cplx(re, 0);
      est(k, j) += Cplx(re, 0);
    }
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = j + 1; k < dim; ++k, ++t) {
      const double half_diag = 0.5 * (est(j, j).real() + est(k, k).real());
      const double im = half_diag - table.values[t];
      est(j, k) += Cplx(0, im);
      est(k, j) -= Cplx(0, im);
    }

  // Nearest valid state: clip negative eigenvalues, renormalize trace.
  Eigen::SelfAdjointEigenSolver<CMat> es(est);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("reconstruct_state: eigendecomposition failed");
  Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  const double total = clipped.sum();
  if (total <= 0.0) throw std::runtime_error("reconstruct_state: estimate has no positive part");
  clipped /= total;
  CMat projected =
      es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
  projected = 0.5 * (projected + projected.adjoint().eval());
  const double change = max_abs(projected - est);
  return {DensityOperator(projected, tol), change};
}

std::vector<DensityOperator> calibration_states(Eigen::Index dim) {
  std::vector<DensityOperator> states;
  for (Eigen::Index j = 0; j < dim; ++j)
    states.push_back(DensityOperator::pure(unit(dim, j)));
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = j + 1; k < dim; ++k)
      states.push_back(DensityOperator::pure(kInvSqrt2 * (unit(dim, j) + unit(dim, k))));
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = j + 1; k < dim; ++k)
      states.push_back(
          DensityOperator::pure(kInvSqrt2 * (unit(dim, j) + Cplx(0, 1) * unit(dim, k))));
  return states;
}

namespace {

/// Orthonormal Hermitian basis under Tr(A B): diagonal units, then
/// (E_jk + E_kj)/sqrt(2), then i(E_jk - E_kj)/sqrt(2).
std::vector<CMat> hermitian_basis(Eigen::Index dim) {
  std::vector<CMat> basis;
  basis.reserve(static_cast<std::size_t>(dim * dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    CMat b = CMat::Zero(dim, dim);
    b(j, j) = 1.0;
    basis.push_back(b);
  }
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = j + 1; k < dim; ++k) {
      CMat b = CMat::Zero(dim, dim);
      b(j, k) = kInvSqrt2;
      b(k, j) = kInvSqrt2;
      basis.push_back(b);
    }
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index k = j + 1; k < dim; ++k) {
      CMat b = CMat::Zero(dim, dim);
      b(j, k) = Cplx(0, kInvSqrt2);
      b(k, j) = Cplx(0, -kInvSqrt2);
      basis.push_back(b);
    }
  return basis;
}

}  // namespace

CalibrationResult calibrate_instrument(const std::vector<DensityOperator>& states,
                                       const RMat& freqs, Eigen::Index effect_count,
                                       double kappa_max, const Tolerances& tol) {
  if (states.empty()) throw std::invalid_argument("calibrate_instrument: no states");
  if (effect_count < 1) throw std::invalid_argument("calibrate_instrument: effect_count < 1");
  const Eigen::Index dim = states.front().dim();
  const Eigen::Index n_states = static_cast<Eigen::Index>(states.size());
  if (freqs.rows() != n_states || freqs.cols() != effect_count)
    throw std::invalid_argument("calibrate_instrument: freqs must be (states x effects)");

  const std::vector<CMat> basis = hermitian_basis(dim);
  const Eigen::Index n_params = static_cast<Eigen::Index>(basis.size());

  RMat design(n_states, n_params);
  for (Eigen::Index j = 0; j < n_states; ++j)
    for (Eigen::Index a = 0; a < n_params; ++a)
      design(j, a) = trace_real(states[static_cast<std::size_t>(j)].entries(), basis[a]);

  Eigen::JacobiSVD<RMat> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double kappa = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(kappa < kappa_max) || n_states < n_params)
    throw std::runtime_error("calibrate_instrument: states not diverse enough (condition " +
                             std::to_string(kappa) + ")");

  double residual_sq = 0.0;
  std::vector<CMat> raw(static_cast<std::size_t>(effect_count), CMat::Zero(dim, dim));
  for (Eigen::Index k = 0; k < effect_count; ++k) {
    const RVec coeff = svd.solve(freqs.col(k));
    residual_sq += (design * coeff - freqs.col(k)).squaredNorm();
    for (Eigen::Index a = 0; a < n_params; ++a) raw[static_cast<std::size_t>(k)] += coeff(a) * basis[a];
  }

  // Projection back to a valid POVM: clip each effect's negative
  // eigenvalues, then spread the completeness deficit proportionally to
  // the effect traces.
  std::vector<CMat> clipped;
  clipped.reserve(raw.size());
  for (const CMat& e : raw) {
    CMat h = 0.5 * (e + e.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0);
    clipped.push_back(es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint());
  }
  CMat sum = CMat::Zero(dim, dim);
  double trace_total = 0.0;
  for (const CMat& e : clipped) {
    sum += e;
    trace_total += e.trace().real();
  }
  if (trace_total <= 0.0)
    throw std::runtime_error("calibrate_instrument: degenerate estimate (zero total trace)");
  const CMat deficit = CMat::Identity(dim, dim) - sum;
  double change = 0.0;
  std::vector<HermitianQuantity> effects;
  std::vector<OutcomeLabel> outcomes;
  for (Eigen::Index k = 0; k < effect_count; ++k) {
    CMat e = clipped[static_cast<std::size_t>(k)] +
             deficit * (clipped[static_cast<std::size_t>(k)].trace().real() / trace_total);
    e = 0.5 * (e + e.adjoint().eval());
    // A second clip in case the deficit spread reintroduced a tiny
    // negative eigenvalue; deviations stay within the reported change.
    Eigen::SelfAdjointEigenSolver<CMat> es(e);
    if (es.eigenvalues().minCoeff() < -tol.psd) {
      Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0);
      e = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
    }
    change = std::max(change, max_abs(e - raw[static_cast<std::size_t>(k)]));
    effects.emplace_back(e, tol);
    outcomes.emplace_back(static_cast<double>(k));
  }
  // Completeness can still be off by the amount the second clip removed;
  // absorb it into the largest-trace effect.
  CMat final_sum = CMat::Zero(dim, dim);
  for (const auto& e : effects) final_sum += e.entries();
  const CMat leftover = CMat::Identity(dim, dim) - final_sum;
  if (max_abs(leftover) > tol.hermitian) {
    std::size_t widest = 0;
    for (std::size_t k = 1; k < effects.size(); ++k)
      if (effects[k].entries().trace().real() > effects[widest].entries().trace().real())
        widest = k;
    CMat e = effects[widest].entries() + leftover;
    effects[widest] = HermitianQuantity(0.5 * (e + e.adjoint().eval()), tol);
  }

  return {Povm(std::move(effects), std::move(outcomes), tol), std::sqrt(residual_sq), kappa,
          change};
}

}  // namespace densim
