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

#include "densim/qcore.hpp"

#include <cmath>
#include <stdexcept>

namespace densim {

HermitianQuantity::HermitianQuantity(CMat entries, const Tolerances& tol)
    : entries_(std::move(entries)) {
  require_square(entries_, "HermitianQuantity");
  const double res = hermiticity_residual(entries_);
  if (res > tol.hermitian)
    throw std::invalid_argument("HermitianQuantity: not Hermitian (residual " +
                                std::to_string(res) + ")");
  // Symmetrize so downstream eigensolves see an exactly Hermitian matrix.
  entries_ = 0.5 * (entries_ + entries_.adjoint().eval());
}

Eigen::VectorXd HermitianQuantity::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMat> es(entries_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("HermitianQuantity: eigendecomposition failed");
  return es.eigenvalues();
}

DensityOperator::DensityOperator(CMat entries, const Tolerances& tol)
    : entries_(std::move(entries)) {
  require_square(entries_, "DensityOperator");
  const double hres = hermiticity_residual(entries_);
  if (hres > tol.hermitian)
    throw std::invalid_argument("DensityOperator: not Hermitian (residual " +
                                std::to_string(hres) + ")");
  const double tr = entries_.trace().real();
  if (std::abs(tr - 1.0) > tol.trace)
    throw std::invalid_argument("DensityOperator: trace " + std::to_string(tr) + " != 1");
  entries_ = 0.5 * (entries_ + entries_.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<CMat> es(entries_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("DensityOperator: eigendecomposition failed");
  if (es.eigenvalues().minCoeff() < -tol.psd)
    throw std::invalid_argument("DensityOperator: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
}

DensityOperator DensityOperator::pure(const CVec& psi, const Tolerances& tol) {
  const double n = psi.norm();
  if (std::abs(n - 1.0) > tol.hermitian)
    throw std::invalid_argument("DensityOperator::pure: state vector not normalized");
  DensityOperator rho;
  rho.entries_ = psi * psi.adjoint();
  return rho;
}

DensityOperator DensityOperator::maximally_mixed(Eigen::Index dim) {
  if (dim < 1) throw std::invalid_argument("DensityOperator: dim must be >= 1");
  DensityOperator rho;
  rho.entries_ = CMat::Identity(dim, dim) / static_cast<double>(dim);
  return rho;
}

Eigen::Index DensityOperator::numerical_rank(const Tolerances& tol) const {
  Eigen::SelfAdjointEigenSolver<CMat> es(entries_, Eigen::EigenvaluesOnly);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > tol.psd) ++r;
  return r;
}

GibbsState::GibbsState(DensityOperator r, HermitianQuantity s, double kb, const Tolerances& tol)
    : rho(std::move(r)), entropy_operator(std::move(s)), kbar(kb) {
  if (kbar <= 0.0) throw std::invalid_argument("GibbsState: kbar must be positive");
  require_same_dim(rho.dim(), entropy_operator.dim(), "GibbsState");
  const CMat rebuilt = hermitian_exp(-entropy_operator.entries() / kbar);
  if (max_abs(rebuilt - rho.entries()) > tol.matrix_exp)
    throw std::invalid_argument("GibbsState: exp(-S/kbar) does not reproduce rho");
}

double q_expectation(const DensityOperator& rho, const HermitianQuantity& a,
                     const Tolerances& tol) {
  require_same_dim(rho.dim(), a.dim(), "q_expectation");
  const Cplx tr = (rho.entries() * a.entries()).trace();
  if (std::abs(tr.imag()) > tol.hermitian)
    throw std::runtime_error("q_expectation: imaginary trace residue " +
                             std::to_string(tr.imag()));
  return tr.real();
}

double q_uncertainty(const DensityOperator& rho, const HermitianQuantity& a,
                     const Tolerances& tol) {
  require_same_dim(rho.dim(), a.dim(), "q_uncertainty");
  const double mean = q_expectation(rho, a, tol);
  const CMat centered = a.entries() - mean * CMat::Identity(a.dim(), a.dim());
  const double var = (rho.entries() * centered * centered).trace().real();
  return std::sqrt(std::max(var, 0.0));
}

SpectralValue nearest_spectral_value(const DensityOperator& rho, const HermitianQuantity& a,
                                     const Tolerances& tol) {
  require_same_dim(rho.dim(), a.dim(), "nearest_spectral_value");
  const double mean = q_expectation(rho, a, tol);
  const Eigen::VectorXd evs = a.eigenvalues();
  double best = evs(0);
  double gap = std::abs(evs(0) - mean);
  for (Eigen::Index i = 1; i < evs.size(); ++i) {
    const double g = std::abs(evs(i) - mean);
    if (g < gap) {
      gap = g;
      best = evs(i);
    }
  }
  return {best, gap};
}

GibbsState gibbs_from_generator(const HermitianQuantity& k, double kbar, const Tolerances& tol) {
  if (kbar <= 0.0) throw std::invalid_argument("gibbs_from_generator: kbar must be positive");
  const CMat w = hermitian_exp(-k.entries());
  const double z = w.trace().real();
  if (!(z > 0.0) || !std::isfinite(z))
    throw std::runtime_error("gibbs_from_generator: partition function not positive/finite");
  DensityOperator rho(w / z, tol);
  const CMat s =
      kbar * (k.entries() + std::log(z) * CMat::Identity(k.dim(), k.dim()));
  return GibbsState(std::move(rho), HermitianQuantity(s, tol), kbar, tol);
}

GrandCanonical grand_canonical(const HermitianQuantity& h, const HermitianQuantity& n, double t,
                               double mu, double v, double kbar, const Tolerances& tol) {
  if (t <= 0.0) throw std::invalid_argument("grand_canonical: T must be positive");
  if (v <= 0.0) throw std::invalid_argument("grand_canonical: V must be positive");
  require_same_dim(h.dim(), n.dim(), "grand_canonical");
  const Eigen::Index d = h.dim();
  const CMat g = (h.entries() - mu * n.entries()) / (kbar * t);
  const double z = hermitian_exp(-g).trace().real();
  const double pv = kbar * t * std::log(z);
  const double pressure = pv / v;
  const CMat s = (h.entries() + pv * CMat::Identity(d, d) - mu * n.entries()) / t;
  const CMat rho = hermitian_exp(-s / kbar);
  return {GibbsState(DensityOperator(rho, tol), HermitianQuantity(s, tol), kbar, tol), pressure};
}

double euler_residual(const GibbsState& state, const HermitianQuantity& h,
                      const std::vector<std::pair<double, HermitianQuantity>>& terms, double t,
                      const Tolerances& tol) {
  double r = q_expectation(state.rho, h, tol) - t * q_expectation(state.rho, state.entropy_operator, tol);
  for (const auto& [alpha, x] : terms) r -= alpha * q_expectation(state.rho, x, tol);
  return r;
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  require_same_dim(a.dim(), b.dim(), "trace_distance");
  Eigen::SelfAdjointEigenSolver<CMat> es(a.entries() - b.entries(), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace densim
