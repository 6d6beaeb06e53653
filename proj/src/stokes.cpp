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

#include "densim/stokes.hpp"

#include <cmath>
#include <stdexcept>

namespace densim {

namespace {

Eigen::Matrix2cd pauli(int a) {
  Eigen::Matrix2cd m;
  const Cplx i(0, 1);
  switch (a) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -i, i, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

}  // namespace

double StokesVector::polarized_magnitude() const {
  return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3);
}

void StokesVector::validate() const {
  if (s0 < polarized_magnitude() - kStokesSlack)
    throw std::invalid_argument("StokesVector: S0 < |S| (outside the cone)");
}

CoherenceMatrix::CoherenceMatrix(Eigen::Matrix2cd entries, const Tolerances& tol)
    : entries_(std::move(entries)) {
  if (hermiticity_residual(entries_) > tol.hermitian)
    throw std::invalid_argument("CoherenceMatrix: not Hermitian");
  entries_ = 0.5 * (entries_ + entries_.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(entries_, Eigen::EigenvaluesOnly);
  // PSD slack scales with the intensity; coherence matrices are not
  // normalized to trace one.
  const double scale = std::max(1.0, std::abs(entries_.trace().real()));
  if (es.eigenvalues().minCoeff() < -tol.psd * scale)
    throw std::invalid_argument("CoherenceMatrix: not positive semidefinite");
}

CoherenceMatrix CoherenceMatrix::from_pure(const Eigen::Vector2cd& psi) {
  return CoherenceMatrix(psi * psi.adjoint());
}

bool JonesMatrix::lossless(double tol) const {
  return (entries.adjoint() * entries - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <=
         tol;
}

StokesVector MuellerMatrix::apply(const StokesVector& s) const {
  Eigen::Vector4d v(s.s0, s.s1, s.s2, s.s3);
  Eigen::Vector4d w = entries * v;
  return {w(0), w(1), w(2), w(3)};
}

CoherenceMatrix stokes_to_coherence(const StokesVector& s, const Tolerances& tol) {
  s.validate();
  Eigen::Matrix2cd m;
  m << Cplx(s.s0 + s.s3, 0), Cplx(s.s1, -s.s2), Cplx(s.s1, s.s2), Cplx(s.s0 - s.s3, 0);
  return CoherenceMatrix(0.5 * m, tol);
}

StokesVector coherence_to_stokes(const CoherenceMatrix& rho) {
  const Eigen::Matrix2cd& m = rho.entries();
  StokesVector s;
  s.s0 = (m(0, 0) + m(1, 1)).real();
  s.s1 = (m(0, 1) + m(1, 0)).real();
  s.s2 = (m(1, 0) - m(0, 1)).imag();
  s.s3 = (m(0, 0) - m(1, 1)).real();
  return s;
}

double degree_of_polarization(const StokesVector& s) {
  if (s.s0 <= 0.0) throw std::invalid_argument("degree_of_polarization: S0 must be positive");
  return std::min(s.polarized_magnitude() / s.s0, 1.0);
}

CoherenceMatrix apply_jones(const CoherenceMatrix& rho, const JonesMatrix& t,
                            const Tolerances& tol) {
  Eigen::Matrix2cd out = t.entries * rho.entries() * t.entries.adjoint();
  return CoherenceMatrix(0.5 * (out + out.adjoint().eval()), tol);
}

JonesMatrix polarizer(const Eigen::Vector2cd& phi, double tol) {
  if (std::abs(phi.norm() - 1.0) > tol)
    throw std::invalid_argument("polarizer: phi must be a unit vector");
  return {phi * phi.adjoint()};
}

MuellerMatrix jones_to_mueller(const JonesMatrix& t) {
  MuellerMatrix m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      m.entries(a, b) =
          0.5 * (pauli(a) * t.entries * pauli(b) * t.entries.adjoint()).trace().real();
  return m;
}

DepolarizingMap::DepolarizingMap(std::vector<Branch> branches)
    : branches_(std::move(branches)) {
  if (branches_.empty()) throw std::invalid_argument("DepolarizingMap: needs at least one branch");
  for (const auto& [w, t] : branches_)
    if (w < 0.0) throw std::invalid_argument("DepolarizingMap: negative weight");
}

CoherenceMatrix DepolarizingMap::apply(const CoherenceMatrix& rho, const Tolerances& tol) const {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (const auto& [w, t] : branches_) out += w * t.entries * rho.entries() * t.entries.adjoint();
  return CoherenceMatrix(0.5 * (out + out.adjoint().eval()), tol);
}

MuellerMatrix DepolarizingMap::mueller() const {
  MuellerMatrix m;
  m.entries.setZero();
  for (const auto& [w, t] : branches_) m.entries += w * jones_to_mueller(t).entries;
  return m;
}

SlicedMediumResult sliced_medium_evolution(
    const std::function<Eigen::Matrix2cd(double)>& hamiltonian, const Eigen::Vector2cd& psi0,
    double t_end, int n_slices, double hbar) {
  if (n_slices < 1) throw std::invalid_argument("sliced_medium_evolution: n_slices must be >= 1");
  const Cplx i(0, 1);
  const double dt = t_end / n_slices;

  Eigen::Vector2cd psi = psi0;
  for (int m = 0; m < n_slices; ++m) {
    const double t_mid = (m + 0.5) * dt;
    const Eigen::Matrix2cd h = hamiltonian(t_mid);
    psi = (Eigen::Matrix2cd::Identity() - i * (dt / hbar) * h) * psi;
  }

  // Reference: exact midpoint exponentials on a 10x finer grid.
  const int n_ref = 10 * n_slices;
  const double dt_ref = t_end / n_ref;
  Eigen::Vector2cd ref = psi0;
  for (int m = 0; m < n_ref; ++m) {
    const double t_mid = (m + 0.5) * dt_ref;
    Eigen::Matrix2cd h = hamiltonian(t_mid);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h);
    Eigen::Vector2cd phases;
    for (int k = 0; k < 2; ++k) {
      const double a = -dt_ref * es.eigenvalues()(k) / hbar;
      phases(k) = Cplx(std::cos(a), std::sin(a));
    }
    ref = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * ref;
  }

  SlicedMediumResult result;
  result.psi_sliced = psi;
  result.psi_ref = ref;
  result.error_norm = (psi - ref).norm();
  result.norm_drift = std::abs(psi.norm() - 1.0);
  return result;
}

}  // namespace densim
