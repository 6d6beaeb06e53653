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

#pragma once

#include <utility>
#include <vector>

#include "densim/matrix.hpp"
#include "densim/tolerances.hpp"

namespace densim {

/// A measurable quantity: an N x N matrix validated to be Hermitian.
/// Immutable after construction.
class HermitianQuantity {
 public:
  explicit HermitianQuantity(CMat entries, const Tolerances& tol = default_tolerances());

  Eigen::Index dim() const { return entries_.rows(); }
  const CMat& entries() const { return entries_; }

  /// Eigenvalues in ascending order.
  Eigen::VectorXd eigenvalues() const;

 private:
  CMat entries_;
};

/// System state: Hermitian, trace one, positive semidefinite.
/// Pure states are the rank-1 case rho = psi psi*.
class DensityOperator {
 public:
  explicit DensityOperator(CMat entries, const Tolerances& tol = default_tolerances());

  /// rho = psi psi* from a unit vector.
  static DensityOperator pure(const CVec& psi, const Tolerances& tol = default_tolerances());

  /// I/N.
  static DensityOperator maximally_mixed(Eigen::Index dim);

  Eigen::Index dim() const { return entries_.rows(); }
  const CMat& entries() const { return entries_; }

  /// rank within the PSD tolerance (eigenvalues > tol.psd count).
  Eigen::Index numerical_rank(const Tolerances& tol = default_tolerances()) const;

 private:
  DensityOperator() = default;
  CMat entries_;
};

/// Gibbs form rho = exp(-S/kbar) with Hermitian entropy operator S.
struct GibbsState {
  DensityOperator rho;
  HermitianQuantity entropy_operator;  // units of kbar
  double kbar = 1.0;

  GibbsState(DensityOperator r, HermitianQuantity s, double kb,
             const Tolerances& tol = default_tolerances());
};

/// <A> = Tr(rho A); the trace's imaginary residue is checked against
/// tol.hermitian and discarded.
double q_expectation(const DensityOperator& rho, const HermitianQuantity& a,
                     const Tolerances& tol = default_tolerances());

/// sigma_A = sqrt(<(A - <A>)^2>) >= 0.
double q_uncertainty(const DensityOperator& rho, const HermitianQuantity& a,
                     const Tolerances& tol = default_tolerances());

struct SpectralValue {
  double lambda;  ///< the eigenvalue of A closest to <A>
  double gap;     ///< |lambda - <A>|; bounded by sigma_A
};

/// The eigenvalue of A nearest to <A>. The spectrum proximity bound
/// guarantees gap <= sigma_A (+ tol.theorem numerically).
SpectralValue nearest_spectral_value(const DensityOperator& rho, const HermitianQuantity& a,
                                     const Tolerances& tol = default_tolerances());

/// rho = exp(-K)/Tr exp(-K) and S = kbar (K + ln Tr exp(-K)), so that
/// exp(-S/kbar) reproduces rho exactly.
GibbsState gibbs_from_generator(const HermitianQuantity& k, double kbar = 1.0,
                                const Tolerances& tol = default_tolerances());

struct GrandCanonical {
  GibbsState state;
  double pressure;
};

/// Equilibrium state of a pure substance: S = (H + PV - mu N)/T with the
/// pressure solved from normalization, P V = kbar T ln Tr exp(-(H - mu N)/(kbar T)).
GrandCanonical grand_canonical(const HermitianQuantity& h, const HermitianQuantity& n, double t,
                               double mu, double v, double kbar = 1.0,
                               const Tolerances& tol = default_tolerances());

/// Signed residual <H> - T <S> - sum_j alpha_j <X_j> of the Euler
/// decomposition H = T S + sum alpha_j X_j evaluated in `state`. The
/// Hamiltonian is passed explicitly since GibbsState does not carry it.
double euler_residual(const GibbsState& state, const HermitianQuantity& h,
                      const std::vector<std::pair<double, HermitianQuantity>>& terms, double t,
                      const Tolerances& tol = default_tolerances());

/// Trace distance (1/2)||rho - sigma||_1.
double trace_distance(const DensityOperator& a, const DensityOperator& b);

}  // namespace densim
