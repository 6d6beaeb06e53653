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

#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "densim/qcore.hpp"

namespace densim {

/// Operator-valued function of the classical phase-space point together
/// with its parameter gradients (one Hermitian matrix per classical
/// coordinate).
struct PhaseSpaceOperator {
  std::function<CMat(const RVec& p, const RVec& q)> op;
  std::function<std::vector<CMat>(const RVec& p, const RVec& q)> grad_p;
  std::function<std::vector<CMat>(const RVec& p, const RVec& q)> grad_q;
};

struct HybridModel {
  PhaseSpaceOperator hamiltonian;
  double hbar = 1.0;
};

/// Classical phase-space point paired with a quantum density operator.
struct HybridState {
  RVec q;
  RVec p;
  DensityOperator rho;
  double t = 0.0;
};

/// Rank-1 sector of the hybrid dynamics evolved as a state vector.
struct PureHybridState {
  RVec q;
  RVec p;
  CVec psi;
  double t = 0.0;
};

/// Max relative deviation of the model's analytic gradients from central
/// finite differences of H at (p, q).
double gradient_check(const HybridModel& model, const RVec& p, const RVec& q);

/// One Strang-split step: half-step classical leapfrog with frozen rho,
/// unitary quantum step at the classical midpoint, half-step classical.
/// Preserves Tr rho and the rank of rho exactly (unitary conjugation).
HybridState hybrid_step(const HybridState& state, const HybridModel& model, double dt,
                        const Tolerances& tol = default_tolerances());

/// Same scheme on the rank-1 form rho = psi psi*.
PureHybridState hybrid_step(const PureHybridState& state, const HybridModel& model, double dt);

/// d<A>/dt along the hybrid flow:
/// <dA/dq><dH/dp> - <dA/dp><dH/dq> + <(i/hbar)[H, A]>; zero for A = H.
double ehrenfest_rhs(const HybridState& state, const HybridModel& model,
                     const PhaseSpaceOperator& a, const Tolerances& tol = default_tolerances());

/// Relativistic spinning-particle Hamiltonian alpha.p + beta m + e V(q)
/// in the standard Dirac representation; eigenvalues are
/// +-sqrt(|p|^2 + m^2) + e V(q), each twice.
HermitianQuantity dirac_spin_hamiltonian(const Eigen::Vector3d& p, const Eigen::Vector3d& q,
                                         double mass, double charge,
                                         const std::function<double(const Eigen::Vector3d&)>& v);

/// Smooth family of state vectors phi_z with tangents dphi/dz_a.
struct CoherentFamily {
  int param_dim = 0;
  std::function<CVec(const RVec& z)> phi;
  std::function<std::vector<CVec>(const RVec& z)> d_phi;
};

/// The trivial family: all vectors of an N-level system by their real
/// and imaginary coordinates (z has length 2N). Reduction with it is
/// plain Schroedinger evolution.
CoherentFamily full_state_family(Eigen::Index dim);

/// Oscillator coherent states on a truncated number basis, parameterized
/// by center (x, p) and a global phase (z = (x, p, theta); hbar = m =
/// omega = 1). The phase parameter keeps the tangent system consistent,
/// so the variational reduction reproduces the classical center motion.
CoherentFamily coherent_gaussian_family(Eigen::Index n_levels);

/// Number-basis oscillator Hamiltonian diag(n + 1/2).
HermitianQuantity oscillator_hamiltonian(Eigen::Index n_levels);

struct DiracFrenkelResult {
  std::vector<double> times;
  std::vector<RVec> params;
  double max_gram_condition = 0.0;
  double max_norm_drift = 0.0;  ///< max | ||phi_z|| - 1 | along the run
};

/// Integrates the stationarity equations of the variational integral
/// restricted to the family: the complex tangent system C zdot = b with
/// C_ab = <d_a phi|d_b phi> and b_a = <d_a phi|(-i/hbar) H phi>, solved
/// over real zdot in least squares with Tikhonov factor 1e-12. Throws
/// when the tangent Gram matrix is numerically singular (redundant
/// parameterization).
DiracFrenkelResult dirac_frenkel_reduce(const CoherentFamily& family, const HermitianQuantity& h,
                                        const RVec& z0, double t_end, double dt,
                                        double hbar = 1.0);

/// Classical mechanics on a periodic phase-space lattice: the Hermitian
/// generator i/2 (D_p A_q + A_q D_p - D_q A_p - A_p D_q) with central
/// differences D and diagonal multiplications A by the sampled
/// derivative fields of the classical Hamiltonian.
struct KoopmanModel {
  int n_grid = 0;
  double box_half_width = 0.0;
  double dq = 0.0, dp = 0.0;
  RVec q_coords, p_coords;
  Eigen::SparseMatrix<Cplx> hhat;  // row-major index a * n_grid + b for (q_a, p_b)

  std::function<double(double q, double p)> h_classical;
};

KoopmanModel koopman_build(const std::function<double(double q, double p)>& h_classical,
                           double box_half_width, int n_grid);

/// Normalized Gaussian lattice density centered at (q0, p0).
RVec koopman_gaussian_density(const KoopmanModel& model, double q0, double p0, double sigma);

struct KoopmanTrajectory {
  std::vector<double> times;
  std::vector<double> q_mean, p_mean;
  std::vector<double> mass;      ///< discrete integral, should stay ~1
  std::vector<double> negativity;  ///< mass of the negative part (dispersion artifact)
  double max_boundary_leak = 0.0;
  RVec final_density;
};

/// Evolves the density under exp(-i Hhat t) with fixed-step RK4 and
/// records the expectation trajectory. Throws if probability mass leaks
/// into the boundary band beyond `leak_tolerance` (box too small).
KoopmanTrajectory koopman_evolve(const KoopmanModel& model, const RVec& density0, double t_end,
                                 double dt, int sample_every = 1, double leak_tolerance = 1e-6);

}  // namespace densim
