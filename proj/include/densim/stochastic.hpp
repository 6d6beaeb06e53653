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

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "densim/measure.hpp"
#include "densim/qcore.hpp"
#include "densim/rng.hpp"

namespace densim {

/// Open-system model: Hermitian H plus jump operators L_k with the rates
/// absorbed into their scale.
struct LindbladModel {
  HermitianQuantity h;
  std::vector<CMat> jumps;
  double hbar = 1.0;

  LindbladModel(HermitianQuantity hamiltonian, std::vector<CMat> jump_ops, double hb = 1.0);

  /// Largest jump rate / Hamiltonian frequency; used for the dt check.
  double fastest_rate() const;
};

struct MasterPath {
  std::vector<double> times;
  std::vector<DensityOperator> states;
  double max_trace_drift = 0.0;  ///< per-step |Tr - 1| before renormalization
  bool dt_warning = false;       ///< dt did not resolve the fastest rate
};

/// Fixed-step RK4 on rho' = -(i/hbar)[H, rho] + sum_k (L rho L* - (1/2){L*L, rho}).
/// With no jumps this is plain von Neumann evolution.
MasterPath master_integrate(const LindbladModel& model, const DensityOperator& rho0, double t_end,
                            double dt, int sample_every = 1,
                            const Tolerances& tol = default_tolerances());

struct JumpEvent {
  double time;
  std::size_t channel;
};

/// One realization of the piecewise deterministic process.
struct JumpTrajectory {
  std::vector<JumpEvent> events;          // strictly increasing times
  std::vector<double> sample_times;
  std::vector<CVec> sample_states;        // normalized
  std::uint64_t seed = 0;
};

/// Norm-threshold jump unraveling: deterministic drift under
/// H_eff = H - (i hbar/2) sum L*L between jumps (fixed-step RK4), jump
/// times located by bisection on the pre-drawn norm threshold, channel k
/// with probability proportional to ||L_k psi||^2, post-jump state
/// L_k psi normalized. Reproducible per seed.
JumpTrajectory pdp_trajectory(const LindbladModel& model, const CVec& psi0, double t_end,
                              double dt, std::uint64_t seed, int sample_every = 1);

struct EnsembleResult {
  std::vector<double> times;
  std::vector<CMat> mean;      ///< mean of psi psi* over trajectories
  std::vector<RMat> se_real;   ///< per-entry standard error of the real part
  std::vector<RMat> se_imag;
  std::uint64_t base_seed = 0;
  std::uint64_t n_traj = 0;
};

/// Trajectory average of psi psi* with per-entry standard errors.
/// Stream seeds are split(base_seed, trajectory index); the reduction is
/// pairwise in trajectory order, so the result does not depend on the
/// thread count.
EnsembleResult ensemble_average(const LindbladModel& model, const CVec& psi0, double t_end,
                                double dt, std::uint64_t n_traj, std::uint64_t base_seed,
                                int sample_every = 1, int n_threads = 1);

struct DetectionStats {
  std::vector<std::uint64_t> counts;           // events per window
  std::map<std::uint64_t, std::uint64_t> histogram;
  double mean = 0.0;
  double variance = 0.0;
  double fano = 0.0;  ///< variance / mean
};

/// Event counts over independent detection windows of length `window`.
/// `channel` restricts counting to one jump channel (a photodetector sees
/// emissions, not re-pump events); empty counts everything.
DetectionStats detection_statistics(const LindbladModel& model, const CVec& psi0, double window,
                                    double dt, std::uint64_t n_traj, std::uint64_t base_seed,
                                    int n_threads = 1,
                                    std::optional<std::size_t> channel = std::nullopt);

/// Symmetric double well U(x) = a (x^2 - x0^2)^2 (+ tilt x), damped and
/// driven by white noise of amplitude eps.
struct BistableModel {
  double stiffness = 1.0;  // a
  double x0 = 1.0;
  double damping = 0.0;    // gamma
  double noise = 0.0;      // eps
  double mass = 1.0;
  double tilt = 0.0;

  void validate() const;
  double potential(double x) const;
  double potential_grad(double x) const;
};

struct BistableOutcome {
  std::vector<int> basins;       ///< -1 left, +1 right, 0 undecided, per run
  std::vector<double> final_x;
  std::uint64_t left = 0, right = 0, undecided = 0;
  std::uint64_t base_seed = 0;
};

/// Euler-Maruyama runs of m x'' = -U'(x) - gamma x' + eps xi(t) started
/// at the barrier top; each run is classified by its final basin
/// (sign of x provided |x| > x0/2, else undecided).
BistableOutcome bistable_selection(const BistableModel& model, double t_end, double dt,
                                   std::uint64_t n_runs, std::uint64_t base_seed,
                                   double x_start = 0.0, int n_threads = 1);

}  // namespace densim
