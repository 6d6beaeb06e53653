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

#include <functional>
#include <vector>

#include "densim/matrix.hpp"
#include "densim/tolerances.hpp"

namespace densim {

/// Numeric slack on the Stokes cone S0 >= |(S1,S2,S3)| at conversion
/// boundaries.
inline constexpr double kStokesSlack = 1e-10;

/// Beam state in intensity units: S0 is the intensity, (S1,S2,S3) the
/// polarization part with S0 >= |S|.
struct StokesVector {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;

  double polarized_magnitude() const;
  void validate() const;  // throws on cone violation
};

/// Complex PSD 2x2 matrix; trace is the intensity S0 (not necessarily 1).
class CoherenceMatrix {
 public:
  explicit CoherenceMatrix(Eigen::Matrix2cd entries,
                           const Tolerances& tol = default_tolerances());

  /// rho = psi psi* of an arbitrary (not necessarily unit) Jones vector.
  static CoherenceMatrix from_pure(const Eigen::Vector2cd& psi);

  const Eigen::Matrix2cd& entries() const { return entries_; }
  double intensity() const { return entries_.trace().real(); }

 private:
  Eigen::Matrix2cd entries_;
};

/// Non-mixing instrument: rho -> T rho T*.
struct JonesMatrix {
  Eigen::Matrix2cd entries;

  /// Lossless iff unitary.
  bool lossless(double tol = 1e-10) const;
};

/// Mixing instrument acting on Stokes vectors.
struct MuellerMatrix {
  Eigen::Matrix4d entries = Eigen::Matrix4d::Identity();

  StokesVector apply(const StokesVector& s) const;
};

/// rho = (1/2)(S0 + S.sigma) = (1/2)[[S0+S3, S1-iS2],[S1+iS2, S0-S3]].
CoherenceMatrix stokes_to_coherence(const StokesVector& s,
                                    const Tolerances& tol = default_tolerances());

/// Inverse of stokes_to_coherence; S0 = Tr rho.
StokesVector coherence_to_stokes(const CoherenceMatrix& rho);

/// p = |S| / S0 in [0, 1]; requires S0 > 0.
double degree_of_polarization(const StokesVector& s);

/// rho' = T rho T*.
CoherenceMatrix apply_jones(const CoherenceMatrix& rho, const JonesMatrix& t,
                            const Tolerances& tol = default_tolerances());

/// T = phi phi* with a unit Jones vector phi; idempotent, and the
/// transmitted intensity from a pure beam psi is |phi* psi|^2 (Malus).
JonesMatrix polarizer(const Eigen::Vector2cd& phi, double tol = 1e-10);

/// M_ab = (1/2) Tr(sigma_a T sigma_b T*) with sigma_0 = 1; satisfies the
/// commuting square coherence_to_stokes(T rho(S) T*) = M S.
MuellerMatrix jones_to_mueller(const JonesMatrix& t);

/// Mixing (depolarizing) instrument: rho -> sum_i w_i T_i rho T_i*.
class DepolarizingMap {
 public:
  using Branch = std::pair<double, JonesMatrix>;  // weight, Jones matrix

  explicit DepolarizingMap(std::vector<Branch> branches);

  const std::vector<Branch>& branches() const { return branches_; }
  CoherenceMatrix apply(const CoherenceMatrix& rho,
                        const Tolerances& tol = default_tolerances()) const;
  /// Weighted sum of the branch Mueller matrices.
  MuellerMatrix mueller() const;

 private:
  std::vector<Branch> branches_;
};

inline DepolarizingMap depolarizing_map(std::vector<DepolarizingMap::Branch> branches) {
  return DepolarizingMap(std::move(branches));
}

struct SlicedMediumResult {
  Eigen::Vector2cd psi_sliced;  ///< product of first-order slices, no renormalization
  Eigen::Vector2cd psi_ref;     ///< exact per-slice exponentials on a 10x finer grid
  double error_norm;            ///< ||psi_sliced - psi_ref||
  double norm_drift;            ///< | ||psi_sliced|| - 1 |
};

/// Passage through an inhomogeneous medium as nSlices thin instruments
/// T = 1 - i dt H(t_mid)/hbar; the first-order error against the exact
/// reference shrinks as O(dt).
SlicedMediumResult sliced_medium_evolution(
    const std::function<Eigen::Matrix2cd(double)>& hamiltonian, const Eigen::Vector2cd& psi0,
    double t_end, int n_slices, double hbar = 1.0);

}  // namespace densim
