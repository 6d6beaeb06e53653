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
#include <string>
#include <variant>
#include <vector>

#include "densim/qcore.hpp"
#include "densim/rng.hpp"

namespace densim {

/// Outcome labels may be numeric (eigenvalues) or symbolic (detector ids).
using OutcomeLabel = std::variant<double, std::string>;

std::string outcome_to_string(const OutcomeLabel& label);

/// Event-based instrument: PSD effects P_k with sum_k P_k = 1, one
/// outcome label per effect.
class Povm {
 public:
  Povm(std::vector<HermitianQuantity> effects, std::vector<OutcomeLabel> outcomes,
       const Tolerances& tol = default_tolerances());

  /// Projective readout in the computational basis, outcomes 0..N-1.
  static Povm computational_basis(Eigen::Index dim);

  Eigen::Index dim() const { return effects_.front().dim(); }
  std::size_t size() const { return effects_.size(); }
  const std::vector<HermitianQuantity>& effects() const { return effects_; }
  const std::vector<OutcomeLabel>& outcomes() const { return outcomes_; }

  /// All outcome labels as numbers; throws if any label is symbolic.
  std::vector<double> numeric_outcomes() const;

 private:
  std::vector<HermitianQuantity> effects_;
  std::vector<OutcomeLabel> outcomes_;
};

/// Event-based filter: Kraus family {R_k} with sum_k R_k* R_k = 1.
class KrausFilter {
 public:
  explicit KrausFilter(std::vector<CMat> ops, const Tolerances& tol = default_tolerances());

  Eigen::Index dim() const { return ops_.front().rows(); }
  std::size_t size() const { return ops_.size(); }
  const std::vector<CMat>& ops() const { return ops_; }

  /// The POVM {R_k* R_k} describing the filter's event statistics.
  Povm induced_povm(const Tolerances& tol = default_tolerances()) const;

 private:
  std::vector<CMat> ops_;
};

/// Counts per outcome from repeated events at a recorded seed.
struct EventSample {
  std::vector<OutcomeLabel> labels;
  std::vector<std::uint64_t> counts;  // same length as labels
  std::uint64_t total = 0;
  std::uint64_t seed = 0;

  std::vector<double> frequencies() const;
};

/// q-probabilities p_k = <P_k> = Tr(rho P_k), clipped to [0,1] and
/// renormalized (effects valid within the PSD slack can produce tiny
/// negative traces).
std::vector<double> q_probabilities(const DensityOperator& rho, const Povm& povm,
                                    const Tolerances& tol = default_tolerances());

/// n categorical draws from q_probabilities(rho, povm); deterministic per seed.
EventSample sample_events(const DensityOperator& rho, const Povm& povm, std::uint64_t n,
                          std::uint64_t seed, const Tolerances& tol = default_tolerances());

struct FilterOutcome {
  double probability;
  DensityOperator state;
};

/// Conditions on event k: p_k = <R_k* R_k>, rho_k = R_k rho R_k* / p_k.
/// Throws if p_k is consistent with zero (conditioning on a null event).
FilterOutcome apply_filter(const DensityOperator& rho, const KrausFilter& filter, std::size_t k,
                           const Tolerances& tol = default_tolerances());

/// Ideal (Born) instrument of a Hermitian quantity: orthogonal
/// eigenprojectors as effects, the distinct eigenvalues as outcomes
/// (ascending, clustered within tol.degenerate).
Povm born_instrument(const HermitianQuantity& a, const Tolerances& tol = default_tolerances());

/// Probability that the pure state psi passes a test for phi:
/// p = |phi* psi|^2.
double test_state(const CVec& phi, const CVec& psi, const Tolerances& tol = default_tolerances());

}  // namespace densim
