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
#include <optional>
#include <vector>

#include "densim/measure.hpp"
#include "densim/qcore.hpp"

namespace densim {

/// The N^2-1 binary tests that determine a state: the diagonal tests
/// e^j (j < N-1; the last diagonal element follows from trace one), then
/// the normalized pair tests (e^j+e^k)/sqrt(2), then (e^j+i e^k)/sqrt(2),
/// each lexicographic in (j, k), j < k.
class TestSuite {
 public:
  explicit TestSuite(Eigen::Index dim);

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return tests_.size(); }
  const std::vector<CVec>& tests() const { return tests_; }

 private:
  Eigen::Index dim_;
  std::vector<CVec> tests_;
};

inline TestSuite standard_test_suite(Eigen::Index dim) { return TestSuite(dim); }

/// Per-test frequencies; sample_size is empty for exact probabilities.
struct FrequencyTable {
  std::vector<double> values;
  std::vector<std::optional<std::uint64_t>> sample_sizes;
};

/// Runs every binary test {phi phi*, 1 - phi phi*} of the suite against
/// rho. Exact mode (n empty) records p = phi* rho phi; sampled mode
/// records binomial frequencies, one split RNG stream per test.
FrequencyTable measure_suite(const DensityOperator& rho, const TestSuite& suite,
                             std::optional<std::uint64_t> n, std::uint64_t seed = 0,
                             const Tolerances& tol = default_tolerances());

struct Reconstruction {
  DensityOperator state;
  /// max-abs change made by the PSD projection; zero for consistent input.
  double projection_residual;
};

/// Linear inversion in the standard_test_suite ordering:
///   rho_jj = p_j for j < N-1, the last diagonal from trace one,
///   Re rho_jk = p_real - (rho_jj + rho_kk)/2,
///   Im rho_jk = (rho_jj + rho_kk)/2 - p_imag,
/// followed by projection to the nearest valid state (clip negative
/// eigenvalues, renormalize the trace).
Reconstruction reconstruct_state(const FrequencyTable& table, Eigen::Index dim,
                                 const Tolerances& tol = default_tolerances());

/// Spanning family for instrument calibration: the N^2 projectors onto
/// all e^j plus both pair states of every (j, k); these span the real
/// vector space of Hermitian N x N matrices.
std::vector<DensityOperator> calibration_states(Eigen::Index dim);

struct CalibrationResult {
  Povm povm;
  double residual_norm;      ///< sqrt(sum of squared LS residuals) before projection
  double condition_number;   ///< of the state design matrix
  double projection_change;  ///< max-abs change made by the PSD/completeness projection
};

/// Least-squares POVM reconstruction from calibration data
/// p_jk ~ Tr(rho_j P_k), projected back onto {PSD, sum_k P_k = 1}.
/// `freqs` is (state j) x (effect k). Throws if the states do not span
/// (condition number beyond kappa_max).
CalibrationResult calibrate_instrument(const std::vector<DensityOperator>& states,
                                       const RMat& freqs, Eigen::Index effect_count,
                                       double kappa_max = 1e6,
                                       const Tolerances& tol = default_tolerances());

}  // namespace densim
