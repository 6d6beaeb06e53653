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
//
// Test-only oracles. Everything here recomputes expected values by an
// independent route (spectral decompositions and closed forms, never the
// library's trace pairing), so the assertions in the suites check the
// implementation against genuinely separate arithmetic.

#pragma once

#include <cmath>
#include <vector>

#include "densim/matrix.hpp"
#include "densim/qcore.hpp"

namespace densim::testing {

/// <A> via the eigendecomposition of rho: sum_i w_i (v_i* A v_i).
inline double spectral_expectation(const DensityOperator& rho, const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(rho.entries());
  double total = 0.0;
  for (Eigen::Index i = 0; i < rho.dim(); ++i) {
    const CVec v = es.eigenvectors().col(i);
    total += es.eigenvalues()(i) * (v.adjoint() * a * v)(0).real();
  }
  return total;
}

/// Outcome distribution of an ideal measurement of A in rho, per
/// eigenvector (no degeneracy clustering): pairs (a_k, p_k).
inline std::vector<std::pair<double, double>> born_distribution(const DensityOperator& rho,
                                                                const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a);
  std::vector<std::pair<double, double>> dist;
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    const CVec v = es.eigenvectors().col(k);
    dist.emplace_back(es.eigenvalues()(k), (v.adjoint() * rho.entries() * v)(0).real());
  }
  return dist;
}

/// sigma_A from the Born distribution: sqrt(sum_k p_k (a_k - mean)^2).
inline double spectral_uncertainty(const DensityOperator& rho, const CMat& a) {
  const auto dist = born_distribution(rho, a);
  double mean = 0.0;
  for (const auto& [ak, pk] : dist) mean += pk * ak;
  double var = 0.0;
  for (const auto& [ak, pk] : dist) var += pk * (ak - mean) * (ak - mean);
  return std::sqrt(std::max(var, 0.0));
}

/// Kolmogorov-Smirnov distance of samples against the Exponential(rate) cdf.
inline double ks_distance_exponential(std::vector<double> samples, double rate) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 1.0 - std::exp(-rate * samples[i]);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  return d;
}

}  // namespace densim::testing
