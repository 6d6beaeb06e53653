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

#include <doctest.h>

#include <cmath>

#include "densim/random.hpp"
#include "densim/tomography.hpp"

using namespace densim;

TEST_CASE("standard_test_suite sizes and canonical order") {
  const TestSuite two(2);
  REQUIRE(two.size() == 3);
  CVec e1(2), plus(2), plus_i(2);
  e1 << 1, 0;
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  plus_i << 1 / std::sqrt(2.0), Cplx(0, 1 / std::sqrt(2.0));
  CHECK((two.tests()[0] - e1).norm() < 1e-15);
  CHECK((two.tests()[1] - plus).norm() < 1e-15);
  CHECK((two.tests()[2] - plus_i).norm() < 1e-15);

  CHECK(TestSuite(3).size() == 8);

  const TestSuite four(4);
  CHECK(four.size() == 15);
  for (const CVec& phi : four.tests()) CHECK(std::abs(phi.norm() - 1.0) < 1e-12);

  CHECK_THROWS_AS(TestSuite(1), std::invalid_argument);
}

TEST_CASE("measure_suite exact probabilities") {
  const TestSuite suite(2);
  const FrequencyTable mixed =
      measure_suite(DensityOperator::maximally_mixed(2), suite, std::nullopt);
  CHECK(mixed.values[0] == doctest::Approx(0.5));
  CHECK(mixed.values[1] == doctest::Approx(0.5));
  CHECK(mixed.values[2] == doctest::Approx(0.5));

  CVec e0(2);
  e0 << 1, 0;
  const FrequencyTable ground = measure_suite(DensityOperator::pure(e0), suite, std::nullopt);
  CHECK(ground.values[0] == doctest::Approx(1.0));
  CHECK(ground.values[1] == doctest::Approx(0.5));
  CHECK(ground.values[2] == doctest::Approx(0.5));
}

TEST_CASE("measure_suite sampled frequencies concentrate") {
  Rng rng(12);
  const DensityOperator rho = random_density(2, rng);
  const TestSuite suite(2);
  const FrequencyTable exact = measure_suite(rho, suite, std::nullopt);
  const FrequencyTable sampled = measure_suite(rho, suite, 100000, 99);
  for (std::size_t t = 0; t < suite.size(); ++t)
    CHECK(std::abs(sampled.values[t] - exact.values[t]) < 0.02);
}

TEST_CASE("reconstruct_state: exact round trips") {
  CHECK(max_abs(reconstruct_state(
                    measure_suite(DensityOperator::maximally_mixed(3), TestSuite(3), std::nullopt),
                    3)
                    .state.entries() -
                CMat::Identity(3, 3) / 3.0) < 1e-12);

  Rng rng(34);
  for (Eigen::Index dim = 2; dim <= 5; ++dim) {
    const DensityOperator rho = random_density(dim, rng);
    const TestSuite suite(dim);
    const Reconstruction rec =
        reconstruct_state(measure_suite(rho, suite, std::nullopt), dim);
    CHECK(trace_distance(rec.state, rho) < 1e-10);
    CHECK(rec.projection_residual < 1e-10);  // consistent data: projection is the identity
  }
}

TEST_CASE("reconstruct_state: sampled estimate lands near the truth") {
  Rng rng(56);
  const DensityOperator rho = random_density(2, rng);
  const FrequencyTable table = measure_suite(rho, TestSuite(2), 100000, 4242);
  const Reconstruction rec = reconstruct_state(table, 2);
  CHECK(trace_distance(rec.state, rho) <= 0.05);
}

TEST_CASE("reconstruction error shrinks like n^{-1/2}") {
  Rng rng(78);
  const DensityOperator rho = random_density(2, rng);
  const TestSuite suite(2);

  const auto mean_error = [&](std::uint64_t n) {
    double total = 0.0;
    for (std::uint64_t rep = 0; rep < 8; ++rep) {
      const FrequencyTable table = measure_suite(rho, suite, n, 1000 + rep);
      total += trace_distance(reconstruct_state(table, 2).state, rho);
    }
    return total / 8.0;
  };

  const double e3 = mean_error(1000);
  const double e4 = mean_error(10000);
  const double e5 = mean_error(100000);
  // sqrt(10) ~ 3.16 per decade; allow generous noise.
  CHECK(e3 / e4 > 1.5);
  CHECK(e3 / e4 < 7.0);
  CHECK(e4 / e5 > 1.5);
  CHECK(e4 / e5 < 7.0);
}

TEST_CASE("reconstruct_state validates the table length") {
  FrequencyTable bad;
  bad.values = {0.5, 0.5};
  bad.sample_sizes = {std::nullopt, std::nullopt};
  CHECK_THROWS_AS(reconstruct_state(bad, 2), std::invalid_argument);
}

TEST_CASE("calibration_states span and calibrate_instrument round trips") {
  const auto states = calibration_states(2);
  REQUIRE(states.size() == 4);

  const Povm truth = Povm::computational_basis(2);
  RMat freqs(4, 2);
  for (std::size_t j = 0; j < states.size(); ++j) {
    const auto p = q_probabilities(states[j], truth);
    freqs(static_cast<Eigen::Index>(j), 0) = p[0];
    freqs(static_cast<Eigen::Index>(j), 1) = p[1];
  }
  const CalibrationResult cal = calibrate_instrument(states, freqs, 2);
  for (int k = 0; k < 2; ++k)
    CHECK(max_abs(cal.povm.effects()[static_cast<std::size_t>(k)].entries() -
                  truth.effects()[static_cast<std::size_t>(k)].entries()) < 1e-8);
  CHECK(cal.residual_norm < 1e-10);
}

TEST_CASE("calibrate_instrument with one effect returns the identity") {
  const auto states = calibration_states(2);
  RMat freqs = RMat::Ones(static_cast<Eigen::Index>(states.size()), 1);
  const CalibrationResult cal = calibrate_instrument(states, freqs, 1);
  CHECK(max_abs(cal.povm.effects()[0].entries() - CMat::Identity(2, 2)) < 1e-10);
}

TEST_CASE("calibrate_instrument rejects non-spanning state sets") {
  // Only three of the four spanning states: rank deficient.
  auto states = calibration_states(2);
  states.pop_back();
  RMat freqs = 0.5 * RMat::Ones(static_cast<Eigen::Index>(states.size()), 2);
  CHECK_THROWS_AS(calibrate_instrument(states, freqs, 2), std::runtime_error);
}

TEST_CASE("calibration error stays within the conditioning bound under noise") {
  Rng rng(90);
  const auto states = calibration_states(2);
  const Povm truth = Povm::computational_basis(2);
  RMat freqs(static_cast<Eigen::Index>(states.size()), 2);
  for (std::size_t j = 0; j < states.size(); ++j) {
    const auto p = q_probabilities(states[j], truth);
    for (int k = 0; k < 2; ++k)
      freqs(static_cast<Eigen::Index>(j), k) = p[static_cast<std::size_t>(k)] +
                                               1e-3 * (2.0 * rng.uniform() - 1.0);
  }
  const CalibrationResult cal = calibrate_instrument(states, freqs, 2);
  for (int k = 0; k < 2; ++k) {
    const double err = max_abs(cal.povm.effects()[static_cast<std::size_t>(k)].entries() -
                               truth.effects()[static_cast<std::size_t>(k)].entries());
    CHECK(err <= 10.0 * cal.condition_number * 1e-3);
  }
}
