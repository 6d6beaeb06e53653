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

#include "densim/measure.hpp"
#include "densim/random.hpp"
#include "densim/stokes.hpp"

using namespace densim;

namespace {

constexpr double kPi = 3.14159265358979323846;

StokesVector random_stokes(Rng& rng) {
  // Random point inside the cone: polarized part shorter than S0.
  const double s0 = 0.2 + 2.0 * rng.uniform();
  const double frac = rng.uniform();
  double v[3] = {rng.normal(), rng.normal(), rng.normal()};
  const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  const double scale = (len > 0) ? s0 * frac / len : 0.0;
  return {s0, v[0] * scale, v[1] * scale, v[2] * scale};
}

JonesMatrix random_jones(Rng& rng) {
  JonesMatrix t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t.entries(i, j) = Cplx(rng.normal(), rng.normal());
  t.entries /= std::max(1.0, t.entries.norm());
  return t;
}

/// The commuting-square oracle: the Mueller action computed entirely
/// through the coherence-matrix route on the four basis Stokes vectors.
Eigen::Matrix4d mueller_by_commuting_square(const JonesMatrix& t) {
  Eigen::Matrix4d m;
  for (int b = 0; b < 4; ++b) {
    StokesVector basis{b == 0 ? 1.0 : 2.0, 0, 0, 0};  // keep inside the cone
    if (b == 1) basis.s1 = 1.0;
    if (b == 2) basis.s2 = 1.0;
    if (b == 3) basis.s3 = 1.0;
    const StokesVector out = coherence_to_stokes(apply_jones(stokes_to_coherence(basis), t));
    m(0, b) = out.s0;
    m(1, b) = out.s1;
    m(2, b) = out.s2;
    m(3, b) = out.s3;
  }
  // Undo the offset: columns 1..3 used S = e0*2 + eb, so subtract twice
  // the image of e0.
  for (int b = 1; b < 4; ++b)
    for (int a = 0; a < 4; ++a) m(a, b) -= 2.0 * m(a, 0);
  return m;
}

}  // namespace

TEST_CASE("stokes/coherence conversions on the canonical cases") {
  const CoherenceMatrix horizontal = stokes_to_coherence({1, 0, 0, 1});
  Eigen::Matrix2cd expected;
  expected << 1, 0, 0, 0;
  CHECK((horizontal.entries() - expected).cwiseAbs().maxCoeff() < 1e-15);

  const CoherenceMatrix unpolarized = stokes_to_coherence({1, 0, 0, 0});
  CHECK((unpolarized.entries() - 0.5 * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <
        1e-15);

  // Fully polarized: det = S0^2 - |S|^2 = 0, rank 1.
  const StokesVector edge{2, 1, 1, std::sqrt(2.0)};
  const CoherenceMatrix polarized = stokes_to_coherence(edge);
  CHECK(std::abs(polarized.entries().determinant()) < 1e-12);
}

TEST_CASE("conversion round trips and the determinant identity") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const StokesVector s = random_stokes(rng);
    const StokesVector back = coherence_to_stokes(stokes_to_coherence(s));
    CHECK(std::abs(back.s0 - s.s0) < 1e-12);
    CHECK(std::abs(back.s1 - s.s1) < 1e-12);
    CHECK(std::abs(back.s2 - s.s2) < 1e-12);
    CHECK(std::abs(back.s3 - s.s3) < 1e-12);

    const double det = stokes_to_coherence(s).entries().determinant().real();
    const double expected = 0.25 * (s.s0 * s.s0 - s.polarized_magnitude() * s.polarized_magnitude());
    CHECK(det == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("stokes cone violations are rejected") {
  CHECK_THROWS_AS(stokes_to_coherence({1, 2, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(degree_of_polarization({0, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("degree_of_polarization") {
  CHECK(degree_of_polarization({1, 0, 0, 0}) == doctest::Approx(0.0));
  CHECK(degree_of_polarization({1, 0, 0, 1}) == doctest::Approx(1.0));
  CHECK(degree_of_polarization({2, 1, 0, 0}) == doctest::Approx(0.5));
}

TEST_CASE("apply_jones: identity, unitary intensity preservation") {
  Rng rng(22);
  const StokesVector s = random_stokes(rng);
  const CoherenceMatrix rho = stokes_to_coherence(s);

  const CoherenceMatrix same = apply_jones(rho, JonesMatrix{Eigen::Matrix2cd::Identity()});
  CHECK((same.entries() - rho.entries()).cwiseAbs().maxCoeff() < 1e-15);

  const double theta = 0.37;
  JonesMatrix rotation;
  rotation.entries << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  CHECK(rotation.lossless());
  const CoherenceMatrix rotated = apply_jones(rho, rotation);
  CHECK(rotated.intensity() == doctest::Approx(rho.intensity()).epsilon(1e-12));
  CHECK(degree_of_polarization(coherence_to_stokes(rotated)) ==
        doctest::Approx(degree_of_polarization(s)).epsilon(1e-10));
}

TEST_CASE("polarizer: projector algebra and Malus' law") {
  Eigen::Vector2cd h;
  h << 1, 0;
  CHECK((polarizer(h).entries - (Eigen::Matrix2cd() << 1, 0, 0, 0).finished())
            .cwiseAbs()
            .maxCoeff() < 1e-15);

  Eigen::Vector2cd diagonal;
  diagonal << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const CoherenceMatrix beam = CoherenceMatrix::from_pure(h);
  CHECK(apply_jones(beam, polarizer(diagonal)).intensity() == doctest::Approx(0.5));

  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Vector2cd phi(Cplx(rng.normal(), rng.normal()), Cplx(rng.normal(), rng.normal()));
    phi.normalize();
    const JonesMatrix t = polarizer(phi);
    CHECK((t.entries * t.entries - t.entries).cwiseAbs().maxCoeff() < 1e-12);
  }

  Eigen::Vector2cd long_vec;
  long_vec << 1, 1;
  CHECK_THROWS_AS(polarizer(long_vec), std::invalid_argument);
}

TEST_CASE("Malus sweep agrees with the squared-amplitude test probability") {
  Eigen::Vector2cd psi;
  psi << 1, 0;
  const CoherenceMatrix beam = CoherenceMatrix::from_pure(psi);
  for (int k = 0; k < 36; ++k) {
    const double theta = k * kPi / 36.0;
    Eigen::Vector2cd phi;
    phi << std::cos(theta), std::sin(theta);
    const double intensity = apply_jones(beam, polarizer(phi)).intensity();
    CHECK(std::abs(intensity - std::cos(theta) * std::cos(theta)) < 1e-12);
    CHECK(intensity ==
          doctest::Approx(test_state(CVec(phi), CVec(psi))).epsilon(1e-12));
  }
}

TEST_CASE("jones_to_mueller: identity and the half-wave-like diagonal case") {
  const Eigen::Matrix4d identity = jones_to_mueller({Eigen::Matrix2cd::Identity()}).entries;
  CHECK((identity - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-14);

  // T = diag(1, -1): the commuting-square oracle fixes the sign pattern.
  JonesMatrix half_wave;
  half_wave.entries << 1, 0, 0, -1;
  const Eigen::Matrix4d oracle = mueller_by_commuting_square(half_wave);
  const Eigen::Matrix4d closed_form = jones_to_mueller(half_wave).entries;
  CHECK((closed_form - oracle).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::Matrix4d expected = Eigen::Matrix4d::Identity();
  expected(1, 1) = -1.0;
  expected(2, 2) = -1.0;
  CHECK((closed_form - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Mueller commuting square and multiplicativity on random sweeps") {
  Rng rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const JonesMatrix t = random_jones(rng);
    const MuellerMatrix m = jones_to_mueller(t);
    CHECK((m.entries - mueller_by_commuting_square(t)).cwiseAbs().maxCoeff() < 1e-10);
    for (int s_trial = 0; s_trial < 10; ++s_trial) {
      const StokesVector s = random_stokes(rng);
      const StokesVector via_matrix = m.apply(s);
      const StokesVector via_coherence =
          coherence_to_stokes(apply_jones(stokes_to_coherence(s), t));
      CHECK(std::abs(via_matrix.s0 - via_coherence.s0) < 1e-10);
      CHECK(std::abs(via_matrix.s1 - via_coherence.s1) < 1e-10);
      CHECK(std::abs(via_matrix.s2 - via_coherence.s2) < 1e-10);
      CHECK(std::abs(via_matrix.s3 - via_coherence.s3) < 1e-10);
    }

    const JonesMatrix t2 = random_jones(rng);
    const JonesMatrix composite{t.entries * t2.entries};
    CHECK((jones_to_mueller(composite).entries -
           jones_to_mueller(t).entries * jones_to_mueller(t2).entries)
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("depolarizing_map: identity branch, mixing, positivity") {
  const DepolarizingMap trivial = depolarizing_map({{1.0, {Eigen::Matrix2cd::Identity()}}});
  Rng rng(55);
  const CoherenceMatrix rho = stokes_to_coherence(random_stokes(rng));
  CHECK((trivial.apply(rho).entries() - rho.entries()).cwiseAbs().maxCoeff() < 1e-14);

  // Two orthogonal polarizers with equal weight depolarize.
  Eigen::Vector2cd h, v;
  h << 1, 0;
  v << 0, 1;
  const DepolarizingMap mixer =
      depolarizing_map({{0.5, polarizer(h)}, {0.5, polarizer(v)}});
  Eigen::Vector2cd diag;
  diag << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const CoherenceMatrix out = mixer.apply(CoherenceMatrix::from_pure(diag));
  CHECK(degree_of_polarization(coherence_to_stokes(out)) < 1.0 - 1e-6);

  // Mueller matrix of the map is the weighted branch sum; PSD preserved.
  for (int trial = 0; trial < 100; ++trial) {
    const StokesVector s = random_stokes(rng);
    const CoherenceMatrix mapped = mixer.apply(stokes_to_coherence(s));  // ctor checks PSD
    const StokesVector via_mueller = mixer.mueller().apply(s);
    const StokesVector direct = coherence_to_stokes(mapped);
    CHECK(std::abs(via_mueller.s0 - direct.s0) < 1e-10);
    CHECK(std::abs(via_mueller.s3 - direct.s3) < 1e-10);
  }

  CHECK_THROWS_AS(depolarizing_map({{-0.1, {Eigen::Matrix2cd::Identity()}}}),
                  std::invalid_argument);
}

TEST_CASE("sliced_medium_evolution: free passage is exact") {
  Eigen::Vector2cd psi;
  psi << 0.6, 0.8;
  const auto zero_h = [](double) { return Eigen::Matrix2cd::Zero().eval(); };
  for (int slices : {1, 7, 50}) {
    const SlicedMediumResult run = sliced_medium_evolution(zero_h, psi, 1.0, slices);
    CHECK((run.psi_sliced - psi).norm() < 1e-15);
    CHECK(run.error_norm < 1e-12);
  }
}

TEST_CASE("sliced_medium_evolution: constant sigma_z flips the phase at t = pi") {
  Eigen::Vector2cd psi;
  psi << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const auto sz = [](double) {
    return (Eigen::Matrix2cd() << 1, 0, 0, -1).finished().eval();
  };
  // exp(-i pi sigma_z) = -1: both components pick up e^{-+i pi}.
  const SlicedMediumResult fine = sliced_medium_evolution(sz, psi, kPi, 4000);
  CHECK((fine.psi_ref + psi).norm() < 1e-9);
  CHECK((fine.psi_sliced + psi).norm() < 5e-3);

  const double err_100 = sliced_medium_evolution(sz, psi, kPi, 100).error_norm;
  const double err_200 = sliced_medium_evolution(sz, psi, kPi, 200).error_norm;
  CHECK(err_200 / err_100 == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("sliced_medium_evolution: first-order convergence for sigma_x sin t") {
  Eigen::Vector2cd psi;
  psi << 1, 0;
  const auto h = [](double t) {
    return ((Eigen::Matrix2cd() << 0, 1, 1, 0).finished() * std::sin(t)).eval();
  };
  const double err_100 = sliced_medium_evolution(h, psi, kPi, 100).error_norm;
  const double err_200 = sliced_medium_evolution(h, psi, kPi, 200).error_norm;
  const double err_400 = sliced_medium_evolution(h, psi, kPi, 400).error_norm;
  CHECK(err_200 / err_100 > 0.4);
  CHECK(err_200 / err_100 < 0.6);
  CHECK(err_400 / err_200 > 0.4);
  CHECK(err_400 / err_200 < 0.6);
}
