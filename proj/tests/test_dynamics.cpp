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
#include <limits>

#include "densim/dynamics.hpp"
#include "densim/random.hpp"

using namespace densim;

namespace {

constexpr double kPi = 3.14159265358979323846;

CMat pauli_x() {
  CMat s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

CMat pauli_z() {
  CMat s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

/// Oscillator bath coordinate coupled to a two-level system:
/// H(p,q) = (p^2 + q^2)/2 + c q sigma_z + delta sigma_x.
HybridModel two_level_model(double c, double delta) {
  HybridModel model;
  model.hamiltonian.op = [c, delta](const RVec& p, const RVec& q) {
    return CMat(0.5 * (p(0) * p(0) + q(0) * q(0)) * CMat::Identity(2, 2) +
                c * q(0) * pauli_z() + delta * pauli_x());
  };
  model.hamiltonian.grad_p = [](const RVec& p, const RVec&) {
    return std::vector<CMat>{p(0) * CMat::Identity(2, 2)};
  };
  model.hamiltonian.grad_q = [c](const RVec&, const RVec& q) {
    return std::vector<CMat>{CMat(q(0) * CMat::Identity(2, 2) + c * pauli_z())};
  };
  return model;
}

HybridState initial_two_level(double q0, double p0) {
  CVec plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  RVec q(1), p(1);
  q << q0;
  p << p0;
  return {q, p, DensityOperator::pure(plus), 0.0};
}

double hybrid_energy(const HybridState& state, const HybridModel& model) {
  return trace_real(state.rho.entries(), model.hamiltonian.op(state.p, state.q));
}

double sparse_hermiticity_residual(const Eigen::SparseMatrix<Cplx>& m) {
  double worst = 0.0;
  for (int outer = 0; outer < m.outerSize(); ++outer)
    for (Eigen::SparseMatrix<Cplx>::InnerIterator it(m, outer); it; ++it)
      worst = std::max(worst, std::abs(it.value() - std::conj(m.coeff(it.col(), it.row()))));
  return worst;
}

}  // namespace

TEST_CASE("gradient self-check validates the test model") {
  const HybridModel model = two_level_model(0.4, 0.8);
  RVec p(1), q(1);
  p << 0.3;
  q << -1.1;
  CHECK(gradient_check(model, p, q) < 1e-6);
}

TEST_CASE("hybrid_step: decoupled sectors stay decoupled") {
  HybridModel model;
  model.hamiltonian.op = [](const RVec&, const RVec&) { return CMat(pauli_x()); };
  model.hamiltonian.grad_p = [](const RVec&, const RVec&) {
    return std::vector<CMat>{CMat::Zero(2, 2)};
  };
  model.hamiltonian.grad_q = [](const RVec&, const RVec&) {
    return std::vector<CMat>{CMat::Zero(2, 2)};
  };

  HybridState state = initial_two_level(0.7, -0.2);
  const double e0 = hybrid_energy(state, model);
  for (int s = 0; s < 200; ++s) state = hybrid_step(state, model, 0.01);
  CHECK(state.q(0) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(state.p(0) == doctest::Approx(-0.2).epsilon(1e-14));
  CHECK(hybrid_energy(state, model) == doctest::Approx(e0).epsilon(1e-12));
  CHECK(std::abs(state.rho.entries().trace().real() - 1.0) < 1e-14);
}

TEST_CASE("hybrid_step: classical-only harmonic oscillator follows the circle") {
  HybridModel model;
  model.hamiltonian.op = [](const RVec& p, const RVec& q) {
    return CMat(0.5 * (p(0) * p(0) + q(0) * q(0)) * CMat::Identity(1, 1));
  };
  model.hamiltonian.grad_p = [](const RVec& p, const RVec&) {
    return std::vector<CMat>{p(0) * CMat::Identity(1, 1)};
  };
  model.hamiltonian.grad_q = [](const RVec&, const RVec& q) {
    return std::vector<CMat>{q(0) * CMat::Identity(1, 1)};
  };

  RVec q(1), p(1);
  q << 1.0;
  p << 0.0;
  HybridState state{q, p, DensityOperator::maximally_mixed(1), 0.0};
  const double dt = 1e-3;
  const int steps = static_cast<int>(std::round(kPi / 2 / dt));
  for (int s = 0; s < steps; ++s) state = hybrid_step(state, model, dt);
  CHECK(std::abs(state.q(0) - std::cos(state.t)) < 1e-5);
  CHECK(std::abs(state.p(0) + std::sin(state.t)) < 1e-5);
}

TEST_CASE("hybrid_step preserves trace exactly and rank 1 states stay rank 1") {
  const HybridModel model = two_level_model(0.4, 0.8);
  HybridState state = initial_two_level(1.0, 0.0);
  for (int s = 0; s < 500; ++s) {
    state = hybrid_step(state, model, 0.01);
    CHECK(std::abs(state.rho.entries().trace().real() - 1.0) <= 1e-12);
  }
  CHECK(state.rho.numerical_rank() == 1);
  Eigen::SelfAdjointEigenSolver<CMat> es(state.rho.entries(), Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()(0) < 1e-12);  // second eigenvalue stays numerically zero
}

TEST_CASE("pure-state propagation equals density propagation") {
  const HybridModel model = two_level_model(0.4, 0.8);
  HybridState mixed_form = initial_two_level(1.0, 0.0);
  CVec plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  PureHybridState pure_form{mixed_form.q, mixed_form.p, plus, 0.0};

  const double dt = 0.005, t_end = 5.0;
  const int steps = static_cast<int>(std::round(t_end / dt));
  for (int s = 0; s < steps; ++s) {
    mixed_form = hybrid_step(mixed_form, model, dt);
    pure_form = hybrid_step(pure_form, model, dt);
  }
  const CMat projector = pure_form.psi * pure_form.psi.adjoint();
  CHECK(max_abs(projector - mixed_form.rho.entries()) < 1e-9 * t_end);
  CHECK((pure_form.q - mixed_form.q).cwiseAbs().maxCoeff() < 1e-9 * t_end);
}

TEST_CASE("hybrid energy drift shrinks ~4x per dt halving") {
  const HybridModel model = two_level_model(0.4, 0.8);
  const auto drift = [&](double dt) {
    HybridState state = initial_two_level(1.0, 0.0);
    const double e0 = hybrid_energy(state, model);
    double worst = 0.0;
    const int steps = static_cast<int>(std::round(5.0 / dt));
    for (int s = 0; s < steps; ++s) {
      state = hybrid_step(state, model, dt);
      worst = std::max(worst, std::abs(hybrid_energy(state, model) - e0));
    }
    return worst;
  };
  const double coarse = drift(0.02);
  const double fine = drift(0.01);
  CHECK(coarse / fine > 2.5);
  CHECK(coarse / fine < 6.0);
}

TEST_CASE("hybrid_step rejects nonfinite states") {
  const HybridModel model = two_level_model(0.4, 0.8);
  HybridState state = initial_two_level(1.0, 0.0);
  state.q(0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(hybrid_step(state, model, 0.01), std::runtime_error);
}

TEST_CASE("ehrenfest_rhs vanishes for H and the identity") {
  const HybridModel model = two_level_model(0.4, 0.8);
  const HybridState state = initial_two_level(0.9, -0.3);

  CHECK(ehrenfest_rhs(state, model, model.hamiltonian) == 0.0);

  PhaseSpaceOperator identity;
  identity.op = [](const RVec&, const RVec&) { return CMat(CMat::Identity(2, 2)); };
  identity.grad_p = [](const RVec&, const RVec&) { return std::vector<CMat>{CMat::Zero(2, 2)}; };
  identity.grad_q = [](const RVec&, const RVec&) { return std::vector<CMat>{CMat::Zero(2, 2)}; };
  CHECK(std::abs(ehrenfest_rhs(state, model, identity)) < 1e-12);
}

TEST_CASE("ehrenfest_rhs matches the finite-difference derivative of <A>") {
  const HybridModel model = two_level_model(0.4, 0.8);
  PhaseSpaceOperator a;
  a.op = [](const RVec& p, const RVec& q) {
    return CMat(q(0) * pauli_x() + p(0) * pauli_z());
  };
  a.grad_q = [](const RVec&, const RVec&) { return std::vector<CMat>{pauli_x()}; };
  a.grad_p = [](const RVec&, const RVec&) { return std::vector<CMat>{pauli_z()}; };

  const double dt = 1e-4;
  HybridState s0 = initial_two_level(1.0, 0.0);
  const HybridState s1 = hybrid_step(s0, model, dt);
  const HybridState s2 = hybrid_step(s1, model, dt);
  const auto expect = [&](const HybridState& s) {
    return trace_real(s.rho.entries(), a.op(s.p, s.q));
  };
  const double fd = (expect(s2) - expect(s0)) / (2 * dt);
  CHECK(ehrenfest_rhs(s1, model, a) == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("dirac_spin_hamiltonian spectrum") {
  const auto zero_potential = [](const Eigen::Vector3d&) { return 0.0; };

  const HermitianQuantity rest = dirac_spin_hamiltonian(Eigen::Vector3d::Zero(),
                                                        Eigen::Vector3d::Zero(), 1.5, 1.0,
                                                        zero_potential);
  const Eigen::VectorXd rest_evs = rest.eigenvalues();
  CHECK(rest_evs(0) == doctest::Approx(-1.5));
  CHECK(rest_evs(1) == doctest::Approx(-1.5));
  CHECK(rest_evs(2) == doctest::Approx(1.5));
  CHECK(rest_evs(3) == doctest::Approx(1.5));

  Eigen::Vector3d momentum(3.0, 0.0, 0.0);
  const HermitianQuantity boosted =
      dirac_spin_hamiltonian(momentum, Eigen::Vector3d::Zero(), 4.0, 1.0, zero_potential);
  const Eigen::VectorXd evs = boosted.eigenvalues();
  CHECK(evs(0) == doctest::Approx(-5.0).epsilon(1e-12));
  CHECK(evs(1) == doctest::Approx(-5.0).epsilon(1e-12));
  CHECK(evs(2) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(evs(3) == doctest::Approx(5.0).epsilon(1e-12));

  // Arbitrary (p, q, V): still Hermitian by construction.
  Rng rng(13);
  Eigen::Vector3d p_rand(rng.normal(), rng.normal(), rng.normal());
  Eigen::Vector3d q_rand(rng.normal(), rng.normal(), rng.normal());
  const auto coulombish = [](const Eigen::Vector3d& x) { return 1.0 / (1.0 + x.norm()); };
  const HermitianQuantity generic = dirac_spin_hamiltonian(p_rand, q_rand, 2.0, -1.0, coulombish);
  CHECK(hermiticity_residual(generic.entries()) < 1e-12);
}

TEST_CASE("dirac_frenkel_reduce with the full family reproduces Schroedinger") {
  Rng rng(14);
  const Eigen::Index dim = 4;
  const HermitianQuantity h = random_hermitian(dim, rng);
  const CVec psi0 = random_unit_vector(dim, rng);

  RVec z0(2 * dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    z0(k) = psi0(k).real();
    z0(dim + k) = psi0(k).imag();
  }
  const CoherentFamily family = full_state_family(dim);
  const double t_end = 1.0, dt = 1e-3;
  const DiracFrenkelResult run = dirac_frenkel_reduce(family, h, z0, t_end, dt);

  const CMat u = hermitian_propagator(h.entries(), t_end, 1.0);
  const CVec exact = u * psi0;
  const CVec reduced = family.phi(run.params.back());
  CHECK((reduced - exact).norm() < 1e-8);
  CHECK(run.max_norm_drift < 1e-8);
}

TEST_CASE("dirac_frenkel_reduce: coherent Gaussians trace the classical circle") {
  const Eigen::Index levels = 64;
  const CoherentFamily family = coherent_gaussian_family(levels);
  const HermitianQuantity h = oscillator_hamiltonian(levels);

  RVec z0(3);
  z0 << 1.0, 0.0, 0.0;
  const double t_end = kPi / 2, dt = 2e-3;
  const DiracFrenkelResult run = dirac_frenkel_reduce(family, h, z0, t_end, dt);

  const RVec z_final = run.params.back();
  CHECK(std::abs(z_final(0) - 0.0) < 1e-6);
  CHECK(std::abs(z_final(1) - (-1.0)) < 1e-6);
  CHECK(run.max_norm_drift < 1e-8);
  CHECK(run.max_gram_condition < 1e3);
}

TEST_CASE("dirac_frenkel_reduce flags redundant parameterizations") {
  // Two copies of the same tangent direction: Gram is singular.
  CoherentFamily degenerate;
  degenerate.param_dim = 2;
  degenerate.phi = [](const RVec& z) {
    CVec v(2);
    v << std::cos(z(0) + z(1)), std::sin(z(0) + z(1));
    return v;
  };
  degenerate.d_phi = [](const RVec& z) {
    CVec t(2);
    t << -std::sin(z(0) + z(1)), std::cos(z(0) + z(1));
    return std::vector<CVec>{t, t};
  };
  const HermitianQuantity h(pauli_x());
  RVec z0(2);
  z0 << 0.3, 0.1;
  CHECK_THROWS_AS(dirac_frenkel_reduce(degenerate, h, z0, 0.1, 0.01), std::runtime_error);
}

TEST_CASE("koopman_build: constant Hamiltonian gives the zero generator") {
  const KoopmanModel model = koopman_build([](double, double) { return 1.0; }, 2.0, 16);
  CHECK(model.hhat.norm() == 0.0);
}

TEST_CASE("koopman_build is Hermitian by construction") {
  const KoopmanModel harmonic =
      koopman_build([](double q, double p) { return 0.5 * (q * q + p * p); }, 4.0, 32);
  CHECK(sparse_hermiticity_residual(harmonic.hhat) < 1e-12);

  // A non-separable Hamiltonian exercises the symmetrization.
  const KoopmanModel skewed =
      koopman_build([](double q, double p) { return 0.5 * p * p + 0.3 * p * q + q * q; }, 4.0, 32);
  CHECK(sparse_hermiticity_residual(skewed.hhat) < 1e-12);
}

TEST_CASE("koopman_evolve: uniform density is stationary by symmetry") {
  const KoopmanModel model =
      koopman_build([](double q, double p) { return 0.5 * (q * q + p * p); }, 3.0, 32);
  const int n = model.n_grid;
  RVec uniform = RVec::Ones(n * n);
  uniform /= uniform.sum() * model.dq * model.dp;
  // The uniform density has weight at the box edge; that is the point here.
  const KoopmanTrajectory traj = koopman_evolve(model, uniform, 1.0, 0.01, 10, 1.0);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    CHECK(std::abs(traj.q_mean[i]) < 1e-10);
    CHECK(std::abs(traj.p_mean[i]) < 1e-10);
    CHECK(std::abs(traj.mass[i] - 1.0) < 1e-8);
  }
}

TEST_CASE("koopman_evolve: Gaussian density rotates like the classical oscillator") {
  const KoopmanModel model =
      koopman_build([](double q, double p) { return 0.5 * (q * q + p * p); }, 4.0, 64);
  const RVec density = koopman_gaussian_density(model, 1.0, 0.0, 0.35);
  const double t_end = kPi / 4;
  const KoopmanTrajectory traj = koopman_evolve(model, density, t_end, 0.01, 20);

  CHECK(std::abs(traj.q_mean.back() - std::cos(t_end)) < 0.05);
  CHECK(std::abs(traj.p_mean.back() - (-std::sin(t_end))) < 0.05);
  for (double m : traj.mass) CHECK(std::abs(m - 1.0) < 1e-8);
  CHECK(traj.max_boundary_leak < 1e-6);
}

TEST_CASE("koopman_evolve rejects unnormalized densities and flags leaks") {
  const KoopmanModel model =
      koopman_build([](double q, double p) { return 0.5 * (q * q + p * p); }, 2.0, 16);
  RVec density = RVec::Ones(16 * 16);
  CHECK_THROWS_AS(koopman_evolve(model, density, 0.1, 0.01), std::invalid_argument);

  // A Gaussian hugging the box edge must trip the leak detector.
  const RVec edge_hugger = koopman_gaussian_density(model, 1.9, 0.0, 0.3);
  CHECK_THROWS_AS(koopman_evolve(model, edge_hugger, 0.5, 0.01), std::runtime_error);
}
