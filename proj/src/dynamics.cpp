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

#include "densim/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace densim {

namespace {

RVec classical_force_q(const CMat& rho, const HybridModel& model, const RVec& p, const RVec& q) {
  const std::vector<CMat> grads = model.hamiltonian.grad_q(p, q);
  RVec f(static_cast<Eigen::Index>(grads.size()));
  for (std::size_t i = 0; i < grads.size(); ++i)
    f(static_cast<Eigen::Index>(i)) = trace_real(rho, grads[i]);
  return f;
}

RVec classical_force_p(const CMat& rho, const HybridModel& model, const RVec& p, const RVec& q) {
  const std::vector<CMat> grads = model.hamiltonian.grad_p(p, q);
  RVec f(static_cast<Eigen::Index>(grads.size()));
  for (std::size_t i = 0; i < grads.size(); ++i)
    f(static_cast<Eigen::Index>(i)) = trace_real(rho, grads[i]);
  return f;
}

/// Leapfrog (kick-drift-kick) over `dt` for the classical sector with
/// frozen quantum state.
void classical_substep(const CMat& rho, const HybridModel& model, RVec& q, RVec& p, double dt) {
  p -= 0.5 * dt * classical_force_q(rho, model, p, q);
  q += dt * classical_force_p(rho, model, p, q);
  p -= 0.5 * dt * classical_force_q(rho, model, p, q);
}

void require_finite(const RVec& q, const RVec& p, double t) {
  if (!q.allFinite() || !p.allFinite() || !std::isfinite(t))
    throw std::runtime_error("hybrid_step: nonfinite state (reduce dt)");
}

}  // namespace

double gradient_check(const HybridModel& model, const RVec& p, const RVec& q) {
  const double h = 1e-5;
  double worst = 0.0;
  const std::vector<CMat> gp = model.hamiltonian.grad_p(p, q);
  const std::vector<CMat> gq = model.hamiltonian.grad_q(p, q);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    RVec pp = p, pm = p;
    pp(i) += h;
    pm(i) -= h;
    const CMat fd = (model.hamiltonian.op(pp, q) - model.hamiltonian.op(pm, q)) / (2 * h);
    const double scale = std::max(1.0, max_abs(gp[static_cast<std::size_t>(i)]));
    worst = std::max(worst, max_abs(fd - gp[static_cast<std::size_t>(i)]) / scale);
  }
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    RVec qp = q, qm = q;
    qp(i) += h;
    qm(i) -= h;
    const CMat fd = (model.hamiltonian.op(p, qp) - model.hamiltonian.op(p, qm)) / (2 * h);
    const double scale = std::max(1.0, max_abs(gq[static_cast<std::size_t>(i)]));
    worst = std::max(worst, max_abs(fd - gq[static_cast<std::size_t>(i)]) / scale);
  }
  return worst;
}

HybridState hybrid_step(const HybridState& state, const HybridModel& model, double dt,
                        const Tolerances& tol) {
  if (dt <= 0.0) throw std::invalid_argument("hybrid_step: dt must be positive");
  require_finite(state.q, state.p, state.t);
  RVec q = state.q;
  RVec p = state.p;
  classical_substep(state.rho.entries(), model, q, p, 0.5 * dt);

  const CMat u = hermitian_propagator(model.hamiltonian.op(p, q), dt, model.hbar);
  CMat rho = u * state.rho.entries() * u.adjoint();
  rho = 0.5 * (rho + rho.adjoint().eval());
  // Unitary conjugation keeps the trace; pin the roundoff so long runs
  // cannot accumulate drift.
  rho /= rho.trace().real();

  classical_substep(rho, model, q, p, 0.5 * dt);
  require_finite(q, p, state.t + dt);
  return {std::move(q), std::move(p), DensityOperator(rho, tol), state.t + dt};
}

PureHybridState hybrid_step(const PureHybridState& state, const HybridModel& model, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("hybrid_step: dt must be positive");
  require_finite(state.q, state.p, state.t);
  const CMat rho0 = state.psi * state.psi.adjoint();
  RVec q = state.q;
  RVec p = state.p;
  classical_substep(rho0, model, q, p, 0.5 * dt);

  const CMat u = hermitian_propagator(model.hamiltonian.op(p, q), dt, model.hbar);
  CVec psi = u * state.psi;
  psi /= psi.norm();

  classical_substep(psi * psi.adjoint(), model, q, p, 0.5 * dt);
  require_finite(q, p, state.t + dt);
  return {std::move(q), std::move(p), std::move(psi), state.t + dt};
}

double ehrenfest_rhs(const HybridState& state, const HybridModel& model,
                     const PhaseSpaceOperator& a, const Tolerances& tol) {
  const CMat& rho = state.rho.entries();
  const CMat h = model.hamiltonian.op(state.p, state.q);
  const CMat aop = a.op(state.p, state.q);
  require_same_dim(h.rows(), aop.rows(), "ehrenfest_rhs");

  const std::vector<CMat> hq = model.hamiltonian.grad_q(state.p, state.q);
  const std::vector<CMat> hp = model.hamiltonian.grad_p(state.p, state.q);
  const std::vector<CMat> aq = a.grad_q(state.p, state.q);
  const std::vector<CMat> ap = a.grad_p(state.p, state.q);
  if (hq.size() != aq.size() || hp.size() != ap.size())
    throw std::invalid_argument("ehrenfest_rhs: gradient count mismatch");

  double rhs = 0.0;
  for (std::size_t i = 0; i < hq.size(); ++i)
    rhs += trace_real(rho, aq[i]) * trace_real(rho, hp[i]) -
           trace_real(rho, ap[i]) * trace_real(rho, hq[i]);
  const CMat comm = h * aop - aop * h;
  rhs += (Cplx(0, 1) / model.hbar * (rho * comm).trace()).real();
  (void)tol;
  return rhs;
}

HermitianQuantity dirac_spin_hamiltonian(const Eigen::Vector3d& p, const Eigen::Vector3d& q,
                                         double mass, double charge,
                                         const std::function<double(const Eigen::Vector3d&)>& v) {
  const Cplx i(0, 1);
  Eigen::Matrix2cd sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, -i, i, 0;
  sz << 1, 0, 0, -1;
  const Eigen::Matrix2cd sp = p(0) * sx + p(1) * sy + p(2) * sz;

  CMat h = CMat::Zero(4, 4);
  h.block<2, 2>(0, 2) = sp;
  h.block<2, 2>(2, 0) = sp;
  h.block<2, 2>(0, 0) = mass * Eigen::Matrix2cd::Identity();
  h.block<2, 2>(2, 2) = -mass * Eigen::Matrix2cd::Identity();
  h += charge * v(q) * CMat::Identity(4, 4);
  return HermitianQuantity(h);
}

CoherentFamily full_state_family(Eigen::Index dim) {
  CoherentFamily family;
  family.param_dim = static_cast<int>(2 * dim);
  family.phi = [dim](const RVec& z) {
    CVec v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v(k) = Cplx(z(k), z(dim + k));
    return v;
  };
  family.d_phi = [dim](const RVec&) {
    std::vector<CVec> tangents;
    tangents.reserve(static_cast<std::size_t>(2 * dim));
    for (Eigen::Index k = 0; k < dim; ++k) {
      CVec v = CVec::Zero(dim);
      v(k) = 1.0;
      tangents.push_back(v);
    }
    for (Eigen::Index k = 0; k < dim; ++k) {
      CVec v = CVec::Zero(dim);
      v(k) = Cplx(0, 1);
      tangents.push_back(v);
    }
    return tangents;
  };
  return family;
}

namespace {

CVec truncated_coherent(Eigen::Index n_levels, Cplx alpha) {
  CVec v(n_levels);
  Cplx amp = std::exp(-0.5 * std::norm(alpha));
  v(0) = amp;
  for (Eigen::Index n = 1; n < n_levels; ++n) {
    amp *= alpha / std::sqrt(static_cast<double>(n));
    v(n) = amp;
  }
  return v;
}

CVec raise(const CVec& v) {
  CVec out = CVec::Zero(v.size());
  for (Eigen::Index n = 1; n < v.size(); ++n)
    out(n) = std::sqrt(static_cast<double>(n)) * v(n - 1);
  return out;
}

}  // namespace

CoherentFamily coherent_gaussian_family(Eigen::Index n_levels) {
  if (n_levels < 2) throw std::invalid_argument("coherent_gaussian_family: need >= 2 levels");
  CoherentFamily family;
  family.param_dim = 3;  // (x, p, theta)
  const Cplx i(0, 1);
  auto base = [n_levels, i](const RVec& z) {
    const Cplx alpha = (z(0) + i * z(1)) / std::sqrt(2.0);
    return std::pair<CVec, Cplx>(truncated_coherent(n_levels, alpha), std::exp(i * z(2)));
  };
  family.phi = [base](const RVec& z) {
    auto [v, phase] = base(z);
    return CVec(phase * v);
  };
  family.d_phi = [base, i](const RVec& z) {
    auto [v, phase] = base(z);
    const CVec av = raise(v);
    std::vector<CVec> tangents;
    tangents.push_back(phase * (-0.5 * z(0) * v + av / std::sqrt(2.0)));
    tangents.push_back(phase * (-0.5 * z(1) * v + i * av / std::sqrt(2.0)));
    tangents.push_back(phase * (i * v));
    return tangents;
  };
  return family;
}

HermitianQuantity oscillator_hamiltonian(Eigen::Index n_levels) {
  CMat h = CMat::Zero(n_levels, n_levels);
  for (Eigen::Index n = 0; n < n_levels; ++n) h(n, n) = static_cast<double>(n) + 0.5;
  return HermitianQuantity(h);
}

namespace {

/// Tangent-space velocity: least-squares solution of the stacked real
/// form of C zdot = b with Tikhonov factor 1e-12.
RVec variational_velocity(const CoherentFamily& family, const CMat& h, const RVec& z, double hbar,
                          double* condition) {
  const CVec phi = family.phi(z);
  const std::vector<CVec> tangents = family.d_phi(z);
  const int m = family.param_dim;
  if (static_cast<int>(tangents.size()) != m)
    throw std::invalid_argument("dirac_frenkel_reduce: tangent count != param_dim");

  CMat gram(m, m);
  CVec rhs(m);
  const CVec hphi = h * phi;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) gram(a, b) = tangents[static_cast<std::size_t>(a)].dot(tangents[static_cast<std::size_t>(b)]);
    rhs(a) = tangents[static_cast<std::size_t>(a)].dot(Cplx(0, -1) / hbar * hphi);
  }

  RMat stacked(2 * m, m);
  RVec y(2 * m);
  stacked.topRows(m) = gram.real();
  stacked.bottomRows(m) = gram.imag();
  y.head(m) = rhs.real();
  y.tail(m) = rhs.imag();

  Eigen::JacobiSVD<RMat> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  const double cond = (smin > 0) ? smax / smin : std::numeric_limits<double>::infinity();
  if (condition) *condition = cond;
  if (!(cond < 1e12))
    throw std::runtime_error(
        "dirac_frenkel_reduce: singular tangent Gram matrix (redundant parameterization)");

  const RMat normal = stacked.transpose() * stacked + 1e-12 * RMat::Identity(m, m);
  return normal.ldlt().solve(stacked.transpose() * y);
}

}  // namespace

DiracFrenkelResult dirac_frenkel_reduce(const CoherentFamily& family, const HermitianQuantity& h,
                                        const RVec& z0, double t_end, double dt, double hbar) {
  if (dt <= 0.0 || t_end < 0.0)
    throw std::invalid_argument("dirac_frenkel_reduce: bad time parameters");
  const CMat& hm = h.entries();

  DiracFrenkelResult result;
  RVec z = z0;
  double t = 0.0;
  result.times.push_back(t);
  result.params.push_back(z);
  result.max_norm_drift = std::abs(family.phi(z).norm() - 1.0);

  const auto deriv = [&](const RVec& zz, double* cond) {
    return variational_velocity(family, hm, zz, hbar, cond);
  };

  const int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
  for (int s = 0; s < n_steps; ++s) {
    const double step = std::min(dt, t_end - t);
    double cond = 0.0;
    const RVec k1 = deriv(z, &cond);
    result.max_gram_condition = std::max(result.max_gram_condition, cond);
    const RVec k2 = deriv(z + 0.5 * step * k1, nullptr);
    const RVec k3 = deriv(z + 0.5 * step * k2, nullptr);
    const RVec k4 = deriv(z + step * k3, nullptr);
    z += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += step;
    result.times.push_back(t);
    result.params.push_back(z);
    result.max_norm_drift =
        std::max(result.max_norm_drift, std::abs(family.phi(z).norm() - 1.0));
  }
  return result;
}

KoopmanModel koopman_build(const std::function<double(double q, double p)>& h_classical,
                           double box_half_width, int n_grid) {
  if (n_grid < 16 || n_grid % 2 != 0)
    throw std::invalid_argument("koopman_build: n_grid must be even and >= 16");
  if (box_half_width <= 0.0) throw std::invalid_argument("koopman_build: box must be positive");

  KoopmanModel model;
  model.n_grid = n_grid;
  model.box_half_width = box_half_width;
  model.dq = 2.0 * box_half_width / n_grid;
  model.dp = model.dq;
  model.q_coords.resize(n_grid);
  model.p_coords.resize(n_grid);
  // Cell midpoints: the lattice is symmetric about the origin, so a
  // uniform density has exactly zero mean coordinates.
  for (int a = 0; a < n_grid; ++a) {
    model.q_coords(a) = -box_half_width + (a + 0.5) * model.dq;
    model.p_coords(a) = -box_half_width + (a + 0.5) * model.dp;
  }
  model.h_classical = h_classical;

  // Sampled derivative fields by periodic central differences; exact for
  // the quadratic Hamiltonians the classical oracles use.
  RMat hq(n_grid, n_grid), hp(n_grid, n_grid);
  auto wrap = [n_grid](int a) { return (a + n_grid) % n_grid; };
  for (int a = 0; a < n_grid; ++a)
    for (int b = 0; b < n_grid; ++b) {
      hq(a, b) = (h_classical(model.q_coords(wrap(a + 1)), model.p_coords(b)) -
                  h_classical(model.q_coords(wrap(a - 1)), model.p_coords(b))) /
                 (2.0 * model.dq);
      hp(a, b) = (h_classical(model.q_coords(a), model.p_coords(wrap(b + 1))) -
                  h_classical(model.q_coords(a), model.p_coords(wrap(b - 1)))) /
                 (2.0 * model.dp);
    }

  const Cplx ihalf(0, 0.5);
  std::vector<Eigen::Triplet<Cplx>> entries;
  entries.reserve(static_cast<std::size_t>(4 * n_grid) * static_cast<std::size_t>(n_grid));
  auto idx = [n_grid](int a, int b) { return a * n_grid + b; };
  for (int a = 0; a < n_grid; ++a)
    for (int b = 0; b < n_grid; ++b) {
      // (i/2)(D_p A_q + A_q D_p) couples p-neighbors.
      entries.emplace_back(idx(a, b), idx(a, wrap(b + 1)),
                           ihalf * (hq(a, wrap(b + 1)) + hq(a, b)) / (2.0 * model.dp));
      entries.emplace_back(idx(a, b), idx(a, wrap(b - 1)),
                           -ihalf * (hq(a, wrap(b - 1)) + hq(a, b)) / (2.0 * model.dp));
      // -(i/2)(D_q A_p + A_p D_q) couples q-neighbors.
      entries.emplace_back(idx(a, b), idx(wrap(a + 1), b),
                           -ihalf * (hp(wrap(a + 1), b) + hp(a, b)) / (2.0 * model.dq));
      entries.emplace_back(idx(a, b), idx(wrap(a - 1), b),
                           ihalf * (hp(wrap(a - 1), b) + hp(a, b)) / (2.0 * model.dq));
    }
  model.hhat.resize(n_grid * n_grid, n_grid * n_grid);
  model.hhat.setFromTriplets(entries.begin(), entries.end());
  return model;
}

RVec koopman_gaussian_density(const KoopmanModel& model, double q0, double p0, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("koopman_gaussian_density: sigma must be positive");
  const int n = model.n_grid;
  RVec density(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double dq = model.q_coords(a) - q0;
      const double dp = model.p_coords(b) - p0;
      density(a * n + b) = std::exp(-0.5 * (dq * dq + dp * dp) / (sigma * sigma));
    }
  const double mass = density.sum() * model.dq * model.dp;
  if (mass <= 0.0) throw std::runtime_error("koopman_gaussian_density: vanishing mass");
  return density / mass;
}

KoopmanTrajectory koopman_evolve(const KoopmanModel& model, const RVec& density0, double t_end,
                                 double dt, int sample_every, double leak_tolerance) {
  const int n = model.n_grid;
  if (density0.size() != static_cast<Eigen::Index>(n) * n)
    throw std::invalid_argument("koopman_evolve: density size mismatch");
  const double cell = model.dq * model.dp;
  if (std::abs(density0.sum() * cell - 1.0) > 1e-8)
    throw std::invalid_argument("koopman_evolve: density not normalized");
  if (sample_every < 1) sample_every = 1;

  const Eigen::SparseMatrix<Cplx>& h = model.hhat;
  const Cplx mi(0, -1);
  auto rhs = [&](const CVec& y) { return CVec(mi * (h * y)); };

  KoopmanTrajectory traj;
  auto record = [&](double t, const CVec& y) {
    double mass = 0.0, qm = 0.0, pm = 0.0, neg = 0.0, edge = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double val = y(a * n + b).real();
        mass += val;
        qm += model.q_coords(a) * val;
        pm += model.p_coords(b) * val;
        if (val < 0.0) neg -= val;
        if (a < 2 || a >= n - 2 || b < 2 || b >= n - 2) edge += std::abs(val);
      }
    mass *= cell;
    traj.times.push_back(t);
    traj.q_mean.push_back(qm * cell / mass);
    traj.p_mean.push_back(pm * cell / mass);
    traj.mass.push_back(mass);
    traj.negativity.push_back(neg * cell);
    traj.max_boundary_leak = std::max(traj.max_boundary_leak, edge * cell);
    if (traj.max_boundary_leak > leak_tolerance)
      throw std::runtime_error("koopman_evolve: probability mass at the box edge (" +
                               std::to_string(traj.max_boundary_leak) +
                               "); enlarge the box");
  };

  CVec y = density0.cast<Cplx>();
  double t = 0.0;
  record(t, y);
  const int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
  for (int s = 0; s < n_steps; ++s) {
    const double step = std::min(dt, t_end - t);
    const CVec k1 = rhs(y);
    const CVec k2 = rhs(y + 0.5 * step * k1);
    const CVec k3 = rhs(y + 0.5 * step * k2);
    const CVec k4 = rhs(y + step * k3);
    y += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += step;
    if ((s + 1) % sample_every == 0 || s + 1 == n_steps) record(t, y);
  }
  traj.final_density = y.real();
  return traj;
}

}  // namespace densim
