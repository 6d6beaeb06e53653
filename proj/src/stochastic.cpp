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

#include "densim/stochastic.hpp"

#include <algorithm>
#include <mutex>
#include <cmath>
#include <future>
#include <stdexcept>

namespace densim {

LindbladModel::LindbladModel(HermitianQuantity hamiltonian, std::vector<CMat> jump_ops, double hb)
    : h(std::move(hamiltonian)), jumps(std::move(jump_ops)), hbar(hb) {
  if (hbar <= 0.0) throw std::invalid_argument("LindbladModel: hbar must be positive");
  for (const auto& l : jumps) {
    require_square(l, "LindbladModel");
    require_same_dim(l.rows(), h.dim(), "LindbladModel");
  }
}

double LindbladModel::fastest_rate() const {
  double rate = 0.0;
  if (h.dim() > 1) {
    const Eigen::VectorXd ev = h.eigenvalues();
    rate = (ev.maxCoeff() - ev.minCoeff()) / hbar;
  }
  for (const auto& l : jumps) {
    Eigen::SelfAdjointEigenSolver<CMat> es(CMat(l.adjoint() * l), Eigen::EigenvaluesOnly);
    rate = std::max(rate, es.eigenvalues().maxCoeff());
  }
  return rate;
}

namespace {

CMat lindblad_rhs(const LindbladModel& model, const CMat& rho) {
  const Cplx mi_over_hbar = Cplx(0, -1.0 / model.hbar);
  CMat out = mi_over_hbar * (model.h.entries() * rho - rho * model.h.entries());
  for (const auto& l : model.jumps) {
    const CMat ldl = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

}  // namespace

MasterPath master_integrate(const LindbladModel& model, const DensityOperator& rho0, double t_end,
                            double dt, int sample_every, const Tolerances& tol) {
  if (dt <= 0.0 || t_end < 0.0) throw std::invalid_argument("master_integrate: bad time grid");
  require_same_dim(model.h.dim(), rho0.dim(), "master_integrate");
  if (sample_every < 1) sample_every = 1;

  MasterPath path;
  path.dt_warning = dt * model.fastest_rate() > 0.1;

  CMat rho = rho0.entries();
  double t = 0.0;
  path.times.push_back(t);
  path.states.push_back(rho0);

  const int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
  for (int s = 0; s < n_steps; ++s) {
    const double step = std::min(dt, t_end - t);
    const CMat k1 = lindblad_rhs(model, rho);
    const CMat k2 = lindblad_rhs(model, rho + 0.5 * step * k1);
    const CMat k3 = lindblad_rhs(model, rho + 0.5 * step * k2);
    const CMat k4 = lindblad_rhs(model, rho + step * k3);
    rho += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!rho.allFinite()) throw std::runtime_error("master_integrate: nonfinite state");
    rho = 0.5 * (rho + rho.adjoint().eval());
    const double tr = rho.trace().real();
    path.max_trace_drift = std::max(path.max_trace_drift, std::abs(tr - 1.0));
    rho /= tr;
    t += step;
    if ((s + 1) % sample_every == 0 || s + 1 == n_steps) {
      path.times.push_back(t);
      path.states.emplace_back(rho, tol);
    }
  }
  return path;
}

namespace {

struct DriftStepper {
  const LindbladModel& model;
  CMat h_eff;  // H - (i hbar / 2) sum L*L

  explicit DriftStepper(const LindbladModel& m) : model(m) {
    h_eff = m.h.entries();
    CMat damp = CMat::Zero(m.h.dim(), m.h.dim());
    for (const auto& l : m.jumps) damp += l.adjoint() * l;
    h_eff -= Cplx(0, 0.5 * m.hbar) * damp;
  }

  CVec rhs(const CVec& psi) const { return Cplx(0, -1.0 / model.hbar) * (h_eff * psi); }

  CVec step(const CVec& psi, double dt) const {
    const CVec k1 = rhs(psi);
    const CVec k2 = rhs(psi + 0.5 * dt * k1);
    const CVec k3 = rhs(psi + 0.5 * dt * k2);
    const CVec k4 = rhs(psi + dt * k3);
    return psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

}  // namespace

JumpTrajectory pdp_trajectory(const LindbladModel& model, const CVec& psi0, double t_end,
                              double dt, std::uint64_t seed, int sample_every) {
  if (dt <= 0.0 || t_end < 0.0) throw std::invalid_argument("pdp_trajectory: bad time grid");
  require_same_dim(model.h.dim(), psi0.size(), "pdp_trajectory");
  if (std::abs(psi0.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("pdp_trajectory: psi0 not normalized");
  if (sample_every < 1) sample_every = 1;

  const DriftStepper stepper(model);
  Rng rng(seed);

  JumpTrajectory traj;
  traj.seed = seed;

  CVec psi = psi0;  // unnormalized between jumps
  double threshold = rng.uniform_pos();
  double t = 0.0;
  traj.sample_times.push_back(0.0);
  traj.sample_states.push_back(psi0);

  const auto fire_jump = [&](double t_jump) {
    CVec unit_psi = psi / psi.norm();
    std::vector<double> weights(model.jumps.size());
    double total = 0.0;
    for (std::size_t k = 0; k < model.jumps.size(); ++k) {
      weights[k] = (model.jumps[k] * unit_psi).squaredNorm();
      total += weights[k];
    }
    if (total <= 1e-300)
      throw std::runtime_error("pdp_trajectory: no jump channel applicable at firing (t = " +
                               std::to_string(t_jump) + ")");
    for (auto& w : weights) w /= total;
    const std::size_t channel = rng.categorical(weights);
    psi = model.jumps[channel] * unit_psi;
    psi /= psi.norm();
    traj.events.push_back({t_jump, channel});
    threshold = rng.uniform_pos();
  };

  const int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
  for (int s = 0; s < n_steps; ++s) {
    double span = std::min(dt, t_end - t);
    // A step may contain several jumps; consume the span piecewise.
    while (span > 0.0) {
      const double before = psi.squaredNorm();
      CVec advanced = stepper.step(psi, span);
      const double after = advanced.squaredNorm();
      if (after > before * (1.0 + 1e-12))
        throw std::runtime_error("pdp_trajectory: drift norm increased (numerical breakdown)");
      if (after > threshold) {
        psi = std::move(advanced);
        t += span;
        span = 0.0;
        break;
      }
      // Norm crossed the threshold inside this span: bisect the jump time.
      double lo = 0.0, hi = span;
      while (hi - lo > 1e-10 * dt) {
        const double mid = 0.5 * (lo + hi);
        if (stepper.step(psi, mid).squaredNorm() > threshold)
          lo = mid;
        else
          hi = mid;
      }
      const double tau = 0.5 * (lo + hi);
      psi = stepper.step(psi, tau);
      t += tau;
      span -= tau;
      fire_jump(t);
    }
    if ((s + 1) % sample_every == 0 || s + 1 == n_steps) {
      traj.sample_times.push_back(t);
      traj.sample_states.push_back(psi / psi.norm());
    }
  }
  return traj;
}

namespace {

/// Pairwise (tree) reduction over a contiguous range; the shape depends
/// only on the range size, keeping ensemble means independent of thread
/// scheduling.
template <typename T, typename Get, typename Add>
T pairwise_reduce(std::size_t begin, std::size_t end, const Get& get, const Add& add) {
  if (end - begin == 1) return get(begin);
  const std::size_t mid = begin + (end - begin) / 2;
  T left = pairwise_reduce<T>(begin, mid, get, add);
  T right = pairwise_reduce<T>(mid, end, get, add);
  add(left, right);
  return left;
}

template <typename Fn>
void run_indexed(std::uint64_t count, int n_threads, const Fn& fn) {
  if (n_threads <= 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> workers;
  const std::uint64_t chunk = (count + n_threads - 1) / n_threads;
  for (int w = 0; w < n_threads; ++w) {
    const std::uint64_t lo = w * chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(count, lo + chunk);
    if (lo >= hi) break;
    workers.push_back(std::async(std::launch::async, [lo, hi, &fn] {
      for (std::uint64_t i = lo; i < hi; ++i) fn(i);
    }));
  }
  for (auto& w : workers) w.get();
}

}  // namespace

EnsembleResult ensemble_average(const LindbladModel& model, const CVec& psi0, double t_end,
                                double dt, std::uint64_t n_traj, std::uint64_t base_seed,
                                int sample_every, int n_threads) {
  if (n_traj < 1) throw std::invalid_argument("ensemble_average: n_traj must be >= 1");
  const Eigen::Index d = model.h.dim();

  std::vector<std::vector<CMat>> projectors(n_traj);
  std::vector<double> times;
  std::mutex times_mutex;
  run_indexed(n_traj, n_threads, [&](std::uint64_t i) {
    const JumpTrajectory traj =
        pdp_trajectory(model, psi0, t_end, dt, Rng::split(base_seed, i), sample_every);
    std::vector<CMat> path;
    path.reserve(traj.sample_states.size());
    for (const CVec& psi : traj.sample_states) path.push_back(psi * psi.adjoint());
    projectors[i] = std::move(path);
    if (i == 0) {
      std::lock_guard<std::mutex> lock(times_mutex);
      times = traj.sample_times;
    }
  });

  const std::size_t n_times = projectors[0].size();
  struct Acc {
    std::vector<CMat> sum;
    std::vector<RMat> sum_sq_re, sum_sq_im;
  };
  const auto get = [&](std::size_t i) {
    Acc acc;
    acc.sum = projectors[i];
    acc.sum_sq_re.reserve(n_times);
    acc.sum_sq_im.reserve(n_times);
    for (const CMat& m : projectors[i]) {
      acc.sum_sq_re.push_back(m.real().cwiseProduct(m.real()));
      acc.sum_sq_im.push_back(m.imag().cwiseProduct(m.imag()));
    }
    return acc;
  };
  const auto add = [&](Acc& a, const Acc& b) {
    for (std::size_t t = 0; t < n_times; ++t) {
      a.sum[t] += b.sum[t];
      a.sum_sq_re[t] += b.sum_sq_re[t];
      a.sum_sq_im[t] += b.sum_sq_im[t];
    }
  };
  Acc total = pairwise_reduce<Acc>(0, n_traj, get, add);

  EnsembleResult result;
  result.times = times;
  result.base_seed = base_seed;
  result.n_traj = n_traj;
  const double n = static_cast<double>(n_traj);
  for (std::size_t t = 0; t < n_times; ++t) {
    const CMat mean = total.sum[t] / n;
    result.mean.push_back(mean);
    if (n_traj > 1) {
      RMat var_re =
          (total.sum_sq_re[t] / n - mean.real().cwiseProduct(mean.real())) * (n / (n - 1.0));
      RMat var_im =
          (total.sum_sq_im[t] / n - mean.imag().cwiseProduct(mean.imag())) * (n / (n - 1.0));
      result.se_real.push_back((var_re.cwiseMax(0.0) / n).cwiseSqrt());
      result.se_imag.push_back((var_im.cwiseMax(0.0) / n).cwiseSqrt());
    } else {
      result.se_real.push_back(RMat::Zero(d, d));
      result.se_imag.push_back(RMat::Zero(d, d));
    }
  }
  return result;
}

DetectionStats detection_statistics(const LindbladModel& model, const CVec& psi0, double window,
                                    double dt, std::uint64_t n_traj, std::uint64_t base_seed,
                                    int n_threads, std::optional<std::size_t> channel) {
  if (n_traj < 1) throw std::invalid_argument("detection_statistics: n_traj must be >= 1");
  DetectionStats stats;
  stats.counts.assign(n_traj, 0);
  // Sampling the state path is pure overhead here; a huge stride keeps
  // only the endpoints.
  const int stride = std::max(1, static_cast<int>(window / dt) + 1);
  run_indexed(n_traj, n_threads, [&](std::uint64_t i) {
    const JumpTrajectory traj =
        pdp_trajectory(model, psi0, window, dt, Rng::split(base_seed, i), stride);
    if (channel) {
      std::uint64_t hits = 0;
      for (const auto& e : traj.events)
        if (e.channel == *channel) ++hits;
      stats.counts[i] = hits;
    } else {
      stats.counts[i] = traj.events.size();
    }
  });
  double sum = 0.0;
  for (auto c : stats.counts) {
    sum += static_cast<double>(c);
    ++stats.histogram[c];
  }
  stats.mean = sum / static_cast<double>(n_traj);
  double ss = 0.0;
  for (auto c : stats.counts) {
    const double d = static_cast<double>(c) - stats.mean;
    ss += d * d;
  }
  stats.variance = (n_traj > 1) ? ss / static_cast<double>(n_traj - 1) : 0.0;
  stats.fano = (stats.mean > 0.0) ? stats.variance / stats.mean : 0.0;
  return stats;
}

void BistableModel::validate() const {
  if (stiffness <= 0.0 || x0 <= 0.0 || mass <= 0.0)
    throw std::invalid_argument("BistableModel: stiffness, x0 and mass must be positive");
  if (damping < 0.0 || noise < 0.0)
    throw std::invalid_argument("BistableModel: damping and noise must be nonnegative");
}

double BistableModel::potential(double x) const {
  const double w = x * x - x0 * x0;
  return stiffness * w * w + tilt * x;
}

double BistableModel::potential_grad(double x) const {
  return 4.0 * stiffness * x * (x * x - x0 * x0) + tilt;
}

BistableOutcome bistable_selection(const BistableModel& model, double t_end, double dt,
                                   std::uint64_t n_runs, std::uint64_t base_seed, double x_start,
                                   int n_threads) {
  model.validate();
  if (dt <= 0.0 || t_end <= 0.0) throw std::invalid_argument("bistable_selection: bad time grid");
  if (model.damping * dt > 0.01)
    throw std::invalid_argument("bistable_selection: dt too coarse (gamma dt > 0.01)");

  BistableOutcome outcome;
  outcome.base_seed = base_seed;
  outcome.basins.assign(n_runs, 0);
  outcome.final_x.assign(n_runs, 0.0);

  const int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
  const double kick = model.noise / model.mass * std::sqrt(dt);
  run_indexed(n_runs, n_threads, [&](std::uint64_t i) {
    Rng rng(Rng::split(base_seed, i));
    double x = x_start, v = 0.0;
    for (int s = 0; s < n_steps; ++s) {
      v += dt * (-model.potential_grad(x) - model.damping * v) / model.mass +
           kick * rng.normal();
      x += dt * v;
    }
    outcome.final_x[i] = x;
    outcome.basins[i] = (std::abs(x) > 0.5 * model.x0) ? (x > 0 ? 1 : -1) : 0;
  });
  for (auto b : outcome.basins) {
    if (b < 0)
      ++outcome.left;
    else if (b > 0)
      ++outcome.right;
    else
      ++outcome.undecided;
  }
  return outcome;
}

}  // namespace densim
