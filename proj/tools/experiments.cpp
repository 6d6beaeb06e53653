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

#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>

#include "densim/dynamics.hpp"
#include "densim/io.hpp"
#include "densim/measure.hpp"
#include "densim/qcore.hpp"
#include "densim/random.hpp"
#include "densim/stochastic.hpp"
#include "densim/stokes.hpp"
#include "densim/tomography.hpp"
#include "densim/version.hpp"

namespace densim::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Key-checked access into a parameter table. Collects field-level
/// diagnostics and tracks which keys were consumed, so unknown keys are
/// rejected.
class Params {
 public:
  Params(const nlohmann::json& table, std::vector<std::string>& diags)
      : table_(table), diags_(diags) {}

  double number(const std::string& key, double fallback, double lo, double hi) {
    used_.insert(key);
    if (!table_.contains(key)) return fallback;
    if (!table_[key].is_number()) {
      diags_.push_back("parameters." + key + ": expected a number");
      return fallback;
    }
    const double v = table_[key].get<double>();
    if (v < lo || v > hi) {
      diags_.push_back("parameters." + key + ": " + format_double(v) + " outside [" +
                       format_double(lo) + ", " + format_double(hi) + "]");
      return fallback;
    }
    return v;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t lo,
                       std::int64_t hi) {
    used_.insert(key);
    if (!table_.contains(key)) return fallback;
    if (!table_[key].is_number_integer()) {
      diags_.push_back("parameters." + key + ": expected an integer");
      return fallback;
    }
    const std::int64_t v = table_[key].get<std::int64_t>();
    if (v < lo || v > hi) {
      diags_.push_back("parameters." + key + ": " + std::to_string(v) + " outside [" +
                       std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return fallback;
    }
    return v;
  }

  std::vector<std::int64_t> integer_list(const std::string& key,
                                         std::vector<std::int64_t> fallback, std::int64_t lo,
                                         std::int64_t hi) {
    used_.insert(key);
    if (!table_.contains(key)) return fallback;
    if (!table_[key].is_array()) {
      diags_.push_back("parameters." + key + ": expected an array of integers");
      return fallback;
    }
    std::vector<std::int64_t> out;
    for (const auto& item : table_[key]) {
      if (!item.is_number_integer()) {
        diags_.push_back("parameters." + key + ": expected an array of integers");
        return fallback;
      }
      const std::int64_t v = item.get<std::int64_t>();
      if (v < lo || v > hi) {
        diags_.push_back("parameters." + key + ": entry " + std::to_string(v) + " outside [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return fallback;
      }
      out.push_back(v);
    }
    if (out.empty()) {
      diags_.push_back("parameters." + key + ": must not be empty");
      return fallback;
    }
    return out;
  }

  std::string choice(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& allowed) {
    used_.insert(key);
    if (!table_.contains(key)) return fallback;
    if (!table_[key].is_string()) {
      diags_.push_back("parameters." + key + ": expected a string");
      return fallback;
    }
    const std::string v = table_[key].get<std::string>();
    for (const auto& a : allowed)
      if (v == a) return v;
    std::string msg = "parameters." + key + ": '" + v + "' is not one of {";
    for (std::size_t i = 0; i < allowed.size(); ++i)
      msg += (i ? ", " : "") + allowed[i];
    diags_.push_back(msg + "}");
    return fallback;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    if (!table_.contains(key)) return fallback;
    if (!table_[key].is_string()) {
      diags_.push_back("parameters." + key + ": expected a string");
      return fallback;
    }
    return table_[key].get<std::string>();
  }

  std::vector<double> number_list(const std::string& key, std::vector<double> fallback, double lo,
                                  double hi) {
    used_.insert(key);
    if (!table_.contains(key)) return fallback;
    if (!table_[key].is_array()) {
      diags_.push_back("parameters." + key + ": expected an array of numbers");
      return fallback;
    }
    std::vector<double> out;
    for (const auto& item : table_[key]) {
      if (!item.is_number()) {
        diags_.push_back("parameters." + key + ": expected an array of numbers");
        return fallback;
      }
      const double v = item.get<double>();
      if (v < lo || v > hi) {
        diags_.push_back("parameters." + key + ": entry " + format_double(v) + " outside [" +
                         format_double(lo) + ", " + format_double(hi) + "]");
        return fallback;
      }
      out.push_back(v);
    }
    return out;
  }

  void reject_unknown() {
    for (const auto& [key, value] : table_.items())
      if (!used_.count(key)) diags_.push_back("parameters." + key + ": unknown key");
  }

 private:
  const nlohmann::json& table_;
  std::vector<std::string>& diags_;
  std::set<std::string> used_;
};

struct MalusParams {
  std::int64_t angles;
  double psi_angle;
};

MalusParams read_malus(Params& p) {
  return {p.integer("angles", 36, 1, 1000000), p.number("psiAngle", 0.0, -kPi, kPi)};
}

struct TomographyParams {
  std::int64_t dim;
  std::int64_t samples;   // 0 = exact probabilities
  std::string table_file;  // nonempty: reconstruct from an existing table
};

TomographyParams read_tomography(Params& p) {
  return {p.integer("dim", 2, 2, 16), p.integer("samples", 100000, 0, 100000000),
          p.text("tableFile", "")};
}

struct SlicedParams {
  std::string hamiltonian;
  double t_end;
  std::vector<std::int64_t> slice_counts;
};

SlicedParams read_sliced(Params& p) {
  return {p.choice("hamiltonian", "sx-sin", {"sx-sin", "sz-const"}),
          p.number("tEnd", kPi, 1e-6, 1e3), p.integer_list("sliceCounts", {100, 200, 400}, 1,
                                                           100000000)};
}

struct HybridParams {
  double coupling, delta, q0, p0, t_end, dt;
  std::int64_t sample_every;
  std::vector<double> dt_sweep;  // nonempty: also emit a dt convergence table
};

HybridParams read_hybrid(Params& p) {
  return {p.number("coupling", 0.4, -100, 100), p.number("delta", 0.8, -100, 100),
          p.number("q0", 1.0, -1e6, 1e6),       p.number("p0", 0.0, -1e6, 1e6),
          p.number("tEnd", 10.0, 1e-6, 1e4),    p.number("dt", 0.01, 1e-9, 1.0),
          p.integer("sampleEvery", 10, 1, 1000000),
          p.number_list("dtSweep", {}, 1e-9, 1.0)};
}

struct KoopmanParams {
  double box, sigma, q0, p0, t_end, dt;
  std::int64_t n_grid, sample_every;
  std::vector<std::int64_t> grid_sweep;  // nonempty: emit an nGrid convergence table
};

KoopmanParams read_koopman(Params& p) {
  return {p.number("box", 4.0, 0.1, 100.0),
          p.number("sigma", 0.2, 1e-3, 10.0),
          p.number("q0", 1.0, -50, 50),
          p.number("p0", 0.0, -50, 50),
          p.number("tEnd", kPi / 2, 1e-6, 100.0),
          p.number("dt", 0.01, 1e-6, 1.0),
          p.integer("nGrid", 128, 16, 1024),
          p.integer("sampleEvery", 10, 1, 1000000),
          p.integer_list("gridSweep", {}, 16, 1024)};
}

struct PdpParams {
  std::string model;
  double gamma, delta, t_end, dt;
  std::int64_t n_traj;
};

PdpParams read_pdp(Params& p) {
  return {p.choice("model", "driven", {"decay", "driven"}),
          p.number("gamma", 1.0, 0.0, 1e4),
          p.number("delta", 0.8, -1e4, 1e4),
          p.number("tEnd", 5.0, 1e-6, 1e4),
          p.number("dt", 1e-3, 1e-9, 1.0),
          p.integer("nTraj", 100, 1, 10000000)};
}

struct EnsembleParams {
  double gamma, delta, t_end, dt;
  std::int64_t n_traj, sample_every;
};

EnsembleParams read_ensemble(Params& p) {
  return {p.number("gamma", 1.0, 0.0, 1e4),  p.number("delta", 0.8, -1e4, 1e4),
          p.number("tEnd", 3.0, 1e-6, 1e4),  p.number("dt", 2e-3, 1e-9, 1.0),
          p.integer("nTraj", 500, 1, 10000000), p.integer("sampleEvery", 100, 1, 1000000)};
}

struct BistableParams {
  double stiffness, x0, damping, noise, mass, tilt, t_end, dt;
  std::int64_t n_runs;
};

BistableParams read_bistable(Params& p) {
  return {p.number("stiffness", 1.0, 1e-9, 1e6), p.number("x0", 1.0, 1e-9, 1e3),
          p.number("damping", 0.5, 0.0, 1e4),    p.number("noise", 0.3, 0.0, 1e4),
          p.number("mass", 1.0, 1e-9, 1e6),      p.number("tilt", 0.0, -1e3, 1e3),
          p.number("tEnd", 30.0, 1e-6, 1e5),     p.number("dt", 0.005, 1e-9, 1.0),
          p.integer("nRuns", 1000, 1, 10000000)};
}

struct SpectrumParams {
  std::int64_t pairs, dim_min, dim_max;
};

SpectrumParams read_spectrum(Params& p) {
  SpectrumParams out{p.integer("pairs", 1000, 1, 10000000), p.integer("dimMin", 2, 2, 64),
                     p.integer("dimMax", 8, 2, 64)};
  return out;
}

struct GibbsParams {
  double epsilon, mu, volume, t_min, t_max;
  std::int64_t t_steps;
};

GibbsParams read_gibbs(Params& p) {
  return {p.number("epsilon", 0.7, -1e3, 1e3), p.number("mu", 0.2, -1e3, 1e3),
          p.number("volume", 2.0, 1e-9, 1e6),  p.number("tMin", 0.1, 1e-6, 1e6),
          p.number("tMax", 1.0, 1e-6, 1e6),    p.integer("tSteps", 10, 1, 100000)};
}

void validate_kind_parameters(const std::string& kind, const nlohmann::json& table,
                              std::vector<std::string>& diags) {
  Params p(table, diags);
  if (kind == "malus") {
    read_malus(p);
  } else if (kind == "tomography") {
    read_tomography(p);
  } else if (kind == "sliced-medium") {
    read_sliced(p);
  } else if (kind == "hybrid") {
    read_hybrid(p);
  } else if (kind == "koopman") {
    read_koopman(p);
  } else if (kind == "pdp") {
    read_pdp(p);
  } else if (kind == "ensemble") {
    read_ensemble(p);
  } else if (kind == "bistable") {
    const BistableParams b = read_bistable(p);
    if (b.damping * b.dt > 0.01)
      diags.push_back("parameters.dt: damping * dt must stay below 0.01");
  } else if (kind == "spectrum-sweep") {
    const SpectrumParams s = read_spectrum(p);
    if (s.dim_min > s.dim_max) diags.push_back("parameters.dimMin: exceeds dimMax");
  } else if (kind == "gibbs") {
    const GibbsParams g = read_gibbs(p);
    if (g.t_min > g.t_max) diags.push_back("parameters.tMin: exceeds tMax");
  }
  p.reject_unknown();
}

/// Collects emitted files under the shared prefix.
class Emitter {
 public:
  explicit Emitter(std::string prefix) : prefix_(std::move(prefix)) {
    const std::filesystem::path parent = std::filesystem::path(prefix_).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
  }

  void csv(const std::string& name, const std::vector<CsvColumn>& columns,
           const std::vector<std::vector<std::string>>& rows) {
    const std::string path = prefix_ + "_" + name + ".csv";
    write_csv(path, columns, rows);
    paths_.push_back(path);
    paths_.push_back(path + ".schema.json");
  }

  void json(const std::string& name, const nlohmann::json& doc) {
    const std::string path = prefix_ + "_" + name + ".json";
    write_file(path, doc.dump(2) + "\n");
    paths_.push_back(path);
  }

  const std::vector<std::string>& paths() const { return paths_; }

 private:
  std::string prefix_;
  std::vector<std::string> paths_;
};

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

CMat lowering(double rate) {
  CMat l = CMat::Zero(2, 2);
  l(0, 1) = std::sqrt(rate);
  return l;
}

LindbladModel two_level_open(const std::string& kind, double gamma, double delta) {
  if (kind == "decay") return {HermitianQuantity(CMat::Zero(2, 2)), {lowering(gamma)}};
  return {HermitianQuantity(delta * pauli_x()), {lowering(gamma)}};
}

HybridModel two_level_hybrid(double coupling, double delta) {
  HybridModel model;
  model.hamiltonian.op = [coupling, delta](const RVec& p, const RVec& q) {
    return CMat(0.5 * (p(0) * p(0) + q(0) * q(0)) * CMat::Identity(2, 2) +
                coupling * q(0) * pauli_z() + delta * pauli_x());
  };
  model.hamiltonian.grad_p = [](const RVec& p, const RVec&) {
    return std::vector<CMat>{p(0) * CMat::Identity(2, 2)};
  };
  model.hamiltonian.grad_q = [coupling](const RVec&, const RVec& q) {
    return std::vector<CMat>{CMat(q(0) * CMat::Identity(2, 2) + coupling * pauli_z())};
  };
  return model;
}

void run_malus(const ExperimentConfig& config, Emitter& out) {
  std::vector<std::string> empty_diags;
  Params p(config.parameters, empty_diags);
  const MalusParams params = read_malus(p);

  Eigen::Vector2cd psi;
  psi << std::cos(params.psi_angle), std::sin(params.psi_angle);
  const CoherenceMatrix beam = CoherenceMatrix::from_pure(psi);

  std::vector<std::vector<std::string>> rows;
  for (std::int64_t k = 0; k < params.angles; ++k) {
    const double angle = static_cast<double>(k) * kPi / static_cast<double>(params.angles);
    Eigen::Vector2cd phi;
    phi << std::cos(angle), std::sin(angle);
    const double intensity = apply_jones(beam, polarizer(phi)).intensity();
    const double amplitude = test_state(CVec(phi), CVec(psi));
    const double closed = std::pow(std::cos(angle - params.psi_angle), 2);
    rows.push_back({format_double(angle), format_double(intensity), format_double(amplitude),
                    format_double(closed)});
  }
  out.csv("sweep",
          {{"angle", "number", "polarizer angle in radians"},
           {"intensity", "number", "transmitted intensity through the polarizer"},
           {"test_probability", "number", "squared amplitude |phi* psi|^2"},
           {"cos2", "number", "closed-form cos^2 of the relative angle"}},
          rows);
}

void run_tomography(const ExperimentConfig& config, Emitter& out) {
  std::vector<std::string> empty_diags;
  Params p(config.parameters, empty_diags);
  const TomographyParams params = read_tomography(p);

  if (!params.table_file.empty()) {
    // Reconstruction from a table measured elsewhere.
    const FrequencyTable table = read_frequency_table(params.table_file);
    const Reconstruction rec = reconstruct_state(table, params.dim);
    out.json("reconstructed", state_to_json(rec.state));
    out.json("summary",
             {{"dim", params.dim},
              {"table_file", params.table_file},
              {"projection_residual", rec.projection_residual}});
    return;
  }

  Rng state_rng(Rng::split(config.seed, 0));
  const DensityOperator truth = random_density(params.dim, state_rng);
  const TestSuite suite(params.dim);
  const std::optional<std::uint64_t> samples =
      params.samples > 0 ? std::optional<std::uint64_t>(params.samples) : std::nullopt;
  const FrequencyTable table =
      measure_suite(truth, suite, samples, Rng::split(config.seed, 1));
  const Reconstruction rec = reconstruct_state(table, params.dim);

  out.json("truth", state_to_json(truth));
  out.json("reconstructed", state_to_json(rec.state));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < table.values.size(); ++i)
    rows.push_back({std::to_string(i), format_double(table.values[i]),
                    table.sample_sizes[i] ? std::to_string(*table.sample_sizes[i])
                                          : std::string("exact")});
  out.csv("frequencies",
          {{"test-index", "integer", "position in the standard test suite ordering"},
           {"frequency", "number", "observed or exact test probability"},
           {"sample-size", "string", "repetitions, or 'exact'"}},
          rows);
  out.json("summary", {{"dim", params.dim},
                       {"samples", params.samples},
                       {"trace_distance", trace_distance(rec.state, truth)},
                       {"projection_residual", rec.projection_residual}});
}

void run_sliced(const ExperimentConfig& config, Emitter& out) {
  std::vector<std::string> empty_diags;
  Params p(config.parameters, empty_diags);
  const SlicedParams params = read_sliced(p);

  const auto hamiltonian = [&](double t) {
    Eigen::Matrix2cd h;
    if (params.hamiltonian == "sx-sin")
      h = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished() * std::sin(t);
    else
      h = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
    return h;
  };
  Eigen::Vector2cd psi0;
  psi0 << 1, 0;

  std::vector<std::vector<std::string>> rows;
  double previous = 0.0;
  for (std::size_t i = 0; i < params.slice_counts.size(); ++i) {
    const int n = static_cast<int>(params.slice_counts[i]);
    const SlicedMediumResult run = sliced_medium_evolution(hamiltonian, psi0, params.t_end, n);
    rows.push_back({std::to_string(n), format_double(run.error_norm),
                    format_double(run.norm_drift),
                    i == 0 ? "" : format_double(run.error_norm / previous)});
    previous = run.error_norm;
  }
  out.csv("convergence",
          {{"nSlices", "integer", "number of first-order slices"},
           {"error", "number", "norm distance to the exact reference"},
           {"norm_drift", "number", "norm gain of the unrenormalized product"},
           {"ratio", "number", "error ratio to the previous row (empty on the first)"}},
          rows);
}

void run_hybrid(const ExperimentConfig& config, Emitter& out) {
  std::vector<std::string> empty_diags;
  Params p(config.parameters, empty_diags);
  const HybridParams params = read_hybrid(p);

  const HybridModel model = two_level_hybrid(params.coupling, params.delta);
  CVec plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  RVec q(1), pvec(1);
  q << params.q0;
  pvec << params.p0;
  HybridState state{q, pvec, DensityOperator::pure(plus), 0.0};

  std::vector<std::vector<std::string>> rows;
  const auto record = [&](const HybridState& s) {
    rows.push_back({format_double(s.t), format_double(s.q(0)), format_double(s.p(0)),
                    format_double(trace_real(s.rho.entries(), model.hamiltonian.op(s.p, s.q))),
                    format_double(trace_real(s.rho.entries(), pauli_x())),
                    format_double(trace_real(s.rho.entries(), pauli_z()))});
  };
  record(state);
  const int steps = static_cast<int>(std::ceil(params.t_end / params.dt - 1e-12));
  for (int s = 0; s < steps; ++s) {
    state = hybrid_step(state, model, std::min(params.dt, params.t_end - state.t));
    if ((s + 1) % params.sample_every == 0 || s + 1 == steps) record(state);
  }
  out.csv("trajectory",
          {{"t", "number", "time"},
           {"q", "number", "classical position"},
           {"p", "number", "classical momentum"},
           {"energy", "number", "q-expectation of H(p,q)"},
           {"sx", "number", "q-expectation of sigma_x"},
           {"sz", "number", "q-expectation of sigma_z"}},
          rows);

  if (!params.dt_sweep.empty()) {
    std::vector<std::vector<std::string>> conv;
    double previous = 0.0;
    for (std::size_t i = 0; i < params.dt_sweep.size(); ++i) {
      const double dt = params.dt_sweep[i];
      HybridState s{q, pvec, DensityOperator::pure(plus), 0.0};
      const double e0 = trace_real(s.rho.entries(), model.hamiltonian.op(s.p, s.q));
      double drift = 0.0;
      const int n = static_cast<int>(std::ceil(params.t_end / dt - 1e-12));
      for (int k = 0; k < n; ++k) {
        s = hybrid_step(s, model, std::min(dt, params.t_end - s.t));
        drift = std::max(drift,
                         std::abs(trace_real(s.rho.entries(),
                                             model.hamiltonian.op(s.p, s.q)) -
                                  e0));
      }
      conv.push_back({format_double(dt), format_double(drift),
                      i == 0 ? "" : format_double(previous / drift)});
      previous = drift;
    }
    out.csv("convergence",
            {{"dt", "number", "integrator step"},
             {"energy_drift", "number", "max |<H>(t) - <H>(0)| over the run"},
             {"improvement", "number", "drift ratio to the previous row (empty on the first)"}},
            conv);
  }
}

void run_koopman(const ExperimentConfig& config, Emitter& out) {
  std::vector<std::string> empty_diags;
  Params p(config.parameters, empty_diags);
  const KoopmanParams params = read_koopman(p);

  const KoopmanModel model = koopman_build(
      [](double q, double pp) { return 0.5 * (q * q + pp * pp); }, params.box,
      static_cast<int>(params.n_grid));
  const RVec density = koopman_gaussian_density(model, params.q0, params.p0, params.sigma);
  const KoopmanTrajectory traj = koopman_evolve(model, density, params.t_end, params.dt,
                                                static_cast<int>(params.sample_every));

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    rows.push_back({format_double(traj.times[i]), format_double(traj.q_mean[i]),
                    format_double(traj.p_mean[i]), format_double(traj.mass[i]),
                    format_double(traj.negativity[i])});
  out.csv("trajectory",
          {{"t", "number", "time"},
           {"q_mean", "number", "density mean of q"},
           {"p_mean", "number", "density mean of p"},
           {"mass", "number", "discrete integral of the density"},
           {"negativity", "number", "mass of the negative part"}},
          rows);

  const double q_exact = params.q0 * std::cos(params.t_end) + params.p0 * std::sin(params.t_end);
  const double p_exact = -params.q0 * std::sin(params.t_end) + params.p0 * std::cos(params.t_end);
  out.json("summary", {{"q_error", std::abs(traj.q_mean.back() - q_exact)},
                       {"p_error", std::abs(traj.p_mean.back() - p_exact)},
                       {"max_boundary_leak", traj.max_boundary_leak}});

  if (!params.grid_sweep.empty()) {
    std::vector<std::vector<std::string>> conv;
    for (const std::int64_t n : params.grid_sweep) {
      const KoopmanModel m = koopman_build(
          [](double qq, double pp) { return 0.5 * (qq * qq + pp * pp); }, params.box,
          static_cast<int>(n));
      // Keep RK4 inside its stability region as the mesh refines: the
      // generator's spectral radius grows like box / dq.
      const double dt = std::min(params.dt, m.dq / params.box);
      const KoopmanTrajectory t =
          koopman_evolve(m, koopman_gaussian_density(m, params.q0, params.p0, params.sigma),
                         params.t_end, dt, 1 << 20);
      conv.push_back({std::to_string(n), format_double(dt),
                      format_double(std::abs(t.q_mean.back() - q_exact)),
                      format_double(std::abs(t.p_mean.back() - p_exact))});
    }
    out.csv("convergence",
            {{"nGrid", "integer", "lattice points per axis"},
             {"dt", "number", "integrator step used"},
             {"q_error", "number", "final |<q> - classical|"},
             {"p_error", "number", "final |<p> - classical|"}},
            conv);
  }
}

void run_pdp(const ExperimentConfig& config, Emitter& out) {
  std::vector<std::string> empty_diags;
  Params p(config.parameters, empty_diags);
  const PdpParams params = read_pdp(p);

  const LindbladModel model = two_level_open(params.model, params.gamma, params.delta);
  CVec psi0(2);
  psi0 << 0, 1;
  const int stride = static_cast<int>(params.t_end / params.dt) + 1;

  std::vector<std::vector<std::string>> rows;
  std::map<std::size_t, std::uint64_t> histogram;
  for (std::int64_t i = 0; i < params.n_traj; ++i) {
    const JumpTrajectory traj = pdp_trajectory(model, psi0, params.t_end, params.dt,
                                               Rng::split(config.seed, i), stride);
    for (const auto& e : traj.events)
      rows.push_back({std::to_string(i), format_double(e.time), std::to_string(e.channel)});
    ++histogram[traj.events.size()];
  }
  out.csv("events",
          {{"trajectory", "integer", "trajectory index"},
           {"time", "number", "jump time"},
           {"channel", "integer", "jump channel index"}},
          rows);

  std::vector<std::vector<std::string>> hist_rows;
  for (const auto& [count, occurrences] : histogram)
    hist_rows.push_back({std::to_string(count), std::to_string(occurrences)});
  out.csv("histogram",
          {{"events", "integer", "events per trajectory"},
           {"trajectories", "integer", "trajectories with that many events"}},
          hist_rows);
}

void run_ensemble(const ExperimentConfig& config, Emitter& out) {
  std::vector<std::string> empty_diags;
  Params p(config.parameters, empty_diags);
  const EnsembleParams params = read_ensemble(p);

  const LindbladModel model = two_level_open("driven", params.gamma, params.delta);
  CVec psi0(2);
  psi0 << 0, 1;
  const EnsembleResult ens =
      ensemble_average(model, psi0, params.t_end, params.dt, params.n_traj, config.seed,
                       static_cast<int>(params.sample_every), config.threads);
  const MasterPath master = master_integrate(model, DensityOperator::pure(psi0), params.t_end,
                                             params.dt, static_cast<int>(params.sample_every));

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < ens.times.size(); ++i)
    for (Eigen::Index r = 0; r < 2; ++r)
      for (Eigen::Index c = 0; c < 2; ++c)
        rows.push_back({format_double(ens.times[i]), std::to_string(r), std::to_string(c),
                        format_double(ens.mean[i](r, c).real()),
                        format_double(ens.mean[i](r, c).imag()),
                        format_double(master.states[i].entries()(r, c).real()),
                        format_double(master.states[i].entries()(r, c).imag()),
                        format_double(ens.se_real[i](r, c)),
                        format_double(ens.se_imag[i](r, c))});
  out.csv("comparison",
          {{"t", "number", "sample time"},
           {"row", "integer", "density matrix row"},
           {"col", "integer", "density matrix column"},
           {"mean_re", "number", "ensemble mean, real part"},
           {"mean_im", "number", "ensemble mean, imaginary part"},
           {"master_re", "number", "master equation, real part"},
           {"master_im", "number", "master equation, imaginary part"},
           {"se_re", "number", "standard error, real part"},
           {"se_im", "number", "standard error, imaginary part"}},
          rows);
}

void run_bistable(const ExperimentConfig& config, Emitter& out) {
  std::vector<std::string> empty_diags;
  Params p(config.parameters, empty_diags);
  const BistableParams params = read_bistable(p);

  BistableModel model;
  model.stiffness = params.stiffness;
  model.x0 = params.x0;
  model.damping = params.damping;
  model.noise = params.noise;
  model.mass = params.mass;
  model.tilt = params.tilt;
  const BistableOutcome outcome = bistable_selection(model, params.t_end, params.dt,
                                                     params.n_runs, config.seed, 0.0,
                                                     config.threads);

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < outcome.final_x.size(); ++i)
    rows.push_back({std::to_string(i), format_double(outcome.final_x[i]),
                    std::to_string(outcome.basins[i])});
  out.csv("runs",
          {{"run", "integer", "run index"},
           {"final_x", "number", "position at tEnd"},
           {"basin", "integer", "-1 left, +1 right, 0 undecided"}},
          rows);
  const double decided = static_cast<double>(outcome.left + outcome.right);
  out.json("summary",
           {{"left", outcome.left},
            {"right", outcome.right},
            {"undecided", outcome.undecided},
            {"left_fraction", decided > 0 ? static_cast<double>(outcome.left) / decided : 0.0}});
}

void run_spectrum_sweep(const ExperimentConfig& config, Emitter& out) {
  std::vector<std::string> empty_diags;
  Params p(config.parameters, empty_diags);
  const SpectrumParams params = read_spectrum(p);

  Rng rng(config.seed);
  std::vector<std::vector<std::string>> rows;
  double max_excess = -1.0;
  const std::int64_t span = params.dim_max - params.dim_min + 1;
  for (std::int64_t i = 0; i < params.pairs; ++i) {
    const Eigen::Index dim =
        static_cast<Eigen::Index>(params.dim_min + static_cast<std::int64_t>(rng.next_u64() %
                                                                             static_cast<std::uint64_t>(span)));
    const DensityOperator rho = random_density(dim, rng);
    const HermitianQuantity a = random_hermitian(dim, rng);
    const double mean = q_expectation(rho, a);
    const double sigma = q_uncertainty(rho, a);
    const SpectralValue nearest = nearest_spectral_value(rho, a);
    const double excess = nearest.gap - sigma;
    max_excess = std::max(max_excess, excess);
    rows.push_back({std::to_string(i), std::to_string(dim), format_double(mean),
                    format_double(sigma), format_double(nearest.lambda),
                    format_double(nearest.gap), format_double(excess)});
  }
  out.csv("pairs",
          {{"index", "integer", "pair index"},
           {"dim", "integer", "Hilbert space dimension"},
           {"expectation", "number", "q-expectation of A"},
           {"sigma", "number", "q-uncertainty of A"},
           {"lambda", "number", "nearest eigenvalue of A"},
           {"gap", "number", "|lambda - <A>|"},
           {"excess", "number", "gap - sigma (nonpositive up to roundoff)"}},
          rows);
  out.json("summary", {{"pairs", params.pairs}, {"max_excess", max_excess}});
}

void run_gibbs(const ExperimentConfig& config, Emitter& out) {
  std::vector<std::string> empty_diags;
  Params p(config.parameters, empty_diags);
  const GibbsParams params = read_gibbs(p);

  CMat h = CMat::Zero(2, 2);
  h(1, 1) = params.epsilon;
  CMat n = CMat::Zero(2, 2);
  n(1, 1) = 1.0;
  const HermitianQuantity hq(h), nq(n);
  const HermitianQuantity v_op(params.volume * CMat::Identity(2, 2));

  std::vector<std::vector<std::string>> rows;
  for (std::int64_t i = 0; i < params.t_steps; ++i) {
    const double t =
        params.t_steps == 1
            ? params.t_min
            : params.t_min + (params.t_max - params.t_min) * static_cast<double>(i) /
                                 static_cast<double>(params.t_steps - 1);
    const auto [state, pressure] = grand_canonical(hq, nq, t, params.mu, params.volume);
    const double occupation = q_expectation(state.rho, nq);
    const double fermi = 1.0 / (std::exp((params.epsilon - params.mu) / t) + 1.0);
    const double residual = euler_residual(state, hq, {{-pressure, v_op}, {params.mu, nq}}, t);
    const double round_trip =
        max_abs(hermitian_exp(-state.entropy_operator.entries() / state.kbar) -
                state.rho.entries());
    rows.push_back({format_double(t), format_double(pressure), format_double(occupation),
                    format_double(fermi), format_double(residual), format_double(round_trip)});
  }
  out.csv("sweep",
          {{"T", "number", "temperature"},
           {"P", "number", "pressure solved from normalization"},
           {"occupation", "number", "q-expectation of the number operator"},
           {"fermi", "number", "closed form 1/(exp((eps-mu)/T)+1)"},
           {"euler_residual", "number", "<H> - T<S> + PV - mu<N>"},
           {"gibbs_round_trip", "number", "max |exp(-S/kbar) - rho|"}},
          rows);
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {
      "tomography", "malus",    "sliced-medium", "hybrid", "koopman",
      "pdp",        "ensemble", "bistable",      "spectrum-sweep", "gibbs"};
  return kinds;
}

std::vector<std::string> validate_config(const nlohmann::json& doc) {
  std::vector<std::string> diags;
  if (!doc.is_object()) {
    diags.push_back("config: expected a JSON object");
    return diags;
  }
  static const std::set<std::string> top_keys = {"kind", "seed", "output", "parameters",
                                                 "threads"};
  for (const auto& [key, value] : doc.items())
    if (!top_keys.count(key)) diags.push_back(key + ": unknown key");

  std::string kind;
  if (!doc.contains("kind") || !doc["kind"].is_string()) {
    diags.push_back("kind: required string naming the experiment");
  } else {
    kind = doc["kind"].get<std::string>();
    bool known = false;
    for (const auto& k : experiment_kinds()) known = known || k == kind;
    if (!known) {
      diags.push_back("kind: unknown experiment '" + kind + "'");
      kind.clear();
    }
  }
  if (doc.contains("seed") && !doc["seed"].is_number_integer())
    diags.push_back("seed: expected an integer");
  if (!doc.contains("output") || !doc["output"].is_string() ||
      doc["output"].get<std::string>().empty())
    diags.push_back("output: required nonempty string path prefix");
  if (doc.contains("threads") &&
      (!doc["threads"].is_number_integer() || doc["threads"].get<std::int64_t>() < 1 ||
       doc["threads"].get<std::int64_t>() > 256))
    diags.push_back("threads: expected an integer in [1, 256]");
  if (doc.contains("parameters") && !doc["parameters"].is_object())
    diags.push_back("parameters: expected a table");

  if (!kind.empty()) {
    const nlohmann::json params =
        doc.contains("parameters") && doc["parameters"].is_object() ? doc["parameters"]
                                                                    : nlohmann::json::object();
    validate_kind_parameters(kind, params, diags);
  }
  return diags;
}

std::vector<std::string> validate_config_file(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const std::exception& e) {
    return {std::string("parse error: ") + e.what()};
  }
  return validate_config(doc);
}

ExperimentConfig load_config(const nlohmann::json& doc) {
  const auto diags = validate_config(doc);
  if (!diags.empty()) throw std::invalid_argument(diags.front());
  ExperimentConfig config;
  config.kind = doc["kind"].get<std::string>();
  config.output = doc["output"].get<std::string>();
  if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("threads")) config.threads = doc["threads"].get<int>();
  if (doc.contains("parameters")) config.parameters = doc["parameters"];
  return config;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json outputs_json = nlohmann::json::array();
  for (const auto& [path, digest] : outputs)
    outputs_json.push_back({{"path", path}, {"sha256", digest}});
  return {{"config", config_echo},
          {"version", version},
          {"duration_seconds", duration_seconds},
          {"seeds", seeds},
          {"outputs", outputs_json}};
}

RunManifest run_experiment(const ExperimentConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  Emitter out(config.output);

  if (config.kind == "malus")
    run_malus(config, out);
  else if (config.kind == "tomography")
    run_tomography(config, out);
  else if (config.kind == "sliced-medium")
    run_sliced(config, out);
  else if (config.kind == "hybrid")
    run_hybrid(config, out);
  else if (config.kind == "koopman")
    run_koopman(config, out);
  else if (config.kind == "pdp")
    run_pdp(config, out);
  else if (config.kind == "ensemble")
    run_ensemble(config, out);
  else if (config.kind == "bistable")
    run_bistable(config, out);
  else if (config.kind == "spectrum-sweep")
    run_spectrum_sweep(config, out);
  else if (config.kind == "gibbs")
    run_gibbs(config, out);
  else
    throw std::invalid_argument("run_experiment: unknown kind '" + config.kind + "'");

  RunManifest manifest;
  manifest.config_echo = {{"kind", config.kind},
                          {"seed", config.seed},
                          {"output", config.output},
                          {"threads", config.threads},
                          {"parameters", config.parameters}};
  manifest.version = kVersion;
  manifest.seeds = {config.seed};
  for (const auto& path : out.paths()) manifest.outputs.emplace_back(path, sha256_file(path));
  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_file(config.output + ".manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace densim::cli
