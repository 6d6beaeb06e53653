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

#include "densim/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace densim {

std::string outcome_to_string(const OutcomeLabel& label) {
  if (std::holds_alternative<std::string>(label)) return std::get<std::string>(label);
  std::ostringstream os;
  os.precision(17);
  os << std::get<double>(label);
  return os.str();
}

Povm::Povm(std::vector<HermitianQuantity> effects, std::vector<OutcomeLabel> outcomes,
           const Tolerances& tol)
    : effects_(std::move(effects)), outcomes_(std::move(outcomes)) {
  if (effects_.empty()) throw std::invalid_argument("Povm: needs at least one effect");
  if (effects_.size() != outcomes_.size())
    throw std::invalid_argument("Povm: outcomes and effects must have equal length");
  const Eigen::Index d = effects_.front().dim();
  CMat sum = CMat::Zero(d, d);
  for (const auto& e : effects_) {
    require_same_dim(e.dim(), d, "Povm");
    Eigen::SelfAdjointEigenSolver<CMat> es(e.entries(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol.psd)
      throw std::invalid_argument("Povm: effect not positive semidefinite (min eig " +
                                  std::to_string(es.eigenvalues().minCoeff()) + ")");
    sum += e.entries();
  }
  if (max_abs(sum - CMat::Identity(d, d)) > tol.hermitian * static_cast<double>(effects_.size()))
    throw std::invalid_argument("Povm: effects do not sum to the identity");
}

Povm Povm::computational_basis(Eigen::Index dim) {
  std::vector<HermitianQuantity> effects;
  std::vector<OutcomeLabel> outcomes;
  for (Eigen::Index k = 0; k < dim; ++k) {
    CMat p = CMat::Zero(dim, dim);
    p(k, k) = 1.0;
    effects.emplace_back(p);
    outcomes.emplace_back(static_cast<double>(k));
  }
  return Povm(std::move(effects), std::move(outcomes));
}

std::vector<double> Povm::numeric_outcomes() const {
  std::vector<double> vals;
  vals.reserve(outcomes_.size());
  for (const auto& o : outcomes_) {
    if (!std::holds_alternative<double>(o))
      throw std::invalid_argument("Povm: outcome '" + std::get<std::string>(o) +
                                  "' is not numeric");
    vals.push_back(std::get<double>(o));
  }
  return vals;
}

KrausFilter::KrausFilter(std::vector<CMat> ops, const Tolerances& tol) : ops_(std::move(ops)) {
  if (ops_.empty()) throw std::invalid_argument("KrausFilter: needs at least one operator");
  const Eigen::Index d = ops_.front().rows();
  CMat sum = CMat::Zero(d, d);
  for (const auto& r : ops_) {
    require_square(r, "KrausFilter");
    require_same_dim(r.rows(), d, "KrausFilter");
    sum += r.adjoint() * r;
  }
  if (max_abs(sum - CMat::Identity(d, d)) > tol.hermitian * static_cast<double>(ops_.size()))
    throw std::invalid_argument("KrausFilter: sum R_k* R_k != identity");
}

Povm KrausFilter::induced_povm(const Tolerances& tol) const {
  std::vector<HermitianQuantity> effects;
  std::vector<OutcomeLabel> outcomes;
  for (std::size_t k = 0; k < ops_.size(); ++k) {
    CMat e = ops_[k].adjoint() * ops_[k];
    effects.emplace_back(0.5 * (e + e.adjoint().eval()), tol);
    outcomes.emplace_back(static_cast<double>(k));
  }
  return Povm(std::move(effects), std::move(outcomes), tol);
}

std::vector<double> EventSample::frequencies() const {
  std::vector<double> f(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    f[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return f;
}

std::vector<double> q_probabilities(const DensityOperator& rho, const Povm& povm,
                                    const Tolerances& tol) {
  require_same_dim(rho.dim(), povm.dim(), "q_probabilities");
  std::vector<double> p(povm.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < povm.size(); ++k) {
    double pk = trace_real(rho.entries(), povm.effects()[k].entries());
    if (pk < -tol.psd)
      throw std::runtime_error("q_probabilities: probability " + std::to_string(pk) +
                               " below PSD slack");
    p[k] = std::clamp(pk, 0.0, 1.0);
    sum += p[k];
  }
  if (std::abs(sum - 1.0) > tol.trace * static_cast<double>(povm.size()) + tol.psd)
    throw std::runtime_error("q_probabilities: probabilities sum to " + std::to_string(sum));
  for (auto& pk : p) pk /= sum;
  return p;
}

EventSample sample_events(const DensityOperator& rho, const Povm& povm, std::uint64_t n,
                          std::uint64_t seed, const Tolerances& tol) {
  if (n < 1) throw std::invalid_argument("sample_events: n must be >= 1");
  const std::vector<double> p = q_probabilities(rho, povm, tol);
  EventSample sample;
  sample.labels = povm.outcomes();
  sample.counts.assign(povm.size(), 0);
  sample.total = n;
  sample.seed = seed;
  Rng rng(seed);
  for (std::uint64_t i = 0; i < n; ++i) ++sample.counts[rng.categorical(p)];
  return sample;
}

FilterOutcome apply_filter(const DensityOperator& rho, const KrausFilter& filter, std::size_t k,
                           const Tolerances& tol) {
  require_same_dim(rho.dim(), filter.dim(), "apply_filter");
  if (k >= filter.size()) throw std::invalid_argument("apply_filter: channel index out of range");
  const CMat& r = filter.ops()[k];
  const CMat transformed = r * rho.entries() * r.adjoint();
  const double p = transformed.trace().real();
  if (p <= tol.psd)
    throw std::runtime_error("apply_filter: conditioning on a null event (p = " +
                             std::to_string(p) + ")");
  CMat out = transformed / p;
  return {p, DensityOperator(0.5 * (out + out.adjoint().eval()), tol)};
}

Povm born_instrument(const HermitianQuantity& a, const Tolerances& tol) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a.entries());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("born_instrument: eigendecomposition failed");
  const Eigen::VectorXd evs = es.eigenvalues();  // ascending
  const Eigen::Index d = a.dim();

  std::vector<HermitianQuantity> effects;
  std::vector<OutcomeLabel> outcomes;
  Eigen::Index start = 0;
  while (start < d) {
    Eigen::Index stop = start + 1;
    while (stop < d && evs(stop) - evs(stop - 1) <= tol.degenerate) ++stop;
    CMat proj = CMat::Zero(d, d);
    double val = 0.0;
    for (Eigen::Index i = start; i < stop; ++i) {
      proj += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
      val += evs(i);
    }
    val /= static_cast<double>(stop - start);
    effects.emplace_back(0.5 * (proj + proj.adjoint().eval()), tol);
    outcomes.emplace_back(val);
    start = stop;
  }
  return Povm(std::move(effects), std::move(outcomes), tol);
}

double test_state(const CVec& phi, const CVec& psi, const Tolerances& tol) {
  require_same_dim(phi.size(), psi.size(), "test_state");
  if (std::abs(phi.norm() - 1.0) > tol.hermitian)
    throw std::invalid_argument("test_state: phi not normalized");
  if (std::abs(psi.norm() - 1.0) > tol.hermitian)
    throw std::invalid_argument("test_state: psi not normalized");
  return std::norm(phi.dot(psi));
}

}  // namespace densim
