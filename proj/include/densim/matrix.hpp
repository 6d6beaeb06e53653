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

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace densim {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

/// max |(M - M*)_{jk}|; zero for exactly Hermitian input.
inline double hermiticity_residual(const CMat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

/// Real part of Tr(a*b); the imaginary residue is the caller's problem.
inline double trace_real(const CMat& a, const CMat& b) {
  return (a * b).trace().real();
}

inline void require_square(const CMat& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw std::invalid_argument(std::string(what) + ": matrix must be square and nonempty");
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

/// f applied to a Hermitian matrix through its eigendecomposition.
/// Exact (to eigensolver accuracy) for Hermitian input; that is the only
/// kind this library feeds it.
template <typename F>
CMat hermitian_function(const CMat& m, F&& f) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_function: eigendecomposition failed");
  Eigen::VectorXd vals = es.eigenvalues();
  Eigen::VectorXd fvals(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i) fvals(i) = f(vals(i));
  return es.eigenvectors() * fvals.asDiagonal() * es.eigenvectors().adjoint();
}

/// exp(M) for Hermitian M. Throws if exp overflows.
inline CMat hermitian_exp(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_exp: eigendecomposition failed");
  const double lmax = es.eigenvalues().maxCoeff();
  if (lmax > 700.0)
    throw std::runtime_error("hermitian_exp: exponent overflow; rescale or shift the generator");
  Eigen::VectorXd e = es.eigenvalues().array().exp();
  return es.eigenvectors() * e.asDiagonal() * es.eigenvectors().adjoint();
}

/// Unitary propagator exp(-i dt M / hbar) for Hermitian M.
inline CMat hermitian_propagator(const CMat& m, double dt, double hbar) {
  Eigen::SelfAdjointEigenSolver<CMat> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_propagator: eigendecomposition failed");
  CVec phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    double a = -dt * es.eigenvalues()(i) / hbar;
    phases(i) = Cplx(std::cos(a), std::sin(a));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace densim
