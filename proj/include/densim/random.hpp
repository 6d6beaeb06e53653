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

#include "densim/matrix.hpp"
#include "densim/qcore.hpp"
#include "densim/rng.hpp"

namespace densim {

/// Ginibre matrix: i.i.d. standard complex Gaussian entries.
inline CMat random_ginibre(Eigen::Index dim, Rng& rng) {
  CMat g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = Cplx(rng.normal(), rng.normal());
  return g;
}

inline HermitianQuantity random_hermitian(Eigen::Index dim, Rng& rng) {
  const CMat g = random_ginibre(dim, rng);
  return HermitianQuantity(0.5 * (g + g.adjoint().eval()));
}

/// Full-rank random state rho = G G* / Tr(G G*).
inline DensityOperator random_density(Eigen::Index dim, Rng& rng) {
  const CMat g = random_ginibre(dim, rng);
  CMat w = g * g.adjoint();
  w /= w.trace().real();
  return DensityOperator(0.5 * (w + w.adjoint().eval()));
}

inline CVec random_unit_vector(Eigen::Index dim, Rng& rng) {
  CVec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Cplx(rng.normal(), rng.normal());
  v.normalize();
  return v;
}

/// Haar-ish random unitary from the QR of a Ginibre matrix with the
/// phases of R's diagonal absorbed.
inline CMat random_unitary(Eigen::Index dim, Rng& rng) {
  const CMat g = random_ginibre(dim, rng);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    Cplx d = r(i, i);
    q.col(i) *= (std::abs(d) > 0) ? d / std::abs(d) : Cplx(1, 0);
  }
  return q;
}

}  // namespace densim
