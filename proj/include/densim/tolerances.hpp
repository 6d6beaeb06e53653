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

namespace densim {

/// Numerical tolerances used by the validating constructors and the
/// contract checks. The defaults reflect double-precision
/// eigendecomposition accuracy at the dimensions this library targets
/// (N <= 64); all of them can be overridden per call site.
struct Tolerances {
  double hermitian = 1e-10;   ///< max |M - M*| entry allowed
  double trace = 1e-10;       ///< |Tr rho - 1| allowed
  double psd = 1e-9;          ///< eigenvalues >= -psd count as nonnegative
  double theorem = 1e-10;     ///< slack on the spectrum proximity bound
  double matrix_exp = 1e-10;  ///< Gibbs round-trip exp(-S/kbar) == rho
  double degenerate = 1e-8;   ///< eigenvalue clustering width for projectors
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

}  // namespace densim
