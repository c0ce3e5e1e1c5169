// Copyright 2026 The qstmle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Serial reference versions of the measurement kernels, written as direct
 * reshape/permute/multiply sweeps. Kept for testing and benchmarking; the
 * library itself calls `qst/kernels.hpp`.
 */
#pragma once

#include "qst/povm.hpp"
#include "qst/states.hpp"

#include <span>
#include <vector>

namespace qst::kernels::reference {

/// Reshape rho to (2,..,2 | 2,..,2) and permute axes to (i1, j1, ..., in, jn).
std::vector<Complex> shuffle_forward(const CMatrix& rho);

/// For each qubit: reshape to 4 x 4^(n-1), left-multiply by P^H, transpose.
std::vector<double> qmt(const CMatrix& rho);

/// Same sweep with the rows of P replaced by the tetrahedral elements.
std::vector<double> qmt_tetrahedral(const CMatrix& rho);

/// Adjoint sweep: sum_l c[l] W_l.
CMatrix pauli_synthesis(std::span<const double> coeffs, int n);

/// Applies sigma_X to qubit k (bit k of the row index) by the +-2^k shift pattern.
CMatrix apply_x(const CMatrix& u, int k);
/// Applies sigma_Z to qubit k by the +-1 row sign pattern.
CMatrix apply_z(const CMatrix& u, int k);
/// sigma_Y = i X Z: sign pattern, then shift pattern, then the factor i.
CMatrix apply_y(const CMatrix& u, int k);

/// W U by one single-qubit sweep per digit, least-significant qubit first.
CMatrix apply_pauli(const CMatrix& u, const PauliString& s);

/// Re tr(U^H W_j U) through `apply_pauli`.
std::vector<double> probs_lowmem(const CMatrix& u, std::span<const PauliString> strings);

} // namespace qst::kernels::reference
