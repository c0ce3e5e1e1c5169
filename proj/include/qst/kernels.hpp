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
 * Measurement kernels.
 *
 * Two families live here:
 *  - the quantum measurement transform (QMT): all 4^n Pauli expectations of
 *    a dense state at once, and its adjoint, which synthesizes
 *    sum_l c_l W_l without forming any W_l;
 *  - the low-memory kernel: tr(U^H W U) for an explicit list of strings,
 *    acting on the factor U in O(d r) per string and never forming a d x d
 *    matrix.
 *
 * These are the OpenMP kernels. Serial transcriptions of the same algorithms
 * live in `qst/reference_kernels.hpp` and are used as test oracles and
 * benchmark baselines. All reductions use a fixed block partition so results
 * do not depend on the thread count.
 */
#pragma once

#include "qst/frequencies.hpp"
#include "qst/povm.hpp"
#include "qst/states.hpp"

#include <span>
#include <vector>

namespace qst::kernels {

/// t[interleave(i, j)] = rho(i, j), i.e. axes ordered (i1, j1, ..., in, jn)
/// with qubit 0 most significant. Throws DomainError unless d = 2^n.
std::vector<Complex> shuffle_forward(const CMatrix& rho);
/// Inverse of `shuffle_forward`.
CMatrix shuffle_backward(std::span<const Complex> t, int n);

/// x[l] = tr(W_l rho) for every base-4 index l; x[0] = tr(rho).
std::vector<double> qmt(const CMatrix& rho, int cap = kDefaultDenseQubitCap);

/// p[k] = tr(A_k rho) for each of the 4^n tetrahedral outcomes.
std::vector<double> qmt_tetrahedral(const CMatrix& rho, int cap = kDefaultDenseQubitCap);

/// sum_l c[l] W_l (length 4^n coefficients); the adjoint of `qmt`.
CMatrix pauli_synthesis(std::span<const double> coeffs, int n, int cap = kDefaultDenseQubitCap);

/// sum_k c[k] A_k over tetrahedral outcomes; the adjoint of `qmt_tetrahedral`.
CMatrix tetrahedral_synthesis(std::span<const double> coeffs, int n,
                              int cap = kDefaultDenseQubitCap);

/// Probability of every outcome in linear order k + l * m_each.
std::vector<double> outcome_probabilities(const CMatrix& rho, const PovmEnsemble& ensemble,
                                          int cap = kDefaultDenseQubitCap);

/// -sum_i f_i / p_i A_i given precomputed probabilities. Terms with f_i = 0
/// are skipped; throws SingularProbabilityError if an active p_i <= 0.
CMatrix likelihood_gradient(const PovmEnsemble& ensemble, std::span<const double> freqs,
                            std::span<const double> probs, int cap = kDefaultDenseQubitCap);

/// Gradient of the negative log-likelihood at rho, evaluated through the QMT.
CMatrix qmt_gradient(const CMatrix& rho, const FrequencyTable& freqs,
                     int cap = kDefaultDenseQubitCap);

/// tr(W_j rho) for each listed string in O(d) per string.
std::vector<double> pauli_expectations_dense(const CMatrix& rho,
                                             std::span<const PauliString> strings);

/// W U, computed by index permutation and phases only.
CMatrix apply_pauli(const CMatrix& u, const PauliString& s);

/// values[j] = Re tr(U^H W_j U).
std::vector<double> probs_lowmem(const CMatrix& u, std::span<const PauliString> strings);

/// out += sum_j beta[j] W_j U.
void accumulate_pauli_action(const CMatrix& u, std::span<const PauliString> strings,
                             std::span<const double> beta, CMatrix& out);

} // namespace qst::kernels
