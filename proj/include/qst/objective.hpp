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
 * The negative log-likelihood L(rho) = -sum_i f_i log tr(A_i rho), its
 * Burer-Monteiro form J(U) = L(U U^H), and the penalized objective
 * J_lambda(U) = J(U) + lambda ||U||_F^2 with lambda = sum_i f_i.
 */
#pragma once

#include "qst/frequencies.hpp"
#include "qst/povm.hpp"
#include "qst/states.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace qst {

/// d x r factor with rho = U U^H.
using FactorMatrix = CMatrix;

/// How measurement statistics are evaluated. `qmt` forms rho = U U^H and
/// runs the dense transform; `lowmem` acts on U directly (Pauli only).
enum class Engine { qmt, lowmem };

Engine parse_engine(std::string_view name);
std::string_view to_string(Engine engine);

/// sum_i f_i. Throws DomainError if it is not strictly positive.
double lambda_from_frequencies(const FrequencyTable& freqs);

class PenalizedObjectiveContext {
  public:
    /// `lowmem` requires a Pauli ensemble; `qmt` requires n <= dense_cap.
    PenalizedObjectiveContext(FrequencyTable freqs, Engine engine,
                              int dense_cap = kDefaultDenseQubitCap);

    [[nodiscard]] const FrequencyTable& freqs() const noexcept { return freqs_; }
    [[nodiscard]] const PovmEnsemble& ensemble() const noexcept { return freqs_.ensemble(); }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] Engine engine() const noexcept { return engine_; }
    [[nodiscard]] int dense_cap() const noexcept { return dense_cap_; }
    [[nodiscard]] int num_qubits() const noexcept { return freqs_.num_qubits(); }

  private:
    FrequencyTable freqs_;
    double lambda_;
    Engine engine_;
    int dense_cap_;
};

/// -sum_i f_i log p_i over outcomes with f_i > 0; +infinity if any of those
/// has p_i <= 0.
double nll(std::span<const double> probs, std::span<const double> freqs);

/// L(rho) for any Hermitian rho of matching size (trace is not checked).
double nll(const CMatrix& rho, const FrequencyTable& freqs, int cap = kDefaultDenseQubitCap);
double nll(const DensityMatrix& rho, const FrequencyTable& freqs,
           int cap = kDefaultDenseQubitCap);

/// Outcome probabilities tr(A_i U U^H) in linear order, using the context's engine.
std::vector<double> factor_probabilities(const FactorMatrix& u, const PenalizedObjectiveContext& ctx);

/// L(U U^H) without the penalty.
double factor_nll(const FactorMatrix& u, const PenalizedObjectiveContext& ctx);

struct ValueAndGrad {
    double value;
    FactorMatrix grad; ///< zero-filled when value is +infinity
};

/// J_lambda(U) and its gradient 2 grad L(U U^H) U + 2 lambda U.
ValueAndGrad bm_value_and_grad(const FactorMatrix& u, const PenalizedObjectiveContext& ctx);

/// Real parts (column-major) followed by imaginary parts; length 2 d r.
Eigen::VectorXd pack(const FactorMatrix& u);
FactorMatrix unpack(const Eigen::VectorXd& x, Eigen::Index rows, Eigen::Index cols);

/// Value-and-gradient over flat real vectors; returns the value and writes
/// the gradient.
using PackedObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// J_lambda in packed coordinates for a d x r factor. Keeps a reference to
/// `ctx`, which must outlive the returned callable.
PackedObjective packed_objective(const PenalizedObjectiveContext& ctx, Eigen::Index rank);

struct VecGradHess {
    HermitianVector grad;
    Eigen::MatrixXd hess;
};

/// Gradient -sum f_i/(a_i.x) a_i and Hessian sum f_i/(a_i.x)^2 a_i a_i^T of
/// L in hvec coordinates, with a_i = hvec(A_i). Small n only.
VecGradHess vec_grad_hess(const HermitianVector& x, const FrequencyTable& freqs,
                          int max_qubits = 4);

} // namespace qst
