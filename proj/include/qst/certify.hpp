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
 * A-posteriori optimality certificate. For a factor U, with
 * rho~ = U U^H / ||U||_F^2 feasible, the gap L(rho~) - L* is at most
 * tr(grad L(rho~) rho~) + max(0, -lambda_min(grad L(rho~))).
 */
#pragma once

#include "qst/objective.hpp"

#include <cstdint>
#include <functional>
#include <string_view>

namespace qst {

enum class EigenMethod { dense_eig, lanczos };

EigenMethod parse_eigen_method(std::string_view name);
std::string_view to_string(EigenMethod method);

struct Certificate {
    double bound;            ///< trace_term + mu
    double trace_term;       ///< Re <U~, grad L(rho~) U~>
    double mu;               ///< max(0, -min_eig), inflated by the residual if Lanczos stalled
    double min_eig;
    EigenMethod method;
    double lanczos_residual; ///< 0 for dense_eig
    int lanczos_iterations;  ///< 0 for dense_eig
    bool converged;          ///< false only if Lanczos hit its iteration cap
};

/// y = A x for a Hermitian operator A.
using HermitianOperator = std::function<void(const CVector& x, CVector& y)>;

struct LanczosOptions {
    int max_iters = 200;
    double rel_tol = 1e-12; ///< Ritz residual <= rel_tol * ||A|| estimate
    std::uint64_t seed = 0x5eed;
};

struct LanczosResult {
    double min_eig;
    double residual;
    double norm_estimate;
    int iterations;
    bool converged;
};

/// Smallest eigenvalue by Lanczos with full reorthogonalization.
LanczosResult lanczos_min_eig(const HermitianOperator& op, Eigen::Index dim,
                              const LanczosOptions& options = {});

/// grad L(rho~) as an operator, applied without forming a d x d matrix for
/// Pauli ensembles. `probs` are the outcome probabilities at rho~.
HermitianOperator likelihood_gradient_operator(const PenalizedObjectiveContext& ctx,
                                               std::span<const double> probs);

/// Throws SingularProbabilityError if an active outcome has p <= 0 at rho~.
Certificate gap_bound(const FactorMatrix& u, const PenalizedObjectiveContext& ctx,
                      EigenMethod method, const LanczosOptions& options = {});

} // namespace qst
