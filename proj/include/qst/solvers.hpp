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
 * First-order drivers over flat real vectors: L-BFGS with a strong Wolfe
 * line search, and accelerated gradient descent with theta_t = t / (t + 3).
 */
#pragma once

#include "qst/objective.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace qst {

enum class SolverMethod { lbfgs, accgd };

SolverMethod parse_solver_method(std::string_view name);
std::string_view to_string(SolverMethod method);

/// `certificate` means the optional certificate bound fell below `cert_tol`.
enum class Termination { grad_tol, f_rel_tol, max_iters, line_search_failure, certificate };

std::string_view to_string(Termination t);

struct SolverConfig {
    SolverMethod method = SolverMethod::lbfgs;
    int max_iters = 5000;
    int history = 10;
    double step_size = 1e-2;
    double grad_tol = 1e-7;
    double f_rel_tol = 1e-12;
    int f_rel_window = 5;
    int certificate_every = 0; ///< 0 disables the certificate callback
    double cert_tol = 0.0;     ///< stop once bound <= cert_tol; 0 disables
    std::uint64_t seed = 0;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    int max_line_search_evals = 40;
    /// Replaces theta_t in accgd; 0 gives plain gradient descent.
    std::optional<double> momentum_override;

    /// Throws DomainError on inconsistent settings.
    void validate() const;
};

struct TraceRow {
    int iter;
    double seconds;
    double objective;
    double grad_norm;
    std::optional<double> bound;
};

struct SolveResult {
    Eigen::VectorXd x;  ///< final iterate (best iterate for accgd)
    double value;
    double grad_norm;
    std::vector<TraceRow> trace;
    Termination termination;
    int iterations;
    int evaluations;
};

/// Called with the current point every `certificate_every` iterations;
/// returns an upper bound on the optimality gap.
using CertificateCallback = std::function<double(const Eigen::VectorXd& x)>;

/// i.i.d. complex Gaussian d x r entries, scaled so ||U||_F = 1.
FactorMatrix init_factor(int n, int r, std::uint64_t seed);

struct LineSearchResult {
    bool ok;
    double alpha;
    double value;
    Eigen::VectorXd x;
    Eigen::VectorXd grad;
    int evaluations;
};

/**
 * Bracketing and zoom search for a step satisfying the strong Wolfe
 * conditions along `dir` (a descent direction). Infinite trial values count
 * as too large. The step is interpolated by a safeguarded cubic when both
 * bracket ends are finite and bisected otherwise.
 */
LineSearchResult strong_wolfe_search(const PackedObjective& f, const Eigen::VectorXd& x,
                                     double f0, const Eigen::VectorXd& g0,
                                     const Eigen::VectorXd& dir, double alpha0, double c1,
                                     double c2, int max_evals);

/// Throws DomainError if the objective is not finite at x0.
SolveResult lbfgs_solve(const PackedObjective& f, const Eigen::VectorXd& x0,
                        const SolverConfig& config, const CertificateCallback& certificate = {});

SolveResult accgd_solve(const PackedObjective& f, const Eigen::VectorXd& x0,
                        const SolverConfig& config, const CertificateCallback& certificate = {});

/// Dispatches on config.method.
SolveResult solve(const PackedObjective& f, const Eigen::VectorXd& x0,
                  const SolverConfig& config, const CertificateCallback& certificate = {});

/// Columns iter, seconds, objective, grad_norm, bound. Empty cells mark
/// values not computed; `with_time = false` leaves seconds empty so that
/// reruns produce identical files.
void write_trace_csv(std::ostream& os, const SolveResult& result, bool with_time = true);

} // namespace qst
