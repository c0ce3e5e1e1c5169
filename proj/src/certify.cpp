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

#include "qst/certify.hpp"

#include "qst/error.hpp"
#include "qst/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

namespace qst {

EigenMethod parse_eigen_method(std::string_view name) {
    if (name == "dense" || name == "dense_eig") return EigenMethod::dense_eig;
    if (name == "lanczos") return EigenMethod::lanczos;
    throw DomainError("unknown eigenvalue method '" + std::string(name) + "'");
}

std::string_view to_string(EigenMethod method) {
    return method == EigenMethod::dense_eig ? "dense_eig" : "lanczos";
}

LanczosResult lanczos_min_eig(const HermitianOperator& op, Eigen::Index dim,
                              const LanczosOptions& options) {
    if (dim < 1) throw DomainError("lanczos: empty operator");
    const int max_k = static_cast<int>(std::min<Eigen::Index>(options.max_iters, dim));

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = Complex(normal(rng), normal(rng));
    v /= v.norm();

    CMatrix basis(dim, max_k);
    std::vector<double> alpha;
    std::vector<double> beta;
    CVector w(dim);
    LanczosResult res{0.0, std::numeric_limits<double>::infinity(), 0.0, 0, false};

    for (int j = 0; j < max_k; ++j) {
        basis.col(j) = v;
        op(v, w);
        alpha.push_back(v.dot(w).real());
        // Full reorthogonalization, applied twice.
        for (int pass = 0; pass < 2; ++pass) {
            const CVector coeffs = basis.leftCols(j + 1).adjoint() * w;
            w.noalias() -= basis.leftCols(j + 1) * coeffs;
        }
        const double b = w.norm();

        const int k = j + 1;
        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
        Eigen::VectorXd off = k > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1))
                                    : Eigen::VectorXd();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
        const Eigen::VectorXd& theta = tri.eigenvalues();
        res.min_eig = theta[0];
        res.norm_estimate = std::max(std::abs(theta[0]), std::abs(theta[k - 1]));
        res.residual = b * std::abs(tri.eigenvectors()(k - 1, 0));
        res.iterations = k;

        const double scale = std::max(res.norm_estimate, std::numeric_limits<double>::min());
        if (res.residual <= options.rel_tol * scale || b <= 1e-14 * scale) {
            res.converged = true;
            return res;
        }
        if (k == dim) {
            // Krylov space is the whole space; the Ritz values are exact up to rounding.
            res.converged = true;
            return res;
        }
        beta.push_back(b);
        v = w / b;
    }
    return res;
}

HermitianOperator likelihood_gradient_operator(const PenalizedObjectiveContext& ctx,
                                               std::span<const double> probs) {
    const PovmEnsemble& ensemble = ctx.ensemble();
    const std::span<const double> f = ctx.freqs().freqs();
    if (probs.size() != f.size()) throw DomainError("probability vector length mismatch");
    if (ensemble.family() == PovmFamily::tetrahedral) {
        auto g = std::make_shared<CMatrix>(
            kernels::likelihood_gradient(ensemble, f, probs, ctx.dense_cap()));
        return [g](const CVector& x, CVector& y) { y.noalias() = *g * x; };
    }
    // -sum_i f_i/p_i A_i x with A = (I +- W)/2 collapses to
    // -(sum_j alpha_j / 2) x - sum_j (beta_j / 2) W_j x.
    const std::uint64_t m_each = ensemble.outcomes_per_povm();
    const std::size_t m = ensemble.strings().size();
    auto half_beta = std::make_shared<std::vector<double>>(m);
    double half_alpha_sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double t[2] = {0.0, 0.0};
        for (int k = 0; k < 2; ++k) {
            const std::size_t i = 2 * j + static_cast<std::size_t>(k);
            if (f[i] == 0.0) continue;
            if (!(probs[i] > 0.0)) throw SingularProbabilityError(i / m_each, probs[i]);
            t[k] = f[i] / probs[i];
        }
        half_alpha_sum += 0.5 * (t[0] + t[1]);
        (*half_beta)[j] = -0.5 * (t[0] - t[1]);
    }
    const PovmEnsemble* ens = &ensemble;
    return [ens, half_beta, half_alpha_sum](const CVector& x, CVector& y) {
        CMatrix out = -half_alpha_sum * x;
        kernels::accumulate_pauli_action(x, ens->strings(), *half_beta, out);
        y = out.col(0);
    };
}

Certificate gap_bound(const FactorMatrix& u, const PenalizedObjectiveContext& ctx,
                      EigenMethod method, const LanczosOptions& options) {
    const double norm = u.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("gap_bound needs a non-zero factor");
    const FactorMatrix un = u / norm;
    const std::vector<double> p = factor_probabilities(un, ctx);
    const std::span<const double> f = ctx.freqs().freqs();
    const std::uint64_t m_each = ctx.ensemble().outcomes_per_povm();
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] > 0.0 && !(p[i] > 0.0)) throw SingularProbabilityError(i / m_each, p[i]);
    }

    Certificate cert{};
    cert.method = method;
    cert.converged = true;

    if (method == EigenMethod::dense_eig) {
        const CMatrix g = kernels::likelihood_gradient(ctx.ensemble(), f, p, ctx.dense_cap());
        cert.trace_term = un.conjugate().cwiseProduct(g * un).sum().real();
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(g, Eigen::EigenvaluesOnly);
        cert.min_eig = eig.eigenvalues()[0];
        cert.mu = std::max(0.0, -cert.min_eig);
    } else {
        const HermitianOperator op = likelihood_gradient_operator(ctx, p);
        cert.trace_term = 0.0;
        CVector gu(un.rows());
        for (Eigen::Index c = 0; c < un.cols(); ++c) {
            op(un.col(c), gu);
            cert.trace_term += un.col(c).dot(gu).real();
        }
        const LanczosResult lz = lanczos_min_eig(op, un.rows(), options);
        cert.min_eig = lz.min_eig;
        cert.lanczos_residual = lz.residual;
        cert.lanczos_iterations = lz.iterations;
        cert.converged = lz.converged;
        // Without convergence only theta_min - residual is safe to use.
        const double lower = lz.converged ? lz.min_eig : lz.min_eig - lz.residual;
        cert.mu = std::max(0.0, -lower);
    }
    cert.bound = cert.trace_term + cert.mu;
    return cert;
}

} // namespace qst
