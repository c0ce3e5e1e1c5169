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

#include "qst/objective.hpp"

#include "qst/error.hpp"
#include "qst/kernels.hpp"

#include <cmath>
#include <limits>

namespace qst {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool any_singular(std::span<const double> probs, std::span<const double> freqs) {
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (freqs[i] > 0.0 && !(probs[i] > 0.0)) return true;
    }
    return false;
}

void check_factor(const FactorMatrix& u, const PenalizedObjectiveContext& ctx) {
    if (u.rows() != (Eigen::Index{1} << ctx.num_qubits()) || u.cols() < 1) {
        throw DomainError("factor shape does not match the measured system");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// FrequencyTable

FrequencyTable::FrequencyTable(PovmEnsemble ensemble, std::vector<double> freqs,
                               std::optional<std::uint64_t> shots)
    : ensemble_(std::move(ensemble)), freqs_(std::move(freqs)), shots_(shots) {
    if (freqs_.size() != ensemble_.total_outcomes()) {
        throw ValidationError("frequency table has " + std::to_string(freqs_.size()) +
                              " entries, ensemble has " +
                              std::to_string(ensemble_.total_outcomes()) + " outcomes");
    }
    if (shots_ && *shots_ == 0) throw ValidationError("shot count must be positive");
    bool any_positive = false;
    for (const double f : freqs_) {
        if (!std::isfinite(f) || f < 0.0) throw ValidationError("frequencies must be finite and >= 0");
        any_positive = any_positive || f > 0.0;
    }
    if (!any_positive) throw ValidationError("frequencies are all zero");
    const std::uint64_t m_each = ensemble_.outcomes_per_povm();
    for (std::uint64_t l = 0; l < ensemble_.num_povms(); ++l) {
        double sum = 0.0;
        for (std::uint64_t k = 0; k < m_each; ++k) sum += freqs_[k + l * m_each];
        if (std::abs(sum - 1.0) > kFrequencySumTol) {
            throw ValidationError("frequencies of POVM " + std::to_string(l) + " sum to " +
                                  std::to_string(sum) + ", not 1");
        }
    }
}

// ---------------------------------------------------------------------------
// Context

Engine parse_engine(std::string_view name) {
    if (name == "qmt") return Engine::qmt;
    if (name == "lowmem") return Engine::lowmem;
    throw DomainError("unknown engine '" + std::string(name) + "'");
}

std::string_view to_string(Engine engine) {
    return engine == Engine::qmt ? "qmt" : "lowmem";
}

double lambda_from_frequencies(const FrequencyTable& freqs) {
    double sum = 0.0;
    for (const double f : freqs.freqs()) sum += f;
    if (!(sum > 0.0)) throw DomainError("frequencies sum to zero");
    return sum;
}

PenalizedObjectiveContext::PenalizedObjectiveContext(FrequencyTable freqs, Engine engine,
                                                     int dense_cap)
    : freqs_(std::move(freqs)), lambda_(lambda_from_frequencies(freqs_)), engine_(engine),
      dense_cap_(dense_cap) {
    if (engine_ == Engine::lowmem && freqs_.ensemble().family() != PovmFamily::pauli) {
        throw DomainError("the lowmem engine supports Pauli ensembles only");
    }
    if (engine_ == Engine::qmt) require_dense_capacity(freqs_.num_qubits(), dense_cap_, "qmt engine");
}

// ---------------------------------------------------------------------------
// Likelihood

double nll(std::span<const double> probs, std::span<const double> freqs) {
    if (probs.size() != freqs.size()) throw DomainError("nll: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (freqs[i] == 0.0) continue;
        if (!(probs[i] > 0.0)) return kInf;
        acc -= freqs[i] * std::log(probs[i]);
    }
    return acc;
}

double nll(const CMatrix& rho, const FrequencyTable& freqs, int cap) {
    const std::vector<double> p = kernels::outcome_probabilities(rho, freqs.ensemble(), cap);
    return nll(p, freqs.freqs());
}

double nll(const DensityMatrix& rho, const FrequencyTable& freqs, int cap) {
    return nll(rho.matrix(), freqs, cap);
}

std::vector<double> factor_probabilities(const FactorMatrix& u, const PenalizedObjectiveContext& ctx) {
    check_factor(u, ctx);
    if (ctx.engine() == Engine::qmt) {
        const CMatrix rho = u * u.adjoint();
        return kernels::outcome_probabilities(rho, ctx.ensemble(), ctx.dense_cap());
    }
    const auto& strings = ctx.ensemble().strings();
    const std::vector<double> e = kernels::probs_lowmem(u, strings);
    const double x0 = u.squaredNorm();
    std::vector<double> p(2 * strings.size());
    for (std::size_t j = 0; j < strings.size(); ++j) {
        p[2 * j] = 0.5 * (x0 + e[j]);
        p[2 * j + 1] = 0.5 * (x0 - e[j]);
    }
    return p;
}

double factor_nll(const FactorMatrix& u, const PenalizedObjectiveContext& ctx) {
    return nll(factor_probabilities(u, ctx), ctx.freqs().freqs());
}

ValueAndGrad bm_value_and_grad(const FactorMatrix& u, const PenalizedObjectiveContext& ctx) {
    check_factor(u, ctx);
    const std::span<const double> f = ctx.freqs().freqs();
    const double lambda = ctx.lambda();
    ValueAndGrad out{kInf, FactorMatrix::Zero(u.rows(), u.cols())};

    if (ctx.engine() == Engine::qmt) {
        const CMatrix rho = u * u.adjoint();
        const std::vector<double> p =
            kernels::outcome_probabilities(rho, ctx.ensemble(), ctx.dense_cap());
        if (any_singular(p, f)) return out;
        const CMatrix g = kernels::likelihood_gradient(ctx.ensemble(), f, p, ctx.dense_cap());
        out.value = nll(p, f) + lambda * u.squaredNorm();
        out.grad.noalias() = 2.0 * (g * u);
        out.grad += (2.0 * lambda) * u;
        return out;
    }

    // Low-memory path: p = (||U||^2 +- e_j) / 2 with e_j = Re tr(U^H W_j U), and
    // grad = (2 lambda - sum_j alpha_j) U - sum_j beta_j W_j U.
    const auto& strings = ctx.ensemble().strings();
    const std::vector<double> e = kernels::probs_lowmem(u, strings);
    const double x0 = u.squaredNorm();
    std::vector<double> p(2 * strings.size());
    for (std::size_t j = 0; j < strings.size(); ++j) {
        p[2 * j] = 0.5 * (x0 + e[j]);
        p[2 * j + 1] = 0.5 * (x0 - e[j]);
    }
    if (any_singular(p, f)) return out;
    std::vector<double> beta(strings.size());
    double alpha_sum = 0.0;
    for (std::size_t j = 0; j < strings.size(); ++j) {
        const double plus = f[2 * j] > 0.0 ? f[2 * j] / p[2 * j] : 0.0;
        const double minus = f[2 * j + 1] > 0.0 ? f[2 * j + 1] / p[2 * j + 1] : 0.0;
        alpha_sum += plus + minus;
        beta[j] = -(plus - minus);
    }
    out.value = nll(p, f) + lambda * x0;
    out.grad = (2.0 * lambda - alpha_sum) * u;
    kernels::accumulate_pauli_action(u, strings, beta, out.grad);
    return out;
}

// ---------------------------------------------------------------------------
// Packed coordinates

Eigen::VectorXd pack(const FactorMatrix& u) {
    const Eigen::Index n = u.size();
    Eigen::VectorXd x(2 * n);
    const Complex* src = u.data();
    for (Eigen::Index i = 0; i < n; ++i) {
        x[i] = src[i].real();
        x[n + i] = src[i].imag();
    }
    return x;
}

FactorMatrix unpack(const Eigen::VectorXd& x, Eigen::Index rows, Eigen::Index cols) {
    const Eigen::Index n = rows * cols;
    if (rows < 1 || cols < 1 || x.size() != 2 * n) throw DomainError("unpack: length mismatch");
    FactorMatrix u(rows, cols);
    Complex* dst = u.data();
    for (Eigen::Index i = 0; i < n; ++i) dst[i] = Complex(x[i], x[n + i]);
    return u;
}

PackedObjective packed_objective(const PenalizedObjectiveContext& ctx, Eigen::Index rank) {
    const Eigen::Index d = Eigen::Index{1} << ctx.num_qubits();
    return [&ctx, d, rank](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        const ValueAndGrad vg = bm_value_and_grad(unpack(x, d, rank), ctx);
        grad = pack(vg.grad);
        return vg.value;
    };
}

// ---------------------------------------------------------------------------
// Vectorized diagnostics

VecGradHess vec_grad_hess(const HermitianVector& x, const FrequencyTable& freqs, int max_qubits) {
    const int n = freqs.num_qubits();
    require_dense_capacity(n, max_qubits, "vec_grad_hess");
    const Eigen::Index dim = Eigen::Index{1} << (2 * n);
    if (x.values.size() != dim) throw DomainError("vec_grad_hess: hvec length mismatch");
    const std::vector<CMatrix> elements = dense_povm_elements(freqs.ensemble(), max_qubits);
    const std::span<const double> f = freqs.freqs();
    VecGradHess out{{Eigen::VectorXd::Zero(dim)}, Eigen::MatrixXd::Zero(dim, dim)};
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (f[i] == 0.0) continue;
        const Eigen::VectorXd a = hvec(elements[i]).values;
        const double p = a.dot(x.values);
        if (!(p > 0.0)) throw SingularProbabilityError(i / freqs.ensemble().outcomes_per_povm(), p);
        out.grad.values -= (f[i] / p) * a;
        out.hess.selfadjointView<Eigen::Lower>().rankUpdate(a, f[i] / (p * p));
    }
    out.hess.triangularView<Eigen::StrictlyUpper>() = out.hess.transpose();
    return out;
}

} // namespace qst
