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

#include "oracles.hpp"

#include "qst/error.hpp"
#include "qst/objective.hpp"
#include "qst/simulate.hpp"
#include "qst/solvers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace qst {
namespace {

struct Quadratic {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;

    static Quadratic random(int dim, double cond, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        Eigen::MatrixXd m(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m(i, j) = normal(rng);
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
        const Eigen::MatrixXd q = qr.householderQ();
        Eigen::VectorXd eig(dim);
        for (int i = 0; i < dim; ++i) eig[i] = std::pow(cond, static_cast<double>(i) / (dim - 1));
        Eigen::VectorXd b(dim);
        for (int i = 0; i < dim; ++i) b[i] = normal(rng);
        return {q * eig.asDiagonal() * q.transpose(), b};
    }

    PackedObjective objective() const {
        return [this](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
            g = a * x - b;
            return 0.5 * x.dot(a * x) - b.dot(x);
        };
    }
};

PackedObjective rosenbrock() {
    return [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g.resize(2);
        g[0] = -2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] * x[0]);
        g[1] = 200 * (x[1] - x[0] * x[0]);
        return (1 - x[0]) * (1 - x[0]) + 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]);
    };
}

TEST(Lbfgs, QuadraticReachesExactMinimizer) {
    const Quadratic q = Quadratic::random(50, 100.0, 1);
    SolverConfig config;
    config.f_rel_tol = 1e-300;
    const SolveResult res = lbfgs_solve(q.objective(), Eigen::VectorXd::Zero(50), config);
    const Eigen::VectorXd want = q.a.ldlt().solve(q.b);
    EXPECT_EQ(res.termination, Termination::grad_tol);
    EXPECT_LE((res.x - want).norm(), 1e-6 * want.norm());
    EXPECT_LT(res.iterations, 200);
}

TEST(Lbfgs, IsotropicQuadratic) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    Eigen::VectorXd target(50), x0(50);
    for (int i = 0; i < 50; ++i) {
        target[i] = normal(rng);
        x0[i] = normal(rng);
    }
    const PackedObjective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = x - target;
        return 0.5 * g.squaredNorm();
    };
    SolverConfig config;
    config.grad_tol = 1e-10;
    const SolveResult res = lbfgs_solve(f, x0, config);
    EXPECT_LE((res.x - target).norm(), 1e-8);
    EXPECT_LE(res.iterations, 60);
}

TEST(Lbfgs, Rosenbrock) {
    SolverConfig config;
    config.grad_tol = 1e-9;
    const SolveResult res = lbfgs_solve(rosenbrock(), Eigen::Vector2d(-1.2, 1.0), config);
    EXPECT_NEAR(res.x[0], 1.0, 1e-6);
    EXPECT_NEAR(res.x[1], 1.0, 1e-6);
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
        EXPECT_LE(res.trace[i].objective, res.trace[i - 1].objective);
    }
}

TEST(Lbfgs, InfiniteStartIsRejected) {
    const PackedObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = Eigen::VectorXd::Zero(x.size());
        return std::numeric_limits<double>::infinity();
    };
    EXPECT_THROW(lbfgs_solve(f, Eigen::VectorXd::Zero(3), SolverConfig{}), DomainError);
    SolverConfig accgd;
    accgd.method = SolverMethod::accgd;
    EXPECT_THROW(solve(f, Eigen::VectorXd::Zero(3), accgd), DomainError);
}

TEST(Lbfgs, MaxItersAndCertificateTermination) {
    const Quadratic q = Quadratic::random(20, 1e4, 2);
    SolverConfig config;
    config.max_iters = 3;
    SolveResult res = lbfgs_solve(q.objective(), Eigen::VectorXd::Zero(20), config);
    EXPECT_EQ(res.termination, Termination::max_iters);
    EXPECT_EQ(res.iterations, 3);
    EXPECT_EQ(res.trace.size(), 4u);

    config.max_iters = 1000;
    config.certificate_every = 2;
    config.cert_tol = 1e-3;
    const Eigen::VectorXd xs = q.a.ldlt().solve(q.b);
    const double fstar = -0.5 * q.b.dot(xs);
    int calls = 0;
    const CertificateCallback gap = [&](const Eigen::VectorXd& x) {
        ++calls;
        return 0.5 * x.dot(q.a * x) - q.b.dot(x) - fstar;
    };
    res = lbfgs_solve(q.objective(), Eigen::VectorXd::Zero(20), config, gap);
    EXPECT_EQ(res.termination, Termination::certificate);
    EXPECT_LE(res.value - fstar, 1e-3);
    for (const TraceRow& row : res.trace) EXPECT_EQ(row.bound.has_value(), row.iter % 2 == 0);
    EXPECT_EQ(static_cast<std::size_t>(calls), (res.trace.size() + 1) / 2);
}

void expect_strong_wolfe(const PackedObjective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& dir,
                         double alpha0) {
    Eigen::VectorXd g0;
    const double f0 = f(x, g0);
    const double c1 = 1e-4, c2 = 0.9;
    const LineSearchResult ls = strong_wolfe_search(f, x, f0, g0, dir, alpha0, c1, c2, 40);
    ASSERT_TRUE(ls.ok);
    Eigen::VectorXd g;
    const double v = f(x + ls.alpha * dir, g);
    EXPECT_DOUBLE_EQ(v, ls.value);
    EXPECT_LE(v, f0 + c1 * ls.alpha * g0.dot(dir));
    EXPECT_LE(std::abs(g.dot(dir)), c2 * std::abs(g0.dot(dir)));
}

TEST(StrongWolfe, ConditionsHold) {
    const Quadratic q = Quadratic::random(10, 50.0, 3);
    Eigen::VectorXd g;
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(10);
    q.objective()(x, g);
    for (const double a0 : {1e-4, 1e-2, 1.0, 100.0}) expect_strong_wolfe(q.objective(), x, -g, a0);
    const Eigen::Vector2d r(-1.2, 1.0);
    rosenbrock()(r, g);
    for (const double a0 : {1e-3, 1.0}) expect_strong_wolfe(rosenbrock(), r, -g, a0);
}

TEST(StrongWolfe, InfiniteRegionIsTreatedAsTooFar) {
    // (x - 2)^2 with a wall at x >= 1: minimizer along the ray is near the wall.
    const PackedObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g.resize(1);
        if (x[0] >= 1.0) return std::numeric_limits<double>::infinity();
        g[0] = 2 * (x[0] - 2) - 1e-3 / (1.0 - x[0]);
        return (x[0] - 2) * (x[0] - 2) + 1e-3 * std::log(1.0 / (1.0 - x[0]));
    };
    Eigen::VectorXd x(1);
    x[0] = 0.0;
    expect_strong_wolfe(f, x, Eigen::VectorXd::Ones(1), 8.0);
}

TEST(StrongWolfe, AscentDirectionFails) {
    const Quadratic q = Quadratic::random(5, 10.0, 4);
    Eigen::VectorXd g;
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(5);
    const double f0 = q.objective()(x, g);
    const LineSearchResult ls = strong_wolfe_search(q.objective(), x, f0, g, g, 1.0, 1e-4, 0.9, 40);
    EXPECT_FALSE(ls.ok);
    EXPECT_EQ(ls.evaluations, 0);
}

TEST(Accgd, ZeroMomentumIsGradientDescent) {
    const Quadratic q = Quadratic::random(8, 20.0, 5);
    SolverConfig config;
    config.method = SolverMethod::accgd;
    config.momentum_override = 0.0;
    config.step_size = 0.05;
    config.max_iters = 30;
    config.grad_tol = 1e-300;
    config.f_rel_tol = 1e-300;
    const SolveResult res = accgd_solve(q.objective(), Eigen::VectorXd::Zero(8), config);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(8);
    for (int t = 0; t < 30; ++t) {
        x -= 0.05 * (q.a * x - q.b);
        EXPECT_NEAR(res.trace[t + 1].objective, 0.5 * x.dot(q.a * x) - q.b.dot(x), 1e-12);
    }
    EXPECT_LE((res.x - x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Accgd, MomentumBeatsGradientDescent) {
    const Quadratic q = Quadratic::random(30, 1e3, 6);
    const Eigen::VectorXd xs = q.a.ldlt().solve(q.b);
    const double fstar = -0.5 * q.b.dot(xs);
    SolverConfig config;
    config.method = SolverMethod::accgd;
    config.step_size = 1.0 / 1e3;
    config.max_iters = 300;
    config.f_rel_tol = 1e-300;
    const double acc = accgd_solve(q.objective(), Eigen::VectorXd::Zero(30), config).value - fstar;
    config.momentum_override = 0.0;
    const double gd = accgd_solve(q.objective(), Eigen::VectorXd::Zero(30), config).value - fstar;
    EXPECT_LT(acc, 0.1 * gd);
}

TEST(Accgd, HalvesStepAtInfiniteTrialPoints) {
    // Barrier at x >= 1 with a huge step: every first trial lands outside.
    const PackedObjective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g.resize(1);
        if (x[0] >= 1.0) return std::numeric_limits<double>::infinity();
        g[0] = 2 * (x[0] - 2) - 1e-3 / (1.0 - x[0]);
        return (x[0] - 2) * (x[0] - 2) + 1e-3 * std::log(1.0 / (1.0 - x[0]));
    };
    SolverConfig config;
    config.method = SolverMethod::accgd;
    config.step_size = 10.0;
    config.max_iters = 200;
    const SolveResult res = accgd_solve(f, Eigen::VectorXd::Zero(1), config);
    EXPECT_LT(res.x[0], 1.0);
    EXPECT_TRUE(std::isfinite(res.value));
    EXPECT_GT(res.x[0], 0.99);
    EXPECT_LT(res.value, 1.02);
}

FrequencyTable w_state_data(int n) {
    return simulate_frequencies(AnyState{DensityMatrix::from_pure(w_state_vector(n))}, full_pauli_ensemble(n),
                                ShotPlan{});
}

double solved_fidelity(const SolveResult& res, Eigen::Index d, Eigen::Index r, const DensityMatrix& target) {
    FactorMatrix u = unpack(res.x, d, r);
    u /= u.norm();
    return fidelity(DensityMatrix(CMatrix(u * u.adjoint())), target);
}

TEST(Factored, WStateRecoveredFromExactData) {
    const FrequencyTable f = w_state_data(2);
    const DensityMatrix target = DensityMatrix::from_pure(w_state_vector(2));
    const double floor = nll(target, f);
    for (const Engine engine : {Engine::qmt, Engine::lowmem}) {
        const PenalizedObjectiveContext ctx(f, engine);
        SolverConfig config;
        config.grad_tol = 1e-9;
        const SolveResult res = lbfgs_solve(packed_objective(ctx, 2), pack(init_factor(2, 2, 7)), config);
        EXPECT_NEAR(res.value, floor + ctx.lambda(), 1e-7);
        EXPECT_GE(solved_fidelity(res, 4, 2, target), 1.0 - 1e-6);
    }
}

TEST(Factored, SolversAgree) {
    std::mt19937_64 rng(8);
    const Eigen::MatrixXcd rho0 = oracle::random_density(8, rng, 2);
    const FrequencyTable f = simulate_frequencies(AnyState{DensityMatrix(rho0)}, full_pauli_ensemble(3),
                                                  ShotPlan{1000, 3});
    const PenalizedObjectiveContext ctx(f, Engine::qmt);
    const PackedObjective obj = packed_objective(ctx, 3);
    const Eigen::VectorXd x0 = pack(init_factor(3, 3, 9));
    SolverConfig config;
    config.grad_tol = 1e-8;
    const SolveResult a = lbfgs_solve(obj, x0, config);
    config.method = SolverMethod::accgd;
    config.step_size = 1e-3;
    config.max_iters = 20000;
    config.f_rel_tol = 1e-14;
    const SolveResult b = accgd_solve(obj, x0, config);
    EXPECT_NEAR(a.value, b.value, 1e-6 * std::abs(a.value));
    FactorMatrix ua = unpack(a.x, 8, 3), ub = unpack(b.x, 8, 3);
    EXPECT_LE((ua * ua.adjoint() - ub * ub.adjoint()).norm(), 1e-2);
}

TEST(InitFactor, NormalizedAndSeeded) {
    const FactorMatrix u = init_factor(3, 4, 11);
    EXPECT_EQ(u.rows(), 8);
    EXPECT_EQ(u.cols(), 4);
    EXPECT_NEAR(u.norm(), 1.0, 1e-14);
    EXPECT_TRUE(u == init_factor(3, 4, 11));
    EXPECT_FALSE(u == init_factor(3, 4, 12));
    EXPECT_THROW(init_factor(0, 1, 0), DomainError);
    EXPECT_THROW(init_factor(2, 0, 0), DomainError);
}

TEST(SolverConfigType, Validation) {
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    c.history = 0;
    EXPECT_THROW(c.validate(), DomainError);
    c = SolverConfig{};
    c.wolfe_c1 = 0.95;
    EXPECT_THROW(c.validate(), DomainError);
    c = SolverConfig{};
    c.step_size = 0.0;
    EXPECT_THROW(c.validate(), DomainError);
    EXPECT_EQ(parse_solver_method("accgd"), SolverMethod::accgd);
    EXPECT_THROW(parse_solver_method("newton"), DomainError);
}

TEST(TraceCsv, Format) {
    SolveResult res{Eigen::VectorXd::Zero(1), 0.5, 0.1, {}, Termination::grad_tol, 1, 2};
    res.trace.push_back({0, 0.25, 1.5, 2.0, 0.75});
    res.trace.push_back({1, 0.5, 0.5, 0.1, std::nullopt});
    std::ostringstream timed, plain;
    write_trace_csv(timed, res, true);
    write_trace_csv(plain, res, false);
    EXPECT_EQ(timed.str(), "iter,seconds,objective,grad_norm,bound\n"
                           "0,0.25,1.5,2,0.75\n"
                           "1,0.5,0.5,0.10000000000000001,\n");
    EXPECT_EQ(plain.str(), "iter,seconds,objective,grad_norm,bound\n"
                           "0,,1.5,2,0.75\n"
                           "1,,0.5,0.10000000000000001,\n");
}

} // namespace
} // namespace qst
