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

// Command-line driver: gen-state, measure, solve, certify, bench, validate.

#include "qst/certify.hpp"
#include "qst/error.hpp"
#include "qst/io.hpp"
#include "qst/kernels.hpp"
#include "qst/objective.hpp"
#include "qst/povm.hpp"
#include "qst/reference_kernels.hpp"
#include "qst/simulate.hpp"
#include "qst/solvers.hpp"
#include "qst/states.hpp"
#include "qst/timing.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>

namespace {

using namespace qst;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitNotConverged = 4;

struct Options {
    // shared
    int n = 2;
    std::uint64_t seed = 0;
    int threads = 0;
    int dense_cap = kDefaultDenseQubitCap;
    bool reproducible = false;
    std::string out;

    // gen-state / measure
    std::string kind = "w";
    std::string state_path;
    double depolarize = 0.0;
    std::string povm = "pauli";
    std::string num_paulis = "full";
    std::string shots = "inf";

    // solve / certify
    std::string data_path;
    std::string factor_path;
    std::string reference_path;
    int rank = 1;
    std::string engine = "auto";
    std::string solver = "lbfgs";
    int max_iters = 5000;
    int history = 10;
    double step_size = 1e-2;
    double grad_tol = 1e-7;
    double f_rel_tol = 1e-12;
    int certificate_every = 20;
    double cert_tol = 0.0;
    std::string eig_method = "auto";

    // bench
    std::string kernel = "both";
    int n_min = 10;
    int n_max = 16;
    int qmt_n_min = 6;
    int qmt_n_max = 12;
    std::vector<std::uint64_t> m_values{256, 512, 1024};
    int repeats = 5;
    bool reference_kernels = false;

    // validate
    std::vector<std::string> files;
};

void log(const std::string& msg) { std::cerr << "qstmle: " << msg << '\n'; }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void apply_threads(const Options& o) {
    if (o.threads > 0) omp_set_num_threads(o.threads);
}

std::optional<std::uint64_t> parse_shots(const std::string& text) {
    if (text == "inf") return std::nullopt;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos == text.size() && v >= 1) return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
    }
    throw ValidationError("--shots must be a positive integer or 'inf'");
}

AnyState load_or_make_state(const Options& o) {
    AnyState state = o.state_path.empty()
                         ? make_state(parse_state_kind(o.kind), o.n, o.seed, o.dense_cap)
                         : io::state_from_json(io::read_json(o.state_path));
    if (o.depolarize > 0.0) {
        state = std::visit([&](const auto& s) -> AnyState { return depolarize(s, o.depolarize); }, state);
    }
    return state;
}

int state_qubits(const AnyState& s) {
    return std::visit([](const auto& v) { return v.num_qubits(); }, s);
}

// "full", an integer budget, or dfe(delta,eps) / dfe:delta,eps.
PovmEnsemble select_ensemble(const Options& o, const AnyState& state) {
    const int n = state_qubits(state);
    if (o.povm == "tetrahedral") return tetrahedral_ensemble(n, o.dense_cap);
    if (o.povm != "pauli") throw ValidationError("--povm must be 'pauli' or 'tetrahedral'");
    if (o.num_paulis == "full") return full_pauli_ensemble(n);

    std::uint64_t budget = 0;
    static const std::regex dfe(R"(dfe(?:[(:]\s*([0-9.eE+-]+)\s*,\s*([0-9.eE+-]+)\s*\)?)?)");
    std::smatch m;
    if (std::regex_match(o.num_paulis, m, dfe)) {
        const double delta = m[1].matched ? std::stod(m[1].str()) : 0.1;
        const double eps = m[2].matched ? std::stod(m[2].str()) : 0.03;
        budget = dfe_budget(delta, eps);
    } else {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(o.num_paulis, &pos);
            if (pos != o.num_paulis.size() || v < 1) throw std::invalid_argument("budget");
            budget = static_cast<std::uint64_t>(v);
        } catch (const std::exception&) {
            throw ValidationError("--num-paulis must be 'full', a positive integer, or dfe(delta,eps)");
        }
    }

    PauliSample sample;
    if (const auto* prod = std::get_if<ProductState>(&state)) {
        sample = sample_pauli_strings(*prod, budget, o.seed);
    } else {
        const auto& rho = std::get<DensityMatrix>(state);
        const std::vector<double> x = kernels::qmt(rho.matrix(), o.dense_cap);
        sample = sample_pauli_strings(x, n, budget, o.seed);
    }
    if (sample.truncated) {
        log("selection support holds only " + std::to_string(sample.strings.size()) +
            " strings (budget " + std::to_string(budget) + ")");
    }
    return PovmEnsemble::pauli(n, std::move(sample.strings));
}

Engine select_engine(const Options& o, int n) {
    if (o.engine == "auto") return n <= o.dense_cap ? Engine::qmt : Engine::lowmem;
    return parse_engine(o.engine);
}

EigenMethod select_eig(const Options& o, const PenalizedObjectiveContext& ctx) {
    if (o.eig_method == "auto") {
        return ctx.engine() == Engine::qmt ? EigenMethod::dense_eig : EigenMethod::lanczos;
    }
    return parse_eigen_method(o.eig_method);
}

int cmd_gen_state(const Options& o) {
    const AnyState state = load_or_make_state(o);
    const io::Json doc = io::state_to_json(state, o.kind);
    if (o.out.empty()) {
        std::cout << doc.dump() << '\n';
    } else {
        io::write_json(o.out, doc);
    }
    return kExitOk;
}

int cmd_measure(const Options& o) {
    const AnyState state = load_or_make_state(o);
    const PovmEnsemble ensemble = select_ensemble(o, state);
    const ShotPlan plan{parse_shots(o.shots), o.seed};
    const FrequencyTable table = simulate_frequencies(state, ensemble, plan, o.dense_cap);
    log("m_tot = " + std::to_string(ensemble.total_outcomes()) +
        ", M = " + std::to_string(ensemble.num_povms()) +
        ", lambda = " + fmt(lambda_from_frequencies(table)));
    const io::Json doc = io::frequencies_to_json(table);
    if (o.out.empty()) {
        std::cout << doc.dump() << '\n';
    } else {
        io::write_json(o.out, doc);
    }
    return kExitOk;
}

int cmd_solve(const Options& o) {
    const auto start = std::chrono::steady_clock::now();
    FrequencyTable table = io::frequencies_from_json(io::read_json(o.data_path), o.dense_cap);
    const int n = table.num_qubits();
    const PenalizedObjectiveContext ctx(std::move(table), select_engine(o, n), o.dense_cap);
    const EigenMethod eig = select_eig(o, ctx);
    const Eigen::Index d = Eigen::Index{1} << n;

    SolverConfig config;
    config.method = parse_solver_method(o.solver);
    config.max_iters = o.max_iters;
    config.history = o.history;
    config.step_size = o.step_size;
    config.grad_tol = o.grad_tol;
    config.f_rel_tol = o.f_rel_tol;
    config.certificate_every = o.certificate_every;
    config.cert_tol = o.cert_tol;
    config.seed = o.seed;
    config.validate();

    const CertificateCallback cert_cb = [&](const Eigen::VectorXd& x) {
        return gap_bound(unpack(x, d, o.rank), ctx, eig).bound;
    };
    const FactorMatrix u0 = init_factor(n, o.rank, o.seed);
    log("solving n = " + std::to_string(n) + ", r = " + std::to_string(o.rank) + " with " +
        std::string(to_string(config.method)) + " on the " + std::string(to_string(ctx.engine())) +
        " engine");
    const SolveResult result = solve(packed_objective(ctx, o.rank), pack(u0), config, cert_cb);
    const FactorMatrix u = unpack(result.x, d, o.rank);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    io::Json report;
    report["n"] = n;
    report["rank"] = o.rank;
    report["engine"] = std::string(to_string(ctx.engine()));
    report["solver"] = std::string(to_string(config.method));
    report["termination"] = std::string(to_string(result.termination));
    report["iterations"] = result.iterations;
    report["evaluations"] = result.evaluations;
    report["objective"] = result.value;
    report["nll"] = factor_nll(u / u.norm(), ctx);
    report["lambda"] = ctx.lambda();
    report["factor_norm"] = u.norm();
    report["grad_norm"] = result.grad_norm;
    try {
        report["certificate"] = io::certificate_to_json(gap_bound(u, ctx, eig));
    } catch (const SingularProbabilityError& e) {
        log(std::string("certificate unavailable: ") + e.what());
    }
    if (!o.reference_path.empty()) {
        const AnyState ref = io::state_from_json(io::read_json(o.reference_path));
        if (state_qubits(ref) <= o.dense_cap) {
            const DensityMatrix ref_rho = std::holds_alternative<DensityMatrix>(ref)
                                              ? std::get<DensityMatrix>(ref)
                                              : std::get<ProductState>(ref).to_dense(o.dense_cap);
            const CMatrix rho = (u * u.adjoint()) / u.squaredNorm();
            report["fidelity"] = fidelity(ref_rho, DensityMatrix(0.5 * (rho + rho.adjoint())));
        } else {
            log("reference state exceeds the dense capacity; fidelity skipped");
        }
    }
    report["seconds"] = o.reproducible ? 0.0 : seconds;

    const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
    fs::create_directories(dir);
    {
        std::ofstream csv(dir / "trace.csv");
        write_trace_csv(csv, result, !o.reproducible);
    }
    io::write_json(dir / "report.json", report);
    io::write_json(dir / "factor.json", io::factor_to_json(u));
    log("termination " + std::string(to_string(result.termination)) + " after " +
        std::to_string(result.iterations) + " iterations, objective " + fmt(result.value));

    if (result.termination == Termination::line_search_failure ||
        result.termination == Termination::max_iters) {
        return kExitNotConverged;
    }
    return kExitOk;
}

int cmd_certify(const Options& o) {
    FrequencyTable table = io::frequencies_from_json(io::read_json(o.data_path), o.dense_cap);
    const int n = table.num_qubits();
    const PenalizedObjectiveContext ctx(std::move(table), select_engine(o, n), o.dense_cap);
    const FactorMatrix u = io::factor_from_json(io::read_json(o.factor_path));
    const Certificate cert = gap_bound(u, ctx, select_eig(o, ctx));
    const io::Json doc = io::certificate_to_json(cert);
    if (o.out.empty()) {
        std::cout << doc.dump() << '\n';
    } else {
        io::write_json(o.out, doc);
    }
    if (!cert.converged) log("warning: Lanczos did not converge; mu inflated by the residual");
    return kExitOk;
}

int cmd_bench(const Options& o) {
    std::ostringstream csv;
    csv << "kernel,n,m,r,seconds\n";
    auto emit = [&](const char* kernel, int n, std::uint64_t m, int r, double s) {
        csv << kernel << ',' << n << ',' << m << ',' << r << ',' << fmt(s) << '\n';
        log(std::string(kernel) + " n=" + std::to_string(n) + " m=" + std::to_string(m) + " r=" +
            std::to_string(r) + ": " + fmt(s) + " s");
    };
    if (o.kernel == "lowmem" || o.kernel == "both") {
        for (int n = o.n_min; n <= o.n_max; ++n) {
            const FactorMatrix u = init_factor(n, o.rank, o.seed);
            for (const std::uint64_t m : o.m_values) {
                std::mt19937_64 rng(o.seed + static_cast<std::uint64_t>(n));
                std::uniform_int_distribution<std::uint64_t> pick(1, (std::uint64_t{1} << (2 * n)) - 1);
                std::vector<PauliString> strings;
                for (std::uint64_t j = 0; j < m; ++j) strings.push_back(PauliString::from_index(n, pick(rng)));
                const double s = seconds_per_call(
                    [&] {
                        volatile double sink = o.reference_kernels
                                                   ? kernels::reference::probs_lowmem(u, strings)[0]
                                                   : kernels::probs_lowmem(u, strings)[0];
                        (void)sink;
                    },
                    o.repeats);
                emit(o.reference_kernels ? "lowmem_reference" : "lowmem", n, m, o.rank, s);
            }
        }
    }
    if (o.kernel == "qmt" || o.kernel == "both") {
        for (int n = o.qmt_n_min; n <= o.qmt_n_max; ++n) {
            const FactorMatrix u = init_factor(n, 1, o.seed);
            const CMatrix rho = u * u.adjoint();
            const double s = seconds_per_call(
                [&] {
                    volatile double sink = o.reference_kernels ? kernels::reference::qmt(rho)[0]
                                                               : kernels::qmt(rho, o.dense_cap)[0];
                    (void)sink;
                },
                o.repeats);
            emit(o.reference_kernels ? "qmt_reference" : "qmt", n, std::uint64_t{1} << (2 * n), 1, s);
        }
    }
    if (o.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream(o.out) << csv.str();
    }
    return kExitOk;
}

int cmd_validate(const Options& o) {
    int status = kExitOk;
    for (const std::string& f : o.files) {
        try {
            std::cout << f << ": " << io::validate_document(io::read_json(f), o.dense_cap) << " ok\n";
        } catch (const Error& e) {
            std::cout << f << ": invalid: " << e.what() << '\n';
            status = kExitValidation;
        }
    }
    return status;
}

void add_common(CLI::App* app, Options& o) {
    app->add_option("--seed", o.seed, "RNG seed");
    app->add_option("--threads", o.threads, "Worker threads (0 = OpenMP default)");
    app->add_option("--dense-cap", o.dense_cap, "Largest n for dense representations");
    app->add_flag("--reproducible", o.reproducible,
                  "Fixed reduction order and time-free outputs for byte-identical reruns");
}

void add_state_source(CLI::App* app, Options& o) {
    app->add_option("--state", o.state_path, "State JSON file");
    app->add_option("--kind", o.kind, "w | ghz | random_product | random_pure");
    app->add_option("--n", o.n, "Qubit count")->check(CLI::Range(1, kMaxPauliQubits));
    app->add_option("--depolarize", o.depolarize, "Depolarizing level p in [0, 1]")
        ->check(CLI::Range(0.0, 1.0));
}

} // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Rank-controlled maximum-likelihood quantum state tomography"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-state", "Write a target state as JSON");
    add_state_source(gen, o);
    add_common(gen, o);
    gen->add_option("--out", o.out, "Output file (stdout if omitted)");

    auto* measure = app.add_subcommand("measure", "Simulate a frequency table");
    add_state_source(measure, o);
    add_common(measure, o);
    measure->add_option("--povm", o.povm, "pauli | tetrahedral");
    measure->add_option("--num-paulis", o.num_paulis, "full | <count> | dfe(delta,eps)");
    measure->add_option("--shots", o.shots, "Shots per POVM or 'inf'");
    measure->add_option("--out", o.out, "Output file (stdout if omitted)");

    auto* solve_cmd = app.add_subcommand("solve", "Fit a rank-r factor to a frequency table");
    add_common(solve_cmd, o);
    solve_cmd->add_option("--data", o.data_path, "Frequency table JSON")->required();
    solve_cmd->add_option("--rank", o.rank, "Factor rank r")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--engine", o.engine, "qmt | lowmem | auto");
    solve_cmd->add_option("--solver", o.solver, "lbfgs | accgd");
    solve_cmd->add_option("--max-iters", o.max_iters, "Iteration limit");
    solve_cmd->add_option("--history", o.history, "L-BFGS memory");
    solve_cmd->add_option("--step-size", o.step_size, "accgd step size");
    solve_cmd->add_option("--grad-tol", o.grad_tol, "Gradient norm tolerance");
    solve_cmd->add_option("--f-rel-tol", o.f_rel_tol, "Relative decrease tolerance (5-iteration window)");
    solve_cmd->add_option("--certificate-every", o.certificate_every, "Certificate cadence (0 = never)");
    solve_cmd->add_option("--cert-tol", o.cert_tol, "Stop once the certificate bound drops below this");
    solve_cmd->add_option("--eig-method", o.eig_method, "auto | dense | lanczos");
    solve_cmd->add_option("--reference", o.reference_path, "Reference state JSON for fidelity");
    solve_cmd->add_option("--out", o.out, "Output directory");

    auto* certify = app.add_subcommand("certify", "Optimality bound for a factor");
    add_common(certify, o);
    certify->add_option("--data", o.data_path, "Frequency table JSON")->required();
    certify->add_option("--factor", o.factor_path, "Factor JSON")->required();
    certify->add_option("--engine", o.engine, "qmt | lowmem | auto");
    certify->add_option("--eig-method", o.eig_method, "auto | dense | lanczos");
    certify->add_option("--out", o.out, "Output file (stdout if omitted)");

    auto* bench = app.add_subcommand("bench", "Kernel timing sweeps as CSV");
    add_common(bench, o);
    bench->add_option("--kernel", o.kernel, "lowmem | qmt | both");
    bench->add_option("--n-min", o.n_min, "Smallest n for the lowmem sweep");
    bench->add_option("--n-max", o.n_max, "Largest n for the lowmem sweep");
    bench->add_option("--qmt-n-min", o.qmt_n_min, "Smallest n for the qmt sweep");
    bench->add_option("--qmt-n-max", o.qmt_n_max, "Largest n for the qmt sweep");
    bench->add_option("--m", o.m_values, "String counts for the lowmem sweep");
    bench->add_option("--rank", o.rank, "Factor rank for the lowmem sweep");
    bench->add_option("--repeats", o.repeats, "Timing batches per point");
    bench->add_flag("--reference", o.reference_kernels, "Time the serial reference kernels");
    bench->add_option("--out", o.out, "Output CSV (stdout if omitted)");

    auto* validate = app.add_subcommand("validate", "Check artifact files against their schemas");
    validate->add_option("files", o.files, "JSON files")->required();
    validate->add_option("--dense-cap", o.dense_cap, "Largest n for dense representations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        apply_threads(o);
        if (*gen) return cmd_gen_state(o);
        if (*measure) return cmd_measure(o);
        if (*solve_cmd) return cmd_solve(o);
        if (*certify) return cmd_certify(o);
        if (*bench) return cmd_bench(o);
        if (*validate) return cmd_validate(o);
    } catch (const CapacityError& e) {
        log(e.what());
        return kExitCapacity;
    } catch (const ValidationError& e) {
        log(e.what());
        return kExitValidation;
    } catch (const DomainError& e) {
        log(e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        log(e.what());
        return kExitError;
    }
    return kExitError;
}
