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

// Reference (serial) kernels against the OpenMP kernels.
//
//   ./bench_kernels --benchmark_filter=Qmt

#include "qst/kernels.hpp"
#include "qst/reference_kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using qst::CMatrix;
using qst::PauliString;

CMatrix random_state(int n) {
    const Eigen::Index d = Eigen::Index{1} << n;
    std::srand(1);
    const CMatrix u = CMatrix::Random(d, d);
    CMatrix rho = u * u.adjoint();
    rho /= rho.trace().real();
    return rho;
}

CMatrix random_factor(int n, int r) {
    std::srand(2);
    CMatrix u = CMatrix::Random(Eigen::Index{1} << n, r);
    return u / u.norm();
}

std::vector<PauliString> random_strings(int n, int m) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::uint64_t> pick(1, (std::uint64_t{1} << (2 * n)) - 1);
    std::vector<PauliString> out;
    out.reserve(m);
    for (int j = 0; j < m; ++j) out.push_back(PauliString::from_index(n, pick(rng)));
    return out;
}

void BM_QmtReference(benchmark::State& state) {
    const CMatrix rho = random_state(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(qst::kernels::reference::qmt(rho));
}
BENCHMARK(BM_QmtReference)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_Qmt(benchmark::State& state) {
    const CMatrix rho = random_state(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(qst::kernels::qmt(rho));
}
BENCHMARK(BM_Qmt)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_PauliSynthesis(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const std::vector<double> c = qst::kernels::qmt(random_state(n));
    for (auto _ : state) benchmark::DoNotOptimize(qst::kernels::pauli_synthesis(c, n));
}
BENCHMARK(BM_PauliSynthesis)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_ApplyPauliReference(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CMatrix u = random_factor(n, 4);
    const PauliString s = random_strings(n, 1)[0];
    for (auto _ : state) benchmark::DoNotOptimize(qst::kernels::reference::apply_pauli(u, s));
}
BENCHMARK(BM_ApplyPauliReference)->DenseRange(8, 16, 4);

void BM_ApplyPauli(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CMatrix u = random_factor(n, 4);
    const PauliString s = random_strings(n, 1)[0];
    for (auto _ : state) benchmark::DoNotOptimize(qst::kernels::apply_pauli(u, s));
}
BENCHMARK(BM_ApplyPauli)->DenseRange(8, 16, 4);

void BM_ProbsLowmemReference(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CMatrix u = random_factor(n, 1);
    const std::vector<PauliString> s = random_strings(n, static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(qst::kernels::reference::probs_lowmem(u, s));
    state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_ProbsLowmemReference)->ArgsProduct({{10, 14}, {256}})->Unit(benchmark::kMillisecond);

void BM_ProbsLowmem(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const CMatrix u = random_factor(n, 1);
    const std::vector<PauliString> s = random_strings(n, static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(qst::kernels::probs_lowmem(u, s));
    state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_ProbsLowmem)->ArgsProduct({{10, 14}, {256}})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
