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

#include "qst/simulate.hpp"

#include "qst/error.hpp"
#include "qst/kernels.hpp"

#include <algorithm>
#include <random>

namespace qst {

namespace {

double clamp_probability(double p) {
    if (p < -kNegativeProbabilityTol || !std::isfinite(p)) {
        throw NumericError("computed outcome probability " + std::to_string(p) + " is negative");
    }
    return std::max(p, 0.0);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t povm) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(povm), static_cast<std::uint32_t>(povm >> 32)};
    return std::mt19937_64(seq);
}

int state_qubits(const AnyState& state) {
    return std::visit([](const auto& s) { return s.num_qubits(); }, state);
}

std::vector<double> tetrahedral_probabilities(const AnyState& state, int cap) {
    if (const auto* rho = std::get_if<DensityMatrix>(&state)) {
        return kernels::qmt_tetrahedral(rho->matrix(), cap);
    }
    const auto& prod = std::get<ProductState>(state);
    const int n = prod.num_qubits();
    require_dense_capacity(n, cap, "tetrahedral outcome enumeration");
    std::vector<std::array<double, 4>> local(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < 4; ++k) local[j][k] = (tetrahedral_element(k) * prod.factor(j)).trace().real();
    }
    const double keep = 1.0 - prod.depolarizing();
    const std::size_t m = std::size_t{1} << (2 * n);
    const double uniform = 1.0 / static_cast<double>(m);
    std::vector<double> p(m);
    for (std::size_t idx = 0; idx < m; ++idx) {
        double v = 1.0;
        for (int j = 0; j < n; ++j) v *= local[j][(idx >> (2 * (n - 1 - j))) & 3u];
        p[idx] = keep * v + (1.0 - keep) * uniform;
    }
    return p;
}

} // namespace

std::vector<double> pauli_expectations(const DensityMatrix& rho, std::span<const PauliString> strings) {
    return kernels::pauli_expectations_dense(rho.matrix(), strings);
}

std::vector<double> pauli_expectations(const ProductState& rho, std::span<const PauliString> strings) {
    const int n = rho.num_qubits();
    std::vector<Eigen::Vector3d> bloch;
    for (int j = 0; j < n; ++j) bloch.push_back(rho.bloch(j));
    const double keep = 1.0 - rho.depolarizing();
    std::vector<double> out;
    out.reserve(strings.size());
    for (const PauliString& s : strings) {
        if (s.num_qubits() != n) throw DomainError("Pauli string length does not match the state");
        if (s.is_identity()) {
            out.push_back(1.0);
            continue;
        }
        double v = keep;
        for (int j = 0; j < n && v != 0.0; ++j) {
            const std::uint8_t q = s.digit(j);
            if (q != 0) v *= bloch[j][q - 1];
        }
        out.push_back(v);
    }
    return out;
}

std::vector<double> exact_probabilities(const AnyState& state, const PovmEnsemble& ensemble, int cap) {
    if (state_qubits(state) != ensemble.num_qubits()) {
        throw DomainError("state and ensemble qubit counts differ");
    }
    std::vector<double> p;
    if (ensemble.family() == PovmFamily::pauli) {
        const auto& strings = ensemble.strings();
        const std::vector<double> e = std::visit(
            [&](const auto& s) { return pauli_expectations(s, strings); }, state);
        p.resize(2 * strings.size());
        for (std::size_t j = 0; j < strings.size(); ++j) {
            const double plus = clamp_probability(0.5 * (1.0 + e[j]));
            const double minus = clamp_probability(0.5 * (1.0 - e[j]));
            p[2 * j] = plus / (plus + minus);
            p[2 * j + 1] = minus / (plus + minus);
        }
        return p;
    }
    p = tetrahedral_probabilities(state, cap);
    double sum = 0.0;
    for (double& v : p) {
        v = clamp_probability(v);
        sum += v;
    }
    for (double& v : p) v /= sum;
    return p;
}

FrequencyTable simulate_frequencies(const AnyState& state, const PovmEnsemble& ensemble,
                                    const ShotPlan& plan, int cap) {
    if (plan.shots && *plan.shots == 0) throw DomainError("shot count must be at least 1");
    std::vector<double> p = exact_probabilities(state, ensemble, cap);
    if (!plan.shots) return FrequencyTable(ensemble, std::move(p), std::nullopt);

    const std::uint64_t shots = *plan.shots;
    const double inv = 1.0 / static_cast<double>(shots);
    const std::uint64_t m_each = ensemble.outcomes_per_povm();
    const auto povms = static_cast<std::int64_t>(ensemble.num_povms());
    std::vector<double> f(p.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t l = 0; l < povms; ++l) {
        std::mt19937_64 rng = substream(plan.seed, static_cast<std::uint64_t>(l));
        const std::size_t base = static_cast<std::size_t>(l) * m_each;
        std::uint64_t remaining = shots;
        double mass = 1.0;
        for (std::uint64_t k = 0; k + 1 < m_each && remaining > 0; ++k) {
            const double q = mass > 0.0 ? std::clamp(p[base + k] / mass, 0.0, 1.0) : 0.0;
            std::binomial_distribution<std::uint64_t> draw(remaining, q);
            const std::uint64_t c = draw(rng);
            f[base + k] = static_cast<double>(c) * inv;
            remaining -= c;
            mass -= p[base + k];
        }
        f[base + m_each - 1] = static_cast<double>(remaining) * inv;
    }
    return FrequencyTable(ensemble, std::move(f), shots);
}

} // namespace qst
