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

#include "qst/povm.hpp"

#include "qst/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_set>

namespace qst {

namespace {

// Selection weights at or below this are treated as outside the support.
constexpr double kZeroWeight = 1e-14;
// Redraw attempts allowed per requested string before falling back.
constexpr std::uint64_t kRedrawFactor = 50;
// Largest support that the fallback will enumerate explicitly.
constexpr std::uint64_t kEnumerationLimit = std::uint64_t{1} << 22;
constexpr int kEnumerationMaxQubits = 20;

void check_qubits(int n) {
    if (n < 1 || n > kMaxPauliQubits) {
        throw DomainError("Pauli strings need 1 <= n <= " + std::to_string(kMaxPauliQubits));
    }
}

std::uint64_t pow4(int n) { return std::uint64_t{1} << (2 * n); }

void kron_step(const CMatrix& a, const Qubit2& b, CMatrix& out) {
    out.resize(a.rows() * 2, a.cols() * 2);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            out.block<2, 2>(2 * i, 2 * k) = a(i, k) * b;
        }
    }
}

CMatrix kron_all(const std::vector<Qubit2>& factors) {
    CMatrix acc = factors.front();
    CMatrix next;
    for (std::size_t j = 1; j < factors.size(); ++j) {
        kron_step(acc, factors[j], next);
        acc.swap(next);
    }
    return acc;
}

// Efraimidis-Spirakis: keep the `count` items with the largest log(u)/w keys,
// which is an exact weighted draw without replacement.
std::vector<std::uint64_t> weighted_without_replacement(const std::vector<std::uint64_t>& items,
                                                        const std::vector<double>& weights,
                                                        std::uint64_t count,
                                                        std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<std::pair<double, std::uint64_t>> keyed;
    keyed.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        double u = uniform(rng);
        while (u <= 0.0) u = uniform(rng);
        keyed.emplace_back(std::log(u) / weights[i], items[i]);
    }
    const auto take = static_cast<std::ptrdiff_t>(std::min<std::uint64_t>(count, keyed.size()));
    std::partial_sort(keyed.begin(), keyed.begin() + take, keyed.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(take));
    for (std::ptrdiff_t i = 0; i < take; ++i) out.push_back(keyed[static_cast<std::size_t>(i)].second);
    return out;
}

std::vector<PauliString> to_sorted_strings(int n, std::vector<std::uint64_t> indices) {
    std::sort(indices.begin(), indices.end());
    std::vector<PauliString> out;
    out.reserve(indices.size());
    for (const std::uint64_t idx : indices) out.push_back(PauliString::from_index(n, idx));
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// PauliString

PauliString::PauliString(int n, std::span<const std::uint8_t> digits)
    : n_(n), index_(0), flip_(0), phase_(0), y_count_(0) {
    check_qubits(n);
    if (digits.size() != static_cast<std::size_t>(n)) {
        throw DomainError("Pauli string length " + std::to_string(digits.size()) +
                          " does not match n = " + std::to_string(n));
    }
    for (int j = 0; j < n; ++j) {
        const std::uint8_t q = digits[static_cast<std::size_t>(j)];
        if (q > 3) throw DomainError("Pauli digit out of range");
        index_ = index_ * 4 + q;
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - j);
        if (q == 1 || q == 2) flip_ |= bit;
        if (q == 2 || q == 3) phase_ |= bit;
        if (q == 2) ++y_count_;
    }
}

PauliString PauliString::from_index(int n, std::uint64_t index) {
    check_qubits(n);
    if (index >= pow4(n)) {
        throw DomainError("Pauli index " + std::to_string(index) + " out of range for n = " +
                          std::to_string(n));
    }
    std::uint64_t flip = 0;
    std::uint64_t phase = 0;
    int ny = 0;
    std::uint64_t rest = index;
    // Last digit (j = n-1) is the least significant and acts on bit 0.
    for (int bit = 0; bit < n; ++bit) {
        const auto q = static_cast<std::uint8_t>(rest & 3u);
        rest >>= 2;
        const std::uint64_t mask = std::uint64_t{1} << bit;
        if (q == 1 || q == 2) flip |= mask;
        if (q == 2 || q == 3) phase |= mask;
        if (q == 2) ++ny;
    }
    return PauliString(n, index, flip, phase, ny);
}

PauliString PauliString::parse(std::string_view text) {
    std::vector<std::uint8_t> digits;
    digits.reserve(text.size());
    for (const char c : text) {
        switch (c) {
        case 'I': case '_': digits.push_back(0); break;
        case 'X': digits.push_back(1); break;
        case 'Y': digits.push_back(2); break;
        case 'Z': digits.push_back(3); break;
        default: throw DomainError("bad Pauli character '" + std::string(1, c) + "'");
        }
    }
    return PauliString(static_cast<int>(digits.size()), digits);
}

std::uint8_t PauliString::digit(int j) const {
    if (j < 0 || j >= n_) throw DomainError("Pauli digit position out of range");
    return static_cast<std::uint8_t>((index_ >> (2 * (n_ - 1 - j))) & 3u);
}

std::vector<std::uint8_t> PauliString::digits() const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(j)] = digit(j);
    return out;
}

std::string PauliString::str() const {
    static constexpr char kNames[] = {'I', 'X', 'Y', 'Z'};
    std::string s;
    s.reserve(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) s.push_back(kNames[digit(j)]);
    return s;
}

// ---------------------------------------------------------------------------
// Ensembles

PovmFamily parse_povm_family(std::string_view name) {
    if (name == "pauli") return PovmFamily::pauli;
    if (name == "tetrahedral") return PovmFamily::tetrahedral;
    throw DomainError("unknown POVM family '" + std::string(name) + "'");
}

std::string_view to_string(PovmFamily family) {
    return family == PovmFamily::pauli ? "pauli" : "tetrahedral";
}

PovmEnsemble PovmEnsemble::pauli(int n, std::vector<PauliString> strings) {
    check_qubits(n);
    if (strings.empty()) throw DomainError("Pauli ensemble needs at least one string");
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(strings.size());
    for (const PauliString& s : strings) {
        if (s.num_qubits() != n) throw DomainError("Pauli string qubit count mismatch");
        if (s.is_identity()) throw DomainError("the identity string is not an informative POVM");
        if (!seen.insert(s.index()).second) {
            throw DomainError("duplicate Pauli string " + s.str());
        }
    }
    return PovmEnsemble(PovmFamily::pauli, n, std::move(strings));
}

PovmEnsemble PovmEnsemble::tetrahedral(int n, int cap) {
    if (n < 1) throw DomainError("tetrahedral ensemble needs n >= 1");
    require_dense_capacity(n, cap, "tetrahedral ensemble");
    return PovmEnsemble(PovmFamily::tetrahedral, n, {});
}

std::uint64_t PovmEnsemble::outcomes_per_povm() const noexcept {
    return family_ == PovmFamily::pauli ? 2 : pow4(n_);
}

std::uint64_t PovmEnsemble::num_povms() const noexcept {
    return family_ == PovmFamily::pauli ? strings_.size() : 1;
}

PovmEnsemble full_pauli_ensemble(int n, std::uint64_t max_strings) {
    check_qubits(n);
    const std::uint64_t count = pow4(n) - 1;
    if (count > max_strings) {
        throw CapacityError("full Pauli ensemble for n = " + std::to_string(n) + " has " +
                            std::to_string(count) + " strings, above the limit of " +
                            std::to_string(max_strings));
    }
    std::vector<PauliString> strings;
    strings.reserve(count);
    for (std::uint64_t idx = 1; idx <= count; ++idx) {
        strings.push_back(PauliString::from_index(n, idx));
    }
    return PovmEnsemble::pauli(n, std::move(strings));
}

PovmEnsemble tetrahedral_ensemble(int n, int cap) { return PovmEnsemble::tetrahedral(n, cap); }

Qubit2 pauli_matrix(std::uint8_t digit) {
    using namespace std::complex_literals;
    Qubit2 m;
    switch (digit) {
    case 0: m << 1.0, 0.0, 0.0, 1.0; break;
    case 1: m << 0.0, 1.0, 1.0, 0.0; break;
    case 2: m << 0.0, -1.0i, 1.0i, 0.0; break;
    case 3: m << 1.0, 0.0, 0.0, -1.0; break;
    default: throw DomainError("Pauli digit out of range");
    }
    return m;
}

Qubit2 tetrahedral_element(int k) {
    static constexpr double kDirections[4][3] = {
        {1, 1, 1}, {-1, -1, 1}, {-1, 1, -1}, {1, -1, -1}};
    if (k < 0 || k > 3) throw DomainError("tetrahedral element index out of range");
    const double s = 1.0 / std::sqrt(3.0);
    Qubit2 a = pauli_matrix(0);
    for (int c = 0; c < 3; ++c) {
        a += (kDirections[k][c] * s) * pauli_matrix(static_cast<std::uint8_t>(c + 1));
    }
    return a / 4.0;
}

CMatrix dense_pauli(const PauliString& s, int cap) {
    require_dense_capacity(s.num_qubits(), cap, "dense_pauli");
    std::vector<Qubit2> factors;
    for (const std::uint8_t q : s.digits()) factors.push_back(pauli_matrix(q));
    return kron_all(factors);
}

std::vector<CMatrix> dense_povm_elements(const PovmEnsemble& ensemble, int cap) {
    const int n = ensemble.num_qubits();
    require_dense_capacity(n, cap, "dense_povm_elements");
    const Eigen::Index d = Eigen::Index{1} << n;
    std::vector<CMatrix> out;
    if (ensemble.family() == PovmFamily::pauli) {
        const CMatrix id = CMatrix::Identity(d, d);
        out.reserve(ensemble.strings().size() * 2);
        for (const PauliString& s : ensemble.strings()) {
            const CMatrix w = dense_pauli(s, cap);
            out.push_back(0.5 * (id + w));
            out.push_back(0.5 * (id - w));
        }
    } else {
        const std::uint64_t m = pow4(n);
        out.reserve(m);
        for (std::uint64_t k = 0; k < m; ++k) {
            std::vector<Qubit2> factors;
            for (int j = 0; j < n; ++j) {
                factors.push_back(tetrahedral_element(static_cast<int>((k >> (2 * (n - 1 - j))) & 3u)));
            }
            out.push_back(kron_all(factors));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Selection

std::uint64_t dfe_budget(double delta, double epsilon) {
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("dfe_budget: delta must lie in (0, 1)");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("dfe_budget: epsilon must be positive");
    }
    const double raw = -std::log(delta) / (epsilon * epsilon);
    auto m = static_cast<std::uint64_t>(std::ceil(raw));
    // Values like ln(e)/1 may land a rounding error above an integer.
    if (m > 1 && static_cast<double>(m - 1) >= raw * (1.0 - 1e-12)) --m;
    return std::max<std::uint64_t>(m, 1);
}

std::array<double, 4> qubit_selection_weights(const Qubit2& rho) {
    std::array<double, 4> w{};
    for (std::uint8_t q = 0; q < 4; ++q) {
        const double t = (pauli_matrix(q) * rho).trace().real();
        w[q] = t * t;
    }
    return w;
}

PauliSample sample_pauli_strings(const ProductState& target, std::uint64_t budget,
                                 std::uint64_t seed) {
    if (budget < 1) throw DomainError("sample_pauli_strings: budget must be >= 1");
    const int n = target.num_qubits();
    check_qubits(n);

    std::vector<std::array<double, 4>> weights;
    std::vector<std::vector<std::uint8_t>> support_digits;
    std::uint64_t support = 1;
    bool support_overflow = false;
    for (int j = 0; j < n; ++j) {
        weights.push_back(qubit_selection_weights(target.factor(j)));
        std::vector<std::uint8_t> nz;
        for (std::uint8_t q = 0; q < 4; ++q) {
            if (weights.back()[q] > kZeroWeight) nz.push_back(q);
        }
        support_digits.push_back(std::move(nz));
        const auto count = support_digits.back().size();
        if (support > std::numeric_limits<std::uint64_t>::max() / 4) support_overflow = true;
        support *= count;
    }
    const std::uint64_t support_size = support_overflow ? std::numeric_limits<std::uint64_t>::max()
                                                        : support - 1;

    // Enumerates the support (minus identity and `skip`) with product weights.
    auto enumerate = [&](const std::unordered_set<std::uint64_t>& skip,
                         std::vector<std::uint64_t>& items, std::vector<double>& item_weights) {
        std::vector<std::size_t> pos(static_cast<std::size_t>(n), 0);
        while (true) {
            std::uint64_t idx = 0;
            double w = 1.0;
            for (int j = 0; j < n; ++j) {
                const std::uint8_t q = support_digits[static_cast<std::size_t>(j)][pos[static_cast<std::size_t>(j)]];
                idx = idx * 4 + q;
                w *= weights[static_cast<std::size_t>(j)][q];
            }
            if (idx != 0 && !skip.contains(idx)) {
                items.push_back(idx);
                item_weights.push_back(w);
            }
            int j = n - 1;
            while (j >= 0) {
                auto& p = pos[static_cast<std::size_t>(j)];
                if (++p < support_digits[static_cast<std::size_t>(j)].size()) break;
                p = 0;
                --j;
            }
            if (j < 0) break;
        }
    };

    PauliSample result;
    if (support_size <= budget) {
        std::vector<std::uint64_t> items;
        std::vector<double> w;
        enumerate({}, items, w);
        result.strings = to_sorted_strings(n, std::move(items));
        result.truncated = support_size < budget;
        return result;
    }

    std::mt19937_64 rng(seed);
    std::vector<std::discrete_distribution<int>> per_qubit;
    per_qubit.reserve(static_cast<std::size_t>(n));
    for (const auto& w : weights) per_qubit.emplace_back(w.begin(), w.end());

    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(budget * 2);
    const std::uint64_t max_attempts = kRedrawFactor * budget;
    for (std::uint64_t attempt = 0; attempt < max_attempts && chosen.size() < budget; ++attempt) {
        std::uint64_t idx = 0;
        for (auto& dist : per_qubit) idx = idx * 4 + static_cast<std::uint64_t>(dist(rng));
        if (idx == 0) continue;
        chosen.insert(idx);
    }

    if (chosen.size() < budget) {
        if (n <= kEnumerationMaxQubits && support_size <= kEnumerationLimit) {
            std::vector<std::uint64_t> items;
            std::vector<double> w;
            enumerate(chosen, items, w);
            for (const std::uint64_t idx :
                 weighted_without_replacement(items, w, budget - chosen.size(), rng)) {
                chosen.insert(idx);
            }
        } else {
            result.truncated = true;
        }
    }
    result.strings = to_sorted_strings(n, {chosen.begin(), chosen.end()});
    return result;
}

PauliSample sample_pauli_strings(std::span<const double> expectations, int n,
                                 std::uint64_t budget, std::uint64_t seed) {
    if (budget < 1) throw DomainError("sample_pauli_strings: budget must be >= 1");
    check_qubits(n);
    if (expectations.size() != pow4(n)) {
        throw DomainError("sample_pauli_strings: expectation vector must have length 4^n");
    }
    std::vector<std::uint64_t> items;
    std::vector<double> weights;
    for (std::uint64_t idx = 1; idx < expectations.size(); ++idx) {
        const double w = expectations[idx] * expectations[idx];
        if (w > kZeroWeight) {
            items.push_back(idx);
            weights.push_back(w);
        }
    }
    PauliSample result;
    if (items.size() <= budget) {
        result.truncated = items.size() < budget;
        result.strings = to_sorted_strings(n, std::move(items));
        return result;
    }
    std::mt19937_64 rng(seed);
    result.strings = to_sorted_strings(n, weighted_without_replacement(items, weights, budget, rng));
    return result;
}

} // namespace qst
