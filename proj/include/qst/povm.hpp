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
 * Measurement ensembles: Pauli binary POVMs {(I + W)/2, (I - W)/2} and the
 * n-qubit tetrahedral POVM, plus weighted selection of Pauli observables.
 */
#pragma once

#include "qst/states.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qst {

/// Largest qubit count a PauliString can address (index < 4^n fits 64 bits).
inline constexpr int kMaxPauliQubits = 31;

/// Default cap on the length of an explicit Pauli string list.
inline constexpr std::uint64_t kDefaultMaxPauliStrings = std::uint64_t{1} << 22;

/**
 * W = s_{q0} (x) s_{q1} (x) ... (x) s_{q(n-1)} with digits 0=I, 1=X, 2=Y, 3=Z.
 *
 * `index` is the base-4 value with digit 0 most significant. Digit j acts on
 * bit n-1-j of a basis index, so the string is stored as two bit masks:
 * the flip mask (X or Y) and the phase mask (Z or Y).
 */
class PauliString {
  public:
    PauliString(int n, std::span<const std::uint8_t> digits);
    static PauliString from_index(int n, std::uint64_t index);
    /// Parses "IXYZ"-style text; the first character is qubit 0.
    static PauliString parse(std::string_view text);

    [[nodiscard]] int num_qubits() const noexcept { return n_; }
    [[nodiscard]] std::uint64_t index() const noexcept { return index_; }
    [[nodiscard]] std::uint8_t digit(int j) const;
    [[nodiscard]] std::vector<std::uint8_t> digits() const;

    [[nodiscard]] std::uint64_t flip_mask() const noexcept { return flip_; }
    [[nodiscard]] std::uint64_t phase_mask() const noexcept { return phase_; }
    [[nodiscard]] int y_count() const noexcept { return y_count_; }
    [[nodiscard]] bool is_identity() const noexcept { return index_ == 0; }

    [[nodiscard]] std::string str() const;

    friend bool operator==(const PauliString& a, const PauliString& b) noexcept {
        return a.n_ == b.n_ && a.index_ == b.index_;
    }

  private:
    PauliString(int n, std::uint64_t index, std::uint64_t flip, std::uint64_t phase, int ny)
        : n_(n), index_(index), flip_(flip), phase_(phase), y_count_(ny) {}

    int n_;
    std::uint64_t index_;
    std::uint64_t flip_;
    std::uint64_t phase_;
    int y_count_;
};

enum class PovmFamily { pauli, tetrahedral };

PovmFamily parse_povm_family(std::string_view name);
std::string_view to_string(PovmFamily family);

/// A set of M POVMs with m_each outcomes each (m_tot = m_each * M).
class PovmEnsemble {
  public:
    /// Rejects the identity string, duplicates, and qubit-count mismatches.
    static PovmEnsemble pauli(int n, std::vector<PauliString> strings);
    static PovmEnsemble tetrahedral(int n, int cap = kDefaultDenseQubitCap);

    [[nodiscard]] PovmFamily family() const noexcept { return family_; }
    [[nodiscard]] int num_qubits() const noexcept { return n_; }
    /// Empty for the tetrahedral family.
    [[nodiscard]] const std::vector<PauliString>& strings() const noexcept { return strings_; }

    [[nodiscard]] std::uint64_t outcomes_per_povm() const noexcept;
    [[nodiscard]] std::uint64_t num_povms() const noexcept;
    [[nodiscard]] std::uint64_t total_outcomes() const noexcept {
        return outcomes_per_povm() * num_povms();
    }

  private:
    PovmEnsemble(PovmFamily family, int n, std::vector<PauliString> strings)
        : family_(family), n_(n), strings_(std::move(strings)) {}

    PovmFamily family_;
    int n_;
    std::vector<PauliString> strings_;
};

/// Every non-identity Pauli string, sorted by index (4^n - 1 POVMs).
PovmEnsemble full_pauli_ensemble(int n, std::uint64_t max_strings = kDefaultMaxPauliStrings);

/// The single 4^n-outcome POVM built from n-fold products of the qubit elements.
PovmEnsemble tetrahedral_ensemble(int n, int cap = kDefaultDenseQubitCap);

/// Single-qubit Pauli matrix for digit 0..3.
Qubit2 pauli_matrix(std::uint8_t digit);

/// Single-qubit tetrahedral element A_k = (I + e_k . sigma / sqrt(3)) / 4.
Qubit2 tetrahedral_element(int k);

/// Dense matrix of W (d x d). Intended for small n.
CMatrix dense_pauli(const PauliString& s, int cap = kDefaultDenseQubitCap);

/// Every POVM element as a dense matrix, in linear outcome order
/// i = k + l * m_each. Intended for small n.
std::vector<CMatrix> dense_povm_elements(const PovmEnsemble& ensemble,
                                         int cap = kDefaultDenseQubitCap);

/// ceil(ln(1/delta) / epsilon^2).
std::uint64_t dfe_budget(double delta, double epsilon);

/// Unnormalized per-qubit selection weights {1, tr(X rho)^2, tr(Y rho)^2, tr(Z rho)^2}.
std::array<double, 4> qubit_selection_weights(const Qubit2& rho);

struct PauliSample {
    std::vector<PauliString> strings; ///< sorted by index
    bool truncated = false;           ///< support smaller than the budget
};

/**
 * Draws up to `budget` distinct non-identity strings without replacement,
 * each with probability proportional to prod_j tr(s_{q_j} rho^(j))^2.
 * Digits are drawn qubit by qubit from the factor weights, so the dense
 * target is never formed. Any depolarizing level of the target is ignored.
 */
PauliSample sample_pauli_strings(const ProductState& target, std::uint64_t budget,
                                 std::uint64_t seed);

/**
 * Same selection law for an explicit state: weights tr(W_l rho)^2 given the
 * full vector of Pauli expectations (length 4^n, e.g. from `qmt`).
 */
PauliSample sample_pauli_strings(std::span<const double> expectations, int n,
                                 std::uint64_t budget, std::uint64_t seed);

} // namespace qst
