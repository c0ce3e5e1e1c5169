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
 * Measurement data: exact Born-rule probabilities (N = infinity) or
 * finite-shot frequencies drawn per POVM.
 */
#pragma once

#include "qst/frequencies.hpp"
#include "qst/povm.hpp"
#include "qst/states.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qst {

/// Probabilities below this (in magnitude) are clamped to zero; anything
/// more negative is a NumericError.
inline constexpr double kNegativeProbabilityTol = 1e-9;

struct ShotPlan {
    std::optional<std::uint64_t> shots; ///< per POVM; nullopt is N = infinity
    std::uint64_t seed = 0;
};

/// tr(W_j rho) for each listed string. Product states are evaluated factor
/// by factor, with (1 - p) scaling for depolarized targets.
std::vector<double> pauli_expectations(const DensityMatrix& rho, std::span<const PauliString> strings);
std::vector<double> pauli_expectations(const ProductState& rho, std::span<const PauliString> strings);

/// Outcome probabilities in linear order k + l * m_each, clamped and
/// normalized per POVM.
std::vector<double> exact_probabilities(const AnyState& state, const PovmEnsemble& ensemble,
                                        int cap = kDefaultDenseQubitCap);

/// Counts are binomial per Pauli POVM and multinomial (sequential binomials)
/// for the tetrahedral POVM, each POVM on its own seeded substream.
FrequencyTable simulate_frequencies(const AnyState& state, const PovmEnsemble& ensemble,
                                    const ShotPlan& plan, int cap = kDefaultDenseQubitCap);

} // namespace qst
