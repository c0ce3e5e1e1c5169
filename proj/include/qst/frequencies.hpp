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

#pragma once

#include "qst/povm.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qst {

/// Per-POVM frequency sums must equal 1 within this tolerance.
inline constexpr double kFrequencySumTol = 1e-12;

/**
 * Measured ensemble plus empirical frequencies.
 *
 * `freqs[k + l * m_each]` is the frequency of outcome k of POVM l. For Pauli
 * POVMs outcome 0 is (I + W)/2 and outcome 1 is (I - W)/2. A missing shot
 * count means exact (N = infinity) data.
 */
class FrequencyTable {
  public:
    /// Validates length, non-negativity and per-POVM normalization. Tables
    /// outside tolerance are rejected, never renormalized.
    FrequencyTable(PovmEnsemble ensemble, std::vector<double> freqs,
                   std::optional<std::uint64_t> shots);

    [[nodiscard]] const PovmEnsemble& ensemble() const noexcept { return ensemble_; }
    [[nodiscard]] std::span<const double> freqs() const noexcept { return freqs_; }
    [[nodiscard]] std::optional<std::uint64_t> shots() const noexcept { return shots_; }
    [[nodiscard]] int num_qubits() const noexcept { return ensemble_.num_qubits(); }

  private:
    PovmEnsemble ensemble_;
    std::vector<double> freqs_;
    std::optional<std::uint64_t> shots_;
};

} // namespace qst
