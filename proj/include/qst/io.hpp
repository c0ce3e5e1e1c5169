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
 * JSON documents for states, ensembles, frequency tables, factors and
 * certificates. Every reader validates and throws ValidationError.
 */
#pragma once

#include "qst/certify.hpp"
#include "qst/frequencies.hpp"
#include "qst/objective.hpp"
#include "qst/povm.hpp"
#include "qst/states.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace qst::io {

using Json = nlohmann::json;

/// {"n", "kind", "dense": [[re, im], ...] row-major} for dense states;
/// {"n", "kind", "factors": [[[re, im] x 4], ...], "depolarizing"} for
/// product states, which are never expanded.
Json state_to_json(const AnyState& state, std::string_view kind);
AnyState state_from_json(const Json& doc);

/// {"family": "pauli", "n", "indices"} or {"family": "tetrahedral", "n"}.
Json ensemble_to_json(const PovmEnsemble& ensemble);
PovmEnsemble ensemble_from_json(const Json& doc, int cap = kDefaultDenseQubitCap);

/// {"n", "family", "indices" (pauli only), "shots": int | "inf", "freqs"}.
Json frequencies_to_json(const FrequencyTable& table);
FrequencyTable frequencies_from_json(const Json& doc, int cap = kDefaultDenseQubitCap);

/// {"n", "rank", "re", "im"}, entries column-major.
Json factor_to_json(const FactorMatrix& u);
FactorMatrix factor_from_json(const Json& doc);

Json certificate_to_json(const Certificate& cert);

Json read_json(const std::filesystem::path& path);
/// Writes `doc` followed by a newline. Output is byte-stable for equal input.
void write_json(const std::filesystem::path& path, const Json& doc);

/// Detects the document type, validates it fully, and returns its name
/// ("state", "ensemble", "frequencies", "factor", "certificate").
std::string validate_document(const Json& doc, int cap = kDefaultDenseQubitCap);

} // namespace qst::io
