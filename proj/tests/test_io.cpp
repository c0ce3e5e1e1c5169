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
#include "qst/io.hpp"
#include "qst/simulate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace qst::io {
namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

TEST(StateJson, RoundTrip) {
    const ProductState prod = depolarize(random_product_state(3, 1), 0.25);
    const AnyState back = state_from_json(Json::parse(state_to_json(prod, "random_product").dump()));
    const auto& p = std::get<ProductState>(back);
    EXPECT_EQ(p.depolarizing(), 0.25);
    for (int j = 0; j < 3; ++j) EXPECT_TRUE(p.factor(j) == prod.factor(j));

    const DensityMatrix w = DensityMatrix::from_pure(w_state_vector(3));
    const Json doc = state_to_json(w, "w");
    EXPECT_EQ(doc.at("kind"), "w");
    const AnyState parsed = state_from_json(Json::parse(doc.dump()));
    const auto& d = std::get<DensityMatrix>(parsed);
    EXPECT_TRUE(d.matrix() == w.matrix());
}

TEST(StateJson, Rejections) {
    Json doc = state_to_json(DensityMatrix::from_pure(ghz_state_vector(1)), "ghz");
    doc["dense"][1] = Json::array({0.3, 0.1}); // breaks Hermiticity
    EXPECT_THROW(state_from_json(doc), ValidationError);
    doc = state_to_json(DensityMatrix::from_pure(ghz_state_vector(1)), "ghz");
    doc["dense"].erase(0);
    EXPECT_THROW(state_from_json(doc), ValidationError);
    doc = state_to_json(random_product_state(2, 1), "random_product");
    doc["n"] = 3;
    EXPECT_THROW(state_from_json(doc), ValidationError);
    EXPECT_THROW(state_from_json(Json::object()), ValidationError);
}

TEST(EnsembleJson, RoundTripAndRejections) {
    const PovmEnsemble e = PovmEnsemble::pauli(2, {PauliString::parse("XY"), PauliString::parse("ZZ")});
    const Json doc = ensemble_to_json(e);
    EXPECT_EQ(doc.at("indices"), Json::array({6, 15}));
    const PovmEnsemble back = ensemble_from_json(doc);
    EXPECT_EQ(back.strings(), e.strings());

    const PovmEnsemble t = ensemble_from_json(ensemble_to_json(tetrahedral_ensemble(2)));
    EXPECT_EQ(t.family(), PovmFamily::tetrahedral);
    EXPECT_EQ(t.total_outcomes(), 16u);

    Json bad = doc;
    bad["indices"] = Json::array({0});
    EXPECT_THROW(ensemble_from_json(bad), ValidationError);
    bad["indices"] = Json::array({16});
    EXPECT_THROW(ensemble_from_json(bad), ValidationError);
    bad["indices"] = Json::array({5, 5});
    EXPECT_THROW(ensemble_from_json(bad), ValidationError);
    bad["indices"] = Json::array({-1});
    EXPECT_THROW(ensemble_from_json(bad), ValidationError);
    bad["family"] = "sic";
    EXPECT_THROW(ensemble_from_json(bad), ValidationError);
    EXPECT_THROW(ensemble_from_json(ensemble_to_json(tetrahedral_ensemble(3)), 2), ValidationError);
}

TEST(FrequenciesJson, RoundTripIsExact) {
    const ProductState s = random_product_state(3, 2);
    for (const std::optional<std::uint64_t> shots : {std::optional<std::uint64_t>{}, std::optional<std::uint64_t>{77}}) {
        const FrequencyTable f = simulate_frequencies(s, full_pauli_ensemble(3), ShotPlan{shots, 3});
        const FrequencyTable back = frequencies_from_json(Json::parse(frequencies_to_json(f).dump()));
        EXPECT_EQ(to_vec(back.freqs()), to_vec(f.freqs()));
        EXPECT_EQ(back.shots(), f.shots());
        EXPECT_EQ(back.ensemble().strings(), f.ensemble().strings());
    }
    const Json doc = frequencies_to_json(simulate_frequencies(s, full_pauli_ensemble(3), ShotPlan{}));
    EXPECT_EQ(doc.at("shots"), "inf");
}

TEST(FrequenciesJson, Rejections) {
    const FrequencyTable f(PovmEnsemble::pauli(1, {PauliString::parse("Z")}), {0.25, 0.75}, 4);
    const Json good = frequencies_to_json(f);
    Json bad = good;
    bad["freqs"] = Json::array({0.25, 0.5});
    EXPECT_THROW(frequencies_from_json(bad), ValidationError);
    bad["freqs"] = Json::array({0.25});
    EXPECT_THROW(frequencies_from_json(bad), ValidationError);
    bad["freqs"] = Json::array({"a", 0.75});
    EXPECT_THROW(frequencies_from_json(bad), ValidationError);
    bad = good;
    bad["shots"] = 0;
    EXPECT_THROW(frequencies_from_json(bad), ValidationError);
    bad["shots"] = "many";
    EXPECT_THROW(frequencies_from_json(bad), ValidationError);
    bad = good;
    bad.erase("shots");
    EXPECT_THROW(frequencies_from_json(bad), ValidationError);
}

TEST(FactorJson, RoundTripAndLayout) {
    std::mt19937_64 rng(4);
    const FactorMatrix u = oracle::random_factor(4, 3, rng);
    const Json doc = factor_to_json(u);
    EXPECT_EQ(doc.at("n"), 2);
    EXPECT_EQ(doc.at("rank"), 3);
    EXPECT_EQ(doc.at("re")[5].get<double>(), u(1, 1).real()); // column-major
    EXPECT_EQ(doc.at("im")[4].get<double>(), u(0, 1).imag());
    EXPECT_TRUE(factor_from_json(Json::parse(doc.dump())) == u);
    Json bad = doc;
    bad["re"].erase(0);
    EXPECT_THROW(factor_from_json(bad), ValidationError);
    bad = doc;
    bad["rank"] = 0;
    EXPECT_THROW(factor_from_json(bad), ValidationError);
}

TEST(ValidateDocument, DetectsKinds) {
    const FrequencyTable f(PovmEnsemble::pauli(1, {PauliString::parse("Z")}), {0.25, 0.75}, 4);
    EXPECT_EQ(validate_document(frequencies_to_json(f)), "frequencies");
    EXPECT_EQ(validate_document(factor_to_json(FactorMatrix::Ones(2, 1))), "factor");
    EXPECT_EQ(validate_document(state_to_json(random_product_state(2, 5), "random_product")), "state");
    EXPECT_EQ(validate_document(ensemble_to_json(tetrahedral_ensemble(1))), "ensemble");
    Certificate c{0.5, -1.0, 1.5, -1.5, EigenMethod::lanczos, 1e-12, 7, true};
    const Json cert = certificate_to_json(c);
    EXPECT_EQ(validate_document(cert), "certificate");
    Json report = {{"objective", 1.0}, {"nll", 0.5},      {"factor_norm", 1.0},
                   {"lambda", 3.0},    {"seconds", 0.0},  {"termination", "grad_tol"},
                   {"certificate", cert}};
    EXPECT_EQ(validate_document(report), "report");

    Json bad = cert;
    bad["mu"] = -1.0;
    EXPECT_THROW(validate_document(bad), ValidationError);
    bad = cert;
    bad["method"] = "arpack";
    EXPECT_THROW(validate_document(bad), ValidationError);
    report.erase("nll");
    EXPECT_THROW(validate_document(report), ValidationError);
    EXPECT_THROW(validate_document(Json::array()), ValidationError);
    EXPECT_THROW(validate_document(Json{{"hello", 1}}), ValidationError);
}

TEST(Files, ReadWrite) {
    const auto dir = std::filesystem::temp_directory_path() / "qstmle_test_io";
    std::filesystem::create_directories(dir);
    const Json doc = factor_to_json(FactorMatrix::Ones(2, 1));
    write_json(dir / "f.json", doc);
    EXPECT_EQ(read_json(dir / "f.json"), doc);
    {
        std::ofstream(dir / "broken.json") << "{\"n\": ";
    }
    EXPECT_THROW(read_json(dir / "broken.json"), ValidationError);
    EXPECT_THROW(read_json(dir / "missing.json"), ValidationError);
    std::filesystem::remove_all(dir);
}

} // namespace
} // namespace qst::io
