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
#include "qst/povm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

namespace qst {
namespace {

TEST(PauliStringType, IndexAndDigitsAgree) {
    const PauliString s = PauliString::parse("ZX");
    EXPECT_EQ(s.index(), 13u);
    EXPECT_EQ(s.digit(0), 3);
    EXPECT_EQ(s.digit(1), 1);
    EXPECT_EQ(s.str(), "ZX");
    EXPECT_EQ(PauliString::from_index(2, 13), s);
    for (std::uint64_t idx = 0; idx < 256; ++idx) {
        const PauliString t = PauliString::from_index(4, idx);
        const std::vector<std::uint8_t> d = t.digits();
        EXPECT_EQ(PauliString(4, d).index(), idx);
        EXPECT_EQ(PauliString::parse(t.str()), t);
    }
    EXPECT_TRUE(PauliString::from_index(3, 0).is_identity());
    EXPECT_THROW(PauliString::parse("XQ"), DomainError);
    EXPECT_THROW(PauliString::from_index(1, 4), DomainError);
}

TEST(PauliStringType, Masks) {
    // Digit j acts on bit n-1-j.
    const PauliString s = PauliString::parse("XYZI");
    EXPECT_EQ(s.flip_mask(), 0b1100u);
    EXPECT_EQ(s.phase_mask(), 0b0110u);
    EXPECT_EQ(s.y_count(), 1);
}

TEST(FullPauliEnsemble, Sizes) {
    const PovmEnsemble e1 = full_pauli_ensemble(1);
    ASSERT_EQ(e1.strings().size(), 3u);
    for (std::uint64_t i = 0; i < 3; ++i) EXPECT_EQ(e1.strings()[i].index(), i + 1);
    const PovmEnsemble e2 = full_pauli_ensemble(2);
    EXPECT_EQ(e2.num_povms(), 15u);
    EXPECT_EQ(e2.outcomes_per_povm(), 2u);
    EXPECT_EQ(e2.total_outcomes(), 30u);
    for (const PovmEnsemble& e : {full_pauli_ensemble(3), full_pauli_ensemble(4)}) {
        std::uint64_t prev = 0;
        for (const PauliString& s : e.strings()) {
            EXPECT_GT(s.index(), prev);
            prev = s.index();
        }
    }
    EXPECT_THROW(full_pauli_ensemble(12, 1000), CapacityError);
}

TEST(PovmEnsembleType, RejectsIdentityAndDuplicates) {
    EXPECT_THROW(PovmEnsemble::pauli(2, {PauliString::from_index(2, 0)}), DomainError);
    EXPECT_THROW(PovmEnsemble::pauli(2, {PauliString::from_index(2, 3), PauliString::from_index(2, 3)}),
                 DomainError);
    EXPECT_THROW(PovmEnsemble::pauli(2, {PauliString::from_index(3, 3)}), DomainError);
}

TEST(Tetrahedral, SingleQubitElements) {
    CMatrix sum = CMatrix::Zero(2, 2);
    for (int k = 0; k < 4; ++k) {
        const Qubit2 a = tetrahedral_element(k);
        sum += a;
        EXPECT_NEAR(a.trace().real(), 0.5, 1e-15);
        Eigen::SelfAdjointEigenSolver<Qubit2> eig(a);
        EXPECT_NEAR(eig.eigenvalues()[0], 0.0, 1e-15); // rank one
        EXPECT_NEAR(eig.eigenvalues()[1], 0.5, 1e-15);
    }
    EXPECT_LE((sum - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Tetrahedral, TwoQubitElementsArePsd) {
    const PovmEnsemble e = tetrahedral_ensemble(2);
    EXPECT_EQ(e.num_povms(), 1u);
    EXPECT_EQ(e.outcomes_per_povm(), 16u);
    const std::vector<CMatrix> elems = dense_povm_elements(e);
    ASSERT_EQ(elems.size(), 16u);
    for (std::size_t k = 0; k < elems.size(); ++k) {
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(elems[k]);
        EXPECT_GE(eig.eigenvalues()[0], -1e-14);
        EXPECT_LE((elems[k] - oracle::tetra_outcome(k, 2)).cwiseAbs().maxCoeff(), 1e-15);
    }
    EXPECT_THROW(tetrahedral_ensemble(15, 14), CapacityError);
}

TEST(PovmProperties, CompletenessAndPositivity) {
    for (int n = 1; n <= 3; ++n) {
        const Eigen::Index d = Eigen::Index{1} << n;
        for (const PovmEnsemble& e : {full_pauli_ensemble(n), tetrahedral_ensemble(n)}) {
            const std::vector<CMatrix> elems = dense_povm_elements(e);
            const std::uint64_t m = e.outcomes_per_povm();
            for (std::uint64_t l = 0; l < e.num_povms(); ++l) {
                CMatrix sum = CMatrix::Zero(d, d);
                for (std::uint64_t k = 0; k < m; ++k) {
                    const CMatrix& a = elems[k + l * m];
                    sum += a;
                    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
                    EXPECT_GE(eig.eigenvalues()[0], -1e-13);
                }
                EXPECT_LE((sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-13);
            }
        }
    }
}

TEST(DensePauli, MatchesKroneckerOracle) {
    for (std::uint64_t idx = 0; idx < 64; ++idx) {
        EXPECT_LE((dense_pauli(PauliString::from_index(3, idx)) - oracle::pauli(idx, 3)).cwiseAbs().maxCoeff(),
                  0.0);
    }
}

TEST(DfeBudget, Values) {
    EXPECT_EQ(dfe_budget(0.1, 0.03), 2559u);
    EXPECT_EQ(dfe_budget(std::exp(-1.0), 1.0), 1u);
    EXPECT_EQ(dfe_budget(0.05, 0.1), 300u);
    EXPECT_THROW(dfe_budget(0.0, 0.1), DomainError);
    EXPECT_THROW(dfe_budget(1.0, 0.1), DomainError);
    EXPECT_THROW(dfe_budget(0.1, 0.0), DomainError);
}

TEST(SelectionWeights, BlochComponentsSquared) {
    const Eigen::Vector3d r(0.3, -0.4, 0.5);
    Qubit2 rho = 0.5 * pauli_matrix(0);
    for (int c = 0; c < 3; ++c) rho += 0.5 * r[c] * pauli_matrix(static_cast<std::uint8_t>(c + 1));
    const auto w = qubit_selection_weights(rho);
    EXPECT_NEAR(w[0], 1.0, 1e-15);
    for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(w[c + 1], r[c] * r[c], 1e-15);
        const double direct = oracle::trace_re(oracle::sigma(c + 1), rho);
        EXPECT_NEAR(w[c + 1], direct * direct, 1e-15);
    }
}

ProductState zero_product(int n) {
    Qubit2 z = Qubit2::Zero();
    z(0, 0) = 1.0;
    return ProductState(std::vector<Qubit2>(static_cast<std::size_t>(n), z));
}

TEST(SamplePauliStrings, ZeroStateSupportIsIZ) {
    const PauliSample s = sample_pauli_strings(zero_product(5), 20, 3);
    EXPECT_EQ(s.strings.size(), 20u);
    for (const PauliString& p : s.strings) {
        for (const std::uint8_t q : p.digits()) EXPECT_TRUE(q == 0 || q == 3);
    }
}

TEST(SamplePauliStrings, TruncatesToSupport) {
    const PauliSample s = sample_pauli_strings(zero_product(2), 10, 1);
    EXPECT_TRUE(s.truncated);
    ASSERT_EQ(s.strings.size(), 3u);
    std::set<std::string> names;
    for (const PauliString& p : s.strings) names.insert(p.str());
    EXPECT_EQ(names, (std::set<std::string>{"IZ", "ZI", "ZZ"}));
}

TEST(SamplePauliStrings, DistinctNonIdentityDeterministic) {
    const ProductState target = random_product_state(6, 4);
    const PauliSample a = sample_pauli_strings(target, 300, 12);
    const PauliSample b = sample_pauli_strings(target, 300, 12);
    EXPECT_FALSE(a.truncated);
    ASSERT_EQ(a.strings.size(), 300u);
    std::set<std::uint64_t> seen;
    for (std::size_t i = 0; i < a.strings.size(); ++i) {
        EXPECT_FALSE(a.strings[i].is_identity());
        EXPECT_TRUE(seen.insert(a.strings[i].index()).second);
        EXPECT_EQ(a.strings[i], b.strings[i]);
    }
}

TEST(SamplePauliStrings, FallbackEnumeratesNearDegenerateSupport) {
    // Factors close to |0> put weight ~4e-6 on X, so redraws almost never
    // reach the strings containing X and the enumeration fallback fills them.
    const double theta = 1e-3;
    CVector psi(2);
    psi << std::cos(theta), std::sin(theta);
    const Qubit2 f = psi * psi.adjoint();
    const ProductState target(std::vector<Qubit2>(4, f));
    const PauliSample s = sample_pauli_strings(target, 70, 5);
    EXPECT_FALSE(s.truncated);
    ASSERT_EQ(s.strings.size(), 70u);
    int with_x = 0;
    for (const PauliString& p : s.strings) {
        bool has_x = false;
        for (const std::uint8_t q : p.digits()) {
            EXPECT_NE(q, 2); // Y has zero weight
            has_x = has_x || q == 1;
        }
        with_x += has_x ? 1 : 0;
    }
    EXPECT_EQ(with_x, 55); // all 15 I/Z strings plus 55 of the 65 X strings
}

TEST(SamplePauliStrings, EmpiricalFrequenciesMatchProductWeights) {
    const ProductState target = random_product_state(2, 17);
    std::vector<double> p(16, 0.0);
    double total = 0.0;
    for (std::uint64_t idx = 1; idx < 16; ++idx) {
        const std::vector<int> d = oracle::digits_of(idx, 2);
        double w = 1.0;
        for (int j = 0; j < 2; ++j) {
            const double t = oracle::trace_re(oracle::sigma(d[j]), target.factor(j));
            w *= t * t;
        }
        p[idx] = w;
        total += w;
    }
    constexpr int kDraws = 100000;
    std::map<std::uint64_t, int> counts;
    for (int t = 0; t < kDraws; ++t) {
        const PauliSample s = sample_pauli_strings(target, 1, static_cast<std::uint64_t>(t));
        ASSERT_EQ(s.strings.size(), 1u);
        ++counts[s.strings[0].index()];
    }
    EXPECT_EQ(counts.count(0), 0u);
    for (std::uint64_t idx = 1; idx < 16; ++idx) {
        const double q = p[idx] / total;
        const double sigma = std::sqrt(kDraws * q * (1.0 - q));
        EXPECT_LE(std::abs(counts[idx] - kDraws * q), 3.0 * sigma + 1e-9) << "string " << idx;
    }
}

TEST(SamplePauliStrings, ExpectationVectorOverload) {
    std::vector<double> x(16, 0.0);
    x[0] = 1.0;
    x[3] = 0.5;  // IZ
    x[12] = 0.5; // ZI
    const PauliSample s = sample_pauli_strings(x, 2, 10, 0);
    EXPECT_TRUE(s.truncated);
    ASSERT_EQ(s.strings.size(), 2u);
    EXPECT_EQ(s.strings[0].index(), 3u);
    EXPECT_EQ(s.strings[1].index(), 12u);
}

} // namespace
} // namespace qst
