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
 * Quantum states: dense density matrices, product states, and the
 * Hermitian-matrix vectorization used by the vectorized diagnostics.
 *
 * Qubit 0 is the leftmost tensor factor everywhere, i.e. the most
 * significant bit of a basis index.
 */
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace qst {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Qubit2 = Eigen::Matrix2cd;

/// Largest qubit count for which a d x d matrix may be materialized.
inline constexpr int kDefaultDenseQubitCap = 14;

/// Returns log2(dim); throws DomainError unless dim is a power of two.
int qubit_count(std::int64_t dim);

/// Throws CapacityError if an n-qubit dense matrix exceeds `cap` qubits.
void require_dense_capacity(int n, int cap, std::string_view what);

/// A d x d Hermitian, unit-trace matrix. Positivity is not checked on
/// construction (see `min_eigenvalue`).
class DensityMatrix {
  public:
    /// Validates shape, Hermiticity (1e-12) and trace (1e-10).
    explicit DensityMatrix(CMatrix entries);

    /// Rank-one projector |psi><psi| for a normalized vector.
    static DensityMatrix from_pure(const CVector& psi);

    [[nodiscard]] int num_qubits() const noexcept { return n_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return m_.rows(); }
    [[nodiscard]] const CMatrix& matrix() const noexcept { return m_; }

    [[nodiscard]] double min_eigenvalue() const;
    [[nodiscard]] double purity() const;
    /// tr(rho^2) == 1 within `tol`.
    [[nodiscard]] bool is_pure(double tol = 1e-10) const;

  private:
    CMatrix m_;
    int n_;
};

/// rho^(1) (x) ... (x) rho^(n), optionally mixed with I/d:
///   (1 - p) rho^(1) (x) ... (x) rho^(n) + p I/d.
/// Never expanded to a dense matrix except by `to_dense`.
class ProductState {
  public:
    explicit ProductState(std::vector<Qubit2> factors, double depolarizing = 0.0);

    [[nodiscard]] int num_qubits() const noexcept { return static_cast<int>(factors_.size()); }
    [[nodiscard]] const std::vector<Qubit2>& factors() const noexcept { return factors_; }
    [[nodiscard]] const Qubit2& factor(int j) const { return factors_.at(static_cast<std::size_t>(j)); }
    [[nodiscard]] double depolarizing() const noexcept { return depolarizing_; }

    /// Bloch vector (tr(X rho_j), tr(Y rho_j), tr(Z rho_j)) of factor j.
    [[nodiscard]] Eigen::Vector3d bloch(int j) const;

    [[nodiscard]] DensityMatrix to_dense(int cap = kDefaultDenseQubitCap) const;

  private:
    std::vector<Qubit2> factors_;
    double depolarizing_;
};

enum class StateKind { w, ghz, random_product, random_pure };

StateKind parse_state_kind(std::string_view name);
std::string_view to_string(StateKind kind);

using AnyState = std::variant<DensityMatrix, ProductState>;

/// Normalized W-state vector (|10..0> + |01..0> + ... + |00..1>)/sqrt(n).
CVector w_state_vector(int n);
/// (|0..0> + |1..1>)/sqrt(2).
CVector ghz_state_vector(int n);

/// Haar-random pure qubit mixed with I/2 using a weight drawn from U[0, 0.2].
ProductState random_product_state(int n, std::uint64_t seed);
DensityMatrix random_pure_state(int n, std::uint64_t seed, int cap = kDefaultDenseQubitCap);

/// random_product yields a ProductState; every other kind a DensityMatrix.
AnyState make_state(StateKind kind, int n, std::uint64_t seed,
                    int cap = kDefaultDenseQubitCap);

/// (1 - p) rho + p I/d.
DensityMatrix depolarize(const DensityMatrix& rho, double p);
/// Composes with any existing noise: p_total = 1 - (1 - p_old)(1 - p).
ProductState depolarize(const ProductState& rho, double p);

/// (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, or tr(rho sigma) if either is pure.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Real coordinates of a Hermitian matrix: the d diagonal entries, then
/// sqrt(2) Re and sqrt(2) Im of each upper-triangle entry in row-major order.
struct HermitianVector {
    Eigen::VectorXd values;
};

/// Throws DomainError if `a` is non-Hermitian beyond 1e-10.
HermitianVector hvec(const CMatrix& a);
HermitianVector hvec(const DensityMatrix& rho);
CMatrix hmat(const HermitianVector& x);

} // namespace qst
