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

#include "qst/states.hpp"

#include "qst/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>

namespace qst {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-10;

double hermitian_defect(const CMatrix& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

CVector complex_gaussian(Eigen::Index size, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CVector v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = Complex(re, im);
    }
    return v;
}

Eigen::VectorXd clamped_eigenvalues(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseMax(0.0);
}

CMatrix psd_sqrt(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    const Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace

int qubit_count(std::int64_t dim) {
    if (dim < 2 || !std::has_single_bit(static_cast<std::uint64_t>(dim))) {
        throw DomainError("dimension " + std::to_string(dim) + " is not a power of two >= 2");
    }
    return std::countr_zero(static_cast<std::uint64_t>(dim));
}

void require_dense_capacity(int n, int cap, std::string_view what) {
    if (n > cap) {
        throw CapacityError(std::string(what) + ": " + std::to_string(n) +
                            " qubits exceeds the dense capacity of " + std::to_string(cap) +
                            " qubits");
    }
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(CMatrix entries) : m_(std::move(entries)), n_(0) {
    if (m_.rows() != m_.cols()) {
        throw DomainError("density matrix must be square");
    }
    n_ = qubit_count(m_.rows());
    if (hermitian_defect(m_) > kHermitianTol) {
        throw DomainError("density matrix is not Hermitian");
    }
    const Complex tr = m_.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol) {
        throw DomainError("density matrix trace " + std::to_string(tr.real()) + " != 1");
    }
}

DensityMatrix DensityMatrix::from_pure(const CVector& psi) {
    const double norm = psi.norm();
    if (!(norm > 0.0)) {
        throw DomainError("pure state vector is zero");
    }
    const CVector v = psi / norm;
    CMatrix rho = v * v.adjoint();
    // Exact Hermiticity regardless of rounding in the outer product.
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho));
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double DensityMatrix::purity() const {
    // tr(rho^2) = ||rho||_F^2 for Hermitian rho.
    return m_.squaredNorm();
}

bool DensityMatrix::is_pure(double tol) const { return std::abs(purity() - 1.0) <= tol; }

// ---------------------------------------------------------------------------
// ProductState

ProductState::ProductState(std::vector<Qubit2> factors, double depolarizing)
    : factors_(std::move(factors)), depolarizing_(depolarizing) {
    if (factors_.empty()) {
        throw DomainError("product state needs at least one factor");
    }
    if (!(depolarizing_ >= 0.0 && depolarizing_ <= 1.0)) {
        throw DomainError("depolarizing level must lie in [0, 1]");
    }
    for (const Qubit2& f : factors_) {
        (void)DensityMatrix(CMatrix(f));
        Eigen::SelfAdjointEigenSolver<Qubit2> es(f, Eigen::EigenvaluesOnly);
        if (es.eigenvalues()(0) < -1e-10) {
            throw DomainError("product factor is not positive semidefinite");
        }
    }
}

Eigen::Vector3d ProductState::bloch(int j) const {
    const Qubit2& f = factor(j);
    // tr(X f) = 2 Re f01, tr(Y f) = i (f01 - f10) = 2 Im f10, tr(Z f) = f00 - f11.
    return {2.0 * f(0, 1).real(), 2.0 * f(1, 0).imag(), (f(0, 0) - f(1, 1)).real()};
}

DensityMatrix ProductState::to_dense(int cap) const {
    const int n = num_qubits();
    require_dense_capacity(n, cap, "ProductState::to_dense");
    CMatrix acc = factors_.front();
    for (std::size_t j = 1; j < factors_.size(); ++j) {
        const Qubit2& f = factors_[j];
        CMatrix next(acc.rows() * 2, acc.cols() * 2);
        for (Eigen::Index i = 0; i < acc.rows(); ++i) {
            for (Eigen::Index k = 0; k < acc.cols(); ++k) {
                for (int a = 0; a < 2; ++a) {
                    for (int b = 0; b < 2; ++b) {
                        next(2 * i + a, 2 * k + b) = acc(i, k) * f(a, b);
                    }
                }
            }
        }
        acc = std::move(next);
    }
    const auto d = acc.rows();
    if (depolarizing_ > 0.0) {
        acc *= (1.0 - depolarizing_);
        acc.diagonal().array() += depolarizing_ / static_cast<double>(d);
    }
    return DensityMatrix(std::move(acc));
}

// ---------------------------------------------------------------------------
// Constructors

StateKind parse_state_kind(std::string_view name) {
    if (name == "w") return StateKind::w;
    if (name == "ghz") return StateKind::ghz;
    if (name == "random_product") return StateKind::random_product;
    if (name == "random_pure") return StateKind::random_pure;
    throw DomainError("unknown state kind '" + std::string(name) + "'");
}

std::string_view to_string(StateKind kind) {
    switch (kind) {
    case StateKind::w: return "w";
    case StateKind::ghz: return "ghz";
    case StateKind::random_product: return "random_product";
    case StateKind::random_pure: return "random_pure";
    }
    return "unknown";
}

CVector w_state_vector(int n) {
    if (n < 1) throw DomainError("W-state needs n >= 1");
    const Eigen::Index d = Eigen::Index{1} << n;
    CVector psi = CVector::Zero(d);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    for (int q = 0; q < n; ++q) {
        // qubit q excited: bit (n - 1 - q) set.
        psi(Eigen::Index{1} << (n - 1 - q)) = amp;
    }
    return psi;
}

CVector ghz_state_vector(int n) {
    if (n < 1) throw DomainError("GHZ state needs n >= 1");
    const Eigen::Index d = Eigen::Index{1} << n;
    CVector psi = CVector::Zero(d);
    psi(0) = psi(d - 1) = 1.0 / std::sqrt(2.0);
    return psi;
}

ProductState random_product_state(int n, std::uint64_t seed) {
    if (n < 1) throw DomainError("product state needs n >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mix(0.0, 0.2);
    std::vector<Qubit2> factors;
    factors.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        CVector psi = complex_gaussian(2, rng);
        psi.normalize();
        const double w = mix(rng);
        Qubit2 f = (1.0 - w) * (psi * psi.adjoint());
        f(0, 0) += w / 2.0;
        f(1, 1) += w / 2.0;
        f = 0.5 * (f + f.adjoint()).eval();
        f /= f.trace().real();
        factors.push_back(f);
    }
    return ProductState(std::move(factors));
}

DensityMatrix random_pure_state(int n, std::uint64_t seed, int cap) {
    if (n < 1) throw DomainError("state needs n >= 1");
    require_dense_capacity(n, cap, "random_pure");
    std::mt19937_64 rng(seed);
    return DensityMatrix::from_pure(complex_gaussian(Eigen::Index{1} << n, rng));
}

AnyState make_state(StateKind kind, int n, std::uint64_t seed, int cap) {
    if (n < 1) throw DomainError("state needs n >= 1");
    switch (kind) {
    case StateKind::w:
        require_dense_capacity(n, cap, "W-state");
        return DensityMatrix::from_pure(w_state_vector(n));
    case StateKind::ghz:
        require_dense_capacity(n, cap, "GHZ state");
        return DensityMatrix::from_pure(ghz_state_vector(n));
    case StateKind::random_product:
        return random_product_state(n, seed);
    case StateKind::random_pure:
        return random_pure_state(n, seed, cap);
    }
    throw DomainError("unknown state kind");
}

DensityMatrix depolarize(const DensityMatrix& rho, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("depolarizing level must lie in [0, 1]");
    }
    CMatrix out = (1.0 - p) * rho.matrix();
    out.diagonal().array() += p / static_cast<double>(rho.dim());
    return DensityMatrix(std::move(out));
}

ProductState depolarize(const ProductState& rho, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("depolarizing level must lie in [0, 1]");
    }
    const double total = 1.0 - (1.0 - rho.depolarizing()) * (1.0 - p);
    return ProductState(rho.factors(), total);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw DomainError("fidelity: dimension mismatch");
    }
    double f = 0.0;
    if (rho.is_pure() || sigma.is_pure()) {
        // tr(rho sigma) = sum_ij rho_ij conj(sigma_ij) for Hermitian inputs.
        f = (rho.matrix().array() * sigma.matrix().array().conjugate()).sum().real();
    } else {
        const CMatrix s = psd_sqrt(rho.matrix());
        CMatrix inner = s * sigma.matrix() * s;
        inner = 0.5 * (inner + inner.adjoint()).eval();
        const double t = clamped_eigenvalues(inner).cwiseSqrt().sum();
        f = t * t;
    }
    return std::clamp(f, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// hvec / hmat

HermitianVector hvec(const CMatrix& a) {
    if (a.rows() != a.cols()) {
        throw DomainError("hvec: matrix must be square");
    }
    if (hermitian_defect(a) > 1e-10) {
        throw DomainError("hvec: matrix is not Hermitian");
    }
    const Eigen::Index d = a.rows();
    Eigen::VectorXd x(d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        x(i) = a(i, i).real();
    }
    const double root2 = std::sqrt(2.0);
    Eigen::Index pos = d;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            x(pos++) = root2 * a(i, j).real();
            x(pos++) = root2 * a(i, j).imag();
        }
    }
    return {std::move(x)};
}

HermitianVector hvec(const DensityMatrix& rho) { return hvec(rho.matrix()); }

CMatrix hmat(const HermitianVector& x) {
    const auto len = x.values.size();
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(len))));
    if (d * d != len) {
        throw DomainError("hmat: length is not a perfect square");
    }
    CMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        a(i, i) = x.values(i);
    }
    const double inv_root2 = 1.0 / std::sqrt(2.0);
    Eigen::Index pos = d;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const Complex v(x.values(pos) * inv_root2, x.values(pos + 1) * inv_root2);
            pos += 2;
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
    return a;
}

} // namespace qst
