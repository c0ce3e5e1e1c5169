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

#include "qst/reference_kernels.hpp"

#include "qst/error.hpp"

#include <array>
#include <cstdint>

namespace qst::kernels::reference {

namespace {

using Matrix4 = std::array<std::array<Complex, 4>, 4>;

// Permutes the axes of a rank-`axes` tensor of 2-dimensional axes stored in
// row-major order: output axis a is input axis perm[a].
std::vector<Complex> permute_axes(const std::vector<Complex>& in, const std::vector<int>& perm) {
    const int axes = static_cast<int>(perm.size());
    std::vector<Complex> out(in.size());
    std::vector<int> digits(static_cast<std::size_t>(axes));
    for (std::size_t o = 0; o < out.size(); ++o) {
        for (int a = 0; a < axes; ++a) digits[a] = static_cast<int>((o >> (axes - 1 - a)) & 1u);
        std::size_t src = 0;
        for (int a = 0; a < axes; ++a) {
            src |= static_cast<std::size_t>(digits[a]) << (axes - 1 - perm[a]);
        }
        out[o] = in[src];
    }
    return out;
}

std::vector<int> interleave_permutation(int n) {
    std::vector<int> perm;
    for (int k = 0; k < n; ++k) {
        perm.push_back(k);
        perm.push_back(n + k);
    }
    return perm;
}

// One pass per qubit: view x as 4 x K, left-multiply by `t`, store the
// transpose (K x 4). After n passes every axis is transformed and the axes
// are back in their original order.
std::vector<Complex> axis_sweep(std::vector<Complex> x, int n, const Matrix4& t) {
    const std::size_t k_cols = x.size() / 4;
    std::vector<Complex> y(x.size());
    for (int pass = 0; pass < n; ++pass) {
        for (std::size_t col = 0; col < k_cols; ++col) {
            for (int row = 0; row < 4; ++row) {
                Complex acc = 0.0;
                for (int a = 0; a < 4; ++a) acc += t[row][a] * x[a * k_cols + col];
                y[col * 4 + row] = acc;
            }
        }
        x.swap(y);
    }
    return x;
}

// Row q of P^H: conj(vec(s_q)) with vec row-major, so entry (q, 2i+j) is
// conj((s_q)_{ij}).
Matrix4 pauli_ph() {
    Matrix4 m{};
    for (int q = 0; q < 4; ++q) {
        const Qubit2 s = pauli_matrix(static_cast<std::uint8_t>(q));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m[q][2 * i + j] = std::conj(s(i, j));
    }
    return m;
}

Matrix4 pauli_p() {
    Matrix4 m{};
    for (int q = 0; q < 4; ++q) {
        const Qubit2 s = pauli_matrix(static_cast<std::uint8_t>(q));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m[2 * i + j][q] = s(i, j);
    }
    return m;
}

Matrix4 tetra_ph() {
    Matrix4 m{};
    for (int k = 0; k < 4; ++k) {
        const Qubit2 a = tetrahedral_element(k);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m[k][2 * i + j] = std::conj(a(i, j));
    }
    return m;
}

std::vector<Complex> row_major(const CMatrix& rho) {
    const Eigen::Index d = rho.rows();
    std::vector<Complex> flat(static_cast<std::size_t>(d * d));
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) flat[static_cast<std::size_t>(i * d + j)] = rho(i, j);
    return flat;
}

std::vector<double> real_parts(const std::vector<Complex>& x) {
    std::vector<double> out;
    out.reserve(x.size());
    for (const Complex& v : x) out.push_back(v.real());
    return out;
}

int square_qubits(const CMatrix& m) {
    if (m.rows() != m.cols()) throw DomainError("reference kernel: matrix must be square");
    return qubit_count(m.rows());
}

} // namespace

std::vector<Complex> shuffle_forward(const CMatrix& rho) {
    const int n = square_qubits(rho);
    return permute_axes(row_major(rho), interleave_permutation(n));
}

std::vector<double> qmt(const CMatrix& rho) {
    const int n = square_qubits(rho);
    return real_parts(axis_sweep(shuffle_forward(rho), n, pauli_ph()));
}

std::vector<double> qmt_tetrahedral(const CMatrix& rho) {
    const int n = square_qubits(rho);
    return real_parts(axis_sweep(shuffle_forward(rho), n, tetra_ph()));
}

CMatrix pauli_synthesis(std::span<const double> coeffs, int n) {
    if (n < 1 || coeffs.size() != (std::size_t{1} << (2 * n))) {
        throw DomainError("reference pauli_synthesis: expected 4^n coefficients");
    }
    const std::vector<Complex> x(coeffs.begin(), coeffs.end());
    const std::vector<Complex> t = axis_sweep(x, n, pauli_p());
    // Undo the interleave: input axis perm[a] came from output axis a.
    const std::vector<int> perm = interleave_permutation(n);
    std::vector<int> inverse(perm.size());
    for (std::size_t a = 0; a < perm.size(); ++a) inverse[static_cast<std::size_t>(perm[a])] = static_cast<int>(a);
    const std::vector<Complex> flat = permute_axes(t, inverse);
    const Eigen::Index d = Eigen::Index{1} << n;
    CMatrix g(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) g(i, j) = flat[static_cast<std::size_t>(i * d + j)];
    return g;
}

CMatrix apply_x(const CMatrix& u, int k) {
    const Eigen::Index d = u.rows();
    const Eigen::Index half = Eigen::Index{1} << k;
    // order[i] = i + 2^k on rows with bit k clear and i - 2^k otherwise.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) order[i] = ((i / half) % 2 == 0) ? i + half : i - half;
    CMatrix out(d, u.cols());
    for (Eigen::Index i = 0; i < d; ++i) out.row(i) = u.row(order[i]);
    return out;
}

CMatrix apply_z(const CMatrix& u, int k) {
    const Eigen::Index d = u.rows();
    const Eigen::Index half = Eigen::Index{1} << k;
    std::vector<double> scale(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) scale[i] = ((i / half) % 2 == 0) ? 1.0 : -1.0;
    CMatrix out(d, u.cols());
    for (Eigen::Index i = 0; i < d; ++i) out.row(i) = scale[i] * u.row(i);
    return out;
}

CMatrix apply_y(const CMatrix& u, int k) {
    return Complex(0.0, 1.0) * apply_x(apply_z(u, k), k);
}

CMatrix apply_pauli(const CMatrix& u, const PauliString& s) {
    const int n = s.num_qubits();
    if (u.rows() != (Eigen::Index{1} << n)) {
        throw DomainError("Pauli string length does not match the factor row count");
    }
    CMatrix out = u;
    for (int k = 0; k < n; ++k) {
        switch (s.digit(n - 1 - k)) {
        case 1: out = apply_x(out, k); break;
        case 2: out = apply_y(out, k); break;
        case 3: out = apply_z(out, k); break;
        default: break;
        }
    }
    return out;
}

std::vector<double> probs_lowmem(const CMatrix& u, std::span<const PauliString> strings) {
    std::vector<double> out;
    out.reserve(strings.size());
    for (const PauliString& s : strings) {
        const CMatrix wu = apply_pauli(u, s);
        Complex acc = 0.0;
        for (Eigen::Index c = 0; c < u.cols(); ++c)
            for (Eigen::Index i = 0; i < u.rows(); ++i) acc += std::conj(u(i, c)) * wu(i, c);
        out.push_back(acc.real());
    }
    return out;
}

} // namespace qst::kernels::reference
