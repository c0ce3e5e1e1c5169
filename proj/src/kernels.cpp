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

#include "qst/kernels.hpp"

#include "qst/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>

namespace qst::kernels {

namespace {

using Quad = std::array<Complex, 4>;
using Transform4 = std::array<std::array<Complex, 4>, 4>;

constexpr Complex kI{0.0, 1.0};

// Rows handled together by the row-blocked kernels.
constexpr Eigen::Index kRowBlock = 4096;

// Spreads the low 32 bits of v onto the even bit positions.
std::uint64_t spread_bits(std::uint64_t v) {
    v &= 0xFFFFFFFFull;
    v = (v | (v << 16)) & 0x0000FFFF0000FFFFull;
    v = (v | (v << 8)) & 0x00FF00FF00FF00FFull;
    v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0Full;
    v = (v | (v << 2)) & 0x3333333333333333ull;
    v = (v | (v << 1)) & 0x5555555555555555ull;
    return v;
}

int square_qubits(const CMatrix& m, const char* what) {
    if (m.rows() != m.cols()) throw DomainError(std::string(what) + ": matrix must be square");
    return qubit_count(m.rows());
}

// Applies `op` to every group of four entries that differ only in the pair
// digit of qubit k, for every qubit in turn.
template <typename Op>
void sweep_axes(std::vector<Complex>& buf, int n, Op op) {
    const std::int64_t groups = std::int64_t{1} << (2 * (n - 1));
    for (int k = 0; k < n; ++k) {
        const std::int64_t stride = std::int64_t{1} << (2 * (n - 1 - k));
#pragma omp parallel for schedule(static)
        for (std::int64_t g = 0; g < groups; ++g) {
            const std::int64_t base = (g / stride) * 4 * stride + g % stride;
            Quad v{buf[base], buf[base + stride], buf[base + 2 * stride], buf[base + 3 * stride]};
            op(v);
            for (int a = 0; a < 4; ++a) buf[base + a * stride] = v[a];
        }
    }
}

void pauli_forward(Quad& v) {
    const Quad in = v;
    v[0] = in[0] + in[3];
    v[1] = in[1] + in[2];
    v[2] = kI * (in[1] - in[2]);
    v[3] = in[0] - in[3];
}

void pauli_adjoint(Quad& v) {
    const Quad c = v;
    v[0] = c[0] + c[3];
    v[1] = c[1] - kI * c[2];
    v[2] = c[1] + kI * c[2];
    v[3] = c[0] - c[3];
}

// forward[k][2i+j] = (A_k)_{j,i};  adjoint[2i+j][k] = (A_k)_{i,j}.
const Transform4& tetra_forward() {
    static const Transform4 t = [] {
        Transform4 m{};
        for (int k = 0; k < 4; ++k) {
            const Qubit2 a = tetrahedral_element(k);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) m[k][2 * i + j] = a(j, i);
        }
        return m;
    }();
    return t;
}

const Transform4& tetra_adjoint() {
    static const Transform4 t = [] {
        Transform4 m{};
        for (int k = 0; k < 4; ++k) {
            const Qubit2 a = tetrahedral_element(k);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) m[2 * i + j][k] = a(i, j);
        }
        return m;
    }();
    return t;
}

auto matrix_op(const Transform4& t) {
    return [&t](Quad& v) {
        const Quad in = v;
        for (int r = 0; r < 4; ++r) {
            v[r] = t[r][0] * in[0] + t[r][1] * in[1] + t[r][2] * in[2] + t[r][3] * in[3];
        }
    };
}

std::vector<double> real_parts(const std::vector<Complex>& buf) {
    std::vector<double> out(buf.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(buf.size()); ++i) out[i] = buf[i].real();
    return out;
}

void check_coeffs(std::span<const double> coeffs, int n, const char* what) {
    if (n < 1) throw DomainError(std::string(what) + ": n must be positive");
    if (coeffs.size() != (std::size_t{1} << (2 * n))) {
        throw DomainError(std::string(what) + ": expected 4^n coefficients");
    }
}

std::vector<Complex> to_complex(std::span<const double> coeffs) {
    std::vector<Complex> buf(coeffs.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(coeffs.size()); ++i) buf[i] = coeffs[i];
    return buf;
}

// (-i)^ny
Complex y_phase(int ny) {
    switch (ny & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
    }
}

double parity_sign(std::uint64_t v) {
    v ^= v >> 32;
    v ^= v >> 16;
    v ^= v >> 8;
    v ^= v >> 4;
    v ^= v >> 2;
    v ^= v >> 1;
    return 1.0 - 2.0 * static_cast<double>(v & 1);
}

void check_rows(const CMatrix& u, const PauliString& s) {
    if (u.rows() != (Eigen::Index{1} << s.num_qubits())) {
        throw DomainError("Pauli string length does not match the factor row count");
    }
}

} // namespace

std::vector<Complex> shuffle_forward(const CMatrix& rho) {
    square_qubits(rho, "shuffle_forward");
    const std::int64_t d = rho.rows();
    std::vector<Complex> t(static_cast<std::size_t>(d * d));
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < d; ++j) {
        const std::uint64_t sj = spread_bits(static_cast<std::uint64_t>(j));
        for (std::int64_t i = 0; i < d; ++i) {
            t[(spread_bits(static_cast<std::uint64_t>(i)) << 1) | sj] = rho(i, j);
        }
    }
    return t;
}

CMatrix shuffle_backward(std::span<const Complex> t, int n) {
    if (n < 1 || t.size() != (std::size_t{1} << (2 * n))) {
        throw DomainError("shuffle_backward: expected 4^n entries");
    }
    const std::int64_t d = std::int64_t{1} << n;
    CMatrix rho(d, d);
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < d; ++j) {
        for (std::int64_t i = 0; i < d; ++i) {
            const std::uint64_t idx = (spread_bits(static_cast<std::uint64_t>(i)) << 1) |
                                      spread_bits(static_cast<std::uint64_t>(j));
            rho(i, j) = t[idx];
        }
    }
    return rho;
}

std::vector<double> qmt(const CMatrix& rho, int cap) {
    const int n = square_qubits(rho, "qmt");
    require_dense_capacity(n, cap, "qmt");
    std::vector<Complex> buf = shuffle_forward(rho);
    sweep_axes(buf, n, pauli_forward);
    return real_parts(buf);
}

std::vector<double> qmt_tetrahedral(const CMatrix& rho, int cap) {
    const int n = square_qubits(rho, "qmt_tetrahedral");
    require_dense_capacity(n, cap, "qmt_tetrahedral");
    std::vector<Complex> buf = shuffle_forward(rho);
    sweep_axes(buf, n, matrix_op(tetra_forward()));
    return real_parts(buf);
}

CMatrix pauli_synthesis(std::span<const double> coeffs, int n, int cap) {
    check_coeffs(coeffs, n, "pauli_synthesis");
    require_dense_capacity(n, cap, "pauli_synthesis");
    std::vector<Complex> buf = to_complex(coeffs);
    sweep_axes(buf, n, pauli_adjoint);
    return shuffle_backward(buf, n);
}

CMatrix tetrahedral_synthesis(std::span<const double> coeffs, int n, int cap) {
    check_coeffs(coeffs, n, "tetrahedral_synthesis");
    require_dense_capacity(n, cap, "tetrahedral_synthesis");
    std::vector<Complex> buf = to_complex(coeffs);
    sweep_axes(buf, n, matrix_op(tetra_adjoint()));
    return shuffle_backward(buf, n);
}

std::vector<double> outcome_probabilities(const CMatrix& rho, const PovmEnsemble& ensemble,
                                          int cap) {
    const int n = square_qubits(rho, "outcome_probabilities");
    if (n != ensemble.num_qubits()) throw DomainError("state and ensemble sizes differ");
    if (ensemble.family() == PovmFamily::tetrahedral) return qmt_tetrahedral(rho, cap);
    const std::vector<double> x = qmt(rho, cap);
    const auto& strings = ensemble.strings();
    std::vector<double> p(2 * strings.size());
    for (std::size_t l = 0; l < strings.size(); ++l) {
        const double e = x[strings[l].index()];
        p[2 * l] = 0.5 * (x[0] + e);
        p[2 * l + 1] = 0.5 * (x[0] - e);
    }
    return p;
}

CMatrix likelihood_gradient(const PovmEnsemble& ensemble, std::span<const double> freqs,
                            std::span<const double> probs, int cap) {
    const int n = ensemble.num_qubits();
    if (freqs.size() != ensemble.total_outcomes() || probs.size() != freqs.size()) {
        throw DomainError("likelihood_gradient: frequency and probability lengths differ");
    }
    const std::uint64_t m_each = ensemble.outcomes_per_povm();
    auto ratio = [&](std::size_t i) {
        if (freqs[i] == 0.0) return 0.0;
        if (!(probs[i] > 0.0)) throw SingularProbabilityError(i / m_each, probs[i]);
        return freqs[i] / probs[i];
    };
    std::vector<double> c(std::size_t{1} << (2 * n), 0.0);
    if (ensemble.family() == PovmFamily::tetrahedral) {
        for (std::size_t k = 0; k < c.size(); ++k) c[k] = -ratio(k);
        return tetrahedral_synthesis(c, n, cap);
    }
    const auto& strings = ensemble.strings();
    for (std::size_t l = 0; l < strings.size(); ++l) {
        const double plus = ratio(2 * l);
        const double minus = ratio(2 * l + 1);
        c[0] -= 0.5 * (plus + minus);
        c[strings[l].index()] -= 0.5 * (plus - minus);
    }
    return pauli_synthesis(c, n, cap);
}

CMatrix qmt_gradient(const CMatrix& rho, const FrequencyTable& freqs, int cap) {
    const std::vector<double> p = outcome_probabilities(rho, freqs.ensemble(), cap);
    return likelihood_gradient(freqs.ensemble(), freqs.freqs(), p, cap);
}

std::vector<double> pauli_expectations_dense(const CMatrix& rho,
                                             std::span<const PauliString> strings) {
    square_qubits(rho, "pauli_expectations_dense");
    for (const PauliString& s : strings) check_rows(rho, s);
    const std::int64_t d = rho.rows();
    std::vector<double> out(strings.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(strings.size()); ++j) {
        const PauliString& s = strings[j];
        const std::uint64_t x = s.flip_mask();
        const std::uint64_t z = s.phase_mask();
        Complex acc = 0.0;
        for (std::int64_t i = 0; i < d; ++i) {
            acc += parity_sign(static_cast<std::uint64_t>(i) & z) *
                   rho(static_cast<std::int64_t>(static_cast<std::uint64_t>(i) ^ x), i);
        }
        out[j] = (y_phase(s.y_count()) * acc).real();
    }
    return out;
}

CMatrix apply_pauli(const CMatrix& u, const PauliString& s) {
    check_rows(u, s);
    const std::int64_t d = u.rows();
    const std::uint64_t x = s.flip_mask();
    const std::uint64_t z = s.phase_mask();
    const Complex g = y_phase(s.y_count());
    CMatrix out(u.rows(), u.cols());
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < d; ++i) {
            const auto ui = static_cast<std::uint64_t>(i);
            out(i, c) = (g * parity_sign(ui & z)) * u(static_cast<std::int64_t>(ui ^ x), c);
        }
    }
    return out;
}

std::vector<double> probs_lowmem(const CMatrix& u, std::span<const PauliString> strings) {
    for (const PauliString& s : strings) check_rows(u, s);
    const std::int64_t d = u.rows();
    const Eigen::Index r = u.cols();
    std::vector<double> out(strings.size());
    // One string per task with a serial row sum, so the result is independent
    // of the thread count.
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(strings.size()); ++j) {
        const PauliString& s = strings[j];
        const std::uint64_t x = s.flip_mask();
        const std::uint64_t z = s.phase_mask();
        double acc_re = 0.0;
        double acc_im = 0.0;
        for (Eigen::Index c = 0; c < r; ++c) {
            const double* col = reinterpret_cast<const double*>(u.col(c).data());
            for (std::int64_t i = 0; i < d; ++i) {
                const auto ui = static_cast<std::uint64_t>(i);
                const std::uint64_t k = ui ^ x;
                const double sg = parity_sign(ui & z);
                const double ar = col[2 * i], ai = col[2 * i + 1];
                const double br = col[2 * k], bi = col[2 * k + 1];
                acc_re += sg * (ar * br + ai * bi);
                acc_im += sg * (ar * bi - ai * br);
            }
        }
        out[j] = (y_phase(s.y_count()) * Complex(acc_re, acc_im)).real();
    }
    return out;
}

void accumulate_pauli_action(const CMatrix& u, std::span<const PauliString> strings,
                             std::span<const double> beta, CMatrix& out) {
    if (beta.size() != strings.size()) throw DomainError("one coefficient per string expected");
    if (out.rows() != u.rows() || out.cols() != u.cols()) {
        throw DomainError("accumulate_pauli_action: output shape mismatch");
    }
    for (const PauliString& s : strings) check_rows(u, s);
    const std::int64_t d = u.rows();
    const Eigen::Index r = u.cols();
    const std::int64_t blocks = (d + kRowBlock - 1) / kRowBlock;
    // Each task owns a row block and visits strings in list order.
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
        const std::int64_t lo = b * kRowBlock;
        const std::int64_t hi = std::min(d, lo + kRowBlock);
        for (std::size_t j = 0; j < strings.size(); ++j) {
            if (beta[j] == 0.0) continue;
            const PauliString& s = strings[j];
            const std::uint64_t x = s.flip_mask();
            const std::uint64_t z = s.phase_mask();
            const Complex g = beta[j] * y_phase(s.y_count());
            const double gr = g.real(), gi = g.imag();
            for (Eigen::Index c = 0; c < r; ++c) {
                const double* src = reinterpret_cast<const double*>(u.col(c).data());
                double* dst = reinterpret_cast<double*>(out.col(c).data());
                for (std::int64_t i = lo; i < hi; ++i) {
                    const auto ui = static_cast<std::uint64_t>(i);
                    const std::uint64_t k = ui ^ x;
                    const double sg = parity_sign(ui & z);
                    const double sr = src[2 * k], si = src[2 * k + 1];
                    dst[2 * i] += sg * (gr * sr - gi * si);
                    dst[2 * i + 1] += sg * (gr * si + gi * sr);
                }
            }
        }
    }
}

} // namespace qst::kernels
