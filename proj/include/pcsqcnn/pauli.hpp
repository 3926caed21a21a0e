#pragma once

#include <mutex>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pcsqcnn/linalg.hpp"

namespace pcsqcnn {

/// Pauli string index alpha enumerates base-4 digit strings over n qubits
/// (digits 0..3 = I, X, Y, Z), with qubit 0 the least-significant digit.
/// alpha = 0 is the all-identity string.
inline CMat pauli_string_matrix(int n_qubits, int alpha) {
    static const Complex i1(0.0, 1.0);
    CMat single[4] = {CMat::Identity(2, 2), CMat(2, 2), CMat(2, 2), CMat(2, 2)};
    single[1] << 0.0, 1.0, 1.0, 0.0;
    single[2] << 0.0, -i1, i1, 0.0;
    single[3] << 1.0, 0.0, 0.0, -1.0;
    CMat out = CMat::Identity(1, 1);
    // Qubit n-1 is the leftmost tensor factor so qubit 0 acts on the
    // least-significant bit of the register index.
    for (int q = n_qubits - 1; q >= 0; --q) {
        out = kron(out, single[(alpha >> (2 * q)) & 3]);
    }
    return out;
}

/// Cached full Pauli basis for n qubits (4^n matrices).
inline const std::vector<CMat>& pauli_basis(int n_qubits) {
    static std::mutex mu;
    static std::unordered_map<int, std::vector<CMat>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n_qubits);
    if (it != cache.end()) return it->second;
    std::vector<CMat> basis;
    const int count = 1 << (2 * n_qubits);
    basis.reserve(count);
    for (int a = 0; a < count; ++a) basis.push_back(pauli_string_matrix(n_qubits, a));
    return cache.emplace(n_qubits, std::move(basis)).first->second;
}

inline int pauli_count(int n_qubits) { return 1 << (2 * n_qubits); }

// Eigendecomposition of the Hermitian generator A = sum_a theta_a P_a,
// kept around for the directional derivatives of exp(iA).
struct PauliBlock {
    CMat unitary;
    RVec evals;
    CMat evecs;
};

inline PauliBlock pauli_block_full(std::span<const double> theta, int n_f) {
    const int expected = pauli_count(n_f);
    if (static_cast<int>(theta.size()) != expected) {
        throw std::invalid_argument("pauli block: expected 4^n_f coefficients");
    }
    const std::vector<CMat>& basis = pauli_basis(n_f);
    const int dim = 1 << n_f;
    CMat a = CMat::Zero(dim, dim);
    for (int i = 0; i < expected; ++i) {
        if (theta[i] != 0.0) a += theta[i] * basis[i];
    }
    PauliBlock blk;
    const Eigh e = eigh(a);
    blk.evals = e.values;
    blk.evecs = e.vectors;
    CVec phases(dim);
    for (int i = 0; i < dim; ++i) {
        phases[i] = Complex(std::cos(e.values[i]), std::sin(e.values[i]));
    }
    blk.unitary = e.vectors * phases.asDiagonal() * e.vectors.adjoint();
    return blk;
}

/// exp(i * sum_a theta_a P_a), unitary by construction.
inline CMat pauli_block(std::span<const double> theta, int n_f) {
    return pauli_block_full(theta, n_f).unitary;
}

namespace detail {

// Divided difference of exp(i*x): (e^{ia} - e^{ib}) / (a - b), evaluated in
// the cancellation-free form i * e^{i(a+b)/2} * sinc((a-b)/2). The equal-
// eigenvalue limit i * e^{ia} is the x -> 0 value of the same expression.
inline Complex expi_divided_difference(double a, double b) {
    const double half = 0.5 * (a - b);
    const double s = (half == 0.0) ? 1.0 : std::sin(half) / half;
    const double mid = 0.5 * (a + b);
    return Complex(0.0, 1.0) * Complex(std::cos(mid), std::sin(mid)) * s;
}

}  // namespace detail

/// Gradient of 2*Re tr(U(theta) M) for every Pauli coordinate of one block,
/// using the Daleckii-Krein form of the Frechet derivative of exp(iA):
/// d_alpha U = V (Phi .* (V^dag P_alpha V)) V^dag with Phi the divided
/// differences of exp(i.) over eigenvalue pairs.
inline void accumulate_block_gradient(const PauliBlock& blk, const CMat& m, int n_f,
                                      std::span<double> grad_out) {
    const int dim = static_cast<int>(blk.evals.size());
    const int n_alpha = pauli_count(n_f);
    if (static_cast<int>(grad_out.size()) != n_alpha) {
        throw std::invalid_argument("block gradient: output size mismatch");
    }
    const CMat w = blk.evecs.adjoint() * m * blk.evecs;
    CMat y(dim, dim);
    for (int p = 0; p < dim; ++p) {
        for (int q = 0; q < dim; ++q) {
            y(p, q) = detail::expi_divided_difference(blk.evals[p], blk.evals[q]) * w(q, p);
        }
    }
    // 2 Re sum_pq (V^dag P V)_pq y_pq = 2 Re sum_ab P_ab d_ab,
    // d = conj(V) y V^T.
    const CMat d = blk.evecs.conjugate() * y * blk.evecs.transpose();
    const std::vector<CMat>& basis = pauli_basis(n_f);
    for (int a = 0; a < n_alpha; ++a) {
        grad_out[a] += 2.0 * (basis[a].array() * d.array()).sum().real();
    }
}

/// Directional derivative dU/dtheta_alpha for one coordinate (test oracle
/// support and bound diagnostics).
inline CMat block_coordinate_derivative(const PauliBlock& blk, int n_f, int alpha) {
    const int dim = static_cast<int>(blk.evals.size());
    const CMat c = blk.evecs.adjoint() * pauli_basis(n_f)[alpha] * blk.evecs;
    CMat phi(dim, dim);
    for (int p = 0; p < dim; ++p) {
        for (int q = 0; q < dim; ++q) {
            phi(p, q) = detail::expi_divided_difference(blk.evals[p], blk.evals[q]) * c(p, q);
        }
    }
    return blk.evecs * phi * blk.evecs.adjoint();
}

}  // namespace pcsqcnn
