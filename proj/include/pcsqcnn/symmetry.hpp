#pragma once

#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcsqcnn/linalg.hpp"

namespace pcsqcnn {

/// Pixel cyclic shift T|j> = |j+1 mod N> (modular addition on the index).
inline CMat shift_matrix(int n) {
    if (n < 1) throw std::invalid_argument("shift: N must be >= 1");
    CMat t = CMat::Zero(n, n);
    for (int j = 0; j < n; ++j) t((j + 1) % n, j) = 1.0;
    return t;
}

/// Qubit cyclic shift on 2^L dimensions: left rotation of little-endian
/// bits, so bit j of the output equals bit j-1 (mod L) of the input.
inline CMat qubit_cycle_matrix(int l) {
    if (l < 1) throw std::invalid_argument("qcs: L must be >= 1");
    const int dim = 1 << l;
    const int mask = dim - 1;
    CMat s = CMat::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        const int rot = ((j << 1) | (j >> (l - 1))) & mask;
        s(rot, j) = 1.0;
    }
    return s;
}

/// Discrete Fourier transform F[k][j] = omega^{kj} / sqrt(N),
/// omega = exp(-2*pi*i/N). Diagonalizes T: F T F^dag = diag(omega^k).
inline CMat qft_matrix(int n) {
    if (n < 1) throw std::invalid_argument("qft: N must be >= 1");
    CMat f(n, n);
    const double w = -2.0 * std::numbers::pi / n;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            const double ph = w * static_cast<double>((static_cast<long long>(k) * j) % n);
            f(k, j) = Complex(std::cos(ph), std::sin(ph)) / std::sqrt(static_cast<double>(n));
        }
    }
    return f;
}

/// Max over the spatial generators of ||U (T ⊗ I) - (T ⊗ I) U||_F.
/// Pass ny = 1 for the 1D case.
inline double check_pcs_equivariance(const CMat& u, int nx, int ny, int df) {
    const Eigen::Index dim = static_cast<Eigen::Index>(nx) * ny * df;
    if (u.rows() != dim || u.cols() != dim) {
        throw std::invalid_argument("equivariance: operator dimension mismatch");
    }
    const CMat ix = CMat::Identity(nx, nx);
    const CMat iy = CMat::Identity(ny, ny);
    const CMat idf = CMat::Identity(df, df);
    double worst = commutator_norm(u, kron(kron(shift_matrix(nx), iy), idf));
    if (ny > 1) {
        worst = std::max(worst, commutator_norm(u, kron(kron(ix, shift_matrix(ny)), idf)));
    }
    return worst;
}

/// (F^dag ⊗ I) B (F ⊗ I) with B = ⊕_k U_k; blocks indexed k = kx*ny + ky.
/// The result commutes with both pixel-shift generators by construction.
inline CMat build_pcs_unitary(const std::vector<CMat>& blocks, int nx, int ny) {
    if (static_cast<int>(blocks.size()) != nx * ny) {
        throw std::invalid_argument("multiplexer: need one block per Fourier mode");
    }
    const int df = static_cast<int>(blocks[0].rows());
    for (const CMat& b : blocks) {
        if (b.rows() != df || b.cols() != df) {
            throw std::invalid_argument("multiplexer: inconsistent block dimensions");
        }
        if (unitarity_defect(b) > 1e-10) {
            throw std::invalid_argument("multiplexer: block is not unitary");
        }
    }
    const Eigen::Index dim = static_cast<Eigen::Index>(nx) * ny * df;
    CMat big = CMat::Zero(dim, dim);
    for (int k = 0; k < nx * ny; ++k) {
        big.block(static_cast<Eigen::Index>(k) * df, static_cast<Eigen::Index>(k) * df, df, df) =
            blocks[k];
    }
    const CMat f = (ny > 1) ? kron(qft_matrix(nx), qft_matrix(ny)) : qft_matrix(nx);
    const CMat fi = kron(f, CMat::Identity(df, df));
    return fi.adjoint() * big * fi;
}

/// Inverse of build_pcs_unitary: U_k = (<k| ⊗ I) B (|k> ⊗ I) with
/// B = (F ⊗ I) U (F^dag ⊗ I). Requires U to be PCS-equivariant.
inline std::vector<CMat> extract_blocks(const CMat& u, int nx, int ny, int df) {
    const double defect = check_pcs_equivariance(u, nx, ny, df);
    if (defect > 1e-8) {
        throw std::invalid_argument("extract_blocks: input is not PCS-equivariant (commutator norm " +
                                    std::to_string(defect) + ")");
    }
    const CMat f = (ny > 1) ? kron(qft_matrix(nx), qft_matrix(ny)) : qft_matrix(nx);
    const CMat fi = kron(f, CMat::Identity(df, df));
    const CMat b = fi * u * fi.adjoint();
    std::vector<CMat> blocks;
    blocks.reserve(static_cast<std::size_t>(nx) * ny);
    for (int k = 0; k < nx * ny; ++k) {
        blocks.push_back(
            b.block(static_cast<Eigen::Index>(k) * df, static_cast<Eigen::Index>(k) * df, df, df));
    }
    return blocks;
}

// A concrete demonstration that the qubit-shift and pixel-shift symmetries
// differ on the index register.
struct MismatchReport {
    int n = 0;
    int witness_state = 0;          // basis state j with S T |j> != T S |j>
    double action_gap = 0.0;        // || S T |j> - T S |j> ||
    double qcs_commutator = 0.0;    // n = 1: ||[Z, S]||_F
    double pcs_commutator = 0.0;    // n = 1: ||[Z, T]||_F
    std::string note;
};

inline MismatchReport mismatch_witness(int n) {
    if (n < 1) throw std::invalid_argument("mismatch: n must be >= 1");
    MismatchReport rep;
    rep.n = n;
    const CMat t = shift_matrix(1 << n);
    const CMat s = qubit_cycle_matrix(n);
    if (n == 1) {
        // S = I and T = X; Z commutes with S but not with T.
        CMat z(2, 2);
        z << 1.0, 0.0, 0.0, -1.0;
        rep.qcs_commutator = commutator_norm(z, s);
        rep.pcs_commutator = commutator_norm(z, t);
        rep.note = "n=1: S = I, T = X; Z commutes with S but not T";
        return rep;
    }
    rep.witness_state = 0;
    const CVec e0 = CVec::Unit(1 << n, 0);
    rep.action_gap = (s * t * e0 - t * s * e0).norm();
    rep.note = "S T |0> = S|1> differs from T S |0> = |1>";
    return rep;
}

/// Null-space dimension of U -> [U, T ⊗ I] over complex matrices on an
/// index register of dimension n with feature dimension df. Theorem-level
/// expectation: n * df^2.
inline int pcs_commutant_dimension(int n, int df) {
    const int dim = n * df;
    const CMat a = kron(shift_matrix(n), CMat::Identity(df, df));
    // vec(U) row-major; commutator map L = A ⊗ I - I ⊗ A^T acts as
    // L[(i,j),(k,l)] = A[i,k] delta[j,l] - delta[i,k] A[l,j].
    const Eigen::Index d2 = static_cast<Eigen::Index>(dim) * dim;
    CMat l = CMat::Zero(d2, d2);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const Eigen::Index row = static_cast<Eigen::Index>(i) * dim + j;
            for (int k = 0; k < dim; ++k) {
                l(row, static_cast<Eigen::Index>(k) * dim + j) += a(i, k);
            }
            for (int q = 0; q < dim; ++q) {
                l(row, static_cast<Eigen::Index>(i) * dim + q) -= a(q, j);
            }
        }
    }
    return nullspace_dimension(l);
}

}  // namespace pcsqcnn
