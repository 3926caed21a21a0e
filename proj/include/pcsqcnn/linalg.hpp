#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pcsqcnn/prng.hpp"

namespace pcsqcnn {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Complex = std::complex<double>;

inline double unitarity_defect(const CMat& u) {
    return (u.adjoint() * u - CMat::Identity(u.cols(), u.cols())).norm();
}

inline double commutator_norm(const CMat& a, const CMat& b) {
    return (a * b - b * a).norm();
}

struct Eigh {
    RVec values;  // ascending
    CMat vectors; // columns
};

inline Eigh eigh(const CMat& a) {
    Eigen::SelfAdjointEigenSolver<CMat> solver(a);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian eigendecomposition failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

/// exp(i*A) for Hermitian A, exactly unitary up to roundoff.
inline CMat expi_hermitian(const CMat& a) {
    const Eigh e = eigh(a);
    CVec phases(e.values.size());
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        phases[i] = Complex(std::cos(e.values[i]), std::sin(e.values[i]));
    }
    return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

/// Haar-like random unitary: QR of a complex Gaussian matrix with the
/// R-diagonal phase fix.
inline CMat random_unitary(int n, rng::Stream& stream) {
    CMat g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            g(i, j) = Complex(stream.gauss(), stream.gauss());
        }
    }
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ();
    const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        const double m = std::abs(d);
        q.col(j) *= (m > 0.0) ? d / m : Complex(1.0, 0.0);
    }
    return q;
}

/// Dimension of the null space, from singular values below tol * s_max.
inline int nullspace_dimension(const CMat& a, double rel_tol = 1e-10) {
    Eigen::JacobiSVD<CMat> svd(a);
    const RVec s = svd.singularValues();
    if (s.size() == 0) return 0;
    const double cut = rel_tol * std::max(1.0, s[0]);
    int null_dim = static_cast<int>(std::min(a.rows(), a.cols()));
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > cut) --null_dim;
    }
    // Rectangular case: rank deficiency counts against the column space.
    if (a.rows() < a.cols()) null_dim += static_cast<int>(a.cols() - a.rows());
    return null_dim;
}

inline CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace pcsqcnn
