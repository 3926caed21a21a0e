#include "doctest.h"

#include <numbers>

#include "pcsqcnn/pauli.hpp"

using namespace pcsqcnn;

TEST_SUITE_BEGIN("pauli");

TEST_CASE("string enumeration is little-endian in base 4") {
    // alpha = 1 -> X on qubit 0; with 2 qubits that is I (x) X
    CMat x(2, 2), z(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    z << 1.0, 0.0, 0.0, -1.0;
    CHECK((pauli_string_matrix(2, 1) - kron(CMat::Identity(2, 2), x)).norm() == 0.0);
    // alpha = 12 = 4*3 -> Z on qubit 1: Z (x) I
    CHECK((pauli_string_matrix(2, 12) - kron(z, CMat::Identity(2, 2))).norm() == 0.0);
    CHECK(pauli_basis(2).size() == 16);
}

TEST_CASE("zero coefficients give the identity block") {
    const std::vector<double> theta(4, 0.0);
    CHECK((pauli_block(theta, 1) - CMat::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("identity-string coefficient is a pure phase") {
    const double c = 0.8321;
    const std::vector<double> theta{c, 0.0, 0.0, 0.0};
    const CMat u = pauli_block(theta, 1);
    const Complex ph(std::cos(c), std::sin(c));
    CHECK((u - ph * CMat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("pi/2 X rotation is iX") {
    const std::vector<double> theta{0.0, std::numbers::pi / 2.0, 0.0, 0.0};
    const CMat u = pauli_block(theta, 1);
    CHECK(std::abs(u(0, 0)) < 1e-14);
    CHECK(std::abs(u(1, 1)) < 1e-14);
    CHECK(std::abs(u(0, 1) - Complex(0.0, 1.0)) < 1e-14);
    CHECK(std::abs(u(1, 0) - Complex(0.0, 1.0)) < 1e-14);
}

TEST_CASE("blocks are unitary for random coefficients up to n_f = 3") {
    for (int nf : {1, 2, 3}) {
        rng::Stream s(20 + static_cast<std::uint64_t>(nf), "theta");
        std::vector<double> theta(static_cast<std::size_t>(pauli_count(nf)));
        for (double& t : theta) t = s.uniform(0.0, 2.0 * std::numbers::pi);
        CHECK(unitarity_defect(pauli_block(theta, nf)) < 1e-12);
    }
}

TEST_CASE("wrong coefficient count is rejected") {
    const std::vector<double> theta(5, 0.0);
    CHECK_THROWS_AS(pauli_block(theta, 1), std::invalid_argument);
}

TEST_CASE("divided difference matches both branches") {
    const double a = 0.9, b = 0.1;
    const Complex direct = (Complex(std::cos(a), std::sin(a)) - Complex(std::cos(b), std::sin(b))) / (a - b);
    CHECK(std::abs(detail::expi_divided_difference(a, b) - direct) < 1e-14);
    const Complex lim = Complex(0.0, 1.0) * Complex(std::cos(a), std::sin(a));
    CHECK(std::abs(detail::expi_divided_difference(a, a) - lim) < 1e-15);
}

TEST_CASE("coordinate derivative matches a matrix finite difference") {
    for (int nf : {1, 2}) {
        rng::Stream s(31 + static_cast<std::uint64_t>(nf), "fd");
        const int n_alpha = pauli_count(nf);
        std::vector<double> theta(static_cast<std::size_t>(n_alpha));
        for (double& t : theta) t = s.uniform(0.0, 2.0 * std::numbers::pi);
        const PauliBlock blk = pauli_block_full(theta, nf);
        const double h = 1e-6;
        for (int alpha : {0, 1, n_alpha - 1}) {
            std::vector<double> tp = theta, tm = theta;
            tp[static_cast<std::size_t>(alpha)] += h;
            tm[static_cast<std::size_t>(alpha)] -= h;
            const CMat fd = (pauli_block(tp, nf) - pauli_block(tm, nf)) / (2.0 * h);
            const CMat an = block_coordinate_derivative(blk, nf, alpha);
            CHECK((fd - an).norm() < 1e-7);
        }
    }
}

TEST_CASE("degenerate generators use the analytic limit") {
    // A = c * I has a fully degenerate spectrum
    const double c = 1.234;
    std::vector<double> theta{c, 0.0, 0.0, 0.0};
    const PauliBlock blk = pauli_block_full(theta, 1);
    const double h = 1e-6;
    for (int alpha = 0; alpha < 4; ++alpha) {
        std::vector<double> tp = theta, tm = theta;
        tp[static_cast<std::size_t>(alpha)] += h;
        tm[static_cast<std::size_t>(alpha)] -= h;
        const CMat fd = (pauli_block(tp, 1) - pauli_block(tm, 1)) / (2.0 * h);
        CHECK((fd - block_coordinate_derivative(blk, 1, alpha)).norm() < 1e-7);
    }
}

TEST_CASE("block gradient equals the trace against coordinate derivatives") {
    rng::Stream s(55, "grad");
    const int nf = 2;
    const int n_alpha = pauli_count(nf);
    std::vector<double> theta(static_cast<std::size_t>(n_alpha));
    for (double& t : theta) t = s.uniform(0.0, 2.0 * std::numbers::pi);
    const PauliBlock blk = pauli_block_full(theta, nf);
    CMat m(4, 4);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) m(i, j) = Complex(s.gauss(), s.gauss());
    }
    std::vector<double> grad(static_cast<std::size_t>(n_alpha), 0.0);
    accumulate_block_gradient(blk, m, nf, grad);
    for (int alpha = 0; alpha < n_alpha; ++alpha) {
        const CMat d = block_coordinate_derivative(blk, nf, alpha);
        const double ref = 2.0 * (d * m).trace().real();
        CHECK(grad[static_cast<std::size_t>(alpha)] == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_SUITE_END();
