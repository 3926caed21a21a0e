#include "doctest.h"

#include <numbers>

#include "pcsqcnn/encoding.hpp"
#include "pcsqcnn/layers.hpp"
#include "pcsqcnn/readout.hpp"

using namespace pcsqcnn;

TEST_SUITE_BEGIN("layers");

namespace {

StateTensor random_encoded(const RegisterLayout& layout, std::uint64_t seed) {
    const int n = layout.pixels_per_axis();
    ImageTensor img = make_image(n, n);
    rng::Stream s(seed, "image");
    for (double& v : img.pix) v = s.uniform();
    return encode_frqi(img, EncoderConfig{0.0, std::numbers::pi, layout.n_f});
}

// Reference junction operator: K_b = F_{N/2} P_b F_N^dag with
// P_b = sum_q |q><2q+b|.
CMat junction_oracle(int n, int b) {
    CMat p = CMat::Zero(n / 2, n);
    for (int q = 0; q < n / 2; ++q) p(q, 2 * q + b) = 1.0;
    return qft_matrix(n / 2) * p * qft_matrix(n).adjoint();
}

// Junction matrix realized by the implementation: columns are the coarse
// branch-b components of junction(|k>).
CMat junction_impl(int n, int b) {
    CMat k = CMat::Zero(n / 2, n);
    for (int col = 0; col < n; ++col) {
        StateTensor s;
        s.axes = {{n, AxisKind::SpatialX, 0}};
        s.amp.assign(static_cast<std::size_t>(n), Complex(0.0, 0.0));
        s.amp[static_cast<std::size_t>(col)] = 1.0;
        s.norm2_target = 1.0;
        const StateTensor out = apply_reduced_junction(s, 0, 0);
        // axes: [condition sigma, coarse]
        for (int q = 0; q < n / 2; ++q) {
            k(q, col) = out.amp[static_cast<std::size_t>(b * (n / 2) + q)];
        }
    }
    return k;
}

}  // namespace

TEST_CASE("parameter shape follows the branch and mode schedule") {
    const MultiplexerParams p = zero_params(build_layout(5, 3, 2));
    CHECK(p.branches(1) == 1);
    CHECK(p.branches(2) == 4);
    CHECK(p.modes(1) == 1024);
    CHECK(p.modes(2) == 256);
    CHECK(p.modes(3) == 64);
    CHECK(p.total() == 36864);
    CHECK(p.index_of(2, 3, 255, 15) == p.layer_offset(3) - 1);
}

TEST_CASE("fourier round trip and Parseval") {
    const StateTensor s = random_encoded(build_layout(3, 1, 1), 3);
    const StateTensor f = apply_fourier(s, 0, false);
    CHECK(f.squared_norm() == doctest::Approx(s.squared_norm()).epsilon(1e-12));
    const StateTensor back = apply_fourier(f, 0, true);
    for (std::size_t i = 0; i < s.amp.size(); ++i) CHECK(std::abs(back.amp[i] - s.amp[i]) < 1e-12);
}

TEST_CASE("uniform axis transforms to the zero mode") {
    StateTensor s;
    s.axes = {{8, AxisKind::SpatialX, 0}};
    s.amp.assign(8, Complex(0.5, 0.0));
    s.norm2_target = 2.0;
    const StateTensor f = apply_fourier(s, 0, false);
    CHECK(std::abs(f.amp[0] - Complex(0.5 * std::sqrt(8.0), 0.0)) < 1e-12);
    for (int k = 1; k < 8; ++k) CHECK(std::abs(f.amp[static_cast<std::size_t>(k)]) < 1e-12);
}

TEST_CASE("zero parameters leave the state unchanged") {
    const RegisterLayout layout = build_layout(2, 1, 1);
    const LayerStack stack = make_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier);
    const StateTensor s = random_encoded(layout, 5);
    const StateTensor t = apply_multiplexer(s, stack, 1);
    for (std::size_t i = 0; i < s.amp.size(); ++i) CHECK(s.amp[i] == t.amp[i]);
}

TEST_CASE("multiplexer matches an independent dense reference") {
    // Q = 1, N = 2 per axis, n_f = 1: loop-based reference applies block
    // (kx, ky) to the feature fiber directly.
    const RegisterLayout layout = build_layout(1, 1, 1);
    LayerStack stack = make_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier);
    rng::Stream ps(8, "params");
    stack.params = random_params(layout, ps);
    const std::vector<LayerBlocks> blocks = build_blocks(stack);

    StateTensor s = random_encoded(layout, 9);
    const StateTensor out = apply_multiplexer(s, stack, 1, blocks[0]);
    for (int kx = 0; kx < 2; ++kx) {
        for (int ky = 0; ky < 2; ++ky) {
            const CMat& u = blocks[0].blocks[static_cast<std::size_t>(kx * 2 + ky)].unitary;
            CVec fiber(2);
            for (int f = 0; f < 2; ++f) fiber[f] = s.amp[static_cast<std::size_t>((kx * 2 + ky) * 2 + f)];
            const CVec ref = u * fiber;
            for (int f = 0; f < 2; ++f) {
                CHECK(std::abs(out.amp[static_cast<std::size_t>((kx * 2 + ky) * 2 + f)] - ref[f]) < 1e-13);
            }
        }
    }

    // support restricted to mode (0,0) is only touched by block (0,0)
    StateTensor delta = s;
    for (std::size_t i = 2; i < delta.amp.size(); ++i) delta.amp[i] = 0.0;
    delta.norm2_target = delta.squared_norm();
    const StateTensor dout = apply_multiplexer(delta, stack, 1, blocks[0]);
    const CMat& u00 = blocks[0].blocks[0].unitary;
    CVec fiber(2);
    fiber << delta.amp[0], delta.amp[1];
    const CVec ref = u00 * fiber;
    CHECK(std::abs(dout.amp[0] - ref[0]) < 1e-13);
    CHECK(std::abs(dout.amp[1] - ref[1]) < 1e-13);
    for (std::size_t i = 2; i < dout.amp.size(); ++i) CHECK(std::abs(dout.amp[i]) == 0.0);
}

TEST_CASE("conditioning selects the block of the most recent pooled pair") {
    // Hand-built state with condition axes: [x(2), y(2), f(2), c0(2), c1(2)].
    const RegisterLayout layout = build_layout(2, 2, 1);
    LayerStack stack = make_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier);
    rng::Stream ps(13, "params");
    stack.params = random_params(layout, ps);
    const std::vector<LayerBlocks> blocks = build_blocks(stack);

    StateTensor s;
    s.axes = {{2, AxisKind::SpatialX, 0}, {2, AxisKind::SpatialY, 0}, {2, AxisKind::Feature, 0},
              {2, AxisKind::Condition, 0}, {2, AxisKind::Condition, 1}};
    s.amp.assign(32, Complex(0.0, 0.0));
    rng::Stream as(14, "amp");
    for (Complex& c : s.amp) c = Complex(as.gauss(), as.gauss());
    s.norm2_target = s.squared_norm();

    const StateTensor out = apply_multiplexer(s, stack, 2, blocks[1]);
    // reference loop: flat = (((x*2+y)*2+f)*2+bx)*2+by
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            for (int bx = 0; bx < 2; ++bx) {
                for (int by = 0; by < 2; ++by) {
                    const int m = (bx << 1) | by;
                    const CMat& u =
                        blocks[1].blocks[static_cast<std::size_t>(m * 4 + x * 2 + y)].unitary;
                    CVec fiber(2);
                    for (int f = 0; f < 2; ++f) {
                        fiber[f] = s.amp[static_cast<std::size_t>((((x * 2 + y) * 2 + f) * 2 + bx) * 2 + by)];
                    }
                    const CVec ref = u * fiber;
                    for (int f = 0; f < 2; ++f) {
                        const std::size_t idx =
                            static_cast<std::size_t>((((x * 2 + y) * 2 + f) * 2 + bx) * 2 + by);
                        CHECK(std::abs(out.amp[idx] - ref[f]) < 1e-13);
                    }
                }
            }
        }
    }
}

TEST_CASE("junction branch amplitudes match the closed form on N = 4") {
    StateTensor s;
    s.axes = {{4, AxisKind::SpatialX, 0}};
    s.amp = {Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0)};  // mode k = 0
    s.norm2_target = 1.0;
    const StateTensor out = apply_reduced_junction(s, 0, 0);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(out.amp[0] - Complex(r, 0)) < 1e-14);  // b=0 coarse (r, 0)
    CHECK(std::abs(out.amp[1]) < 1e-14);
    CHECK(std::abs(out.amp[2] - Complex(r, 0)) < 1e-14);  // b=1 coarse (r, 0)
    CHECK(std::abs(out.amp[3]) < 1e-14);

    StateTensor s2 = s;
    s2.amp = {Complex(0, 0), Complex(0, 0), Complex(1, 0), Complex(0, 0)};  // k = 2 = 0 + N/2
    const StateTensor out2 = apply_reduced_junction(s2, 0, 0);
    CHECK(std::abs(out2.amp[0] - Complex(r, 0)) < 1e-14);
    CHECK(std::abs(out2.amp[2] - Complex(-r, 0)) < 1e-14);  // (-1)^b alias sign
}

TEST_CASE("junction equals F_{N/2} P_b F_N^dag and is complete") {
    for (int n : {4, 8, 16}) {
        CMat sum = CMat::Zero(n, n);
        for (int b = 0; b < 2; ++b) {
            const CMat impl = junction_impl(n, b);
            const CMat ref = junction_oracle(n, b);
            CHECK((impl - ref).norm() < 1e-12);
            CHECK((impl * impl.adjoint() - CMat::Identity(n / 2, n / 2)).norm() < 1e-12);
            sum += impl.adjoint() * impl;
        }
        CHECK((sum - CMat::Identity(n, n)).norm() < 1e-12);
    }
}

TEST_CASE("phase gradient factors into single-qubit Z rotations") {
    for (int n : {4, 8, 16}) {
        const int coarse = n / 2;
        const auto table = detail::phase_gradient_table(coarse, false);
        // product of Rz(pi / 2^{n-1-j}) over the coarse qubits, up to a
        // global phase
        const int n_qubits = static_cast<int>(std::log2(coarse));
        CMat g = CMat::Identity(1, 1);
        for (int j = n_qubits - 1; j >= 0; --j) {
            const double theta = std::numbers::pi / static_cast<double>(1 << (n_qubits - j));
            CMat rz(2, 2);
            rz << Complex(std::cos(theta / 2), -std::sin(theta / 2)), Complex(0, 0), Complex(0, 0),
                Complex(std::cos(theta / 2), std::sin(theta / 2));
            g = kron(g, rz);
        }
        const Complex global = table[0] / g(0, 0);
        for (int q = 0; q < coarse; ++q) {
            CHECK(std::abs(table[static_cast<std::size_t>(q)] - global * g(q, q)) < 1e-12);
        }
        CHECK(std::abs(std::abs(global) - 1.0) < 1e-14);
    }
}

TEST_CASE("explicit pooling is a pure reshape with the r = 2q + s split") {
    StateTensor s;
    s.axes = {{8, AxisKind::SpatialX, 0}};
    s.amp.assign(8, Complex(0.0, 0.0));
    s.amp[5] = 1.0;
    s.norm2_target = 1.0;
    const StateTensor out = apply_explicit_pooling(s, 0, 0);
    CHECK(out.squared_norm() == s.squared_norm());
    REQUIRE(out.axes.size() == 2);
    CHECK(out.axes[1].kind == AxisKind::Condition);
    CHECK(std::abs(out.amp[static_cast<std::size_t>(2 * 2 + 1)] - Complex(1.0, 0.0)) < 1e-15);
    const StateTensor out2 = apply_explicit_pooling(out, 0, 1);  // size 4 is still poolable
    CHECK_THROWS_AS(apply_explicit_pooling(out2, 0, 2), std::invalid_argument);  // size 2 is not
}

TEST_CASE("iqft-pool-qft composition equals the reduced junction") {
    const int n = 8;
    for (int b = 0; b < 2; ++b) {
        CMat composed = CMat::Zero(n / 2, n);
        const CMat fn_dag = qft_matrix(n).adjoint();
        const CMat fhalf = qft_matrix(n / 2);
        for (int col = 0; col < n; ++col) {
            // IQFT on the fine axis, explicit pooling, then QFT on the coarse
            StateTensor s;
            s.axes = {{n, AxisKind::SpatialX, 0}};
            s.amp.assign(static_cast<std::size_t>(n), Complex(0.0, 0.0));
            s.amp[static_cast<std::size_t>(col)] = 1.0;
            s.norm2_target = 1.0;
            StateTensor t = s;
            detail::apply_matrix_inplace(t, 0, fn_dag);
            t = apply_explicit_pooling(t, 0, 0);
            detail::apply_matrix_inplace(t, 0, fhalf);
            for (int q = 0; q < n / 2; ++q) {
                composed(q, col) = t.amp[static_cast<std::size_t>(q * 2 + b)];
            }
        }
        CHECK((composed - junction_impl(n, b)).norm() < 1e-12);
    }
}

TEST_CASE("rbc unitary is deterministic, unitary, and breaks equivariance") {
    const CMat r1 = build_rbc_unitary(99, 2);
    const CMat r2 = build_rbc_unitary(99, 2);
    CHECK((r1 - r2).norm() == 0.0);
    CHECK(unitarity_defect(r1) < 1e-12);

    int broken = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const CMat r = build_rbc_unitary(static_cast<std::uint64_t>(seed), 2);
        rng::Stream bs(static_cast<std::uint64_t>(seed), "rbc-blocks");
        CMat big = CMat::Zero(8, 8);
        for (int k = 0; k < 4; ++k) big.block(2 * k, 2 * k, 2, 2) = random_unitary(2, bs);
        const CMat rf = kron(r, CMat::Identity(2, 2));
        const CMat u = rf.adjoint() * big * rf;
        if (check_pcs_equivariance(u, 4, 1, 2) > 1e-3) ++broken;
    }
    CHECK(broken >= 95);
}

TEST_CASE("reduced and explicit pipelines agree on every readout") {
    for (const auto& [n_idx, q] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {3, 3}}) {
        const RegisterLayout layout = build_layout(n_idx, q, 1);
        LayerStack reduced = make_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier);
        rng::Stream ps(100 + static_cast<std::uint64_t>(n_idx * 10 + q), "params");
        reduced.params = random_params(layout, ps);
        LayerStack explicit_stack = reduced;
        explicit_stack.mode = PipelineMode::ExplicitPooling;

        const StateTensor enc = random_encoded(layout, 200 + static_cast<std::uint64_t>(n_idx));
        const ReadoutVector a = exact_readout(forward_quantum(reduced, enc), layout);
        const ReadoutVector b = exact_readout(forward_quantum(explicit_stack, enc), layout);
        REQUIRE(a.size() == b.size());
        for (std::int64_t i = 0; i < a.size(); ++i) {
            CHECK(a.p[static_cast<std::size_t>(i)] ==
                  doctest::Approx(b.p[static_cast<std::size_t>(i)]).epsilon(1e-10));
        }
    }
}

TEST_CASE("pipelines preserve the squared norm") {
    const RegisterLayout layout = build_layout(3, 2, 2);
    for (PipelineMode mode : {PipelineMode::ReducedJunction, PipelineMode::ExplicitPooling}) {
        LayerStack stack = make_stack(layout, mode, BasisKind::Fourier);
        rng::Stream ps(300, "params");
        stack.params = random_params(layout, ps);
        const StateTensor enc = random_encoded(layout, 301);
        const StateTensor out = forward_quantum(stack, enc);
        CHECK(out.squared_norm() == doctest::Approx(enc.squared_norm()).epsilon(1e-12));
        CHECK(out.total_qubits() == layout.n_tot());
    }
}

TEST_CASE("zero-parameter reduced pipeline equals the bare junction pipeline") {
    const RegisterLayout layout = build_layout(2, 2, 1);
    const LayerStack stack = make_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier);
    const StateTensor enc = random_encoded(layout, 400);
    const StateTensor full = forward_quantum(stack, enc);

    StateTensor bare = enc;
    bare = apply_fourier(bare, bare.find_axis(AxisKind::SpatialX), false);
    bare = apply_fourier(bare, bare.find_axis(AxisKind::SpatialY), false);
    bare = apply_reduced_junction(bare, bare.find_axis(AxisKind::SpatialX), 0);
    bare = apply_reduced_junction(bare, bare.find_axis(AxisKind::SpatialY), 1);
    bare = apply_fourier(bare, bare.find_axis(AxisKind::SpatialX), true);
    bare = apply_fourier(bare, bare.find_axis(AxisKind::SpatialY), true);

    const ReadoutVector a = exact_readout(full, layout);
    const ReadoutVector b = exact_readout(bare, layout);
    for (std::int64_t i = 0; i < a.size(); ++i) {
        CHECK(a.p[static_cast<std::size_t>(i)] ==
              doctest::Approx(b.p[static_cast<std::size_t>(i)]).epsilon(1e-12));
    }
}

TEST_CASE("translated inputs permute the Q = 1 readout spatially") {
    const RegisterLayout layout = build_layout(2, 1, 1);
    LayerStack stack = make_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier);
    rng::Stream ps(500, "params");
    stack.params = random_params(layout, ps);

    const int n = layout.pixels_per_axis();
    ImageTensor img = make_image(n, n);
    rng::Stream is(501, "img");
    for (double& v : img.pix) v = is.uniform();
    ImageTensor rolled = make_image(n, n);
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) rolled.at((u + 1) % n, v) = img.at(u, v);
    }
    const EncoderConfig cfg{0.0, std::numbers::pi, 1};
    const ReadoutVector p0 = exact_readout(forward_quantum(stack, encode_frqi(img, cfg)), layout);
    const ReadoutVector p1 = exact_readout(forward_quantum(stack, encode_frqi(rolled, cfg)), layout);
    const int df = layout.feature_dim();
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            for (int f = 0; f < df; ++f) {
                const std::size_t from = static_cast<std::size_t>((x * n + y) * df + f);
                const std::size_t to = static_cast<std::size_t>((((x + 1) % n) * n + y) * df + f);
                CHECK(p1.p[to] == doctest::Approx(p0.p[from]).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("junction and multiplexer reject malformed states") {
    StateTensor small;
    small.axes = {{2, AxisKind::SpatialX, 0}};
    small.amp = {Complex(1, 0), Complex(0, 0)};
    small.norm2_target = 1.0;
    CHECK_THROWS_AS(apply_reduced_junction(small, 0, 0), std::invalid_argument);

    // layer 2 without the condition axes of the first junction
    const RegisterLayout layout = build_layout(2, 2, 1);
    LayerStack stack = make_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier);
    StateTensor s;
    s.axes = {{2, AxisKind::SpatialX, 0}, {2, AxisKind::SpatialY, 0}, {2, AxisKind::Feature, 0}};
    s.amp.assign(8, Complex(1.0, 0.0));
    s.norm2_target = 8.0;
    CHECK_THROWS_AS(apply_multiplexer(s, stack, 2), std::invalid_argument);
}

TEST_CASE("random basis demands explicit pooling") {
    const RegisterLayout layout = build_layout(2, 2, 1);
    CHECK_THROWS_AS(make_stack(layout, PipelineMode::ReducedJunction, BasisKind::Random, 1),
                    std::invalid_argument);
    const LayerStack stack = make_stack(layout, PipelineMode::ExplicitPooling, BasisKind::Random, 1);
    const StateTensor enc = random_encoded(layout, 600);
    const StateTensor out = forward_quantum(stack, enc);
    CHECK(out.squared_norm() == doctest::Approx(enc.squared_norm()).epsilon(1e-12));
}

TEST_SUITE_END();
