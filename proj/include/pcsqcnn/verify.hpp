#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pcsqcnn/dataset.hpp"
#include "pcsqcnn/diagnostics.hpp"
#include "pcsqcnn/io.hpp"
#include "pcsqcnn/train.hpp"

namespace pcsqcnn {

struct VerifyCheck {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed() const {
        for (const VerifyCheck& c : checks) {
            if (!c.passed) return false;
        }
        return true;
    }
};

namespace verify_detail {

struct Ctx {
    std::uint64_t seed = 20240805;
    int threads = 0;
};

inline StateTensor random_encoded(const RegisterLayout& layout, std::uint64_t seed) {
    const int n = layout.pixels_per_axis();
    ImageTensor img = make_image(n, n);
    rng::Stream s(seed, "verify-image");
    for (double& v : img.pix) v = s.uniform();
    return encode_frqi(img, EncoderConfig{0.0, std::numbers::pi, layout.n_f});
}

inline LayerStack random_stack(const RegisterLayout& layout, PipelineMode mode, BasisKind basis,
                               std::uint64_t seed) {
    LayerStack stack = make_stack(layout, mode, basis, seed);
    rng::Stream ps(seed, "verify-params");
    stack.params = random_params(layout, ps);
    return stack;
}

inline bool check_state_core(const Ctx& ctx, std::string& detail) {
    // norm preservation, linearity, and axis bookkeeping on random pipelines
    double worst_norm = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const RegisterLayout layout = build_layout(3, 2, 1);
        const LayerStack stack =
            random_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier,
                         ctx.seed + static_cast<std::uint64_t>(trial));
        const StateTensor enc = random_encoded(layout, ctx.seed + 100 + static_cast<std::uint64_t>(trial));
        const StateTensor out = forward_quantum(stack, enc);
        worst_norm = std::max(worst_norm,
                              std::abs(out.squared_norm() - enc.squared_norm()) / enc.squared_norm());
        if (out.total_qubits() != layout.n_tot()) {
            detail = "axis bookkeeping lost qubits";
            return false;
        }
    }
    rng::Stream st(ctx.seed, "verify-linear");
    StateTensor a = random_encoded(build_layout(2, 1, 1), ctx.seed + 7);
    StateTensor b = a;
    for (Complex& c : b.amp) c = Complex(st.gauss(), st.gauss());
    const Complex ca(0.4, -0.2), cb(0.9, 0.3);
    StateTensor mix = a;
    for (std::size_t i = 0; i < mix.amp.size(); ++i) mix.amp[i] = ca * a.amp[i] + cb * b.amp[i];
    const CMat u = random_unitary(4, st);
    const StateTensor lhs = apply_operator(mix, u, 0);
    const StateTensor ra = apply_operator(a, u, 0);
    const StateTensor rb = apply_operator(b, u, 0);
    double worst_lin = 0.0;
    for (std::size_t i = 0; i < lhs.amp.size(); ++i) {
        worst_lin = std::max(worst_lin, std::abs(lhs.amp[i] - (ca * ra.amp[i] + cb * rb.amp[i])));
    }
    std::ostringstream os;
    os << "norm drift " << worst_norm << ", linearity defect " << worst_lin;
    detail = os.str();
    return worst_norm <= 1e-12 && worst_lin <= 1e-12;
}

inline bool check_encoding(const Ctx& ctx, std::string& detail) {
    for (int n : {2, 4, 8}) {
        ImageTensor img = make_image(n, n);
        rng::Stream st(ctx.seed, "verify-enc", static_cast<std::uint64_t>(n));
        for (double& v : img.pix) v = st.uniform();
        const EncoderConfig cfg{0.0, std::numbers::pi, 2};
        const StateTensor s = encode_frqi(img, cfg);
        if (std::abs(s.squared_norm() - n * n) > 1e-12 * n * n) {
            detail = "squared norm differs from pixel count";
            return false;
        }
        // shift intertwining
        ImageTensor rolled = make_image(n, n);
        for (int u = 0; u < n; ++u) {
            for (int v = 0; v < n; ++v) rolled.at((u + 1) % n, v) = img.at(u, v);
        }
        const StateTensor lhs = encode_frqi(rolled, cfg);
        const StateTensor rhs = apply_operator(s, shift_matrix(n), 0);
        for (std::size_t i = 0; i < lhs.amp.size(); ++i) {
            if (std::abs(lhs.amp[i] - rhs.amp[i]) > 1e-13) {
                detail = "encode does not intertwine pixel rolls with T_x";
                return false;
            }
        }
        // auxiliary feature qubits stay |0>
        for (std::size_t i = 0; i < s.amp.size(); ++i) {
            if ((i % 4) >= 2 && std::abs(s.amp[i]) != 0.0) {
                detail = "auxiliary feature qubit populated";
                return false;
            }
        }
    }
    detail = "norm, shift intertwining, aux qubits on N in {2,4,8}";
    return true;
}

inline bool check_symmetry_operators(const Ctx&, std::string& detail) {
    for (int n : {2, 4, 8, 16, 32}) {
        const CMat t = shift_matrix(n);
        CMat acc = CMat::Identity(n, n);
        for (int i = 0; i < n; ++i) acc = t * acc;
        if ((acc - CMat::Identity(n, n)).norm() != 0.0) {
            detail = "T^N != I";
            return false;
        }
        const CMat f = qft_matrix(n);
        if (unitarity_defect(f) > 1e-12) {
            detail = "QFT not unitary";
            return false;
        }
        const CMat d = f * t * f.adjoint();
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j && std::abs(d(i, j)) > 1e-12) {
                    detail = "F T F^dag not diagonal";
                    return false;
                }
            }
        }
    }
    for (int l : {2, 3, 4}) {
        const CMat s = qubit_cycle_matrix(l);
        CMat acc = CMat::Identity(1 << l, 1 << l);
        for (int i = 0; i < l; ++i) acc = s * acc;
        if ((acc - CMat::Identity(1 << l, 1 << l)).norm() != 0.0) {
            detail = "S^L != I";
            return false;
        }
    }
    detail = "T periodicity, S periodicity, QFT diagonalization, N up to 32";
    return true;
}

inline bool check_commutant(const Ctx& ctx, std::string& detail) {
    const int dim = pcs_commutant_dimension(4, 2);
    if (dim != 16) {
        detail = "commutant dimension " + std::to_string(dim) + " != 16";
        return false;
    }
    rng::Stream s(ctx.seed, "verify-blocks");
    std::vector<CMat> blocks;
    for (int k = 0; k < 8; ++k) blocks.push_back(random_unitary(2, s));
    const CMat u = build_pcs_unitary(blocks, 8, 1);
    const std::vector<CMat> back = extract_blocks(u, 8, 1, 2);
    double worst = 0.0;
    for (int k = 0; k < 8; ++k) worst = std::max(worst, (back[static_cast<std::size_t>(k)] - blocks[static_cast<std::size_t>(k)]).norm());
    std::ostringstream os;
    os << "null-space dim 16, round-trip defect " << worst;
    detail = os.str();
    return worst <= 1e-12;
}

inline bool check_layer_equivariance(const Ctx& ctx, std::string& detail) {
    double worst = 0.0;
    for (int n_idx : {1, 2, 3}) {
        for (int nf : {1, 2}) {
            const int n = 1 << n_idx;
            const int df = 1 << nf;
            rng::Stream ps(ctx.seed, "verify-equiv",
                           static_cast<std::uint64_t>(n_idx * 10 + nf));
            std::vector<CMat> blocks;
            for (int k = 0; k < n * n; ++k) {
                std::vector<double> theta(static_cast<std::size_t>(pauli_count(nf)));
                for (double& t : theta) t = ps.uniform(0.0, 2.0 * std::numbers::pi);
                blocks.push_back(pauli_block(theta, nf));
            }
            const CMat u = build_pcs_unitary(blocks, n, n);
            worst = std::max(worst, check_pcs_equivariance(u, n, n, df));
        }
    }
    int broken = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const CMat r = build_rbc_unitary(static_cast<std::uint64_t>(seed), 2);
        rng::Stream bs(static_cast<std::uint64_t>(seed), "verify-rbc-blocks");
        CMat big = CMat::Zero(8, 8);
        for (int k = 0; k < 4; ++k) big.block(2 * k, 2 * k, 2, 2) = random_unitary(2, bs);
        const CMat rf = kron(r, CMat::Identity(2, 2));
        if (check_pcs_equivariance(rf.adjoint() * big * rf, 4, 1, 2) > 1e-3) ++broken;
    }
    std::ostringstream os;
    os << "max commutator " << worst << ", rbc broken " << broken << "/100";
    detail = os.str();
    return worst <= 1e-10 && broken >= 95;
}

inline bool check_junction(const Ctx&, std::string& detail) {
    double worst = 0.0;
    for (int n : {4, 8, 16}) {
        CMat sum = CMat::Zero(n, n);
        for (int b = 0; b < 2; ++b) {
            CMat p = CMat::Zero(n / 2, n);
            for (int q = 0; q < n / 2; ++q) p(q, 2 * q + b) = 1.0;
            const CMat oracle = qft_matrix(n / 2) * p * qft_matrix(n).adjoint();
            CMat impl = CMat::Zero(n / 2, n);
            for (int col = 0; col < n; ++col) {
                StateTensor s;
                s.axes = {{n, AxisKind::SpatialX, 0}};
                s.amp.assign(static_cast<std::size_t>(n), Complex(0.0, 0.0));
                s.amp[static_cast<std::size_t>(col)] = 1.0;
                s.norm2_target = 1.0;
                const StateTensor out = apply_reduced_junction(s, 0, 0);
                for (int q = 0; q < n / 2; ++q) {
                    impl(q, col) = out.amp[static_cast<std::size_t>(b * (n / 2) + q)];
                }
            }
            worst = std::max(worst, (impl - oracle).norm());
            sum += impl.adjoint() * impl;
            worst = std::max(worst, (impl * impl.adjoint() - CMat::Identity(n / 2, n / 2)).norm());
        }
        worst = std::max(worst, (sum - CMat::Identity(n, n)).norm());
        // G factorization against the Z-rotation product, up to global phase
        const auto table = detail::phase_gradient_table(n / 2, false);
        const int n_qubits = static_cast<int>(std::log2(n / 2));
        CMat g = CMat::Identity(1, 1);
        for (int j = n_qubits - 1; j >= 0; --j) {
            const double theta = std::numbers::pi / static_cast<double>(1 << (n_qubits - j));
            CMat rz(2, 2);
            rz << Complex(std::cos(theta / 2), -std::sin(theta / 2)), Complex(0, 0), Complex(0, 0),
                Complex(std::cos(theta / 2), std::sin(theta / 2));
            g = kron(g, rz);
        }
        const Complex global = table[0] / g(0, 0);
        for (int q = 0; q < n / 2; ++q) {
            worst = std::max(worst,
                             std::abs(table[static_cast<std::size_t>(q)] - global * g(q, q)));
        }
    }
    std::ostringstream os;
    os << "max junction defect " << worst << " over N in {4,8,16}";
    detail = os.str();
    return worst <= 1e-12;
}

inline bool check_mode_equivalence(const Ctx& ctx, std::string& detail) {
    double worst = 0.0;
    for (const auto& [n_idx, q] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {3, 3}}) {
        const RegisterLayout layout = build_layout(n_idx, q, 1);
        LayerStack reduced = random_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier,
                                          ctx.seed + static_cast<std::uint64_t>(10 * n_idx + q));
        LayerStack exp_stack = reduced;
        exp_stack.mode = PipelineMode::ExplicitPooling;
        const StateTensor enc = random_encoded(layout, ctx.seed + 500 + static_cast<std::uint64_t>(n_idx));
        const ReadoutVector a = exact_readout(forward_quantum(reduced, enc), layout);
        const ReadoutVector b = exact_readout(forward_quantum(exp_stack, enc), layout);
        for (std::int64_t i = 0; i < a.size(); ++i) {
            worst = std::max(worst, std::abs(a.p[static_cast<std::size_t>(i)] -
                                             b.p[static_cast<std::size_t>(i)]));
        }
    }
    std::ostringstream os;
    os << "max readout gap " << worst;
    detail = os.str();
    return worst <= 1e-10;
}

inline bool check_parameter_count(const Ctx&, std::string& detail) {
    struct Row {
        int n_idx, q, nf;
        std::int64_t quantum, head;
    };
    const std::vector<Row> rows = {
        {5, 1, 1, 4096, 20490},  {5, 3, 2, 36864, 2570}, {5, 3, 3, 147456, 5130},
        {4, 1, 3, 16384, 20490}, {1, 1, 1, 16, 90},
    };
    for (const Row& r : rows) {
        const ParamAccounting acc = count_parameters(build_layout(r.n_idx, r.q, r.nf));
        if (acc.quantum != r.quantum || acc.head != r.head ||
            acc.quantum != acc.quantum_closed_form) {
            detail = "accounting mismatch at n_idx=" + std::to_string(r.n_idx);
            return false;
        }
        const MultiplexerParams params = zero_params(build_layout(r.n_idx, r.q, r.nf));
        if (params.total() != r.quantum) {
            detail = "constructed stack disagrees with the accounting";
            return false;
        }
    }
    detail = "published rows and closed form agree";
    return true;
}

inline bool check_readout(const Ctx& ctx, std::string& detail) {
    const RegisterLayout layout = build_layout(3, 2, 1);
    const LayerStack stack =
        random_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier, ctx.seed + 31);
    const StateTensor enc = random_encoded(layout, ctx.seed + 32);
    const ReadoutVector p = exact_readout(forward_quantum(stack, enc), layout);
    double sum = 0.0;
    for (double v : p.p) {
        if (v < 0.0) {
            detail = "negative probability";
            return false;
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        detail = "readout sum " + std::to_string(sum);
        return false;
    }
    // shot histograms: multiples of 1/n, sum one, entropy ceiling
    for (int budget : {16, 128}) {
        const ReadoutVector hat = sample_shots(p, ShotConfig{budget, ctx.seed, 0});
        double hsum = 0.0;
        for (double v : hat.p) {
            const double scaled = v * budget;
            if (std::abs(scaled - std::round(scaled)) > 1e-9) {
                detail = "histogram entry not a multiple of 1/n_shot";
                return false;
            }
            hsum += v;
        }
        if (std::abs(hsum - 1.0) > 1e-12) {
            detail = "histogram does not sum to one";
            return false;
        }
        if (readout_entropy(hat) > std::log2(static_cast<double>(budget)) + 1e-12) {
            detail = "entropy above the shot ceiling";
            return false;
        }
    }
    detail = "normalization, histogram arithmetic, entropy ceilings";
    return true;
}

inline bool check_head(const Ctx& ctx, std::string& detail) {
    double worst_sum = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        rng::Stream s(ctx.seed + static_cast<std::uint64_t>(trial), "verify-head");
        const HeadParams h = init_head(16, 10, s);
        std::vector<double> p(16);
        double sum = 0.0;
        for (double& v : p) {
            v = s.uniform();
            sum += v;
        }
        for (double& v : p) v /= sum;
        const int label = static_cast<int>(s.below(10));
        const HeadGradient g = head_gradient(p, h, label);
        double qs = 0.0;
        for (double v : g.q) {
            if (v <= 0.0) {
                detail = "softmax output not strictly positive";
                return false;
            }
            qs += v;
        }
        worst_sum = std::max(worst_sum, std::abs(qs - 1.0));
        double dp_sq = 0.0;
        for (double v : g.dp) dp_sq += v * v;
        const double op = head_operator_norm(h);
        if (dp_sq > 2.0 * op * op + 1e-12) {
            detail = "softmax-head gradient bound violated";
            return false;
        }
    }
    std::ostringstream os;
    os << "softmax normalization defect " << worst_sum << ", gradient bound on 50 draws";
    detail = os.str();
    return worst_sum <= 1e-12;
}

inline bool check_gradients(const Ctx& ctx, std::string& detail) {
    double worst = 0.0;
    int instance = 0;
    for (int q : {1, 2}) {
        for (int nf : {1, 2}) {
            const RegisterLayout layout = build_layout(2, q, nf);
            const LayerStack stack =
                random_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier,
                             ctx.seed + static_cast<std::uint64_t>(instance));
            rng::Stream hs(ctx.seed + 60 + static_cast<std::uint64_t>(instance), "verify-head");
            const HeadParams head = init_head(static_cast<int>(layout.readout_dim()), 10, hs);
            const StateTensor enc =
                random_encoded(layout, ctx.seed + 70 + static_cast<std::uint64_t>(instance));
            const int label = instance % 10;
            const std::vector<LayerBlocks> blocks = build_blocks(stack);
            const SampleGradient sg = grad_quantum(stack, blocks, head, enc, label);
            rng::Stream cs(ctx.seed + 80 + static_cast<std::uint64_t>(instance), "verify-coords");
            for (int k = 0; k < 5; ++k) {
                const std::int64_t coord = static_cast<std::int64_t>(
                    cs.below(static_cast<std::uint64_t>(stack.params.total())));
                LayerStack pert = stack;
                const double h = 1e-5;
                pert.params.theta[static_cast<std::size_t>(coord)] += h;
                const double lp =
                    eval_sample(pert, build_blocks(pert), head, enc, label).loss;
                pert.params.theta[static_cast<std::size_t>(coord)] -= 2.0 * h;
                const double lm =
                    eval_sample(pert, build_blocks(pert), head, enc, label).loss;
                const double fd = (lp - lm) / (2.0 * h);
                const double an = sg.g[static_cast<std::size_t>(coord)];
                const double rel = std::abs(an - fd) /
                                   std::max({std::abs(an), std::abs(fd), 1e-3});
                worst = std::max(worst, rel);
            }
            ++instance;
        }
    }
    std::ostringstream os;
    os << "worst relative FD error " << worst;
    detail = os.str();
    return worst <= 1e-6;
}

inline bool check_bounds(const Ctx& ctx, std::string& detail) {
    const BoundReport rep = check_sensitivity_bounds(build_layout(2, 2, 1), 10, ctx.seed, 10,
                                                     ctx.threads);
    std::ostringstream os;
    os << "layer energy " << rep.max_layer_energy << " <= " << rep.layer_energy_bound
       << ", mean |G_Q|^2 " << rep.mean_grad_sq << " <= " << rep.grad_sq_bound;
    detail = os.str();
    return rep.layer_energy_ok && rep.grad_sq_ok;
}

inline bool check_training_determinism(const Ctx& ctx, std::string& detail) {
    DatasetSpec spec;
    spec.source = DatasetSpec::Source::Synthetic;
    spec.regime = DatasetSpec::Regime::Translated;
    spec.synth_train_per_class = 3;
    spec.synth_test_per_class = 1;
    spec.per_class_cap = 3;
    spec.resize = 4;
    spec.canvas = 4;
    spec.max_offset = 0;
    spec.seed = ctx.seed;
    const Benchmark bench = build_benchmark(spec);
    const EncoderConfig enc{0.0, std::numbers::pi, 1};
    auto run = [&](double lr, int threads) {
        const RegisterLayout layout = build_layout(2, 1, 1);
        LayerStack stack = make_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier);
        rng::Stream ps(ctx.seed, "verify-train");
        stack.params = random_params(layout, ps);
        rng::Stream hs(ctx.seed, "verify-train-head");
        HeadParams head = init_head(static_cast<int>(layout.readout_dim()), 10, hs);
        TrainConfig cfg;
        cfg.lr = lr;
        cfg.epochs = 2;
        cfg.batch = 16;
        cfg.seed = ctx.seed;
        cfg.threads = threads;
        cfg.eval_every = 100;
        train(stack, head, bench.train, bench.test, enc, cfg);
        return std::make_pair(stack.params.theta, head.w);
    };
    const auto base = run(0.0, 1);
    LayerStack ref = make_stack(build_layout(2, 1, 1), PipelineMode::ReducedJunction,
                                BasisKind::Fourier);
    rng::Stream ps(ctx.seed, "verify-train");
    ref.params = random_params(ref.layout, ps);
    if (base.first != ref.params.theta) {
        detail = "lr = 0 moved the quantum parameters";
        return false;
    }
    const auto a = run(3e-2, 1);
    const auto b = run(3e-2, 4);
    if (a.first != b.first || a.second != b.second) {
        detail = "training is thread-count dependent";
        return false;
    }
    detail = "lr=0 identity; thread counts 1 and 4 agree bitwise";
    return true;
}

inline bool check_io_roundtrip(const Ctx& ctx, std::string& detail) {
    Checkpoint ck;
    ck.layout = build_layout(2, 2, 1);
    ck.encoder = EncoderConfig{0.0, std::numbers::pi, 1};
    LayerStack stack = random_stack(ck.layout, PipelineMode::ReducedJunction, BasisKind::Fourier,
                                    ctx.seed + 3);
    ck.theta = stack.params.theta;
    rng::Stream hs(ctx.seed + 4, "verify-io");
    ck.head = init_head(static_cast<int>(ck.layout.readout_dim()), 10, hs);
    ck.seed = ctx.seed;
    const auto dir = std::filesystem::temp_directory_path() / "pcsqcnn_verify";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "ck.txt").string();
    save_checkpoint(ck, path);
    const Checkpoint back = load_checkpoint(path);
    if (back.theta != ck.theta || back.head.w != ck.head.w || back.head.b != ck.head.b) {
        detail = "checkpoint round trip not bitwise";
        return false;
    }
    // dataset determinism
    DatasetSpec spec;
    spec.source = DatasetSpec::Source::Synthetic;
    spec.synth_train_per_class = 4;
    spec.synth_test_per_class = 2;
    spec.per_class_cap = 4;
    spec.resize = 8;
    spec.canvas = 16;
    spec.max_offset = 4;
    spec.seed = ctx.seed;
    const Benchmark x = build_benchmark(spec);
    const Benchmark y = build_benchmark(spec);
    for (std::size_t i = 0; i < x.train.size(); ++i) {
        if (x.train.images[i].pix != y.train.images[i].pix) {
            detail = "dataset build not deterministic";
            return false;
        }
    }
    detail = "checkpoint bitwise round trip; dataset builds identical";
    return true;
}

}  // namespace verify_detail

/// The full property battery behind the `verify` subcommand.
inline VerifyReport run_verification(std::uint64_t seed = 20240805, int threads = 0) {
    verify_detail::Ctx ctx{seed, threads};
    using CheckFn = std::function<bool(const verify_detail::Ctx&, std::string&)>;
    const std::vector<std::pair<std::string, CheckFn>> checks = {
        {"state-core: norm, linearity, bookkeeping", verify_detail::check_state_core},
        {"encoding: norm, shift intertwining, aux qubits", verify_detail::check_encoding},
        {"symmetry: operator algebra and QFT diagonalization",
         verify_detail::check_symmetry_operators},
        {"symmetry: commutant dimension and block round trip", verify_detail::check_commutant},
        {"layers: PCS equivariance and the RBC control", verify_detail::check_layer_equivariance},
        {"layers: reduced junction closed form", verify_detail::check_junction},
        {"layers: reduced vs explicit pipelines", verify_detail::check_mode_equivalence},
        {"layers: parameter accounting", verify_detail::check_parameter_count},
        {"readout: normalization and shot histograms", verify_detail::check_readout},
        {"head: softmax and the gradient bound", verify_detail::check_head},
        {"gradients: analytic vs finite differences", verify_detail::check_gradients},
        {"gradients: sensitivity-energy bounds", verify_detail::check_bounds},
        {"training: lr=0 identity and thread invariance",
         verify_detail::check_training_determinism},
        {"io: checkpoint and dataset determinism", verify_detail::check_io_roundtrip},
    };
    VerifyReport report;
    for (const auto& [name, fn] : checks) {
        VerifyCheck out;
        out.name = name;
        const auto start = std::chrono::steady_clock::now();
        try {
            out.passed = fn(ctx, out.detail);
        } catch (const std::exception& e) {
            out.passed = false;
            out.detail = std::string("exception: ") + e.what();
        }
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.checks.push_back(std::move(out));
    }
    return report;
}

}  // namespace pcsqcnn
