#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "pcsqcnn/pauli.hpp"
#include "pcsqcnn/prng.hpp"
#include "pcsqcnn/state.hpp"
#include "pcsqcnn/symmetry.hpp"

namespace pcsqcnn {

enum class PipelineMode { ReducedJunction, ExplicitPooling };
enum class BasisKind { Fourier, Random };

// All trainable quantum coefficients, flat in canonical (layer, branch,
// mode, pauli) order. Modes are joint 2D Fourier indices k = kx * Ny + ky;
// branches for layer >= 2 are m = (bx << 1) | by over the most recently
// pooled (x, y) bit pair.
struct MultiplexerParams {
    RegisterLayout layout;
    std::vector<double> theta;

    int branches(int layer) const { return layer == 1 ? 1 : 4; }

    std::int64_t modes(int layer) const {
        return std::int64_t{1} << (2 * layout.active_width(layer));
    }

    std::int64_t layer_size(int layer) const {
        return static_cast<std::int64_t>(branches(layer)) * modes(layer) *
               pauli_count(layout.n_f);
    }

    std::int64_t layer_offset(int layer) const {
        std::int64_t off = 0;
        for (int l = 1; l < layer; ++l) off += layer_size(l);
        return off;
    }

    std::int64_t index_of(int layer, int branch, std::int64_t mode, int alpha) const {
        return layer_offset(layer) +
               (static_cast<std::int64_t>(branch) * modes(layer) + mode) *
                   pauli_count(layout.n_f) +
               alpha;
    }

    std::int64_t total() const { return layer_offset(layout.Q + 1); }
};

inline MultiplexerParams zero_params(const RegisterLayout& layout) {
    MultiplexerParams p{layout, {}};
    p.theta.assign(static_cast<std::size_t>(p.total()), 0.0);
    return p;
}

inline MultiplexerParams random_params(const RegisterLayout& layout, rng::Stream& stream) {
    MultiplexerParams p = zero_params(layout);
    for (double& t : p.theta) t = stream.uniform(0.0, 2.0 * std::numbers::pi);
    return p;
}

/// Fixed random spatial unitary for the random-basis control:
/// R = exp(iH) with H = sum over non-identity Pauli strings of standard
/// normal coefficients, drawn from the seeded stream. Deterministic per
/// seed; one R per layer, reused on both spatial axes.
inline CMat build_rbc_unitary(std::uint64_t seed, int n_active_qubits) {
    if (n_active_qubits < 1) throw std::invalid_argument("rbc: need at least one qubit");
    rng::Stream stream(seed, "rbc-generator", static_cast<std::uint64_t>(n_active_qubits));
    const int dim = 1 << n_active_qubits;
    const std::vector<CMat>& basis = pauli_basis(n_active_qubits);
    CMat h = CMat::Zero(dim, dim);
    for (int a = 1; a < pauli_count(n_active_qubits); ++a) {
        h += stream.gauss() * basis[a];
    }
    return expi_hermitian(h);
}

struct LayerStack {
    RegisterLayout layout;
    PipelineMode mode = PipelineMode::ReducedJunction;
    BasisKind basis = BasisKind::Fourier;
    std::uint64_t rbc_seed = 0;
    MultiplexerParams params;
    std::vector<CMat> basis_ops;  // per layer: QFT of active size, or R_l
};

inline LayerStack make_stack(const RegisterLayout& layout, PipelineMode mode, BasisKind basis,
                             std::uint64_t rbc_seed = 0) {
    if (basis == BasisKind::Random && mode != PipelineMode::ExplicitPooling) {
        throw std::invalid_argument("stack: the random-basis control uses explicit pooling");
    }
    LayerStack s{layout, mode, basis, rbc_seed, zero_params(layout), {}};
    s.basis_ops.reserve(static_cast<std::size_t>(layout.Q));
    for (int l = 1; l <= layout.Q; ++l) {
        const int nq = layout.active_width(l);
        s.basis_ops.push_back(basis == BasisKind::Fourier
                                  ? qft_matrix(1 << nq)
                                  : build_rbc_unitary(rbc_seed + static_cast<std::uint64_t>(l), nq));
    }
    return s;
}

// Prebuilt unitaries (and eigendecompositions) for every block of one
// layer, indexed branch-major: blocks[m * modes + k].
struct LayerBlocks {
    std::vector<PauliBlock> blocks;
};

inline std::vector<LayerBlocks> build_blocks(const LayerStack& stack) {
    const int p_blk = pauli_count(stack.layout.n_f);
    std::vector<LayerBlocks> out(static_cast<std::size_t>(stack.layout.Q));
    for (int l = 1; l <= stack.layout.Q; ++l) {
        const std::int64_t n_blocks = stack.params.branches(l) * stack.params.modes(l);
        LayerBlocks& lb = out[static_cast<std::size_t>(l - 1)];
        lb.blocks.reserve(static_cast<std::size_t>(n_blocks));
        const std::int64_t base = stack.params.layer_offset(l);
        for (std::int64_t b = 0; b < n_blocks; ++b) {
            lb.blocks.push_back(pauli_block_full(
                std::span<const double>(stack.params.theta.data() + base + b * p_blk,
                                        static_cast<std::size_t>(p_blk)),
                stack.layout.n_f));
        }
    }
    return out;
}

/// QFT (or its adjoint) contracted on one spatial axis at its active size.
inline StateTensor apply_fourier(const StateTensor& state, int axis_index, bool inverse) {
    detail::check_axis_index(state, axis_index);
    const CMat f = qft_matrix(state.axes[axis_index].size);
    StateTensor out = state;
    detail::apply_matrix_inplace(out, axis_index, inverse ? CMat(f.adjoint()) : f);
    return out;
}

namespace detail {

struct MuxAxes {
    int x = -1, y = -1, f = -1;
    int cond_x = -1, cond_y = -1;  // most recent pooled pair, -1 when layer == 1
};

inline MuxAxes locate_mux_axes(const StateTensor& s, int layer) {
    MuxAxes ax;
    ax.x = s.find_axis(AxisKind::SpatialX);
    ax.y = s.find_axis(AxisKind::SpatialY);
    ax.f = s.find_axis(AxisKind::Feature);
    if (ax.x < 0 || ax.y < 0 || ax.f < 0) {
        throw std::invalid_argument("multiplexer: state is missing a required axis");
    }
    if (layer >= 2) {
        // condition on the most recently pooled pair only
        ax.cond_x = s.find_condition(2 * (layer - 2));
        ax.cond_y = s.find_condition(2 * (layer - 2) + 1);
        if (ax.cond_x < 0 || ax.cond_y < 0) {
            throw std::invalid_argument("multiplexer: missing condition axes for this layer");
        }
    }
    return ax;
}

// Walk all feature fibers; cb(base_offset, block_index) with base the flat
// offset of the fiber start and block_index = m * modes + kx * Ny + ky.
template <typename Fn>
inline void for_each_feature_fiber(const StateTensor& s, const MuxAxes& ax, std::int64_t modes,
                                   Fn&& cb) {
    const int n_axes = static_cast<int>(s.axes.size());
    std::vector<std::int64_t> strides(n_axes);
    for (int i = 0; i < n_axes; ++i) strides[i] = s.stride(i);
    const std::int64_t ny = s.axes[ax.y].size;
    std::vector<int> idx(n_axes, 0);
    std::int64_t base = 0;
    const std::int64_t fibers = s.size() / s.axes[ax.f].size;
    for (std::int64_t count = 0;; ++count) {
        const std::int64_t kx = idx[ax.x];
        const std::int64_t ky = idx[ax.y];
        std::int64_t m = 0;
        if (ax.cond_x >= 0) m = (static_cast<std::int64_t>(idx[ax.cond_x]) << 1) | idx[ax.cond_y];
        cb(base, m * modes + kx * ny + ky);
        // odometer over all axes but the feature axis
        int d = n_axes - 1;
        for (;; --d) {
            if (d < 0) {
                if (count + 1 != fibers) throw std::logic_error("fiber walk mismatch");
                return;
            }
            if (d == ax.f) continue;
            ++idx[d];
            base += strides[d];
            if (idx[d] < s.axes[d].size) break;
            base -= static_cast<std::int64_t>(idx[d]) * strides[d];
            idx[d] = 0;
        }
    }
}

}  // namespace detail

/// Deferred-conditioning multiplexer: for each joint Fourier mode pair and
/// each value m of the most recently pooled condition pair, applies the
/// matching feature block. adjoint = true applies the inverse blocks (for
/// reverse-mode sweeps).
inline StateTensor apply_multiplexer(const StateTensor& state, const LayerStack& stack, int layer,
                                     const LayerBlocks& blocks, bool adjoint = false) {
    const detail::MuxAxes ax = detail::locate_mux_axes(state, layer);
    const std::int64_t modes = stack.params.modes(layer);
    const int df = stack.layout.feature_dim();
    if (state.axes[ax.x].size != stack.layout.active_dim(layer) ||
        state.axes[ax.y].size != stack.layout.active_dim(layer) ||
        state.axes[ax.f].size != df) {
        throw std::invalid_argument("multiplexer: state axes do not match layer dimensions");
    }
    if (static_cast<std::int64_t>(blocks.blocks.size()) !=
        modes * stack.params.branches(layer)) {
        throw std::invalid_argument("multiplexer: parameter shape mismatch");
    }
    StateTensor out = state;
    const std::int64_t fs = state.stride(ax.f);
    std::vector<Complex> fiber(df);
    detail::for_each_feature_fiber(state, ax, modes, [&](std::int64_t base, std::int64_t block) {
        const CMat& u = blocks.blocks[static_cast<std::size_t>(block)].unitary;
        Complex* p = out.amp.data() + base;
        for (int j = 0; j < df; ++j) fiber[j] = p[j * fs];
        for (int i = 0; i < df; ++i) {
            Complex acc(0.0, 0.0);
            if (adjoint) {
                for (int j = 0; j < df; ++j) acc += std::conj(u(j, i)) * fiber[j];
            } else {
                for (int j = 0; j < df; ++j) acc += u(i, j) * fiber[j];
            }
            p[i * fs] = acc;
        }
    });
    return out;
}

/// Convenience form matching the parameter container directly.
inline StateTensor apply_multiplexer(const StateTensor& state, const LayerStack& stack,
                                     int layer) {
    const int p_blk = pauli_count(stack.layout.n_f);
    LayerBlocks lb;
    const std::int64_t n_blocks = stack.params.branches(layer) * stack.params.modes(layer);
    const std::int64_t base = stack.params.layer_offset(layer);
    lb.blocks.reserve(static_cast<std::size_t>(n_blocks));
    for (std::int64_t b = 0; b < n_blocks; ++b) {
        lb.blocks.push_back(pauli_block_full(
            std::span<const double>(stack.params.theta.data() + base + b * p_blk,
                                    static_cast<std::size_t>(p_blk)),
            stack.layout.n_f));
    }
    return apply_multiplexer(state, stack, layer, lb);
}

namespace detail {

inline std::vector<Complex> phase_gradient_table(int coarse_dim, bool inverse) {
    // G|q> = exp(+2*pi*i*q/N) |q> on the coarse register, N = 2 * coarse_dim.
    std::vector<Complex> ph(static_cast<std::size_t>(coarse_dim));
    const double w = (inverse ? -2.0 : 2.0) * std::numbers::pi / (2.0 * coarse_dim);
    for (int q = 0; q < coarse_dim; ++q) {
        ph[static_cast<std::size_t>(q)] = Complex(std::cos(w * q), std::sin(w * q));
    }
    return ph;
}

inline CMat hadamard2() {
    CMat h(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    h << r, r, r, -r;
    return h;
}

}  // namespace detail

/// Reduced Fourier junction on one spatial axis held in Fourier ordering:
/// split the alias selector (k = q + sigma*N/2), Hadamard it, apply the
/// conditional phase gradient G on the sigma = 1 branch, and keep sigma as
/// a condition axis (deferred measurement). The coarse axis stays in
/// Fourier ordering for the next layer.
inline StateTensor apply_reduced_junction(const StateTensor& state, int axis_index,
                                          int condition_tag) {
    detail::check_axis_index(state, axis_index);
    if (state.axes[axis_index].size < 4) {
        throw std::invalid_argument("junction: active axis size must be >= 4");
    }
    StateTensor out = state;
    const int sigma = detail::split_axis_inplace(out, axis_index, BitPos::Msb);
    const int coarse = sigma + 1;
    detail::apply_matrix_inplace(out, sigma, detail::hadamard2());
    const auto phases = detail::phase_gradient_table(out.axes[coarse].size, false);
    detail::apply_controlled_phase_inplace(out, sigma, coarse, phases);
    out.axes[sigma].kind = AxisKind::Condition;
    out.axes[sigma].tag = condition_tag;
    return out;
}

/// Explicit pooling on one spatial axis in computational ordering: split
/// the least-significant bit (r = 2q + s) and keep it as a condition axis.
/// Pure reshape; amplitudes unchanged.
inline StateTensor apply_explicit_pooling(const StateTensor& state, int axis_index,
                                          int condition_tag) {
    detail::check_axis_index(state, axis_index);
    if (state.axes[axis_index].size < 4) {
        throw std::invalid_argument("pooling: active axis size must be >= 4");
    }
    StateTensor out = state;
    const int bit = detail::split_axis_inplace(out, axis_index, BitPos::Lsb);
    out.axes[bit].kind = AxisKind::Condition;
    out.axes[bit].tag = condition_tag;
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline program: one shared step list drives the forward map and the
// reverse-mode sweep so the two can never fall out of sync.

enum class StepKind { Basis, Multiplexer, ReducedJunction, PoolSplit };

struct PipelineStep {
    StepKind kind;
    AxisKind axis;   // Basis/junction/pool target
    int layer;       // multiplexer layer, or layer whose basis op applies
    bool inverse;    // Basis direction
    int cond_tag;    // junction/pool condition tag
};

inline std::vector<PipelineStep> build_program(const LayerStack& stack) {
    std::vector<PipelineStep> steps;
    const int q = stack.layout.Q;
    if (stack.mode == PipelineMode::ReducedJunction) {
        if (stack.basis != BasisKind::Fourier) {
            throw std::invalid_argument("program: reduced junctions require the Fourier basis");
        }
        steps.push_back({StepKind::Basis, AxisKind::SpatialX, 1, false, 0});
        steps.push_back({StepKind::Basis, AxisKind::SpatialY, 1, false, 0});
        for (int l = 1; l <= q; ++l) {
            steps.push_back({StepKind::Multiplexer, AxisKind::Feature, l, false, 0});
            if (l < q) {
                const auto [tag_x, tag_y] = stack.layout.condition_pair(l);
                steps.push_back({StepKind::ReducedJunction, AxisKind::SpatialX, l, false, tag_x});
                steps.push_back({StepKind::ReducedJunction, AxisKind::SpatialY, l, false, tag_y});
            }
        }
        steps.push_back({StepKind::Basis, AxisKind::SpatialX, q, true, 0});
        steps.push_back({StepKind::Basis, AxisKind::SpatialY, q, true, 0});
    } else {
        for (int l = 1; l <= q; ++l) {
            steps.push_back({StepKind::Basis, AxisKind::SpatialX, l, false, 0});
            steps.push_back({StepKind::Basis, AxisKind::SpatialY, l, false, 0});
            steps.push_back({StepKind::Multiplexer, AxisKind::Feature, l, false, 0});
            steps.push_back({StepKind::Basis, AxisKind::SpatialX, l, true, 0});
            steps.push_back({StepKind::Basis, AxisKind::SpatialY, l, true, 0});
            if (l < q) {
                const auto [tag_x, tag_y] = stack.layout.condition_pair(l);
                steps.push_back({StepKind::PoolSplit, AxisKind::SpatialX, l, false, tag_x});
                steps.push_back({StepKind::PoolSplit, AxisKind::SpatialY, l, false, tag_y});
            }
        }
    }
    return steps;
}

struct ForwardTrace {
    std::vector<StateTensor> mux_inputs;  // state entering each multiplexer
    StateTensor final_state;
};

namespace detail {

inline void run_step_forward(StateTensor& s, const LayerStack& stack,
                             const std::vector<LayerBlocks>& blocks, const PipelineStep& step,
                             ForwardTrace* trace) {
    switch (step.kind) {
        case StepKind::Basis: {
            const int axis = s.find_axis(step.axis);
            const CMat& op = stack.basis_ops[static_cast<std::size_t>(step.layer - 1)];
            apply_matrix_inplace(s, axis, step.inverse ? CMat(op.adjoint()) : op);
            break;
        }
        case StepKind::Multiplexer: {
            if (trace) trace->mux_inputs.push_back(s);
            s = apply_multiplexer(s, stack, step.layer,
                                  blocks[static_cast<std::size_t>(step.layer - 1)]);
            break;
        }
        case StepKind::ReducedJunction:
            s = apply_reduced_junction(s, s.find_axis(step.axis), step.cond_tag);
            break;
        case StepKind::PoolSplit:
            s = apply_explicit_pooling(s, s.find_axis(step.axis), step.cond_tag);
            break;
    }
}

}  // namespace detail

inline ForwardTrace forward_quantum_traced(const LayerStack& stack,
                                           const std::vector<LayerBlocks>& blocks,
                                           const StateTensor& encoded, bool keep_trace) {
    const int n = stack.layout.pixels_per_axis();
    const int xi = encoded.find_axis(AxisKind::SpatialX);
    const int yi = encoded.find_axis(AxisKind::SpatialY);
    const int fi = encoded.find_axis(AxisKind::Feature);
    if (xi < 0 || yi < 0 || fi < 0 || encoded.axes[xi].size != n ||
        encoded.axes[yi].size != n ||
        encoded.axes[fi].size != stack.layout.feature_dim()) {
        throw std::invalid_argument("forward: encoded state does not match the layout");
    }
    ForwardTrace trace;
    StateTensor s = encoded;
    for (const PipelineStep& step : build_program(stack)) {
        detail::run_step_forward(s, stack, blocks, step, keep_trace ? &trace : nullptr);
    }
    trace.final_state = std::move(s);
    return trace;
}

inline StateTensor forward_quantum(const LayerStack& stack, const StateTensor& encoded) {
    const std::vector<LayerBlocks> blocks = build_blocks(stack);
    return forward_quantum_traced(stack, blocks, encoded, false).final_state;
}

}  // namespace pcsqcnn
