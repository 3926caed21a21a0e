#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pcsqcnn/head.hpp"
#include "pcsqcnn/layers.hpp"
#include "pcsqcnn/readout.hpp"

namespace pcsqcnn {

// Flat gradient layout: quantum coefficients in canonical
// (layer, branch, mode, pauli) order, then W row-major, then b.
struct GradientLayout {
    std::int64_t quantum = 0;
    std::int64_t head_w = 0;
    std::int64_t head_b = 0;
    std::int64_t total() const { return quantum + head_w + head_b; }
};

inline GradientLayout gradient_layout(const LayerStack& stack, const HeadParams& head) {
    return {stack.params.total(), static_cast<std::int64_t>(head.w.size()),
            static_cast<std::int64_t>(head.b.size())};
}

// Per-layer accumulators for the cotangent matrices M = sum phi lambda^dag
// harvested at each multiplexer. Gradient extraction through the block
// eigendecompositions is linear in M, so batches can be summed here first
// and transformed once per block.
struct MuxCotangents {
    std::vector<std::vector<CMat>> m;  // [layer-1][branch * modes + mode]

    static MuxCotangents zero(const LayerStack& stack) {
        MuxCotangents acc;
        const int df = stack.layout.feature_dim();
        acc.m.resize(static_cast<std::size_t>(stack.layout.Q));
        for (int l = 1; l <= stack.layout.Q; ++l) {
            acc.m[static_cast<std::size_t>(l - 1)].assign(
                static_cast<std::size_t>(stack.params.branches(l) * stack.params.modes(l)),
                CMat::Zero(df, df));
        }
        return acc;
    }

    void add(const MuxCotangents& other) {
        for (std::size_t l = 0; l < m.size(); ++l) {
            for (std::size_t b = 0; b < m[l].size(); ++b) m[l][b] += other.m[l][b];
        }
    }
};

namespace detail {

// Adjoint of one pipeline step, pulling the cotangent state backwards.
// The multiplexer case also harvests the cotangent matrices against the
// stored forward input.
inline void run_step_backward(StateTensor& lam, const LayerStack& stack,
                              const std::vector<LayerBlocks>& blocks, const PipelineStep& step,
                              const StateTensor* mux_input, MuxCotangents* cot) {
    switch (step.kind) {
        case StepKind::Basis: {
            const int axis = lam.find_axis(step.axis);
            const CMat& op = stack.basis_ops[static_cast<std::size_t>(step.layer - 1)];
            apply_matrix_inplace(lam, axis, step.inverse ? op : CMat(op.adjoint()));
            break;
        }
        case StepKind::Multiplexer: {
            if (cot) {
                const MuxAxes ax = locate_mux_axes(lam, step.layer);
                const std::int64_t modes = stack.params.modes(step.layer);
                const int df = stack.layout.feature_dim();
                std::vector<CMat>& m = cot->m[static_cast<std::size_t>(step.layer - 1)];
                const std::int64_t fs = lam.stride(ax.f);
                for_each_feature_fiber(lam, ax, modes, [&](std::int64_t base, std::int64_t block) {
                    CMat& acc = m[static_cast<std::size_t>(block)];
                    const Complex* phi = mux_input->amp.data() + base;
                    const Complex* lm = lam.amp.data() + base;
                    for (int i = 0; i < df; ++i) {
                        const Complex pi = phi[i * fs];
                        for (int j = 0; j < df; ++j) {
                            acc(i, j) += pi * std::conj(lm[j * fs]);
                        }
                    }
                });
            }
            lam = apply_multiplexer(lam, stack, step.layer,
                                    blocks[static_cast<std::size_t>(step.layer - 1)],
                                    /*adjoint=*/true);
            break;
        }
        case StepKind::ReducedJunction: {
            const int sigma = lam.find_condition(step.cond_tag);
            if (sigma < 0) throw std::logic_error("backward: junction condition axis missing");
            const int coarse = sigma + 1;
            if (coarse >= static_cast<int>(lam.axes.size()) ||
                lam.axes[static_cast<std::size_t>(coarse)].kind != step.axis) {
                throw std::logic_error("backward: junction selector not adjacent to its register");
            }
            const auto phases = phase_gradient_table(lam.axes[coarse].size, /*inverse=*/true);
            apply_controlled_phase_inplace(lam, sigma, coarse, phases);
            apply_matrix_inplace(lam, sigma, hadamard2());
            lam.axes[static_cast<std::size_t>(sigma)].kind = lam.axes[static_cast<std::size_t>(coarse)].kind;
            lam.axes[static_cast<std::size_t>(sigma)].tag = 0;
            merge_axes_inplace(lam, sigma);
            break;
        }
        case StepKind::PoolSplit: {
            const int bit = lam.find_condition(step.cond_tag);
            if (bit < 1) throw std::logic_error("backward: pooling condition axis missing");
            if (lam.axes[static_cast<std::size_t>(bit - 1)].kind != step.axis) {
                throw std::logic_error("backward: pooled bit not adjacent to its register");
            }
            lam.axes[static_cast<std::size_t>(bit)].kind = lam.axes[static_cast<std::size_t>(bit - 1)].kind;
            lam.axes[static_cast<std::size_t>(bit)].tag = 0;
            merge_axes_inplace(lam, bit - 1);
            break;
        }
    }
}

// Cotangent of the readout map: lambda_i = (w_{z(i)} / norm) * psi_i, where
// z(i) is the flattened (x, y, feature) coordinate of amplitude i and
// p_z = sum_cond |psi|^2 / norm. The full loss differential is then
// dL = 2 Re <lambda | dPsi>.
inline StateTensor readout_cotangent(const StateTensor& final_state,
                                     const std::vector<double>& w) {
    const int xi = final_state.find_axis(AxisKind::SpatialX);
    const int yi = final_state.find_axis(AxisKind::SpatialY);
    const int fi = final_state.find_axis(AxisKind::Feature);
    const std::int64_t nx = final_state.axes[xi].size;
    const std::int64_t ny = final_state.axes[yi].size;
    const std::int64_t df = final_state.axes[fi].size;
    if (static_cast<std::int64_t>(w.size()) != nx * ny * df) {
        throw std::invalid_argument("cotangent: weight vector does not match readout shape");
    }
    StateTensor lam = final_state;
    const std::int64_t sx = final_state.stride(xi);
    const std::int64_t sy = final_state.stride(yi);
    const std::int64_t sf = final_state.stride(fi);
    const double inv = 1.0 / final_state.norm2_target;
    const std::int64_t total = final_state.size();
    for (std::int64_t i = 0; i < total; ++i) {
        const std::int64_t z =
            (((i / sx) % nx) * ny + ((i / sy) % ny)) * df + ((i / sf) % df);
        lam.amp[static_cast<std::size_t>(i)] *= w[static_cast<std::size_t>(z)] * inv;
    }
    return lam;
}

}  // namespace detail

/// Reverse-mode sweep for L = sum_z w_z * p_z(theta): pulls the cotangent
/// back through the adjoints of every linear stage and adds this sample's
/// cotangent matrices into `cot`.
inline void backward_accumulate(const LayerStack& stack, const std::vector<LayerBlocks>& blocks,
                                const ForwardTrace& trace, const std::vector<double>& w,
                                MuxCotangents& cot) {
    StateTensor lam = detail::readout_cotangent(trace.final_state, w);
    const std::vector<PipelineStep> program = build_program(stack);
    int mux_seen = 0;
    for (const PipelineStep& s : program) {
        if (s.kind == StepKind::Multiplexer) ++mux_seen;
    }
    for (auto it = program.rbegin(); it != program.rend(); ++it) {
        const StateTensor* mux_input = nullptr;
        if (it->kind == StepKind::Multiplexer) {
            --mux_seen;
            mux_input = &trace.mux_inputs[static_cast<std::size_t>(mux_seen)];
        }
        detail::run_step_backward(lam, stack, blocks, *it, mux_input, &cot);
    }
}

/// Daleckii-Krein extraction: turn accumulated cotangent matrices into
/// gradient coordinates for every Pauli coefficient.
inline void extract_quantum_gradient(const LayerStack& stack,
                                     const std::vector<LayerBlocks>& blocks,
                                     const MuxCotangents& cot, std::span<double> grad_out) {
    const int p_blk = pauli_count(stack.layout.n_f);
    for (int l = 1; l <= stack.layout.Q; ++l) {
        const std::int64_t goff = stack.params.layer_offset(l);
        const std::vector<CMat>& m = cot.m[static_cast<std::size_t>(l - 1)];
        const LayerBlocks& lb = blocks[static_cast<std::size_t>(l - 1)];
        for (std::size_t b = 0; b < m.size(); ++b) {
            accumulate_block_gradient(
                lb.blocks[b], m[b], stack.layout.n_f,
                grad_out.subspan(static_cast<std::size_t>(goff) + b * static_cast<std::size_t>(p_blk),
                                 static_cast<std::size_t>(p_blk)));
        }
    }
}

/// Reverse-mode gradient of L = sum_z w_z * p_z(theta) with respect to all
/// quantum coefficients, reusing one forward trace.
inline std::vector<double> grad_readout_weighted(const LayerStack& stack,
                                                 const std::vector<LayerBlocks>& blocks,
                                                 const ForwardTrace& trace,
                                                 const std::vector<double>& w) {
    std::vector<double> grad(static_cast<std::size_t>(stack.params.total()), 0.0);
    MuxCotangents cot = MuxCotangents::zero(stack);
    backward_accumulate(stack, blocks, trace, w, cot);
    extract_quantum_gradient(stack, blocks, cot, std::span<double>(grad));
    return grad;
}

struct SampleGradient {
    std::vector<double> g;  // quantum | W | b
    double loss = 0.0;
    int predicted = -1;
    std::vector<double> readout;
};

/// Full analytic gradient of the cross-entropy loss for one encoded sample.
/// Exact (infinite-shot) readout only.
inline SampleGradient grad_quantum(const LayerStack& stack,
                                   const std::vector<LayerBlocks>& blocks,
                                   const HeadParams& head, const StateTensor& encoded,
                                   int label) {
    const ForwardTrace trace = forward_quantum_traced(stack, blocks, encoded, /*keep_trace=*/true);
    const ReadoutVector p = exact_readout(trace.final_state, stack.layout);
    const HeadGradient hg = head_gradient(p.p, head, label);
    const std::vector<double> gq = grad_readout_weighted(stack, blocks, trace, hg.dp);

    SampleGradient out;
    const GradientLayout gl = gradient_layout(stack, head);
    out.g.resize(static_cast<std::size_t>(gl.total()));
    std::copy(gq.begin(), gq.end(), out.g.begin());
    std::copy(hg.dw.begin(), hg.dw.end(), out.g.begin() + gl.quantum);
    std::copy(hg.db.begin(), hg.db.end(), out.g.begin() + gl.quantum + gl.head_w);
    out.loss = hg.loss;
    out.predicted = static_cast<int>(
        std::max_element(hg.q.begin(), hg.q.end()) - hg.q.begin());
    out.readout = p.p;
    return out;
}

/// Loss and prediction only (shared forward path with grad_quantum).
struct SampleEval {
    double loss = 0.0;
    int predicted = -1;
    ReadoutVector readout;
};

inline SampleEval eval_sample(const LayerStack& stack, const std::vector<LayerBlocks>& blocks,
                              const HeadParams& head, const StateTensor& encoded, int label) {
    const ForwardTrace trace = forward_quantum_traced(stack, blocks, encoded, false);
    SampleEval ev;
    ev.readout = exact_readout(trace.final_state, stack.layout);
    const std::vector<double> q = head_forward(ev.readout.p, head);
    ev.loss = cross_entropy(q, label);
    ev.predicted = static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
    return ev;
}

}  // namespace pcsqcnn
