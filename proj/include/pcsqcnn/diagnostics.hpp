#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pcsqcnn/encoding.hpp"
#include "pcsqcnn/gradients.hpp"
#include "pcsqcnn/threading.hpp"

namespace pcsqcnn {

struct ParamAccounting {
    std::int64_t quantum = 0;
    std::int64_t quantum_closed_form = 0;
    std::vector<std::int64_t> per_layer;
    std::int64_t head = 0;
    std::int64_t readout_dim = 0;
};

/// P_Q = 4^{n_f} * sum_l b_l * 2^{2(n_l + Q - l)} with b_1 = 1, b_l = 4,
/// plus the geometric-series closed form as a cross-check, and the
/// classifier count M * D_out + M.
inline ParamAccounting count_parameters(const RegisterLayout& layout, int classes = 10) {
    ParamAccounting acc;
    const std::int64_t p_blk = pauli_count(layout.n_f);
    for (int l = 1; l <= layout.Q; ++l) {
        const std::int64_t branches = (l == 1) ? 1 : 4;
        const std::int64_t modes = std::int64_t{1} << (2 * layout.active_width(l));
        acc.per_layer.push_back(branches * modes * p_blk);
        acc.quantum += acc.per_layer.back();
    }
    const int nl = layout.n_l();
    std::int64_t closed = std::int64_t{1} << (2 * (nl + layout.Q - 1));
    if (layout.Q >= 2) {
        const std::int64_t geo = ((std::int64_t{1} << (2 * (layout.Q - 1))) - 1) / 3;
        closed += 4 * (std::int64_t{1} << (2 * nl)) * geo;
    }
    acc.quantum_closed_form = p_blk * closed;
    acc.readout_dim = layout.readout_dim();
    acc.head = static_cast<std::int64_t>(classes) * acc.readout_dim + classes;
    return acc;
}

struct MaskNorms {
    double all_quantum = 0.0;
    double first_layer = 0.0;
    double last_layer = 0.0;
};

struct EmpiricalGradientReport {
    MaskNorms empirical;   // ||G_D|| per coordinate mask
    MaskNorms per_sample;  // R_D per coordinate mask
    std::vector<double> mean_gradient;
};

namespace detail {

inline MaskNorms masked_norms(const std::vector<double>& g, const MultiplexerParams& params) {
    const std::int64_t pq = params.total();
    const std::int64_t first_end = params.layer_size(1);
    const std::int64_t last_begin = params.layer_offset(params.layout.Q);
    MaskNorms n;
    double all = 0.0, first = 0.0, last = 0.0;
    for (std::int64_t i = 0; i < pq; ++i) {
        const double v = g[static_cast<std::size_t>(i)];
        all += v * v;
        if (i < first_end) first += v * v;
        if (i >= last_begin) last += v * v;
    }
    n.all_quantum = std::sqrt(all);
    n.first_layer = std::sqrt(first);
    n.last_layer = std::sqrt(last);
    return n;
}

}  // namespace detail

/// G_D = mean of per-sample gradients, R_D = sqrt(mean squared per-sample
/// norms); both restricted to each coordinate mask before taking norms and
/// never divided by the coordinate count.
inline EmpiricalGradientReport empirical_gradient(const LayerStack& stack, const HeadParams& head,
                                                  const std::vector<StateTensor>& encoded,
                                                  const std::vector<int>& labels,
                                                  int threads = 1) {
    if (encoded.empty() || encoded.size() != labels.size()) {
        throw std::invalid_argument("empirical gradient: dataset empty or mismatched");
    }
    const std::vector<LayerBlocks> blocks = build_blocks(stack);
    const GradientLayout gl = gradient_layout(stack, head);
    const std::int64_t n = static_cast<std::int64_t>(encoded.size());
    const std::int64_t chunk = 8;
    const std::int64_t n_chunks = (n + chunk - 1) / chunk;

    struct Partial {
        std::vector<double> sum_g;
        double sq_all = 0.0, sq_first = 0.0, sq_last = 0.0;
    };
    std::vector<Partial> parts(static_cast<std::size_t>(n_chunks));
    parallel_chunks(n, chunk, threads, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
        Partial& part = parts[static_cast<std::size_t>(c)];
        part.sum_g.assign(static_cast<std::size_t>(gl.total()), 0.0);
        for (std::int64_t i = b; i < e; ++i) {
            SampleGradient sg = grad_quantum(stack, blocks, head, encoded[static_cast<std::size_t>(i)],
                                             labels[static_cast<std::size_t>(i)]);
            for (std::size_t k = 0; k < sg.g.size(); ++k) part.sum_g[k] += sg.g[k];
            const MaskNorms mn = detail::masked_norms(sg.g, stack.params);
            part.sq_all += mn.all_quantum * mn.all_quantum;
            part.sq_first += mn.first_layer * mn.first_layer;
            part.sq_last += mn.last_layer * mn.last_layer;
        }
    });

    EmpiricalGradientReport rep;
    rep.mean_gradient.assign(static_cast<std::size_t>(gl.total()), 0.0);
    double sq_all = 0.0, sq_first = 0.0, sq_last = 0.0;
    for (const Partial& part : parts) {
        for (std::size_t k = 0; k < rep.mean_gradient.size(); ++k) {
            rep.mean_gradient[k] += part.sum_g[k];
        }
        sq_all += part.sq_all;
        sq_first += part.sq_first;
        sq_last += part.sq_last;
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (double& v : rep.mean_gradient) v *= inv;
    rep.empirical = detail::masked_norms(rep.mean_gradient, stack.params);
    rep.per_sample.all_quantum = std::sqrt(sq_all * inv);
    rep.per_sample.first_layer = std::sqrt(sq_first * inv);
    rep.per_sample.last_layer = std::sqrt(sq_last * inv);
    return rep;
}

struct BoundReport {
    int trials = 0;
    double layer_energy_bound = 0.0;  // 4 * 4^{n_f}
    double max_layer_energy = 0.0;    // worst observed per-layer Jacobian energy
    bool layer_energy_ok = false;
    double grad_sq_bound = 0.0;       // (8 M / 3) * 4^{n_f} * Q
    double mean_grad_sq = 0.0;        // Monte Carlo mean ||G_Q||^2 over inits
    double grad_sq_stderr = 0.0;
    bool grad_sq_ok = false;
    double per_coordinate_mean = 0.0;   // mean ||G_Q||^2 / P_Q
    double per_coordinate_bound = 0.0;  // 8 M Q / (3 * 2^{2(n_l+Q-1)})
};

/// Sensitivity-energy accounting: (i) per layer, the analytic Jacobian
/// energy sum_{m,k,alpha} ||d p / d theta||^2 stays below 4 * 4^{n_f} on
/// every trial; (ii) the Monte Carlo mean of ||G_Q||^2 over random
/// initializations stays below (8M/3) * 4^{n_f} * Q; (iii) the
/// per-coordinate mean is reported next to its accounting bound.
inline BoundReport check_sensitivity_bounds(const RegisterLayout& layout, int trials,
                                            std::uint64_t seed, int classes = 10,
                                            int threads = 1) {
    if (trials < 2) throw std::invalid_argument("bounds: need at least 2 trials");
    BoundReport rep;
    rep.trials = trials;
    const double p_blk = static_cast<double>(pauli_count(layout.n_f));
    rep.layer_energy_bound = 4.0 * p_blk;
    rep.grad_sq_bound = (8.0 * classes / 3.0) * p_blk * layout.Q;
    const ParamAccounting acc = count_parameters(layout, classes);
    rep.per_coordinate_bound =
        (8.0 * classes * layout.Q) / (3.0 * std::pow(2.0, 2.0 * (layout.n_l() + layout.Q - 1)));

    const int n = layout.pixels_per_axis();
    const std::int64_t d_out = layout.readout_dim();
    std::vector<double> grad_sq(static_cast<std::size_t>(trials), 0.0);
    std::vector<double> worst_energy(static_cast<std::size_t>(trials), 0.0);

    parallel_chunks(trials, 1, threads, [&](std::int64_t, std::int64_t b, std::int64_t e) {
        for (std::int64_t t = b; t < e; ++t) {
            LayerStack stack = make_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier);
            rng::Stream init(seed, "bound-init", static_cast<std::uint64_t>(t));
            stack.params = random_params(layout, init);
            rng::Stream img_stream(seed, "bound-image", static_cast<std::uint64_t>(t));
            ImageTensor img = make_image(n, n);
            for (double& px : img.pix) px = img_stream.uniform();
            const StateTensor encoded = encode_frqi(img, EncoderConfig{0.0, std::numbers::pi, layout.n_f});
            const std::vector<LayerBlocks> blocks = build_blocks(stack);
            const ForwardTrace trace = forward_quantum_traced(stack, blocks, encoded, true);

            // (i) full readout Jacobian, accumulated as per-layer energies
            std::vector<double> layer_energy(static_cast<std::size_t>(layout.Q), 0.0);
            std::vector<double> w(static_cast<std::size_t>(d_out), 0.0);
            for (std::int64_t z = 0; z < d_out; ++z) {
                w[static_cast<std::size_t>(z)] = 1.0;
                const std::vector<double> jac = grad_readout_weighted(stack, blocks, trace, w);
                w[static_cast<std::size_t>(z)] = 0.0;
                for (int l = 1; l <= layout.Q; ++l) {
                    const std::int64_t off = stack.params.layer_offset(l);
                    const std::int64_t sz = stack.params.layer_size(l);
                    double s = 0.0;
                    for (std::int64_t i = off; i < off + sz; ++i) {
                        s += jac[static_cast<std::size_t>(i)] * jac[static_cast<std::size_t>(i)];
                    }
                    layer_energy[static_cast<std::size_t>(l - 1)] += s;
                }
            }
            worst_energy[static_cast<std::size_t>(t)] =
                *std::max_element(layer_energy.begin(), layer_energy.end());

            // (ii) loss gradient under a fresh fan-in head and random label
            rng::Stream head_stream(seed, "bound-head", static_cast<std::uint64_t>(t));
            const HeadParams head = init_head(static_cast<int>(d_out), classes, head_stream);
            rng::Stream label_stream(seed, "bound-label", static_cast<std::uint64_t>(t));
            const int label = static_cast<int>(label_stream.below(static_cast<std::uint64_t>(classes)));
            const SampleGradient sg = grad_quantum(stack, blocks, head, encoded, label);
            double sq = 0.0;
            for (std::int64_t i = 0; i < stack.params.total(); ++i) {
                sq += sg.g[static_cast<std::size_t>(i)] * sg.g[static_cast<std::size_t>(i)];
            }
            grad_sq[static_cast<std::size_t>(t)] = sq;
        }
    });

    rep.max_layer_energy = *std::max_element(worst_energy.begin(), worst_energy.end());
    rep.layer_energy_ok = rep.max_layer_energy <= rep.layer_energy_bound + 1e-9;
    double mean = 0.0;
    for (double v : grad_sq) mean += v;
    mean /= trials;
    double var = 0.0;
    for (double v : grad_sq) var += (v - mean) * (v - mean);
    var /= std::max(1, trials - 1);
    rep.mean_grad_sq = mean;
    rep.grad_sq_stderr = std::sqrt(var / trials);
    rep.grad_sq_ok = mean <= rep.grad_sq_bound + 3.0 * rep.grad_sq_stderr;
    rep.per_coordinate_mean = mean / static_cast<double>(acc.quantum);
    return rep;
}

}  // namespace pcsqcnn
