#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcsqcnn/dataset.hpp"
#include "pcsqcnn/diagnostics.hpp"
#include "pcsqcnn/gradients.hpp"
#include "pcsqcnn/readout.hpp"
#include "pcsqcnn/threading.hpp"

namespace pcsqcnn {

struct TrainConfig {
    double lr = 3e-2;  // hybrid-model default
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int epochs = 100;
    int batch = 256;
    int eval_every = 10;
    std::uint64_t seed = 1;
    int threads = 0;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    bool evaluated = false;
    double test_loss = 0.0;
    double test_accuracy = 0.0;
};

struct TrainResult {
    std::vector<EpochStats> history;
};

namespace detail {

// Standard Adam on one flat parameter vector.
class Adam {
  public:
    Adam(std::size_t n, const TrainConfig& cfg)
        : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::vector<double>& x, const std::vector<double>& g) {
        ++t_;
        const double c1 = 1.0 - std::pow(cfg_.beta1, t_);
        const double c2 = 1.0 - std::pow(cfg_.beta2, t_);
        for (std::size_t i = 0; i < x.size(); ++i) {
            m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g[i];
            v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            x[i] -= cfg_.lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + cfg_.eps);
        }
    }

  private:
    TrainConfig cfg_;
    std::int64_t t_ = 0;
    std::vector<double> m_, v_;
};

inline std::vector<StateTensor> encode_all(const Dataset& data, const EncoderConfig& cfg,
                                           int threads) {
    std::vector<StateTensor> out(data.size());
    parallel_chunks(static_cast<std::int64_t>(data.size()), 16, threads,
                    [&](std::int64_t, std::int64_t b, std::int64_t e) {
                        for (std::int64_t i = b; i < e; ++i) {
                            out[static_cast<std::size_t>(i)] =
                                encode_frqi(data.images[static_cast<std::size_t>(i)], cfg);
                        }
                    });
    return out;
}

}  // namespace detail

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

/// Exact-readout test evaluation.
inline EvalResult evaluate_exact(const LayerStack& stack, const HeadParams& head,
                                 const Dataset& data, const EncoderConfig& enc, int threads = 0) {
    if (data.size() == 0) throw std::invalid_argument("eval: empty dataset");
    const std::vector<LayerBlocks> blocks = build_blocks(stack);
    const std::int64_t n = static_cast<std::int64_t>(data.size());
    std::vector<double> loss(static_cast<std::size_t>(n));
    std::vector<char> hit(static_cast<std::size_t>(n));
    parallel_chunks(n, 16, threads, [&](std::int64_t, std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            const StateTensor st = encode_frqi(data.images[static_cast<std::size_t>(i)], enc);
            const SampleEval ev = eval_sample(stack, blocks, head, st,
                                              data.labels[static_cast<std::size_t>(i)]);
            loss[static_cast<std::size_t>(i)] = ev.loss;
            hit[static_cast<std::size_t>(i)] =
                ev.predicted == data.labels[static_cast<std::size_t>(i)] ? 1 : 0;
        }
    });
    EvalResult out;
    for (std::int64_t i = 0; i < n; ++i) {
        out.loss += loss[static_cast<std::size_t>(i)];
        out.accuracy += hit[static_cast<std::size_t>(i)];
    }
    out.loss /= static_cast<double>(n);
    out.accuracy /= static_cast<double>(n);
    return out;
}

/// One stochastic full-set pass at a fixed shot budget: every sample gets
/// one independent multinomial histogram keyed by (seed, purpose, sample).
inline EvalResult evaluate_shots(const LayerStack& stack, const HeadParams& head,
                                 const Dataset& data, const EncoderConfig& enc, int n_shot,
                                 std::uint64_t seed, std::uint64_t pass = 0, int threads = 0) {
    if (data.size() == 0) throw std::invalid_argument("eval: empty dataset");
    const std::vector<LayerBlocks> blocks = build_blocks(stack);
    const std::int64_t n = static_cast<std::int64_t>(data.size());
    std::vector<double> loss(static_cast<std::size_t>(n));
    std::vector<char> hit(static_cast<std::size_t>(n));
    parallel_chunks(n, 16, threads, [&](std::int64_t, std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            const StateTensor st = encode_frqi(data.images[static_cast<std::size_t>(i)], enc);
            const ReadoutVector p =
                exact_readout(forward_quantum_traced(stack, blocks, st, false).final_state,
                              stack.layout);
            ShotConfig sc{n_shot, seed,
                          (static_cast<std::uint64_t>(n_shot) << 40) ^
                              (pass * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(i))};
            const ReadoutVector hat = sample_shots(p, sc);
            const std::vector<double> q = head_forward(hat.p, head);
            loss[static_cast<std::size_t>(i)] =
                cross_entropy(q, data.labels[static_cast<std::size_t>(i)]);
            hit[static_cast<std::size_t>(i)] =
                static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin()) ==
                        data.labels[static_cast<std::size_t>(i)]
                    ? 1
                    : 0;
        }
    });
    EvalResult out;
    for (std::int64_t i = 0; i < n; ++i) {
        out.loss += loss[static_cast<std::size_t>(i)];
        out.accuracy += hit[static_cast<std::size_t>(i)];
    }
    out.loss /= static_cast<double>(n);
    out.accuracy /= static_cast<double>(n);
    return out;
}

/// End-to-end Adam training on exact readouts. Deterministic per seed: the
/// data order comes from a seeded shuffle, per-sample work is reduced in
/// fixed chunk order, and evaluation never draws randomness.
inline TrainResult train(LayerStack& stack, HeadParams& head, const Dataset& train_data,
                         const Dataset& test_data, const EncoderConfig& enc,
                         const TrainConfig& cfg) {
    if (train_data.size() == 0) throw std::invalid_argument("train: empty dataset");
    const std::vector<StateTensor> encoded = detail::encode_all(train_data, enc, cfg.threads);
    const GradientLayout gl = gradient_layout(stack, head);
    detail::Adam adam(static_cast<std::size_t>(gl.total()), cfg);
    TrainResult result;

    const std::int64_t n = static_cast<std::int64_t>(train_data.size());
    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<double> params(static_cast<std::size_t>(gl.total()));
    auto gather_params = [&]() {
        std::copy(stack.params.theta.begin(), stack.params.theta.end(), params.begin());
        std::copy(head.w.begin(), head.w.end(), params.begin() + gl.quantum);
        std::copy(head.b.begin(), head.b.end(), params.begin() + gl.quantum + gl.head_w);
    };
    auto scatter_params = [&]() {
        std::copy(params.begin(), params.begin() + gl.quantum, stack.params.theta.begin());
        std::copy(params.begin() + gl.quantum, params.begin() + gl.quantum + gl.head_w,
                  head.w.begin());
        std::copy(params.begin() + gl.quantum + gl.head_w, params.end(), head.b.begin());
    };

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng::Stream shuffle_stream(cfg.seed, "epoch-shuffle", static_cast<std::uint64_t>(epoch));
        shuffle_stream.shuffle(order);
        double epoch_loss = 0.0;
        std::int64_t epoch_hits = 0;

        for (std::int64_t start = 0; start < n; start += cfg.batch) {
            const std::int64_t end = std::min(n, start + cfg.batch);
            const std::int64_t bsz = end - start;
            const std::vector<LayerBlocks> blocks = build_blocks(stack);

            // Per-sample sweeps accumulate cotangent matrices; the per-block
            // derivative transforms run once on the batch sums (linearity).
            const std::int64_t chunk = 8;
            const std::int64_t n_chunks = (bsz + chunk - 1) / chunk;
            struct Partial {
                MuxCotangents cot;
                std::vector<double> head_g;
                double loss = 0.0;
                std::int64_t hits = 0;
            };
            std::vector<Partial> parts(static_cast<std::size_t>(n_chunks));
            parallel_chunks(bsz, chunk, cfg.threads,
                            [&](std::int64_t c, std::int64_t b, std::int64_t e) {
                                Partial& part = parts[static_cast<std::size_t>(c)];
                                part.cot = MuxCotangents::zero(stack);
                                part.head_g.assign(static_cast<std::size_t>(gl.head_w + gl.head_b),
                                                   0.0);
                                for (std::int64_t k = b; k < e; ++k) {
                                    const std::size_t idx = order[static_cast<std::size_t>(start + k)];
                                    const ForwardTrace trace = forward_quantum_traced(
                                        stack, blocks, encoded[idx], true);
                                    const ReadoutVector p =
                                        exact_readout(trace.final_state, stack.layout);
                                    const HeadGradient hg =
                                        head_gradient(p.p, head, train_data.labels[idx]);
                                    backward_accumulate(stack, blocks, trace, hg.dp, part.cot);
                                    for (std::size_t j = 0; j < hg.dw.size(); ++j) {
                                        part.head_g[j] += hg.dw[j];
                                    }
                                    for (std::size_t j = 0; j < hg.db.size(); ++j) {
                                        part.head_g[static_cast<std::size_t>(gl.head_w) + j] +=
                                            hg.db[j];
                                    }
                                    part.loss += hg.loss;
                                    const int pred = static_cast<int>(
                                        std::max_element(hg.q.begin(), hg.q.end()) - hg.q.begin());
                                    if (pred == train_data.labels[idx]) ++part.hits;
                                }
                            });
            MuxCotangents cot = MuxCotangents::zero(stack);
            std::vector<double> grad(static_cast<std::size_t>(gl.total()), 0.0);
            double batch_loss = 0.0;
            for (const Partial& part : parts) {
                cot.add(part.cot);
                for (std::size_t j = 0; j < part.head_g.size(); ++j) {
                    grad[static_cast<std::size_t>(gl.quantum) + j] += part.head_g[j];
                }
                batch_loss += part.loss;
                epoch_hits += part.hits;
            }
            extract_quantum_gradient(stack, blocks, cot,
                                     std::span<double>(grad.data(),
                                                       static_cast<std::size_t>(gl.quantum)));
            const double inv = 1.0 / static_cast<double>(bsz);
            for (double& g : grad) g *= inv;
            epoch_loss += batch_loss;
            if (!std::isfinite(batch_loss)) {
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch));
            }
            gather_params();
            adam.step(params, grad);
            scatter_params();
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_loss / static_cast<double>(n);
        stats.train_accuracy = static_cast<double>(epoch_hits) / static_cast<double>(n);
        if (test_data.size() > 0 &&
            (epoch == cfg.epochs || epoch % std::max(1, cfg.eval_every) == 0)) {
            const EvalResult ev = evaluate_exact(stack, head, test_data, enc, cfg.threads);
            stats.evaluated = true;
            stats.test_loss = ev.loss;
            stats.test_accuracy = ev.accuracy;
        }
        result.history.push_back(stats);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Finite-shot loss histograms: batch-mean cross-entropy over nonoverlapping
// test batches, independently resampled.

struct HistogramEntry {
    int n_shot = 0;  // 0 = exact reference
    int pass = 0;
    int batch = 0;
    double mean_loss = 0.0;
};

inline std::vector<HistogramEntry> loss_histogram(const LayerStack& stack, const HeadParams& head,
                                                  const Dataset& testset, const EncoderConfig& enc,
                                                  const std::vector<int>& shot_budgets,
                                                  int batch_size, int passes, std::uint64_t seed,
                                                  int threads = 0) {
    const std::int64_t n = static_cast<std::int64_t>(testset.size());
    if (n == 0 || n % batch_size != 0) {
        throw std::invalid_argument("histogram: test set size must divide into whole batches");
    }
    const std::vector<LayerBlocks> blocks = build_blocks(stack);
    // exact readouts once per sample
    std::vector<ReadoutVector> exact(static_cast<std::size_t>(n));
    parallel_chunks(n, 16, threads, [&](std::int64_t, std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            const StateTensor st = encode_frqi(testset.images[static_cast<std::size_t>(i)], enc);
            exact[static_cast<std::size_t>(i)] =
                exact_readout(forward_quantum_traced(stack, blocks, st, false).final_state,
                              stack.layout);
        }
    });
    const int n_batches = static_cast<int>(n) / batch_size;
    std::vector<HistogramEntry> entries;
    // exact reference pass
    for (int b = 0; b < n_batches; ++b) {
        double acc = 0.0;
        for (int k = 0; k < batch_size; ++k) {
            const std::size_t i = static_cast<std::size_t>(b * batch_size + k);
            acc += cross_entropy(head_forward(exact[i].p, head), testset.labels[i]);
        }
        entries.push_back({0, 0, b, acc / batch_size});
    }
    for (int budget : shot_budgets) {
        const std::int64_t total = static_cast<std::int64_t>(passes) * n_batches;
        std::vector<double> means(static_cast<std::size_t>(total));
        parallel_chunks(total, 4, threads, [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
            for (std::int64_t j = lo; j < hi; ++j) {
                const int pass = static_cast<int>(j / n_batches);
                const int b = static_cast<int>(j % n_batches);
                double acc = 0.0;
                for (int k = 0; k < batch_size; ++k) {
                    const std::size_t i = static_cast<std::size_t>(b * batch_size + k);
                    ShotConfig sc{budget, seed,
                                  (static_cast<std::uint64_t>(budget) << 40) ^
                                      (static_cast<std::uint64_t>(pass) * static_cast<std::uint64_t>(n) +
                                       i)};
                    const ReadoutVector hat = sample_shots(exact[i], sc);
                    acc += cross_entropy(head_forward(hat.p, head), testset.labels[i]);
                }
                means[static_cast<std::size_t>(j)] = acc / batch_size;
            }
        });
        for (std::int64_t j = 0; j < total; ++j) {
            entries.push_back({budget, static_cast<int>(j / n_batches),
                               static_cast<int>(j % n_batches), means[static_cast<std::size_t>(j)]});
        }
    }
    return entries;
}

// ---------------------------------------------------------------------------
// Readout-space loss landscape along per-sample shot-noise principal axes.

struct LandscapeResult {
    std::vector<double> grid_alpha;            // coordinates (shared for both axes)
    std::vector<double> loss;                  // row-major over (alpha, beta); NaN when masked
    std::vector<double> valid_fraction;        // same shape
    int skipped_samples = 0;                   // degenerate covariance count
    double center_loss = 0.0;                  // L(0, 0)
};

namespace detail {

// Top-2 eigenpairs of B = diag(p) - p p^T by deterministic block power
// iteration (matvec is O(D)), Rayleigh-Ritz on the 2-dim subspace.
inline bool top2_covariance_eigs(const std::vector<double>& p, double out_val[2],
                                 std::vector<double> out_vec[2]) {
    const std::size_t d = p.size();
    auto matvec = [&](const std::vector<double>& v, std::vector<double>& r) {
        double dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) dot += p[i] * v[i];
        for (std::size_t i = 0; i < d; ++i) r[i] = p[i] * v[i] - p[i] * dot;
    };
    std::vector<double> x0(d), x1(d), y0(d), y1(d);
    for (std::size_t i = 0; i < d; ++i) {
        x0[i] = 1.0 + static_cast<double>(i % 7);
        x1[i] = (i % 2 == 0) ? 1.0 : -1.0;
    }
    auto orthonormalize = [&](std::vector<double>& a, std::vector<double>& b) {
        double na = 0.0;
        for (double v : a) na += v * v;
        na = std::sqrt(na);
        if (na < 1e-300) return false;
        for (double& v : a) v /= na;
        double ab = 0.0;
        for (std::size_t i = 0; i < d; ++i) ab += a[i] * b[i];
        for (std::size_t i = 0; i < d; ++i) b[i] -= ab * a[i];
        double nb = 0.0;
        for (double v : b) nb += v * v;
        nb = std::sqrt(nb);
        if (nb < 1e-300) return false;
        for (double& v : b) v /= nb;
        return true;
    };
    if (!orthonormalize(x0, x1)) return false;
    for (int it = 0; it < 300; ++it) {
        matvec(x0, y0);
        matvec(x1, y1);
        x0.swap(y0);
        x1.swap(y1);
        if (!orthonormalize(x0, x1)) return false;
    }
    // Rayleigh-Ritz on span(x0, x1)
    matvec(x0, y0);
    matvec(x1, y1);
    double s00 = 0.0, s01 = 0.0, s11 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        s00 += x0[i] * y0[i];
        s01 += x0[i] * y1[i];
        s11 += x1[i] * y1[i];
    }
    const double tr = s00 + s11;
    const double det = s00 * s11 - s01 * s01;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    const double l1 = tr / 2.0 + disc;
    const double l2 = tr / 2.0 - disc;
    auto build_vec = [&](double lam, std::vector<double>& out) {
        // eigenvector of [[s00, s01], [s01, s11]] for eigenvalue lam; use
        // whichever defining row is better conditioned
        double c0 = s01, c1 = lam - s00;
        const double d0 = lam - s11, d1 = s01;
        if (d0 * d0 + d1 * d1 > c0 * c0 + c1 * c1) {
            c0 = d0;
            c1 = d1;
        }
        if (std::abs(c0) + std::abs(c1) < 1e-300) {
            c0 = 1.0;
            c1 = 0.0;
        }
        const double nn = std::sqrt(c0 * c0 + c1 * c1);
        c0 /= nn;
        c1 /= nn;
        out.resize(d);
        for (std::size_t i = 0; i < d; ++i) out[i] = c0 * x0[i] + c1 * x1[i];
    };
    out_val[0] = l1;
    out_val[1] = l2;
    build_vec(l1, out_vec[0]);
    build_vec(l2, out_vec[1]);
    return true;
}

}  // namespace detail

/// Perturb each sample's exact readout along its two leading multinomial
/// shot-noise directions u = sqrt(l1) e1, v = sqrt(l2) e2 of
/// C_x = (diag(p) - p p^T) / n_shot, with no renormalization. A sample is
/// valid at (alpha, beta) iff all components stay nonnegative and the sum
/// stays <= 1 + 1e-5; cells with valid fraction below 0.10 are masked.
inline LandscapeResult landscape_probe(const LayerStack& stack, const HeadParams& head,
                                       const Dataset& testset, const EncoderConfig& enc,
                                       int n_shot, const std::vector<double>& grid_alpha,
                                       int threads = 0) {
    for (std::size_t i = 0; i < grid_alpha.size(); ++i) {
        const double mirrored = -grid_alpha[grid_alpha.size() - 1 - i];
        if (std::abs(grid_alpha[i] - mirrored) > 1e-12) {
            throw std::invalid_argument("landscape: grid must be symmetric about zero");
        }
    }
    const std::int64_t n = static_cast<std::int64_t>(testset.size());
    if (n == 0) throw std::invalid_argument("landscape: empty test set");
    const std::vector<LayerBlocks> blocks = build_blocks(stack);
    const int g = static_cast<int>(grid_alpha.size());
    const std::int64_t cells = static_cast<std::int64_t>(g) * g;

    struct Partial {
        std::vector<double> loss_sum;
        std::vector<std::int64_t> valid;
        std::int64_t skipped = 0;
        std::int64_t used = 0;
    };
    const std::int64_t chunk = 8;
    const std::int64_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<Partial> parts(static_cast<std::size_t>(n_chunks));

    parallel_chunks(n, chunk, threads, [&](std::int64_t c, std::int64_t lo, std::int64_t hi) {
        Partial& part = parts[static_cast<std::size_t>(c)];
        part.loss_sum.assign(static_cast<std::size_t>(cells), 0.0);
        part.valid.assign(static_cast<std::size_t>(cells), 0);
        std::vector<double> q(head.dim);
        for (std::int64_t i = lo; i < hi; ++i) {
            const StateTensor st = encode_frqi(testset.images[static_cast<std::size_t>(i)], enc);
            const ReadoutVector p =
                exact_readout(forward_quantum_traced(stack, blocks, st, false).final_state,
                              stack.layout);
            double lam[2];
            std::vector<double> evec[2];
            if (!detail::top2_covariance_eigs(p.p, lam, evec) || lam[1] <= 1e-13 * std::max(lam[0], 1e-30)) {
                ++part.skipped;
                continue;
            }
            ++part.used;
            const double s1 = std::sqrt(lam[0] / n_shot);
            const double s2 = std::sqrt(lam[1] / n_shot);
            const int label = testset.labels[static_cast<std::size_t>(i)];
            for (int ia = 0; ia < g; ++ia) {
                for (int ib = 0; ib < g; ++ib) {
                    const double a = grid_alpha[static_cast<std::size_t>(ia)];
                    const double b = grid_alpha[static_cast<std::size_t>(ib)];
                    bool ok = true;
                    double sum = 0.0;
                    for (std::size_t z = 0; z < p.p.size(); ++z) {
                        const double v = p.p[z] + a * s1 * evec[0][z] + b * s2 * evec[1][z];
                        if (v < 0.0) {
                            ok = false;
                            break;
                        }
                        q[z] = v;
                        sum += v;
                    }
                    if (!ok || sum > 1.0 + 1e-5) continue;
                    const std::size_t cell = static_cast<std::size_t>(ia) * g + ib;
                    part.loss_sum[cell] += cross_entropy(head_forward(q, head), label);
                    ++part.valid[cell];
                }
            }
        }
    });

    LandscapeResult out;
    out.grid_alpha = grid_alpha;
    out.loss.assign(static_cast<std::size_t>(cells), std::nan(""));
    out.valid_fraction.assign(static_cast<std::size_t>(cells), 0.0);
    std::vector<double> loss_sum(static_cast<std::size_t>(cells), 0.0);
    std::vector<std::int64_t> valid(static_cast<std::size_t>(cells), 0);
    std::int64_t used = 0;
    for (const Partial& part : parts) {
        out.skipped_samples += static_cast<int>(part.skipped);
        used += part.used;
        for (std::int64_t cidx = 0; cidx < cells; ++cidx) {
            loss_sum[static_cast<std::size_t>(cidx)] += part.loss_sum[static_cast<std::size_t>(cidx)];
            valid[static_cast<std::size_t>(cidx)] += part.valid[static_cast<std::size_t>(cidx)];
        }
    }
    if (used == 0) throw std::runtime_error("landscape: every sample had a degenerate covariance");
    for (std::int64_t cidx = 0; cidx < cells; ++cidx) {
        const double frac = static_cast<double>(valid[static_cast<std::size_t>(cidx)]) /
                            static_cast<double>(used);
        out.valid_fraction[static_cast<std::size_t>(cidx)] = frac;
        if (frac >= 0.10) {
            out.loss[static_cast<std::size_t>(cidx)] =
                loss_sum[static_cast<std::size_t>(cidx)] /
                static_cast<double>(valid[static_cast<std::size_t>(cidx)]);
        }
    }
    const int center = g / 2;
    out.center_loss = out.loss[static_cast<std::size_t>(center) * g + center];
    return out;
}

// ---------------------------------------------------------------------------
// Initialization-time gradient diagnostics in the depth-scaling family:
// 2^Q x 2^Q inputs with one surviving index qubit per axis, per-sample
// translations fixed across initializations, statistics over seeds.

struct DepthDiagnosticsConfig {
    int q_min = 1;
    int q_max = 4;
    int n_f = 3;
    int subset_per_class = 25;
    int inits = 12;
    std::uint64_t seed = 1;
    int threads = 0;
};

struct Percentiles {
    double mean = 0.0, p25 = 0.0, p75 = 0.0;
};

struct DepthDiagnosticsRow {
    int q = 0;
    Percentiles empirical_all, empirical_first, empirical_last;
    Percentiles per_sample_all, per_sample_first, per_sample_last;
    std::vector<std::pair<int, int>> offsets;  // per-sample (dr, dc), recorded for the report
};

namespace detail {

inline Percentiles summarize(std::vector<double> v) {
    Percentiles p;
    if (v.empty()) return p;
    for (double x : v) p.mean += x;
    p.mean /= static_cast<double>(v.size());
    std::sort(v.begin(), v.end());
    auto quantile = [&](double f) {
        const double h = f * static_cast<double>(v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    p.p25 = quantile(0.25);
    p.p75 = quantile(0.75);
    return p;
}

}  // namespace detail

/// Gradient-norm diagnostics over depth: for each Q the inputs are raw
/// images resized to 2^{Q-1}, placed on a 2^Q canvas, and translated by
/// per-sample offsets drawn once from the seed (held fixed across
/// initializations); ||G_D|| and R_D are collected per coordinate mask
/// over fresh random initializations.
inline std::vector<DepthDiagnosticsRow> depth_gradient_diagnostics(
    const Dataset& raw_test, const DepthDiagnosticsConfig& cfg) {
    // deterministic class-balanced subset: first k of each class in order
    std::vector<std::size_t> chosen;
    {
        std::array<int, 10> taken{};
        for (std::size_t i = 0; i < raw_test.size(); ++i) {
            const int label = raw_test.labels[i];
            if (label < 0 || label > 9) continue;
            if (taken[static_cast<std::size_t>(label)] >= cfg.subset_per_class) continue;
            ++taken[static_cast<std::size_t>(label)];
            chosen.push_back(i);
        }
        for (int d = 0; d < 10; ++d) {
            if (taken[static_cast<std::size_t>(d)] < cfg.subset_per_class) {
                throw std::invalid_argument("diagnostics: not enough test samples of class " +
                                            std::to_string(d));
            }
        }
    }

    std::vector<DepthDiagnosticsRow> rows;
    for (int q = cfg.q_min; q <= cfg.q_max; ++q) {
        DepthDiagnosticsRow row;
        row.q = q;
        const int canvas = 1 << q;
        const int patch = std::max(1, canvas / 2);
        const int border = (canvas - patch) / 2;
        const RegisterLayout layout = build_layout(q, q, cfg.n_f);  // n_l = 1
        const EncoderConfig enc{0.0, std::numbers::pi, cfg.n_f};

        std::vector<StateTensor> encoded;
        std::vector<int> labels;
        encoded.reserve(chosen.size());
        for (std::size_t k = 0; k < chosen.size(); ++k) {
            const std::size_t i = chosen[k];
            rng::Stream off(cfg.seed, "diag-offsets",
                            (static_cast<std::uint64_t>(q) << 32) ^ static_cast<std::uint64_t>(k));
            const int span = 2 * border + 1;
            const int dr = border > 0
                               ? static_cast<int>(off.below(static_cast<std::uint64_t>(span))) - border
                               : 0;
            const int dc = border > 0
                               ? static_cast<int>(off.below(static_cast<std::uint64_t>(span))) - border
                               : 0;
            row.offsets.emplace_back(dr, dc);
            ImageTensor img = bilinear_resize(raw_test.images[i], patch, patch);
            img = place_and_translate(img, canvas, dr, dc);
            encoded.push_back(encode_frqi(img, enc));
            labels.push_back(raw_test.labels[i]);
        }

        std::vector<double> e_all, e_first, e_last, r_all, r_first, r_last;
        for (int init = 0; init < cfg.inits; ++init) {
            LayerStack stack = make_stack(layout, PipelineMode::ReducedJunction, BasisKind::Fourier);
            rng::Stream ps(cfg.seed, "diag-init",
                           (static_cast<std::uint64_t>(q) << 32) ^ static_cast<std::uint64_t>(init));
            stack.params = random_params(layout, ps);
            rng::Stream hs(cfg.seed, "diag-head",
                           (static_cast<std::uint64_t>(q) << 32) ^ static_cast<std::uint64_t>(init));
            const HeadParams head = init_head(static_cast<int>(layout.readout_dim()), 10, hs);
            const EmpiricalGradientReport rep =
                empirical_gradient(stack, head, encoded, labels, cfg.threads);
            e_all.push_back(rep.empirical.all_quantum);
            e_first.push_back(rep.empirical.first_layer);
            e_last.push_back(rep.empirical.last_layer);
            r_all.push_back(rep.per_sample.all_quantum);
            r_first.push_back(rep.per_sample.first_layer);
            r_last.push_back(rep.per_sample.last_layer);
        }
        row.empirical_all = detail::summarize(e_all);
        row.empirical_first = detail::summarize(e_first);
        row.empirical_last = detail::summarize(e_last);
        row.per_sample_all = detail::summarize(r_all);
        row.per_sample_first = detail::summarize(r_first);
        row.per_sample_last = detail::summarize(r_last);
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Mean readout entropy (bits) with interquartile band per shot budget;
/// budget 0 means the exact distribution.
struct EntropyRow {
    int n_shot = 0;
    Percentiles entropy;
};

inline std::vector<EntropyRow> entropy_sweep(const LayerStack& stack, const HeadParams& head,
                                             const Dataset& testset, const EncoderConfig& enc,
                                             const std::vector<int>& budgets, std::uint64_t seed,
                                             int threads = 0) {
    (void)head;
    const std::vector<LayerBlocks> blocks = build_blocks(stack);
    const std::int64_t n = static_cast<std::int64_t>(testset.size());
    std::vector<ReadoutVector> exact(static_cast<std::size_t>(n));
    parallel_chunks(n, 16, threads, [&](std::int64_t, std::int64_t b, std::int64_t e) {
        for (std::int64_t i = b; i < e; ++i) {
            const StateTensor st = encode_frqi(testset.images[static_cast<std::size_t>(i)], enc);
            exact[static_cast<std::size_t>(i)] =
                exact_readout(forward_quantum_traced(stack, blocks, st, false).final_state,
                              stack.layout);
        }
    });
    std::vector<EntropyRow> rows;
    {
        std::vector<double> h;
        h.reserve(static_cast<std::size_t>(n));
        for (const ReadoutVector& p : exact) h.push_back(readout_entropy(p));
        rows.push_back({0, detail::summarize(std::move(h))});
    }
    for (int budget : budgets) {
        std::vector<double> h(static_cast<std::size_t>(n));
        parallel_chunks(n, 16, threads, [&](std::int64_t, std::int64_t b, std::int64_t e) {
            for (std::int64_t i = b; i < e; ++i) {
                ShotConfig sc{budget, seed,
                              (static_cast<std::uint64_t>(budget) << 40) ^
                                  static_cast<std::uint64_t>(i)};
                h[static_cast<std::size_t>(i)] =
                    readout_entropy(sample_shots(exact[static_cast<std::size_t>(i)], sc));
            }
        });
        rows.push_back({budget, detail::summarize(std::move(h))});
    }
    return rows;
}

}  // namespace pcsqcnn
