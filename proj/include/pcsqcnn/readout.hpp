#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pcsqcnn/prng.hpp"
#include "pcsqcnn/state.hpp"

namespace pcsqcnn {

/// Probability vector over the surviving (x, y, feature) readout
/// coordinates, flattened x-outer, y-middle, feature-inner.
struct ReadoutVector {
    int nx = 0, ny = 0, df = 0;
    std::vector<double> p;

    std::int64_t size() const { return static_cast<std::int64_t>(p.size()); }
};

struct ShotConfig {
    int n_shot = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;  // (sample, pass) key for reproducible draws
};

/// Squared moduli summed over all condition axes, divided by the spatial
/// normalization N_x * N_y of the unnormalized encoding.
inline ReadoutVector exact_readout(const StateTensor& state, const RegisterLayout& layout) {
    const double sn = state.squared_norm();
    if (std::abs(sn - state.norm2_target) > 1e-8 * state.norm2_target) {
        throw std::runtime_error("readout: state norm drifted from N_x*N_y (pipeline corruption)");
    }
    const int xi = state.find_axis(AxisKind::SpatialX);
    const int yi = state.find_axis(AxisKind::SpatialY);
    const int fi = state.find_axis(AxisKind::Feature);
    if (xi < 0 || yi < 0 || fi < 0) {
        throw std::invalid_argument("readout: state is missing a spatial or feature axis");
    }
    ReadoutVector out;
    out.nx = state.axes[xi].size;
    out.ny = state.axes[yi].size;
    out.df = state.axes[fi].size;
    if (static_cast<std::int64_t>(out.nx) * out.ny * out.df != layout.readout_dim()) {
        throw std::invalid_argument("readout: surviving axes do not match the layout");
    }
    out.p.assign(static_cast<std::size_t>(layout.readout_dim()), 0.0);
    const std::int64_t sx = state.stride(xi);
    const std::int64_t sy = state.stride(yi);
    const std::int64_t sf = state.stride(fi);
    const std::int64_t total = state.size();
    for (std::int64_t i = 0; i < total; ++i) {
        const std::int64_t x = (i / sx) % out.nx;
        const std::int64_t y = (i / sy) % out.ny;
        const std::int64_t f = (i / sf) % out.df;
        out.p[static_cast<std::size_t>((x * out.ny + y) * out.df + f)] += std::norm(state.amp[i]);
    }
    const double inv = 1.0 / state.norm2_target;
    for (double& v : out.p) v *= inv;
    return out;
}

/// Empirical frequencies from n_shot multinomial draws, inverse-CDF with a
/// single uniform per shot. Entries are exact multiples of 1/n_shot.
inline ReadoutVector sample_shots(const ReadoutVector& exact, const ShotConfig& cfg) {
    if (cfg.n_shot < 1) throw std::invalid_argument("shots: n_shot must be >= 1");
    rng::Stream stream(cfg.seed, "shot-sampling", cfg.stream_index);
    const std::int64_t d = exact.size();
    std::vector<double> cum(static_cast<std::size_t>(d));
    double acc = 0.0;
    std::int64_t last_support = 0;
    for (std::int64_t i = 0; i < d; ++i) {
        acc += exact.p[static_cast<std::size_t>(i)];
        cum[static_cast<std::size_t>(i)] = acc;
        if (exact.p[static_cast<std::size_t>(i)] > 0.0) last_support = i;
    }
    std::vector<std::int64_t> counts(static_cast<std::size_t>(d), 0);
    for (int s = 0; s < cfg.n_shot; ++s) {
        const double u = stream.uniform() * acc;
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        std::int64_t idx = (it == cum.end()) ? last_support : (it - cum.begin());
        if (exact.p[static_cast<std::size_t>(idx)] <= 0.0) idx = last_support;
        ++counts[static_cast<std::size_t>(idx)];
    }
    ReadoutVector out{exact.nx, exact.ny, exact.df, std::vector<double>(static_cast<std::size_t>(d))};
    const double inv = 1.0 / cfg.n_shot;
    for (std::int64_t i = 0; i < d; ++i) {
        out.p[static_cast<std::size_t>(i)] = static_cast<double>(counts[static_cast<std::size_t>(i)]) * inv;
    }
    return out;
}

/// Shannon entropy in bits, with 0 log 0 = 0.
inline double readout_entropy(const ReadoutVector& r) {
    double h = 0.0;
    for (double v : r.p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

inline double total_variation(const ReadoutVector& a, const ReadoutVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("tv: dimension mismatch");
    double s = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) {
        s += std::abs(a.p[static_cast<std::size_t>(i)] - b.p[static_cast<std::size_t>(i)]);
    }
    return 0.5 * s;
}

}  // namespace pcsqcnn
