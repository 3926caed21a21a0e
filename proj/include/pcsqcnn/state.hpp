#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pcsqcnn/linalg.hpp"

namespace pcsqcnn {

// Register widths and pooling schedule for one model configuration.
// Layers are 1-based; after each of the first Q-1 layers one qubit per
// spatial axis is pooled, so layer l acts on n_l + Q - l index qubits
// per axis.
struct RegisterLayout {
    int n_idx = 1;  // index qubits per spatial axis
    int Q = 1;      // quantum layers
    int n_f = 1;    // feature qubits

    int pixels_per_axis() const { return 1 << n_idx; }
    int n_l() const { return n_idx - Q + 1; }
    int n_tot() const { return 2 * n_idx + n_f; }
    int n_meas() const { return 2 * n_l() + n_f; }
    int feature_dim() const { return 1 << n_f; }
    std::int64_t readout_dim() const { return std::int64_t{1} << n_meas(); }
    int condition_slots() const { return 2 * (Q - 1); }

    /// Active index qubits per axis at layer l (1-based).
    int active_width(int layer) const { return n_l() + Q - layer; }
    int active_dim(int layer) const { return 1 << active_width(layer); }

    /// Condition tags minted at layer boundary l in {1..Q-1}: one slot per
    /// spatial axis, x first.
    std::pair<int, int> condition_pair(int boundary) const {
        return {2 * (boundary - 1), 2 * (boundary - 1) + 1};
    }
};

inline RegisterLayout build_layout(int n_idx, int Q, int n_f) {
    if (n_idx < 1) throw std::invalid_argument("layout: n_idx must be >= 1");
    if (n_f < 1) throw std::invalid_argument("layout: n_f must be >= 1");
    if (Q < 1 || Q > n_idx) {
        throw std::invalid_argument("layout: need 1 <= Q <= n_idx so index qubits survive pooling");
    }
    return RegisterLayout{n_idx, Q, n_f};
}

enum class AxisKind { SpatialX, SpatialY, Feature, Condition };

struct Axis {
    int size = 1;
    AxisKind kind = AxisKind::Feature;
    int tag = 0;  // chronological order for condition axes; 0 otherwise
};

enum class BitPos { Lsb, Msb };

// Dense complex amplitudes organized by semantic axes (row-major over the
// axis list). Pooling moves qubits between axes but never discards
// amplitudes, so the flat size stays 2^n_tot through the whole pipeline.
struct StateTensor {
    std::vector<Complex> amp;
    std::vector<Axis> axes;
    double norm2_target = 1.0;  // N_x * N_y under the unnormalized encoding

    std::int64_t size() const { return static_cast<std::int64_t>(amp.size()); }

    std::int64_t stride(int axis_index) const {
        std::int64_t s = 1;
        for (std::size_t i = axes.size(); i-- > static_cast<std::size_t>(axis_index) + 1;) {
            s *= axes[i].size;
        }
        return s;
    }

    int find_axis(AxisKind kind) const {
        for (std::size_t i = 0; i < axes.size(); ++i) {
            if (axes[i].kind == kind) return static_cast<int>(i);
        }
        return -1;
    }

    int find_condition(int tag) const {
        for (std::size_t i = 0; i < axes.size(); ++i) {
            if (axes[i].kind == AxisKind::Condition && axes[i].tag == tag) {
                return static_cast<int>(i);
            }
        }
        return -1;
    }

    int next_condition_tag() const {
        int n = 0;
        for (const Axis& a : axes) {
            if (a.kind == AxisKind::Condition) ++n;
        }
        return n;
    }

    double squared_norm() const {
        double s = 0.0;
        for (const Complex& c : amp) s += std::norm(c);
        return s;
    }

    int total_qubits() const {
        int bits = 0;
        for (const Axis& a : axes) {
            int sz = a.size;
            while (sz > 1) {
                sz >>= 1;
                ++bits;
            }
        }
        return bits;
    }
};

namespace detail {

inline void check_axis_index(const StateTensor& s, int axis_index) {
    if (axis_index < 0 || axis_index >= static_cast<int>(s.axes.size())) {
        throw std::invalid_argument("state: axis index out of range");
    }
}

// Contract a dim x dim matrix against one axis, in place.
inline void apply_matrix_inplace(StateTensor& s, int axis_index, const CMat& op) {
    check_axis_index(s, axis_index);
    const int n = s.axes[axis_index].size;
    if (op.rows() != n || op.cols() != n) {
        throw std::invalid_argument("state: operator dimension does not match axis size");
    }
    const std::int64_t str = s.stride(axis_index);
    const std::int64_t block = str * n;
    const std::int64_t total = s.size();
    std::vector<Complex> tmp(n);
    for (std::int64_t base = 0; base < total; base += block) {
        for (std::int64_t inner = 0; inner < str; ++inner) {
            Complex* p = s.amp.data() + base + inner;
            for (int j = 0; j < n; ++j) tmp[j] = p[j * str];
            for (int i = 0; i < n; ++i) {
                Complex acc(0.0, 0.0);
                for (int j = 0; j < n; ++j) acc += op(i, j) * tmp[j];
                p[i * str] = acc;
            }
        }
    }
}

// Multiply the sigma = 1 slice of a binary axis by a per-index phase on a
// second axis (the controlled phase gradient of the reduced junction).
inline void apply_controlled_phase_inplace(StateTensor& s, int control_axis, int target_axis,
                                           std::span<const Complex> phases) {
    check_axis_index(s, control_axis);
    check_axis_index(s, target_axis);
    if (s.axes[control_axis].size != 2) {
        throw std::invalid_argument("state: control axis must be binary");
    }
    const int nt = s.axes[target_axis].size;
    if (static_cast<int>(phases.size()) != nt) {
        throw std::invalid_argument("state: phase table does not match target axis");
    }
    const std::int64_t cs = s.stride(control_axis);
    const std::int64_t ts = s.stride(target_axis);
    const std::int64_t total = s.size();
    for (std::int64_t i = 0; i < total; ++i) {
        if ((i / cs) % 2 == 1) {
            s.amp[i] *= phases[(i / ts) % nt];
        }
    }
}

}  // namespace detail

/// Contract op against the listed axes (row-major over the list order),
/// leaving all other axes untouched.
inline StateTensor apply_operator(const StateTensor& state, const CMat& op,
                                  std::span<const int> target_axes) {
    if (target_axes.empty()) throw std::invalid_argument("state: no target axes");
    std::int64_t dim = 1;
    for (int a : target_axes) {
        detail::check_axis_index(state, a);
        dim *= state.axes[a].size;
    }
    if (op.rows() != dim || op.cols() != dim) {
        throw std::invalid_argument("state: operator dimension does not match selected axes");
    }
    StateTensor out = state;
    if (target_axes.size() == 1) {
        detail::apply_matrix_inplace(out, target_axes[0], op);
        return out;
    }

    // Gather/scatter over the combined index of the listed axes.
    const int k = static_cast<int>(target_axes.size());
    std::vector<std::int64_t> strides(k);
    std::vector<int> sizes(k);
    for (int i = 0; i < k; ++i) {
        strides[i] = state.stride(target_axes[i]);
        sizes[i] = state.axes[target_axes[i]].size;
    }
    // Offsets of each combined index value.
    std::vector<std::int64_t> offsets(dim, 0);
    for (std::int64_t v = 0; v < dim; ++v) {
        std::int64_t rem = v;
        std::int64_t off = 0;
        for (int i = k - 1; i >= 0; --i) {
            off += (rem % sizes[i]) * strides[i];
            rem /= sizes[i];
        }
        offsets[v] = off;
    }
    // Enumerate positions with all target axes at zero.
    std::vector<bool> is_target(state.axes.size(), false);
    for (int a : target_axes) is_target[a] = true;
    std::vector<std::int64_t> rest_strides;
    std::vector<int> rest_sizes;
    for (std::size_t i = 0; i < state.axes.size(); ++i) {
        if (!is_target[i]) {
            rest_strides.push_back(state.stride(static_cast<int>(i)));
            rest_sizes.push_back(state.axes[i].size);
        }
    }
    std::int64_t rest_total = 1;
    for (int sz : rest_sizes) rest_total *= sz;
    std::vector<Complex> in(dim), res(dim);
    for (std::int64_t r = 0; r < rest_total; ++r) {
        std::int64_t rem = r;
        std::int64_t base = 0;
        for (std::size_t i = rest_sizes.size(); i-- > 0;) {
            base += (rem % rest_sizes[i]) * rest_strides[i];
            rem /= rest_sizes[i];
        }
        for (std::int64_t v = 0; v < dim; ++v) in[v] = state.amp[base + offsets[v]];
        for (std::int64_t i = 0; i < dim; ++i) {
            Complex acc(0.0, 0.0);
            for (std::int64_t j = 0; j < dim; ++j) acc += op(i, j) * in[j];
            res[i] = acc;
        }
        for (std::int64_t v = 0; v < dim; ++v) out.amp[base + offsets[v]] = res[v];
    }
    return out;
}

inline StateTensor apply_operator(const StateTensor& state, const CMat& op, int axis) {
    const int axes[1] = {axis};
    return apply_operator(state, op, std::span<const int>(axes));
}

namespace detail {

// Reshape only: expose one bit factor of a power-of-two axis as its own
// binary axis. Row-major layout makes both splits metadata-only:
//   Lsb: r = 2q + s  -> [q, s], s inserted after the axis
//   Msb: k = q + sigma*(n/2) -> [sigma, q], sigma inserted before the axis
// Returns the position of the new binary axis.
inline int split_axis_inplace(StateTensor& s, int axis_index, BitPos pos) {
    check_axis_index(s, axis_index);
    const int n = s.axes[axis_index].size;
    if (n < 2 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("state: split requires a power-of-two axis of size >= 2");
    }
    const Axis orig = s.axes[axis_index];
    Axis half = orig;
    half.size = n / 2;
    Axis bit{2, orig.kind, orig.tag};
    if (pos == BitPos::Lsb) {
        s.axes[axis_index] = half;
        s.axes.insert(s.axes.begin() + axis_index + 1, bit);
        return axis_index + 1;
    }
    s.axes[axis_index] = bit;
    s.axes.insert(s.axes.begin() + axis_index + 1, half);
    return axis_index;
}

// Inverse of split: fuse axes[first] (outer factor) with axes[first+1].
// Kind/tag follow the larger factor (the surviving register).
inline void merge_axes_inplace(StateTensor& s, int first) {
    check_axis_index(s, first);
    check_axis_index(s, first + 1);
    Axis merged = (s.axes[first].size > s.axes[first + 1].size) ? s.axes[first]
                                                                : s.axes[first + 1];
    merged.size = s.axes[first].size * s.axes[first + 1].size;
    s.axes[first] = merged;
    s.axes.erase(s.axes.begin() + first + 1);
}

}  // namespace detail

inline StateTensor split_axis(const StateTensor& state, int axis_index, BitPos pos) {
    StateTensor out = state;
    detail::split_axis_inplace(out, axis_index, pos);
    return out;
}

inline StateTensor merge_axes(const StateTensor& state, int first) {
    StateTensor out = state;
    detail::merge_axes_inplace(out, first);
    return out;
}

}  // namespace pcsqcnn
