#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pcsqcnn/state.hpp"

namespace pcsqcnn {

/// Grayscale image, row-major, values in [0, 1].
struct ImageTensor {
    int h = 0;
    int w = 0;
    std::vector<double> pix;

    double at(int r, int c) const { return pix[static_cast<std::size_t>(r) * w + c]; }
    double& at(int r, int c) { return pix[static_cast<std::size_t>(r) * w + c]; }
};

inline ImageTensor make_image(int h, int w, double fill = 0.0) {
    return ImageTensor{h, w, std::vector<double>(static_cast<std::size_t>(h) * w, fill)};
}

struct EncoderConfig {
    double a = 0.0;                 // lower angle endpoint
    double b = std::numbers::pi;    // upper angle endpoint
    int n_f = 1;                    // feature qubits
};

/// Bilinear resize with half-pixel-center sampling: source coordinate
/// (i + 0.5) * scale - 0.5, edge-clamped. Output clamped to [0, 1].
inline ImageTensor bilinear_resize(const ImageTensor& img, int out_h, int out_w) {
    if (img.h < 1 || img.w < 1) throw std::invalid_argument("resize: empty input");
    if (out_h < 1 || out_w < 1) throw std::invalid_argument("resize: zero-sized output");
    if (out_h == img.h && out_w == img.w) return img;
    ImageTensor out = make_image(out_h, out_w);
    const double sy = static_cast<double>(img.h) / out_h;
    const double sx = static_cast<double>(img.w) / out_w;
    for (int r = 0; r < out_h; ++r) {
        const double fy = (r + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        const double wy = fy - y0;
        int y1 = y0 + 1;
        y0 = std::clamp(y0, 0, img.h - 1);
        y1 = std::clamp(y1, 0, img.h - 1);
        for (int c = 0; c < out_w; ++c) {
            const double fx = (c + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            const double wx = fx - x0;
            int x1 = x0 + 1;
            x0 = std::clamp(x0, 0, img.w - 1);
            x1 = std::clamp(x1, 0, img.w - 1);
            const double v = (1.0 - wy) * ((1.0 - wx) * img.at(y0, x0) + wx * img.at(y0, x1)) +
                             wy * ((1.0 - wx) * img.at(y1, x0) + wx * img.at(y1, x1));
            out.at(r, c) = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

/// Copy the patch onto a zero canvas at top-left (canvas - patch)/2 plus
/// the integer offset (dr rows, dc cols). No wraparound: an offset that
/// pushes the patch outside the canvas is an error.
inline ImageTensor place_and_translate(const ImageTensor& patch, int canvas, int dr, int dc) {
    if (patch.h > canvas || patch.w > canvas) {
        throw std::invalid_argument("place: patch larger than canvas");
    }
    const int base_r = (canvas - patch.h) / 2 + dr;
    const int base_c = (canvas - patch.w) / 2 + dc;
    if (base_r < 0 || base_c < 0 || base_r + patch.h > canvas || base_c + patch.w > canvas) {
        throw std::invalid_argument("place: offset pushes patch outside canvas");
    }
    ImageTensor out = make_image(canvas, canvas);
    for (int r = 0; r < patch.h; ++r) {
        for (int c = 0; c < patch.w; ++c) {
            out.at(base_r + r, base_c + c) = patch.at(r, c);
        }
    }
    return out;
}

/// FRQI-like address encoding. Pixel (u, v) maps to angle
/// p = a + (b - a) * x_{u,v}; the color qubit carries
/// sin(p)|0> + cos(p)|1> on the least-significant feature qubit and all
/// auxiliary feature qubits stay |0>. The global 1/N prefactor is omitted,
/// so the squared norm of the encoded state is N_x * N_y.
inline StateTensor encode_frqi(const ImageTensor& img, const EncoderConfig& cfg) {
    if (img.h != img.w || img.h < 2 || (img.h & (img.h - 1)) != 0) {
        throw std::invalid_argument("encode: image must be square with power-of-two side >= 2");
    }
    if (cfg.n_f < 1) throw std::invalid_argument("encode: n_f must be >= 1");
    const int n = img.h;
    const int df = 1 << cfg.n_f;
    StateTensor s;
    s.axes = {Axis{n, AxisKind::SpatialX, 0}, Axis{n, AxisKind::SpatialY, 0},
              Axis{df, AxisKind::Feature, 0}};
    s.amp.assign(static_cast<std::size_t>(n) * n * df, Complex(0.0, 0.0));
    s.norm2_target = static_cast<double>(n) * n;
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            const double p = cfg.a + (cfg.b - cfg.a) * img.at(u, v);
            const std::size_t base = (static_cast<std::size_t>(u) * n + v) * df;
            s.amp[base + 0] = Complex(std::sin(p), 0.0);
            s.amp[base + 1] = Complex(std::cos(p), 0.0);
        }
    }
    return s;
}

}  // namespace pcsqcnn
