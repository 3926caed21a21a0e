#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcsqcnn/encoding.hpp"
#include "pcsqcnn/prng.hpp"

namespace pcsqcnn {

struct Dataset {
    std::vector<ImageTensor> images;
    std::vector<int> labels;

    std::size_t size() const { return images.size(); }
};

struct IdxError : std::runtime_error {
    explicit IdxError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& path, std::size_t offset) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw IdxError(path + ": truncated at byte offset " + std::to_string(offset));
    return (std::uint32_t{buf[0]} << 24) | (std::uint32_t{buf[1]} << 16) |
           (std::uint32_t{buf[2]} << 8) | std::uint32_t{buf[3]};
}

inline void write_be32(std::ostream& out, std::uint32_t v) {
    const unsigned char buf[4] = {static_cast<unsigned char>(v >> 24),
                                  static_cast<unsigned char>(v >> 16),
                                  static_cast<unsigned char>(v >> 8),
                                  static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

}  // namespace detail

/// Parse a big-endian IDX image/label pair (image magic 0x00000803 with
/// dims count/rows/cols, label magic 0x00000801). Pixels are uint8 scaled
/// to [0, 1] by /255.
inline Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw IdxError(images_path + ": cannot open");
    const std::uint32_t img_magic = detail::read_be32(img, images_path, 0);
    if (img_magic != 0x00000803u) {
        throw IdxError(images_path + ": bad image magic at byte offset 0 (got " +
                       std::to_string(img_magic) + ", want 2051)");
    }
    const std::uint32_t count = detail::read_be32(img, images_path, 4);
    const std::uint32_t rows = detail::read_be32(img, images_path, 8);
    const std::uint32_t cols = detail::read_be32(img, images_path, 12);

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw IdxError(labels_path + ": cannot open");
    const std::uint32_t lab_magic = detail::read_be32(lab, labels_path, 0);
    if (lab_magic != 0x00000801u) {
        throw IdxError(labels_path + ": bad label magic at byte offset 0 (got " +
                       std::to_string(lab_magic) + ", want 2049)");
    }
    const std::uint32_t lab_count = detail::read_be32(lab, labels_path, 4);
    if (lab_count != count) {
        throw IdxError(labels_path + ": label count " + std::to_string(lab_count) +
                       " does not match image count " + std::to_string(count));
    }

    Dataset out;
    out.images.reserve(count);
    out.labels.reserve(count);
    const std::size_t npx = static_cast<std::size_t>(rows) * cols;
    std::vector<unsigned char> buf(npx);
    for (std::uint32_t i = 0; i < count; ++i) {
        img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(npx));
        if (!img) {
            throw IdxError(images_path + ": truncated at byte offset " +
                           std::to_string(16 + static_cast<std::size_t>(i) * npx));
        }
        ImageTensor t = make_image(static_cast<int>(rows), static_cast<int>(cols));
        for (std::size_t k = 0; k < npx; ++k) t.pix[k] = static_cast<double>(buf[k]) / 255.0;
        out.images.push_back(std::move(t));
        char l = 0;
        lab.read(&l, 1);
        if (!lab) {
            throw IdxError(labels_path + ": truncated at byte offset " + std::to_string(8 + i));
        }
        out.labels.push_back(static_cast<int>(static_cast<unsigned char>(l)));
    }
    return out;
}

inline void write_idx(const Dataset& data, const std::string& images_path,
                      const std::string& labels_path) {
    if (data.images.empty()) throw std::invalid_argument("write_idx: empty dataset");
    std::ofstream img(images_path, std::ios::binary);
    std::ofstream lab(labels_path, std::ios::binary);
    if (!img || !lab) throw IdxError("write_idx: cannot open output files");
    const int rows = data.images[0].h;
    const int cols = data.images[0].w;
    detail::write_be32(img, 0x00000803u);
    detail::write_be32(img, static_cast<std::uint32_t>(data.size()));
    detail::write_be32(img, static_cast<std::uint32_t>(rows));
    detail::write_be32(img, static_cast<std::uint32_t>(cols));
    detail::write_be32(lab, 0x00000801u);
    detail::write_be32(lab, static_cast<std::uint32_t>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.images[i].pix) {
            const int q = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
            const char c = static_cast<char>(static_cast<unsigned char>(q));
            img.write(&c, 1);
        }
        const char l = static_cast<char>(static_cast<unsigned char>(data.labels[i]));
        lab.write(&l, 1);
    }
}

// ---------------------------------------------------------------------------
// Synthetic ten-class digit glyphs. Seven-segment style strokes rasterized
// at 28x28 with per-sample endpoint jitter, brightness scaling, and light
// pixel noise. Stands in for MNIST when no IDX files are available; the
// whole preprocessing pipeline downstream is identical.

namespace detail {

struct Segment {
    double x0, y0, x1, y1;
};

inline const std::array<std::vector<int>, 10>& segment_map() {
    // segments: 0 top, 1 upper-right, 2 lower-right, 3 bottom,
    //           4 lower-left, 5 upper-left, 6 middle
    static const std::array<std::vector<int>, 10> map = {{
        {0, 1, 2, 3, 4, 5},     // 0
        {1, 2},                 // 1
        {0, 1, 6, 4, 3},        // 2
        {0, 1, 6, 2, 3},        // 3
        {5, 6, 1, 2},           // 4
        {0, 5, 6, 2, 3},        // 5
        {0, 5, 6, 4, 2, 3},     // 6
        {0, 1, 2},              // 7
        {0, 1, 2, 3, 4, 5, 6},  // 8
        {0, 1, 2, 3, 5, 6},     // 9
    }};
    return map;
}

inline Segment base_segment(int id) {
    switch (id) {
        case 0: return {0.25, 0.12, 0.75, 0.12};
        case 1: return {0.75, 0.12, 0.75, 0.50};
        case 2: return {0.75, 0.50, 0.75, 0.88};
        case 3: return {0.25, 0.88, 0.75, 0.88};
        case 4: return {0.25, 0.50, 0.25, 0.88};
        case 5: return {0.25, 0.12, 0.25, 0.50};
        default: return {0.25, 0.50, 0.75, 0.50};
    }
}

inline double point_segment_distance(double px, double py, const Segment& s) {
    const double vx = s.x1 - s.x0, vy = s.y1 - s.y0;
    const double wx = px - s.x0, wy = py - s.y0;
    const double vv = vx * vx + vy * vy;
    double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = px - (s.x0 + t * vx);
    const double dy = py - (s.y0 + t * vy);
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace detail

/// One synthetic digit image (28x28 by default), deterministic per
/// (seed, index, digit).
inline ImageTensor synthesize_digit(int digit, std::uint64_t seed, std::uint64_t index,
                                    int side = 28) {
    if (digit < 0 || digit > 9) throw std::invalid_argument("synth: digit out of range");
    rng::Stream s(seed, "synth-digit", (static_cast<std::uint64_t>(digit) << 40) ^ index);
    std::vector<detail::Segment> segs;
    for (int id : detail::segment_map()[static_cast<std::size_t>(digit)]) {
        detail::Segment seg = detail::base_segment(id);
        seg.x0 += 0.025 * s.gauss();
        seg.y0 += 0.025 * s.gauss();
        seg.x1 += 0.025 * s.gauss();
        seg.y1 += 0.025 * s.gauss();
        segs.push_back(seg);
    }
    const double brightness = s.uniform(0.85, 1.0);
    const double thickness = s.uniform(0.080, 0.105);
    ImageTensor img = make_image(side, side);
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            const double y = (r + 0.5) / side;
            const double x = (c + 0.5) / side;
            double dist = 1e9;
            for (const detail::Segment& seg : segs) {
                dist = std::min(dist, detail::point_segment_distance(x, y, seg));
            }
            double v = std::clamp((thickness - dist) / thickness * 2.2, 0.0, 1.0) * brightness;
            v += 0.02 * s.uniform();
            img.at(r, c) = std::clamp(v, 0.0, 1.0);
        }
    }
    return img;
}

inline Dataset synthesize_digits(int per_class, std::uint64_t seed, int side = 28) {
    Dataset out;
    out.images.reserve(static_cast<std::size_t>(per_class) * 10);
    out.labels.reserve(static_cast<std::size_t>(per_class) * 10);
    // interleave classes so prefix subsets stay balanced
    for (int i = 0; i < per_class; ++i) {
        for (int d = 0; d < 10; ++d) {
            out.images.push_back(synthesize_digit(d, seed, static_cast<std::uint64_t>(i), side));
            out.labels.push_back(d);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

struct DatasetSpec {
    enum class Regime { Translated, Full };
    enum class Source { Idx, Synthetic };

    Regime regime = Regime::Translated;
    Source source = Source::Idx;
    std::string train_images, train_labels, test_images, test_labels;
    int synth_train_per_class = 100;
    int synth_test_per_class = 50;

    int per_class_cap = 1000;  // translated regime: train subsample size per class
    int resize = 16;           // digit size after bilinear resize
    int canvas = 32;           // quantum canvas side (power of two)
    int max_offset = 8;        // translation magnitude bound per axis
    std::uint64_t seed = 1;
};

struct Benchmark {
    Dataset train;
    Dataset test;
};

namespace detail {

inline Dataset preprocess_split(const Dataset& raw, const DatasetSpec& spec, bool translated,
                                const char* offset_purpose) {
    Dataset out;
    out.images.reserve(raw.size());
    out.labels = raw.labels;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        ImageTensor img = bilinear_resize(raw.images[i], spec.resize, spec.resize);
        if (spec.canvas > spec.resize) {
            int dr = 0, dc = 0;
            if (translated) {
                rng::Stream s(spec.seed, offset_purpose, static_cast<std::uint64_t>(i));
                dr = static_cast<int>(s.below(static_cast<std::uint64_t>(2 * spec.max_offset + 1))) -
                     spec.max_offset;
                dc = static_cast<int>(s.below(static_cast<std::uint64_t>(2 * spec.max_offset + 1))) -
                     spec.max_offset;
            }
            img = place_and_translate(img, spec.canvas, dr, dc);
        } else if (spec.canvas != spec.resize) {
            throw std::invalid_argument("benchmark: canvas smaller than resize target");
        }
        out.images.push_back(std::move(img));
    }
    return out;
}

inline Dataset balanced_subsample(const Dataset& full, int per_class, std::uint64_t seed) {
    std::vector<std::size_t> order(full.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng::Stream s(seed, "subsample-shuffle");
    s.shuffle(order);
    std::array<int, 10> taken{};
    Dataset out;
    for (std::size_t idx : order) {
        const int label = full.labels[idx];
        if (label < 0 || label > 9) throw std::invalid_argument("benchmark: label outside 0..9");
        if (taken[static_cast<std::size_t>(label)] >= per_class) continue;
        ++taken[static_cast<std::size_t>(label)];
        out.images.push_back(full.images[idx]);
        out.labels.push_back(label);
    }
    for (int d = 0; d < 10; ++d) {
        if (taken[static_cast<std::size_t>(d)] < per_class) {
            throw std::invalid_argument("benchmark: class " + std::to_string(d) +
                                        " has fewer than " + std::to_string(per_class) +
                                        " examples");
        }
    }
    return out;
}

}  // namespace detail

/// Deterministic function of (spec, seed). Translated regime: balanced
/// seeded train subsample, full test membership, every image resized,
/// placed, and translated exactly once, then frozen. Full regime: direct
/// resize, with centered placement when the canvas is larger than the
/// resize target.
inline Benchmark build_benchmark(const DatasetSpec& spec) {
    Dataset raw_train, raw_test;
    if (spec.source == DatasetSpec::Source::Synthetic) {
        raw_train = synthesize_digits(spec.synth_train_per_class, spec.seed ^ 0x5437ab1eULL);
        raw_test = synthesize_digits(spec.synth_test_per_class, spec.seed ^ 0x90f1c3d5ULL);
    } else {
        raw_train = load_idx(spec.train_images, spec.train_labels);
        raw_test = load_idx(spec.test_images, spec.test_labels);
    }
    Benchmark bench;
    if (spec.regime == DatasetSpec::Regime::Translated) {
        const Dataset sub = detail::balanced_subsample(raw_train, spec.per_class_cap, spec.seed);
        bench.train = detail::preprocess_split(sub, spec, true, "offset-train");
        bench.test = detail::preprocess_split(raw_test, spec, true, "offset-test");
    } else {
        bench.train = detail::preprocess_split(raw_train, spec, false, "offset-train");
        bench.test = detail::preprocess_split(raw_test, spec, false, "offset-test");
    }
    return bench;
}

}  // namespace pcsqcnn
