#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "pcsqcnn/dataset.hpp"

using namespace pcsqcnn;

TEST_SUITE_BEGIN("dataset");

namespace {

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "pcsqcnn_dataset_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("synthetic digits are deterministic and class-distinct") {
    const ImageTensor a = synthesize_digit(3, 42, 7);
    const ImageTensor b = synthesize_digit(3, 42, 7);
    CHECK(a.pix == b.pix);
    const ImageTensor c = synthesize_digit(8, 42, 7);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.pix.size(); ++i) diff += std::abs(a.pix[i] - c.pix[i]);
    CHECK(diff > 1.0);
    for (double v : a.pix) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("idx round trip preserves quantized pixels and labels") {
    Dataset d;
    d.images.push_back(make_image(4, 4, 0.0));
    d.images[0].at(1, 2) = 1.0;  // byte 255 -> 1.0 after reload
    d.images[0].at(0, 0) = 0.5;
    d.labels.push_back(9);
    const auto dir = temp_dir();
    const std::string img = (dir / "img.idx").string();
    const std::string lab = (dir / "lab.idx").string();
    write_idx(d, img, lab);
    const Dataset back = load_idx(img, lab);
    REQUIRE(back.size() == 1);
    CHECK(back.labels[0] == 9);
    CHECK(back.images[0].at(1, 2) == 1.0);
    CHECK(back.images[0].at(0, 0) == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("corrupted magic is reported with its offset") {
    const auto dir = temp_dir();
    const std::string img = (dir / "bad.idx").string();
    std::ofstream out(img, std::ios::binary);
    const char junk[16] = {0, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1};
    out.write(junk, 16);
    out.close();
    try {
        load_idx(img, img);
        FAIL("expected IdxError");
    } catch (const IdxError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("byte offset 0") != std::string::npos);
    }
}

TEST_CASE("truncated image payload is rejected") {
    Dataset d;
    d.images.push_back(make_image(4, 4, 0.3));
    d.labels.push_back(1);
    const auto dir = temp_dir();
    const std::string img = (dir / "trunc.idx").string();
    const std::string lab = (dir / "trunc_lab.idx").string();
    write_idx(d, img, lab);
    std::filesystem::resize_file(img, 20);  // header + 4 pixels only
    CHECK_THROWS_AS(load_idx(img, lab), IdxError);
}

TEST_CASE("image and label counts must agree") {
    Dataset d1, d2;
    d1.images = {make_image(2, 2, 0.1), make_image(2, 2, 0.2)};
    d1.labels = {0, 1};
    d2.images = {make_image(2, 2, 0.1)};
    d2.labels = {0};
    const auto dir = temp_dir();
    write_idx(d1, (dir / "a_img.idx").string(), (dir / "a_lab.idx").string());
    write_idx(d2, (dir / "b_img.idx").string(), (dir / "b_lab.idx").string());
    CHECK_THROWS_AS(load_idx((dir / "a_img.idx").string(), (dir / "b_lab.idx").string()), IdxError);
}

TEST_CASE("translated benchmark is balanced, bounded, and reproducible") {
    DatasetSpec spec;
    spec.source = DatasetSpec::Source::Synthetic;
    spec.regime = DatasetSpec::Regime::Translated;
    spec.synth_train_per_class = 12;
    spec.synth_test_per_class = 3;
    spec.per_class_cap = 10;
    spec.resize = 8;
    spec.canvas = 16;
    spec.max_offset = 4;
    spec.seed = 99;
    const Benchmark a = build_benchmark(spec);
    const Benchmark b = build_benchmark(spec);
    CHECK(a.train.size() == 100);
    CHECK(a.test.size() == 30);
    std::array<int, 10> counts{};
    for (int l : a.train.labels) ++counts[static_cast<std::size_t>(l)];
    for (int c : counts) CHECK(c == 10);
    bool any_corner_hit = false;
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        CHECK(a.train.images[i].pix == b.train.images[i].pix);
        CHECK(a.train.images[i].h == 16);
        for (double v : a.train.images[i].pix) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        if (a.train.images[i].at(0, 0) > 0.0) any_corner_hit = true;
    }
    CHECK(a.test.images[0].pix == b.test.images[0].pix);

    // with max offset 0 the patch never reaches the canvas corner
    DatasetSpec centered = spec;
    centered.max_offset = 0;
    const Benchmark c = build_benchmark(centered);
    for (std::size_t i = 0; i < c.train.size(); ++i) {
        for (int r = 0; r < 16; ++r) {
            for (int col = 0; col < 16; ++col) {
                if (r >= 4 && r < 12 && col >= 4 && col < 12) continue;
                CHECK(c.train.images[i].at(r, col) == 0.0);
            }
        }
    }
    (void)any_corner_hit;
}

TEST_CASE("insufficient class population is an error") {
    DatasetSpec spec;
    spec.source = DatasetSpec::Source::Synthetic;
    spec.synth_train_per_class = 5;
    spec.per_class_cap = 10;
    spec.resize = 8;
    spec.canvas = 16;
    spec.max_offset = 4;
    CHECK_THROWS_AS(build_benchmark(spec), std::invalid_argument);
}

TEST_CASE("full regime centers 28x28 digits on the 32x32 canvas") {
    DatasetSpec spec;
    spec.source = DatasetSpec::Source::Synthetic;
    spec.regime = DatasetSpec::Regime::Full;
    spec.synth_train_per_class = 1;
    spec.synth_test_per_class = 1;
    spec.resize = 28;
    spec.canvas = 32;
    const Benchmark b = build_benchmark(spec);
    CHECK(b.train.images[0].h == 32);
    for (int r = 0; r < 32; ++r) {
        for (int c = 0; c < 32; ++c) {
            if (r < 2 || r > 29 || c < 2 || c > 29) {
                CHECK(b.train.images[0].at(r, c) == 0.0);
            }
        }
    }
}

TEST_SUITE_END();
