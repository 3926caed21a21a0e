#include "doctest.h"

#include <numbers>

#include "pcsqcnn/encoding.hpp"
#include "pcsqcnn/symmetry.hpp"

using namespace pcsqcnn;

TEST_SUITE_BEGIN("encoding");

TEST_CASE("resizing a constant image stays constant") {
    ImageTensor img = make_image(7, 5, 0.37);
    const ImageTensor out = bilinear_resize(img, 16, 16);
    for (double v : out.pix) CHECK(v == doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("2x2 ramp upsamples to the half-pixel ramp") {
    ImageTensor img = make_image(2, 2);
    img.at(0, 1) = 1.0;
    img.at(1, 1) = 1.0;
    const ImageTensor out = bilinear_resize(img, 4, 4);
    const double expected[4] = {0.0, 0.25, 0.75, 1.0};
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            CHECK(out.at(r, c) == doctest::Approx(expected[c]).epsilon(1e-14));
        }
    }
}

TEST_CASE("identity resize is bitwise equal") {
    ImageTensor img = make_image(28, 28);
    rng::Stream s(4, "img");
    for (double& v : img.pix) v = s.uniform();
    const ImageTensor out = bilinear_resize(img, 28, 28);
    CHECK(out.pix == img.pix);
}

TEST_CASE("zero-sized resize is rejected") {
    const ImageTensor img = make_image(4, 4);
    CHECK_THROWS_AS(bilinear_resize(img, 0, 4), std::invalid_argument);
}

TEST_CASE("centered placement occupies the expected block") {
    const ImageTensor ones = make_image(16, 16, 1.0);
    const ImageTensor c0 = place_and_translate(ones, 32, 0, 0);
    for (int r = 0; r < 32; ++r) {
        for (int c = 0; c < 32; ++c) {
            const bool inside = r >= 8 && r <= 23 && c >= 8 && c <= 23;
            CHECK(c0.at(r, c) == (inside ? 1.0 : 0.0));
        }
    }
    const ImageTensor c8 = place_and_translate(ones, 32, 8, 8);
    for (int r = 0; r < 32; ++r) {
        for (int c = 0; c < 32; ++c) {
            const bool inside = r >= 16 && c >= 16;
            CHECK(c8.at(r, c) == (inside ? 1.0 : 0.0));
        }
    }
    CHECK_THROWS_AS(place_and_translate(ones, 32, 9, 0), std::invalid_argument);
}

TEST_CASE("zero patch gives a zero canvas") {
    const ImageTensor zero = make_image(8, 8);
    const ImageTensor canvas = place_and_translate(zero, 16, 3, -4);
    for (double v : canvas.pix) CHECK(v == 0.0);
}

TEST_CASE("mid-gray encodes to feature |0> with unit amplitude") {
    const ImageTensor img = make_image(4, 4, 0.5);
    const StateTensor s = encode_frqi(img, EncoderConfig{0.0, std::numbers::pi, 1});
    REQUIRE(s.axes.size() == 3);
    CHECK(s.squared_norm() == doctest::Approx(16.0).epsilon(1e-12));
    for (int u = 0; u < 4; ++u) {
        for (int v = 0; v < 4; ++v) {
            const std::size_t base = static_cast<std::size_t>((u * 4 + v) * 2);
            CHECK(std::abs(s.amp[base] - Complex(1.0, 0.0)) < 1e-15);
            CHECK(std::abs(s.amp[base + 1]) < 1e-15);
        }
    }
}

TEST_CASE("black and white pixels hit the |1> poles") {
    ImageTensor img = make_image(2, 2, 0.0);
    const StateTensor s0 = encode_frqi(img, EncoderConfig{0.0, std::numbers::pi, 1});
    CHECK(std::abs(s0.amp[0]) < 1e-15);                       // sin 0
    CHECK(std::abs(s0.amp[1] - Complex(1.0, 0.0)) < 1e-15);   // cos 0

    for (double& v : img.pix) v = 1.0;
    const StateTensor s1 = encode_frqi(img, EncoderConfig{0.0, std::numbers::pi, 1});
    CHECK(std::abs(s1.amp[0]) < 1e-15);                       // sin pi
    CHECK(std::abs(s1.amp[1] - Complex(-1.0, 0.0)) < 1e-15);  // cos pi = -1, sign kept
}

TEST_CASE("squared norm equals the pixel count for random images") {
    for (int n : {2, 4, 8}) {
        ImageTensor img = make_image(n, n);
        rng::Stream st(7, "norm", static_cast<std::uint64_t>(n));
        for (double& v : img.pix) v = st.uniform();
        for (int nf : {1, 2}) {
            const StateTensor s = encode_frqi(img, EncoderConfig{0.0, std::numbers::pi, nf});
            CHECK(s.squared_norm() == doctest::Approx(static_cast<double>(n) * n).epsilon(1e-12));
        }
    }
}

TEST_CASE("encoding intertwines pixel rolls with the shift operator") {
    const int n = 4;
    ImageTensor img = make_image(n, n);
    rng::Stream st(9, "roll");
    for (double& v : img.pix) v = st.uniform();
    ImageTensor rolled = make_image(n, n);
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) rolled.at((u + 1) % n, v) = img.at(u, v);
    }
    const EncoderConfig cfg{0.0, std::numbers::pi, 1};
    const StateTensor lhs = encode_frqi(rolled, cfg);
    const StateTensor rhs = apply_operator(encode_frqi(img, cfg), shift_matrix(n), 0);
    for (std::size_t i = 0; i < lhs.amp.size(); ++i) CHECK(std::abs(lhs.amp[i] - rhs.amp[i]) < 1e-15);
}

TEST_CASE("auxiliary feature qubits stay in |0>") {
    ImageTensor img = make_image(2, 2);
    rng::Stream st(11, "aux");
    for (double& v : img.pix) v = st.uniform();
    const StateTensor s = encode_frqi(img, EncoderConfig{0.0, std::numbers::pi, 3});
    for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
            for (int f = 2; f < 8; ++f) {  // any index with an aux bit set
                CHECK(s.amp[static_cast<std::size_t>((u * 2 + v) * 8 + f)] == Complex(0.0, 0.0));
            }
        }
    }
}

TEST_CASE("non-square and non-power-of-two images are rejected") {
    CHECK_THROWS_AS(encode_frqi(make_image(3, 3), EncoderConfig{}), std::invalid_argument);
    CHECK_THROWS_AS(encode_frqi(make_image(4, 2), EncoderConfig{}), std::invalid_argument);
}

TEST_SUITE_END();
