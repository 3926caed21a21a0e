#include "doctest.h"

#include <cmath>
#include <set>

#include "pcsqcnn/prng.hpp"

using pcsqcnn::rng::Stream;

TEST_SUITE_BEGIN("prng");

TEST_CASE("same key replays the same sequence") {
    Stream a(42, "init", 7);
    Stream b(42, "init", 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("purpose and index tags split streams") {
    Stream a(42, "init", 0);
    Stream b(42, "shots", 0);
    Stream c(42, "init", 1);
    int collisions = 0;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t x = a.next_u64();
        if (x == b.next_u64()) ++collisions;
        if (x == c.next_u64()) ++collisions;
    }
    CHECK(collisions == 0);
}

TEST_CASE("uniform stays in [0,1) and fills the range") {
    Stream s(1, "uniform");
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = s.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("below is bounded and hits every residue") {
    Stream s(3, "below");
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t v = s.below(7);
        CHECK(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("gauss has roughly standard moments") {
    Stream s(9, "gauss");
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = s.gauss();
        sum += g;
        sq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("shuffle is a permutation and seed-stable") {
    std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7};
    Stream s(5, "shuffle");
    s.shuffle(v);
    std::vector<int> w{0, 1, 2, 3, 4, 5, 6, 7};
    Stream s2(5, "shuffle");
    s2.shuffle(w);
    CHECK(v == w);
    std::set<int> uniq(v.begin(), v.end());
    CHECK(uniq.size() == 8);
}

TEST_SUITE_END();
