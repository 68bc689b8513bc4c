#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "rklab/rng.hpp"

using namespace rklab;

TEST_CASE("derived streams are deterministic") {
    Rng a = Rng::derive(42, 7, 3);
    Rng b = Rng::derive(42, 7, 3);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct (stream, replicate) pairs give distinct output") {
    std::set<uint64_t> seen;
    for (uint64_t s = 0; s < 64; ++s)
        for (uint64_t r = 0; r < 1024; ++r)
            seen.insert(Rng::derive(42, s, r).next_u64());
    CHECK(seen.size() == 64 * 1024);
    // different master seeds separate too
    CHECK(Rng::derive(1, 0, 0).next_u64() != Rng::derive(2, 0, 0).next_u64());
}

TEST_CASE("uniform lies strictly inside (0,1) with the right mean") {
    Rng rng(123);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // stderr of the mean is 1/sqrt(12 n)
    CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
}

TEST_CASE("normal moments") {
    Rng rng(99);
    const int n = 100000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = rng.normal();
        s1 += z;
        s2 += z * z;
    }
    CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("exponential mean and positivity") {
    Rng rng(7);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double e = rng.exponential();
        REQUIRE(e > 0.0);
        sum += e;
    }
    CHECK(std::abs(sum / n - 1.0) < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("categorical matches weight proportions") {
    Rng rng(5);
    double w[3] = {1.0, 2.0, 1.0};
    long counts[3] = {0, 0, 0};
    const int n = 40000;
    for (int i = 0; i < n; ++i) ++counts[rng.categorical(w, 3)];
    CHECK(std::abs(counts[0] / double(n) - 0.25) < 0.012);
    CHECK(std::abs(counts[1] / double(n) - 0.50) < 0.014);
    CHECK(std::abs(counts[2] / double(n) - 0.25) < 0.012);
}
