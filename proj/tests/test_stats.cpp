#include <doctest.h>

#include <cmath>
#include <vector>

#include "rklab/rng.hpp"
#include "rklab/stats.hpp"

using namespace rklab;

TEST_CASE("mean and variance estimators on hand data") {
    std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    MeanStderr m = mean_stderr(v);
    CHECK(m.mean == doctest::Approx(2.5));
    // sample sd = sqrt(5/3), stderr = sd/2
    CHECK(m.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    MeanStderr var = variance_stderr(v);
    CHECK(var.mean == doctest::Approx(5.0 / 3.0));
    CHECK(var.stderr_ > 0.0);
}

TEST_CASE("two sample z statistic") {
    MeanStderr a{1.0, 0.1, 100}, b{1.3, 0.1, 100};
    CHECK(two_sample_mean_z(a, b) ==
          doctest::Approx(-0.3 / std::sqrt(0.02)).epsilon(1e-12));
}

TEST_CASE("ks statistic on hand samples") {
    // identical samples: D = 0, p = 1
    std::vector<double> a = {1.0, 2.0, 3.0};
    KsResult same = two_sample_ks(a, a);
    CHECK(same.statistic == doctest::Approx(0.0));
    CHECK(same.p_value == doctest::Approx(1.0));
    // fully separated samples: D = 1
    KsResult apart = two_sample_ks({0.0, 0.1}, {5.0, 6.0});
    CHECK(apart.statistic == doctest::Approx(1.0));
    CHECK(apart.p_value < 0.5);
}

TEST_CASE("kolmogorov tail reference values") {
    // Q(1.36) ~ 0.049, the classical 5% critical point
    CHECK(kolmogorov_tail(1.36) == doctest::Approx(0.049).epsilon(0.02));
    CHECK(kolmogorov_tail(1.63) == doctest::Approx(0.010).epsilon(0.03));
    CHECK(kolmogorov_tail(0.3) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(kolmogorov_tail(5.0) < 1e-10);
    // monotone decreasing across the series switch point
    CHECK(kolmogorov_tail(1.0) > kolmogorov_tail(1.2));
    CHECK(kolmogorov_tail(1.17) > kolmogorov_tail(1.19));
}

TEST_CASE("chi square tail reference values") {
    CHECK(chi_square_tail(3.841, 1) == doctest::Approx(0.05).epsilon(0.001));
    CHECK(chi_square_tail(5.991, 2) == doctest::Approx(0.05).epsilon(0.001));
    CHECK(chi_square_tail(0.0, 3) == doctest::Approx(1.0));
    // chi^2_2 is Exp(1/2): tail at x is exp(-x/2)
    CHECK(chi_square_tail(4.0, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
}

TEST_CASE("ks calibration under the null") {
    // two samples from the same distribution should rarely produce small p
    Rng rng(2024);
    int below = 0;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> a(2000), b(2000);
        for (auto& x : a) x = rng.normal();
        for (auto& x : b) x = rng.normal();
        if (two_sample_ks(a, b).p_value < 0.001) ++below;
    }
    CHECK(below <= 1);
}

TEST_CASE("ks detects a shifted alternative") {
    Rng rng(55);
    std::vector<double> a(5000), b(5000);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal() + 0.2;
    CHECK(two_sample_ks(a, b).p_value < 1e-6);
}

TEST_CASE("weighted moments") {
    // unit weights reduce to the ordinary mean
    std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> ones(4, 1.0);
    WeightedMoment w = weighted_moment_ci(v, ones);
    MeanStderr m = mean_stderr(v);
    CHECK(w.mean == doctest::Approx(m.mean));
    CHECK(w.ess == doctest::Approx(4.0));

    // a single positive weight selects that value
    WeightedMoment sel = weighted_moment_ci({10.0, 20.0}, {0.0, 3.0});
    CHECK(sel.mean == doctest::Approx(20.0));
    CHECK(sel.ess == doctest::Approx(1.0));

    // signed weights are allowed (self-normalized)
    WeightedMoment sgn = weighted_moment_ci({1.0, 2.0, 3.0}, {1.0, -0.5, 1.0});
    CHECK(sgn.mean == doctest::Approx((1.0 - 1.0 + 3.0) / 1.5));

    // all-zero weights are degenerate
    CHECK_THROWS(weighted_moment_ci({1.0, 2.0}, {0.0, 0.0}));
}
