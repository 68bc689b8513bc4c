#include <doctest.h>

#include <cmath>
#include <vector>

#include "rklab/gff.hpp"
#include "rklab/rng.hpp"
#include "test_util.hpp"

using namespace rklab;
using namespace rktest;

TEST_CASE("field is pinned at x0") {
    WeightedGraph g = cycle4_chord_graph();
    GffSampler sampler(g);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        FieldVector phi = sampler.sample(rng);
        CHECK(phi[g.x0()] == 0.0);
    }
}

TEST_CASE("single edge marginal variance equals the green value") {
    WeightedGraph g = edge_graph();  // G = 1/2
    GffSampler sampler(g);
    Rng rng(2);
    const int n = 100000;
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double v = sampler.sample(rng)[1];
        s1 += v;
        s2 += v * v;
    }
    double mean = s1 / n, var = s2 / n - mean * mean;
    CHECK(std::abs(mean) < 5.0 * std::sqrt(0.5 / n));
    CHECK(std::abs(var - 0.5) < 5.0 * 0.5 * std::sqrt(2.0 / n));
}

TEST_CASE("triangle covariance matches the green function") {
    WeightedGraph g = triangle_graph();  // G = 1/3 [[2,1],[1,2]]
    GffSampler sampler(g);
    Rng rng(3);
    const int n = 100000;
    double saa = 0.0, sab = 0.0, sbb = 0.0;
    for (int i = 0; i < n; ++i) {
        FieldVector phi = sampler.sample(rng);
        saa += phi[1] * phi[1];
        sab += phi[1] * phi[2];
        sbb += phi[2] * phi[2];
    }
    CHECK(std::abs(saa / n - 2.0 / 3.0) < 0.02);
    CHECK(std::abs(sab / n - 1.0 / 3.0) < 0.02);
    CHECK(std::abs(sbb / n - 2.0 / 3.0) < 0.02);
}

TEST_CASE("log density hand values") {
    WeightedGraph g = edge_graph();
    GffSampler sampler(g);
    // density of N(0, 1/2) at phi_a: precision 2, log C = -0.5 log(2pi) + 0.5 log 2
    double log_c = -0.5 * std::log(2.0 * M_PI) + 0.5 * std::log(2.0);
    CHECK(sampler.log_density({0.0, 0.0}) == doctest::Approx(log_c).epsilon(1e-12));
    CHECK(sampler.log_density({0.0, 1.0}) ==
          doctest::Approx(log_c - 1.0).epsilon(1e-12));
    // even in phi
    CHECK(sampler.log_density({0.0, -1.3}) ==
          doctest::Approx(sampler.log_density({0.0, 1.3})).epsilon(1e-14));
    // density requires the pinned coordinate to vanish
    CHECK_THROWS(sampler.log_density({0.1, 0.0}));
}

TEST_CASE("log density uses half the dirichlet energy") {
    WeightedGraph g = triangle_graph();
    GffSampler sampler(g);
    FieldVector phi = {0.0, 0.7, -0.4};
    double expected = sampler.log_normalizer() - 0.5 * dirichlet_energy(g, phi);
    CHECK(sampler.log_density(phi) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("one dimensional density integrates to one") {
    WeightedGraph g = edge_graph();
    GffSampler sampler(g);
    // Simpson quadrature of exp(log_density) over +-10 standard deviations
    const double sd = std::sqrt(0.5);
    const double lo = -10.0 * sd, hi = 10.0 * sd;
    const int steps = 2000;  // even
    const double h = (hi - lo) / steps;
    auto f = [&](double x) { return std::exp(sampler.log_density({0.0, x})); };
    double acc = f(lo) + f(hi);
    for (int i = 1; i < steps; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    CHECK(acc * h / 3.0 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("free function wrappers agree with the sampler") {
    WeightedGraph g = triangle_graph();
    GffSampler sampler(g);
    FieldVector phi = {0.0, 0.2, -0.5};
    CHECK(gff_log_density(g, phi) == doctest::Approx(sampler.log_density(phi)));
    Rng r1(11), r2(11);
    CHECK(sample_gff(g, r1) == sampler.sample(r2));
}
