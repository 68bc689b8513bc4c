#include <doctest.h>

#include <cmath>
#include <vector>

#include "rklab/ising.hpp"
#include "rklab/rng.hpp"
#include "test_util.hpp"

using namespace rklab;
using namespace rktest;

namespace {

// independent brute-force reference: sum exp(sum_e J_e s_u s_v) over all
// spin assignments with s_{x0} = +1
double brute_partition(const WeightedGraph& g, const std::vector<double>& j,
                       FieldVector* mag_out = nullptr) {
    const auto& u = g.u_vertices();
    int m = static_cast<int>(u.size());
    double z = 0.0;
    FieldVector acc(g.num_vertices(), 0.0);
    for (uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> s(g.num_vertices(), 1);
        for (int k = 0; k < m; ++k)
            if (mask & (1u << k)) s[u[k]] = -1;
        double h = 0.0;
        for (size_t e = 0; e < g.edges().size(); ++e)
            h += j[e] * s[g.edges()[e].u] * s[g.edges()[e].v];
        double w = std::exp(h);
        z += w;
        for (int v = 0; v < g.num_vertices(); ++v) acc[v] += s[v] * w;
    }
    if (mag_out) {
        mag_out->resize(g.num_vertices());
        for (int v = 0; v < g.num_vertices(); ++v) (*mag_out)[v] = acc[v] / z;
    }
    return z;
}

}  // namespace

TEST_CASE("two spin closed form: partition 2cosh(J), magnetization tanh(J)") {
    WeightedGraph g = edge_graph();
    for (double j : {0.1, 1.0, 5.0}) {
        IsingSpec spec(g, {j});
        CHECK(partition_function(spec) ==
              doctest::Approx(2.0 * std::cosh(j)).epsilon(1e-12));
        FieldVector mag = magnetizations(spec);
        CHECK(mag[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(mag[1] == doctest::Approx(std::tanh(j)).epsilon(1e-12));
    }
}

TEST_CASE("zero couplings factorize") {
    WeightedGraph g = triangle_graph();
    IsingSpec spec(g, {0.0, 0.0, 0.0});
    CHECK(partition_function(spec) == doctest::Approx(4.0).epsilon(1e-12));
    FieldVector mag = magnetizations(spec);
    CHECK(mag[1] == doctest::Approx(0.0));
    CHECK(mag[2] == doctest::Approx(0.0));
}

TEST_CASE("chain of two edges: second neighbor magnetization tanh^2") {
    WeightedGraph chain({"x0", "a", "b"}, "x0", {{0, 1, 1.0}, {1, 2, 1.0}});
    IsingSpec spec(chain, {1.0, 1.0});
    FieldVector mag = magnetizations(spec);
    CHECK(mag[1] == doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
    CHECK(mag[2] == doctest::Approx(std::tanh(1.0) * std::tanh(1.0)).epsilon(1e-12));
}

TEST_CASE("agrees with the brute force reference on reference graphs") {
    {
        WeightedGraph g = triangle_graph();
        std::vector<double> j = {0.3, 0.7, 0.5};
        FieldVector bmag;
        double bz = brute_partition(g, j, &bmag);
        IsingSpec spec(g, j);
        CHECK(partition_function(spec) == doctest::Approx(bz).epsilon(1e-12));
        IsingMoments mom = ising_moments(spec);
        CHECK(mom.log_f == doctest::Approx(std::log(bz)).epsilon(1e-12));
        for (int v = 0; v < g.num_vertices(); ++v)
            CHECK(mom.mag[v] == doctest::Approx(bmag[v]).epsilon(1e-12));
    }
    {
        WeightedGraph g = cycle4_chord_graph();
        std::vector<double> j = {0.5, 1.0, 2.0, 1.0, 0.5};
        FieldVector bmag;
        double bz = brute_partition(g, j, &bmag);
        IsingSpec spec(g, j);
        CHECK(log_partition(spec) == doctest::Approx(std::log(bz)).epsilon(1e-12));
        FieldVector mag = magnetizations(spec);
        for (int v = 0; v < g.num_vertices(); ++v)
            CHECK(mag[v] == doctest::Approx(bmag[v]).epsilon(1e-12));
    }
}

TEST_CASE("from_amplitudes builds J = W * amp_u * amp_v") {
    WeightedGraph g = triangle_graph();
    FieldVector amp = {2.0, 0.5, 3.0};
    IsingSpec spec = IsingSpec::from_amplitudes(g, amp);
    for (size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& ed = g.edges()[e];
        CHECK(spec.couplings[e] ==
              doctest::Approx(ed.w * amp[ed.u] * amp[ed.v]).epsilon(1e-15));
    }
}

TEST_CASE("magnetization is the field derivative of the log partition") {
    WeightedGraph g = triangle_graph();
    IsingSpec spec(g, {0.3, 0.7, 0.5});
    FieldVector mag = magnetizations(spec);
    const double eps = 1e-5;
    for (int v : g.u_vertices()) {
        FieldVector hp(g.num_vertices(), 0.0), hm(g.num_vertices(), 0.0);
        hp[v] = eps;
        hm[v] = -eps;
        double deriv = (log_partition_with_field(spec, hp) -
                        log_partition_with_field(spec, hm)) /
                       (2.0 * eps);
        CHECK(deriv == doctest::Approx(mag[v]).epsilon(1e-6));
    }
}

TEST_CASE("ferromagnetic monotonicity in each coupling") {
    WeightedGraph g = triangle_graph();
    double prev_a = -1.0;
    for (double j01 : {0.0, 0.25, 0.5, 1.0, 2.0}) {
        IsingSpec spec(g, {j01, 0.4, 0.6});
        double ma = magnetizations(spec)[1];
        CHECK(ma >= prev_a - 1e-14);
        prev_a = ma;
    }
    // increasing a far coupling also helps (second Griffiths inequality)
    double prev_b = -1.0;
    for (double j12 : {0.0, 0.5, 1.0, 2.0}) {
        IsingSpec spec(g, {0.4, 0.6, j12});
        double mb = magnetizations(spec)[1];
        CHECK(mb >= prev_b - 1e-14);
        prev_b = mb;
    }
}

TEST_CASE("spin sampler matches exact moments") {
    WeightedGraph g = triangle_graph();
    IsingSpec spec(g, {0.8, 0.3, 0.6});
    IsingMoments mom = ising_moments(spec);
    Rng rng(71);
    const int n = 100000;
    double sa = 0.0, sb = 0.0, sab = 0.0;
    double eab = 0.0;
    {
        // exact pair expectation by brute force
        FieldVector unused;
        const auto& u = g.u_vertices();
        double z = 0.0;
        for (uint32_t mask = 0; mask < 4u; ++mask) {
            std::vector<int> s(3, 1);
            for (int k = 0; k < 2; ++k)
                if (mask & (1u << k)) s[u[k]] = -1;
            double h = 0.8 * s[0] * s[1] + 0.3 * s[0] * s[2] + 0.6 * s[1] * s[2];
            double w = std::exp(h);
            z += w;
            eab += s[1] * s[2] * w;
        }
        eab /= z;
    }
    for (int i = 0; i < n; ++i) {
        SpinVector s = sample_spins(spec, rng);
        REQUIRE(s[g.x0()] == 1);
        REQUIRE((s[1] == 1 || s[1] == -1));
        sa += s[1];
        sb += s[2];
        sab += s[1] * s[2];
    }
    double se = 1.0 / std::sqrt(double(n));
    CHECK(std::abs(sa / n - mom.mag[1]) < 5.0 * se);
    CHECK(std::abs(sb / n - mom.mag[2]) < 5.0 * se);
    CHECK(std::abs(sab / n - eab) < 5.0 * se);
}

TEST_CASE("validation") {
    WeightedGraph g = edge_graph();
    CHECK_THROWS(IsingSpec(g, {-0.1}));           // antiferromagnetic coupling
    CHECK_THROWS(IsingSpec(g, {1.0, 2.0}));       // wrong coupling count
    // enumeration guard on |U| > 24
    std::vector<std::string> labels = {"x0"};
    std::vector<Edge> edges;
    for (int i = 1; i <= 26; ++i) {
        labels.push_back("v" + std::to_string(i));
        edges.push_back({0, i, 1.0});
    }
    WeightedGraph star(labels, "x0", edges);
    CHECK_THROWS(IsingSpec(star, std::vector<double>(26, 0.1)));
}
