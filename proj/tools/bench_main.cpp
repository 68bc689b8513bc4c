// Throughput comparison of the serial reference replicate loop against the
// OpenMP loop, on the rk2 sampling kernel. Also verifies that both loops
// produce identical results.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "rklab/gff.hpp"
#include "rklab/graph.hpp"
#include "rklab/mjp.hpp"
#include "rklab/parallel.hpp"
#include "rklab/rng.hpp"

using namespace rklab;

namespace {

WeightedGraph triangle() {
    return WeightedGraph({"x0", "a", "b"}, "x0",
                         {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
}

double time_replicates(const WeightedGraph& g, long n, int threads,
                       std::vector<FieldVector>& out) {
    GffSampler gff(g);
    auto t0 = std::chrono::steady_clock::now();
    out = run_replicates<FieldVector>(n, threads, [&](long r) {
        Rng rng = Rng::derive(12345, 1, r);
        FieldVector phi = gff.sample(rng);
        JumpPath path = simulate_until_tau(g, 1.0, rng);
        LocalTimes lt = local_times(path, g.num_vertices(), path.end_time);
        FieldVector v(g.num_vertices());
        for (int x = 0; x < g.num_vertices(); ++x)
            v[x] = lt[x] + 0.5 * phi[x] * phi[x];
        return v;
    });
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    long n = argc > 1 ? std::atol(argv[1]) : 200000;
    WeightedGraph g = triangle();

    std::vector<FieldVector> serial, parallel;
    double t_serial = time_replicates(g, n, 1, serial);
    int hw = hardware_threads();
    double t_parallel = time_replicates(g, n, hw, parallel);

    bool identical = serial == parallel;
    std::printf("replicates:        %ld\n", n);
    std::printf("serial:            %.3f s (%.0f rep/s)\n", t_serial, n / t_serial);
    std::printf("openmp (%d thr):   %.3f s (%.0f rep/s)\n", hw, t_parallel,
                n / t_parallel);
    std::printf("speedup:           %.2fx\n", t_serial / t_parallel);
    std::printf("identical results: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
