#pragma once

#include <cstdint>
#include <cmath>

namespace rklab {

// splitmix64 stream generator. Streams are derived by hashing
// (master_seed, stream_id, replicate) into an initial state; the generator
// then walks the standard Weyl sequence. The same triple always yields the
// same draw sequence, independent of thread scheduling.
class Rng {
public:
    explicit Rng(uint64_t state) : state_(state) {}

    static uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static Rng derive(uint64_t seed, uint64_t stream_id, uint64_t replicate) {
        uint64_t h = mix(seed);
        h = mix(h ^ mix(stream_id + 0x6a09e667f3bcc909ULL));
        h = mix(h ^ mix(replicate + 0xbb67ae8584caa73bULL));
        return Rng(h);
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform on the open interval (0,1); never returns 0 or 1
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform()); }

    // Box-Muller, cosine branch only: one normal consumes two uniforms.
    // Frozen so that replicate streams reproduce bit-exactly per seed.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // categorical draw over weights[0..n), weights nonnegative not all zero
    int categorical(const double* weights, int n) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += weights[i];
        double u = uniform() * total;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return n - 1;
    }

private:
    uint64_t state_;
};

}  // namespace rklab
