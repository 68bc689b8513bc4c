#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rklab/graph.hpp"

namespace rklab {

enum class ExperimentId : uint64_t {
    Rk2 = 1,
    InverseRk2 = 2,
    Rk1 = 3,
    InverseRk1 = 4,
    MartingaleCheck = 5,
    RnCheck = 6,
    IsingTable = 7,
};

// stream id for (experiment, sample group); replicate index is the third
// component of the derivation
inline uint64_t stream_id(ExperimentId e, uint64_t group) {
    return (static_cast<uint64_t>(e) << 8) | group;
}

struct CheckRecord {
    std::string name;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double target = 0.0;
    std::string stat_kind;  // "z", "ks", "exact", "count"
    double stat = 0.0;
    double p = 1.0;
    bool pass = false;
};

struct ExperimentReport {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> config;  // ordered echo
    uint64_t config_hash = 0;
    uint64_t master_seed = 0;
    long replicates = 0;
    long numerical_failures = 0;
    std::vector<CheckRecord> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    bool failure_rate_ok() const {
        return replicates == 0 ||
               numerical_failures <= 0.001 * static_cast<double>(replicates);
    }
};

// body excludes wall time and timestamps so reruns are byte-identical;
// those live in the sidecar written by the CLI
std::string report_to_json(const ExperimentReport& r);
std::string report_to_csv(const ExperimentReport& r);
uint64_t fnv1a(const std::string& s);
std::string format_double(double v);  // 17 significant digits

// Monte Carlo verification of the second Ray-Knight identity: occupation
// field plus half squared GFF against the shifted squared GFF.
// control_scale != 1 deliberately mis-shifts the second sample (power check).
ExperimentReport run_rk2(const WeightedGraph& g, double u, long n, uint64_t seed,
                         int threads, double control_scale = 1.0);

// Inversion of the second identity: forward pipeline (GFF + MJP to tau_u)
// against the magnetized reversed pipeline with an exact Ising sign draw.
ExperimentReport run_inverse_rk2(const WeightedGraph& g, double u, long n,
                                 uint64_t seed, int threads);

// First Ray-Knight identity with the signed-weight and the positive
// Ising-reweighted estimators.
ExperimentReport run_rk1(const WeightedGraph& g, int z0, double s, long n,
                         uint64_t seed, int threads);

// Inversion of the first identity (hit-x0 stopped reversed process).
ExperimentReport run_inverse_rk1(const WeightedGraph& g, int z0, double s, long n,
                                 uint64_t seed, int threads);

// Martingale checks for M and N at fixed horizons over a grid of sign and
// amplitude vectors.
ExperimentReport run_martingale_check(const WeightedGraph& g, long n, uint64_t seed,
                                      int threads);

// Density normalizations and change-of-measure checks for the VRJP and the
// magnetized reversed process.
ExperimentReport run_rn_check(const WeightedGraph& g, long n, uint64_t seed,
                              int threads);

// Deterministic table of exact Ising quantities at couplings J_e = scale * W_e.
ExperimentReport run_ising_table(const WeightedGraph& g, double scale);

// amplitude vectors used by the check experiments (exposed for tests)
FieldVector phi_pattern_constant(const WeightedGraph& g, double value);
FieldVector phi_pattern_mixed(const WeightedGraph& g);

}  // namespace rklab
