#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rklab/graph.hpp"
#include "rklab/rng.hpp"

namespace rklab {

enum class EndReason { InverseLocalTime, HitX0, BudgetDepleted, Horizon };

const char* end_reason_name(EndReason r);

struct Jump {
    double time;
    int target;
};

// Piecewise-constant trajectory. Stores jumps only; local times are
// computed on demand (paths are short at desk scale).
struct JumpPath {
    int start = 0;
    std::vector<Jump> jumps;
    double end_time = 0.0;
    EndReason end_reason = EndReason::Horizon;

    int vertex_at(double t) const;
    int final_vertex() const {
        return jumps.empty() ? start : jumps.back().target;
    }
};

using LocalTimes = std::vector<double>;

// occupation times per vertex up to t; requires 0 <= t <= end_time
LocalTimes local_times(const JumpPath& path, int num_vertices, double t);

// First time along the path at which some l_i reaches Phi_i^2/2,
// together with the depleted vertex; nullopt if no budget depletes
// before end_time. Used to evaluate functionals at t ^ T.
std::optional<std::pair<double, int>> budget_depletion_time(
    const JumpPath& path, int num_vertices, const FieldVector& phi_budget);

// MJP run from x0 until the inverse local time tau_u: the final holding
// interval at x0 is truncated so that l_{x0}(end) = u exactly.
JumpPath simulate_until_tau(const WeightedGraph& g, double u, Rng& rng);

// MJP run from z0 until the first arrival at x0 (empty path if z0 == x0).
JumpPath simulate_until_hit(const WeightedGraph& g, int z0, Rng& rng);

// MJP run until T = first time some l_i(t) = Phi_i^2/2; the final holding
// is truncated at depletion, so l at the depleted vertex is exact.
JumpPath simulate_until_budget(const WeightedGraph& g, int start,
                               const FieldVector& phi_budget, Rng& rng);

// MJP run until min(horizon, T); used for martingale evaluation at t ^ T.
// With an empty budget vector, runs to the horizon.
JumpPath simulate_until_budget_or_horizon(const WeightedGraph& g, int start,
                                          const FieldVector& phi_budget,
                                          double horizon, Rng& rng);

// CSV dump: header "time,vertex", one row per segment start
std::string path_to_csv(const WeightedGraph& g, const JumpPath& path);

}  // namespace rklab
