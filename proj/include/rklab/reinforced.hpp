#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include "rklab/graph.hpp"
#include "rklab/mjp.hpp"
#include "rklab/rng.hpp"

namespace rklab {

// Numerical failure during a reinforced-process run (hazard integration
// did not converge, or a magnetization underflowed before depletion).
// Experiments catch these and count them against the failure budget.
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ReversedStop { Depletion, HitX0 };

// Run of a reversed process in the time-changed clock.
struct ReversedRun {
    JumpPath z_path;       // trajectory in the time-changed clock
    FieldVector l_end;     // remaining amplitudes sqrt(Phi^2 - 2 l(end))
    int end_site = 0;
    ReversedStop end_kind = ReversedStop::Depletion;
    double y_end_time = 0.0;  // image of the end under the inverse time change
};

// Time-changed VRJP on [0, horizon]: jump rate from i to j is
// W_ij sqrt((phi_j^2 + 2 l_j) / (phi_i^2 + 2 l_i)).
JumpPath simulate_vrjp_timechanged(const WeightedGraph& g, const FieldVector& phi0,
                                   int start, double horizon, Rng& rng);

// Reported inverse time change of the run above:
// sum_i (sqrt(phi_i^2 + 2 l_i(t)) - phi_i).
double vrjp_inverse_timechange(const WeightedGraph& g, const FieldVector& phi0,
                               const JumpPath& path, double t);

// Time-changed reversed VRJP: rate W_ij sqrt((Phi_j^2-2l_j)/(Phi_i^2-2l_i)),
// stopped at the first budget depletion.
ReversedRun simulate_reversed_vrjp(const WeightedGraph& g, const FieldVector& phi_budget,
                                   int start, Rng& rng);

// Magnetized reversed process: the reversed rate times the Ising
// magnetization ratio <sigma_j>/<sigma_i> at couplings
// J_kl = W_kl sqrt(Phi_k^2-2l_k) sqrt(Phi_l^2-2l_l). Stopped either at the
// first depletion or at the first arrival at x0.
ReversedRun simulate_magnetized_reversed(const WeightedGraph& g,
                                         const FieldVector& phi_budget, int start,
                                         ReversedStop stop, Rng& rng);

// Inverts the cumulative hazard: draws E ~ Exp(1) and returns h with
// int_0^h hazard = E, or nullopt if the hazard mass on [0, cap) is
// exhausted first (depletion). Adaptive Simpson integration (relative
// tolerance 1e-8) with forward steps capped at 1/8 of the remaining
// interval; root located to 1e-12 absolute in time.
std::optional<double> next_jump_time(const std::function<double(double)>& hazard,
                                     double cap, Rng& rng);

// CSV dump of a reversed run: z_time, vertex, remaining amplitudes.
std::string reversed_run_to_csv(const WeightedGraph& g, const FieldVector& phi_budget,
                                const ReversedRun& run);

}  // namespace rklab
