#pragma once

#include "rklab/graph.hpp"
#include "rklab/ising.hpp"
#include "rklab/mjp.hpp"

namespace rklab {

// Martingale along an MJP path for a sign configuration sigma and initial
// amplitudes Phi:
//   M_t = exp(-1/2 E(sigma Phi(t))) * prod_{j != x0} sigma_j Phi_j(0)
//                                   / prod_{j != X_t} sigma_j Phi_j(t),
// with Phi_j(t) = sqrt(Phi_j^2 - 2 l_j(t)). Products are evaluated in the
// log domain with the sign tracked separately.
double eval_M(const WeightedGraph& g, const SpinVector& sigma,
              const FieldVector& phi_budget, const JumpPath& path, double t);

enum class NMethod { Sum, Closed };

// N_t = sum over sign configurations of M_t. Sum enumerates {-1,+1}^U;
// Closed uses the partition-function form
//   exp(sum_i W_i (l_i(t) - Phi_i^2/2)) * F(t) * <sigma_{X_t}>_(t)
//       * prod Phi_j(0) / prod Phi_j(t)
// with Ising couplings J_ij = W_ij Phi_i(t) Phi_j(t).
double eval_N(const WeightedGraph& g, const FieldVector& phi_budget,
              const JumpPath& path, double t, NMethod method);

// Radon-Nikodym derivative of the time-changed VRJP with initial local
// times phi against the MJP, along the MJP path up to time t.
double rn_vrjp(const WeightedGraph& g, const FieldVector& phi,
               const JumpPath& path, double t);

// Radon-Nikodym derivative of the time-changed reversed VRJP against the
// MJP, evaluated at t ^ T; equals M_{t^T}/M_0 with all-plus signs.
double rn_reversed(const WeightedGraph& g, const FieldVector& phi_budget,
                   const JumpPath& path, double t);

}  // namespace rklab
