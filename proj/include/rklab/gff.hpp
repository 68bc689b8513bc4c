#pragma once

#include "rklab/graph.hpp"
#include "rklab/rng.hpp"

namespace rklab {

// Gaussian free field pinned to 0 at x0: phi_{x0}=0 and (phi_x)_{x in U}
// centered Gaussian with covariance green_function(g).
//
// Sampling goes through the Cholesky factor of the precision matrix
// Lambda_U = L L^T: solve L^T phi_U = z with z standard normal, so that
// Cov(phi_U) = Lambda_U^{-1}. Normals are drawn in declared U order.
class GffSampler {
public:
    explicit GffSampler(const WeightedGraph& g);

    FieldVector sample(Rng& rng) const;

    // log density of the pinned field (requires phi[x0] == 0)
    double log_density(const FieldVector& phi) const;

    double log_normalizer() const { return log_norm_; }

private:
    const WeightedGraph* g_;
    Eigen::MatrixXd chol_l_;  // lower Cholesky factor of Lambda_U
    double log_norm_;         // log C = -(|U|/2) log(2pi) + sum log L_ii
};

FieldVector sample_gff(const WeightedGraph& g, Rng& rng);
double gff_log_density(const WeightedGraph& g, const FieldVector& phi);

}  // namespace rklab
