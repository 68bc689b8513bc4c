#include "rklab/gff.hpp"

#include <cmath>

namespace rklab {

GffSampler::GffSampler(const WeightedGraph& g) : g_(&g) {
    Eigen::MatrixXd lam = laplacian_u(g);
    Eigen::LLT<Eigen::MatrixXd> llt(lam);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("killed Laplacian is not positive definite");
    chol_l_ = llt.matrixL();
    int m = static_cast<int>(lam.rows());
    log_norm_ = -0.5 * m * std::log(2.0 * 3.14159265358979323846);
    for (int i = 0; i < m; ++i) log_norm_ += std::log(chol_l_(i, i));
}

FieldVector GffSampler::sample(Rng& rng) const {
    int m = static_cast<int>(chol_l_.rows());
    Eigen::VectorXd z(m);
    for (int i = 0; i < m; ++i) z(i) = rng.normal();
    Eigen::VectorXd phi_u = chol_l_.transpose().triangularView<Eigen::Upper>().solve(z);
    FieldVector phi(g_->num_vertices(), 0.0);
    const auto& u = g_->u_vertices();
    for (int i = 0; i < m; ++i) phi[u[i]] = phi_u(i);
    return phi;
}

double GffSampler::log_density(const FieldVector& phi) const {
    if (phi[g_->x0()] != 0.0)
        throw std::invalid_argument("pinned field must vanish at x0");
    return log_norm_ - 0.5 * dirichlet_energy(*g_, phi);
}

FieldVector sample_gff(const WeightedGraph& g, Rng& rng) {
    return GffSampler(g).sample(rng);
}

double gff_log_density(const WeightedGraph& g, const FieldVector& phi) {
    return GffSampler(g).log_density(phi);
}

}  // namespace rklab
