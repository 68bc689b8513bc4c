#include "rklab/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace rklab {

namespace {

struct PathState {
    LocalTimes lt;
    int xt;
    FieldVector phi_t;  // sqrt(Phi^2 - 2 l(t)), clamped at 0
};

PathState path_state(const WeightedGraph& g, const FieldVector& phi_budget,
                     const JumpPath& path, double t) {
    for (double p : phi_budget)
        if (!(p > 0.0)) throw std::invalid_argument("Phi entries must be positive");
    if (t > path.end_time)
        throw std::out_of_range("evaluation time beyond end of path");
    auto dep = budget_depletion_time(path, g.num_vertices(), phi_budget);
    if (dep && t > dep->first * (1.0 + 1e-12) + 1e-15)
        throw std::out_of_range("evaluation time beyond budget depletion");
    PathState st;
    st.lt = local_times(path, g.num_vertices(), t);
    st.xt = path.vertex_at(t);
    st.phi_t.resize(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) {
        double sq = phi_budget[v] * phi_budget[v] - 2.0 * st.lt[v];
        st.phi_t[v] = sq > 0.0 ? std::sqrt(sq) : 0.0;
    }
    // at the depletion instant make the depleted amplitude an exact zero:
    // the recomputed occupation can fall short by rounding, which would
    // otherwise leave a spurious ~1e-8 amplitude after the square root
    if (dep && t >= dep->first * (1.0 - 1e-12) - 1e-15) {
        st.lt[dep->second] =
            0.5 * phi_budget[dep->second] * phi_budget[dep->second];
        st.phi_t[dep->second] = 0.0;
    }
    return st;
}

double eval_m_state(const WeightedGraph& g, const SpinVector& sigma,
                    const FieldVector& phi_budget, const PathState& st) {
    FieldVector field(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) field[v] = sigma[v] * st.phi_t[v];
    double log_mag = -0.5 * dirichlet_energy(g, field);
    int sign = 1;
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (v != g.x0()) {
            log_mag += std::log(phi_budget[v]);
            sign *= sigma[v];
        }
        if (v != st.xt) {
            if (st.phi_t[v] <= 0.0)
                throw std::domain_error("depleted amplitude in denominator");
            log_mag -= std::log(st.phi_t[v]);
            sign *= sigma[v];
        }
    }
    return sign * std::exp(log_mag);
}

}  // namespace

double eval_M(const WeightedGraph& g, const SpinVector& sigma,
              const FieldVector& phi_budget, const JumpPath& path, double t) {
    if (sigma[g.x0()] != 1)
        throw std::invalid_argument("sign configuration must be +1 at x0");
    PathState st = path_state(g, phi_budget, path, t);
    return eval_m_state(g, sigma, phi_budget, st);
}

double eval_N(const WeightedGraph& g, const FieldVector& phi_budget,
              const JumpPath& path, double t, NMethod method) {
    PathState st = path_state(g, phi_budget, path, t);
    const auto& u = g.u_vertices();
    int m = static_cast<int>(u.size());
    if (m > kMaxEnumerationU)
        throw std::invalid_argument("graph too large for sign enumeration");

    if (method == NMethod::Sum) {
        double total = 0.0;
        SpinVector sigma(g.num_vertices(), 1);
        uint32_t nconf = 1u << m;
        for (uint32_t mask = 0; mask < nconf; ++mask) {
            for (int k = 0; k < m; ++k) sigma[u[k]] = (mask & (1u << k)) ? -1 : 1;
            total += eval_m_state(g, sigma, phi_budget, st);
        }
        return total;
    }

    IsingSpec spec = IsingSpec::from_amplitudes(g, st.phi_t);
    IsingMoments mom = ising_moments(spec);
    double log_mag = mom.log_f;
    for (int v = 0; v < g.num_vertices(); ++v) {
        log_mag += g.strength(v) * (st.lt[v] - 0.5 * phi_budget[v] * phi_budget[v]);
        if (v != g.x0()) log_mag += std::log(phi_budget[v]);
        if (v != st.xt) {
            if (st.phi_t[v] <= 0.0)
                throw std::domain_error("depleted amplitude in denominator");
            log_mag -= std::log(st.phi_t[v]);
        }
    }
    return mom.mag[st.xt] * std::exp(log_mag);
}

double rn_vrjp(const WeightedGraph& g, const FieldVector& phi,
               const JumpPath& path, double t) {
    for (double p : phi)
        if (!(p > 0.0)) throw std::invalid_argument("phi entries must be positive");
    if (t > path.end_time)
        throw std::out_of_range("evaluation time beyond end of path");
    LocalTimes lt = local_times(path, g.num_vertices(), t);
    int xt = path.vertex_at(t);
    FieldVector psi(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v)
        psi[v] = std::sqrt(phi[v] * phi[v] + 2.0 * lt[v]);
    double log_val = 0.5 * (dirichlet_energy(g, psi) - dirichlet_energy(g, phi));
    for (int v = 0; v < g.num_vertices(); ++v) {
        if (v != g.x0()) log_val += std::log(phi[v]);
        if (v != xt) log_val -= std::log(psi[v]);
    }
    return std::exp(log_val);
}

double rn_reversed(const WeightedGraph& g, const FieldVector& phi_budget,
                   const JumpPath& path, double t) {
    double t_eff = std::min(t, path.end_time);
    if (auto dep = budget_depletion_time(path, g.num_vertices(), phi_budget))
        t_eff = std::min(t_eff, dep->first);
    SpinVector ones(g.num_vertices(), 1);
    double m_t = eval_M(g, ones, phi_budget, path, t_eff);
    double m_0 = eval_M(g, ones, phi_budget, path, 0.0);
    return m_t / m_0;
}

}  // namespace rklab
