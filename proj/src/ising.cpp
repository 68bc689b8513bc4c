#include "rklab/ising.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rklab {

IsingSpec::IsingSpec(const WeightedGraph& g, std::vector<double> j)
    : graph(&g), couplings(std::move(j)) {
    if (couplings.size() != g.edges().size())
        throw std::invalid_argument("couplings must align with edge list");
    for (double c : couplings)
        if (c < 0.0 || !std::isfinite(c))
            throw std::invalid_argument("Ising couplings must be finite and nonnegative");
    if (static_cast<int>(g.u_vertices().size()) > kMaxEnumerationU)
        throw std::invalid_argument("graph too large for exact enumeration");
}

IsingSpec IsingSpec::from_amplitudes(const WeightedGraph& g, const FieldVector& amp) {
    std::vector<double> j;
    j.reserve(g.edges().size());
    for (const Edge& e : g.edges()) j.push_back(e.w * amp[e.u] * amp[e.v]);
    return IsingSpec(g, std::move(j));
}

namespace {

// spins per vertex for a given mask over U; bit k set means spin -1 at
// the k-th U vertex; x0 is always +1
void fill_spins(const WeightedGraph& g, uint32_t mask, std::vector<int>& s) {
    const auto& u = g.u_vertices();
    s.assign(g.num_vertices(), 1);
    for (size_t k = 0; k < u.size(); ++k)
        if (mask & (1u << k)) s[u[k]] = -1;
}

double config_energy(const IsingSpec& spec, const std::vector<int>& s) {
    const auto& edges = spec.graph->edges();
    double h = 0.0;
    for (size_t e = 0; e < edges.size(); ++e)
        h += spec.couplings[e] * s[edges[e].u] * s[edges[e].v];
    return h;
}

}  // namespace

IsingMoments ising_moments(const IsingSpec& spec) {
    const WeightedGraph& g = *spec.graph;
    int m = static_cast<int>(g.u_vertices().size());
    uint32_t nconf = 1u << m;
    // all J >= 0, so the all-plus configuration maximizes the exponent
    double hmax = 0.0;
    for (double c : spec.couplings) hmax += c;

    std::vector<int> s;
    double z = 0.0;
    std::vector<double> zsig(g.num_vertices(), 0.0);
    for (uint32_t mask = 0; mask < nconf; ++mask) {
        fill_spins(g, mask, s);
        double w = std::exp(config_energy(spec, s) - hmax);
        z += w;
        for (int v = 0; v < g.num_vertices(); ++v) zsig[v] += s[v] * w;
    }
    IsingMoments out;
    out.log_f = hmax + std::log(z);
    out.mag.resize(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) out.mag[v] = zsig[v] / z;
    out.mag[g.x0()] = 1.0;
    return out;
}

double log_partition(const IsingSpec& spec) { return ising_moments(spec).log_f; }

double partition_function(const IsingSpec& spec) { return std::exp(log_partition(spec)); }

FieldVector magnetizations(const IsingSpec& spec) { return ising_moments(spec).mag; }

double log_partition_with_field(const IsingSpec& spec, const FieldVector& h) {
    const WeightedGraph& g = *spec.graph;
    int m = static_cast<int>(g.u_vertices().size());
    uint32_t nconf = 1u << m;
    const auto& u = g.u_vertices();

    std::vector<int> s;
    double hmax = -std::numeric_limits<double>::infinity();
    std::vector<double> energies(nconf);
    for (uint32_t mask = 0; mask < nconf; ++mask) {
        fill_spins(g, mask, s);
        double e = config_energy(spec, s);
        for (int k = 0; k < m; ++k) e += h[u[k]] * s[u[k]];
        energies[mask] = e;
        hmax = std::max(hmax, e);
    }
    double z = 0.0;
    for (uint32_t mask = 0; mask < nconf; ++mask) z += std::exp(energies[mask] - hmax);
    return hmax + std::log(z);
}

namespace {

// log of the partial sum over configurations whose first `fixed` U spins
// are pinned to the given values
double log_partial_sum(const IsingSpec& spec, const std::vector<int>& pinned,
                       int fixed) {
    const WeightedGraph& g = *spec.graph;
    const auto& u = g.u_vertices();
    int m = static_cast<int>(u.size());
    int free_n = m - fixed;
    uint32_t nconf = 1u << free_n;

    double hmax = 0.0;
    for (double c : spec.couplings) hmax += c;

    std::vector<int> s(g.num_vertices(), 1);
    for (int k = 0; k < fixed; ++k) s[u[k]] = pinned[k];
    double z = 0.0;
    for (uint32_t mask = 0; mask < nconf; ++mask) {
        for (int k = 0; k < free_n; ++k)
            s[u[fixed + k]] = (mask & (1u << k)) ? -1 : 1;
        z += std::exp(config_energy(spec, s) - hmax);
    }
    return hmax + std::log(z);
}

}  // namespace

SpinVector sample_spins(const IsingSpec& spec, Rng& rng) {
    const WeightedGraph& g = *spec.graph;
    const auto& u = g.u_vertices();
    int m = static_cast<int>(u.size());
    std::vector<int> pinned(m, 1);
    for (int k = 0; k < m; ++k) {
        pinned[k] = 1;
        double log_plus = log_partial_sum(spec, pinned, k + 1);
        pinned[k] = -1;
        double log_minus = log_partial_sum(spec, pinned, k + 1);
        double p_plus = 1.0 / (1.0 + std::exp(log_minus - log_plus));
        pinned[k] = (rng.uniform() < p_plus) ? 1 : -1;
    }
    SpinVector sigma(g.num_vertices(), 1);
    for (int k = 0; k < m; ++k) sigma[u[k]] = pinned[k];
    return sigma;
}

}  // namespace rklab
