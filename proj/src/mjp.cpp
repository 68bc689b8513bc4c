#include "rklab/mjp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rklab {

const char* end_reason_name(EndReason r) {
    switch (r) {
        case EndReason::InverseLocalTime: return "inverse-local-time";
        case EndReason::HitX0: return "hit-x0";
        case EndReason::BudgetDepleted: return "budget-depleted";
        case EndReason::Horizon: return "horizon";
    }
    return "?";
}

int JumpPath::vertex_at(double t) const {
    int v = start;
    for (const Jump& j : jumps) {
        if (j.time > t) break;
        v = j.target;
    }
    return v;
}

LocalTimes local_times(const JumpPath& path, int num_vertices, double t) {
    if (t < 0.0 || t > path.end_time)
        throw std::out_of_range("local_times: t outside [0, end_time]");
    LocalTimes lt(num_vertices, 0.0);
    int v = path.start;
    double prev = 0.0;
    for (const Jump& j : path.jumps) {
        if (j.time >= t) break;
        lt[v] += j.time - prev;
        prev = j.time;
        v = j.target;
    }
    lt[v] += t - prev;
    return lt;
}

std::optional<std::pair<double, int>> budget_depletion_time(
    const JumpPath& path, int num_vertices, const FieldVector& phi_budget) {
    LocalTimes lt(num_vertices, 0.0);
    int v = path.start;
    double prev = 0.0;
    auto check_segment = [&](double seg_end) -> std::optional<std::pair<double, int>> {
        double cap = 0.5 * phi_budget[v] * phi_budget[v];
        // recomputing occupation by summing segments can land a hair below
        // the budget on a path that was truncated exactly at depletion
        double tol = 1e-12 * std::max(cap, 1.0);
        if (lt[v] + (seg_end - prev) >= cap - tol)
            return std::make_pair(std::min(prev + std::max(cap - lt[v], 0.0), seg_end),
                                  v);
        return std::nullopt;
    };
    for (const Jump& j : path.jumps) {
        if (auto hit = check_segment(j.time)) return hit;
        lt[v] += j.time - prev;
        prev = j.time;
        v = j.target;
    }
    return check_segment(path.end_time);
}

namespace {

int draw_target(const WeightedGraph& g, int v, Rng& rng) {
    const auto& nb = g.neighbors(v);
    double total = g.strength(v);
    double u = rng.uniform() * total;
    double acc = 0.0;
    for (size_t k = 0; k < nb.size(); ++k) {
        acc += nb[k].second;
        if (u < acc) return nb[k].first;
    }
    return nb.back().first;
}

}  // namespace

JumpPath simulate_until_tau(const WeightedGraph& g, double u, Rng& rng) {
    if (!(u > 0.0)) throw std::invalid_argument("tau_u requires u > 0");
    JumpPath path;
    path.start = g.x0();
    path.end_reason = EndReason::InverseLocalTime;
    double t = 0.0;
    double l_x0 = 0.0;
    int v = g.x0();
    for (;;) {
        double h = rng.exponential() / g.strength(v);
        if (v == g.x0() && l_x0 + h >= u) {
            path.end_time = t + (u - l_x0);
            return path;
        }
        if (v == g.x0()) l_x0 += h;
        t += h;
        v = draw_target(g, v, rng);
        path.jumps.push_back({t, v});
    }
}

JumpPath simulate_until_hit(const WeightedGraph& g, int z0, Rng& rng) {
    if (z0 < 0 || z0 >= g.num_vertices())
        throw GraphError(GraphError::Kind::UnknownVertex, "simulate_until_hit: bad start");
    JumpPath path;
    path.start = z0;
    path.end_reason = EndReason::HitX0;
    if (z0 == g.x0()) return path;
    double t = 0.0;
    int v = z0;
    for (;;) {
        t += rng.exponential() / g.strength(v);
        v = draw_target(g, v, rng);
        path.jumps.push_back({t, v});
        if (v == g.x0()) {
            path.end_time = t;
            return path;
        }
    }
}

JumpPath simulate_until_budget_or_horizon(const WeightedGraph& g, int start,
                                          const FieldVector& phi_budget,
                                          double horizon, Rng& rng) {
    const bool has_budget = !phi_budget.empty();
    if (has_budget)
        for (double p : phi_budget)
            if (!(p > 0.0))
                throw std::invalid_argument("budget entries must be positive");
    JumpPath path;
    path.start = start;
    std::vector<double> lt(g.num_vertices(), 0.0);
    double t = 0.0;
    int v = start;
    for (;;) {
        double rem_budget = std::numeric_limits<double>::infinity();
        if (has_budget) rem_budget = 0.5 * phi_budget[v] * phi_budget[v] - lt[v];
        double rem_horizon = horizon - t;
        double h = rng.exponential() / g.strength(v);
        if (h >= rem_budget || h >= rem_horizon) {
            if (rem_horizon <= rem_budget) {
                path.end_time = horizon;
                path.end_reason = EndReason::Horizon;
            } else {
                path.end_time = t + rem_budget;
                path.end_reason = EndReason::BudgetDepleted;
            }
            return path;
        }
        lt[v] += h;
        t += h;
        v = draw_target(g, v, rng);
        path.jumps.push_back({t, v});
    }
}

JumpPath simulate_until_budget(const WeightedGraph& g, int start,
                               const FieldVector& phi_budget, Rng& rng) {
    if (phi_budget.empty())
        throw std::invalid_argument("simulate_until_budget requires a budget vector");
    return simulate_until_budget_or_horizon(
        g, start, phi_budget, std::numeric_limits<double>::infinity(), rng);
}

std::string path_to_csv(const WeightedGraph& g, const JumpPath& path) {
    std::ostringstream out;
    out << "time,vertex\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", 0.0);
    out << buf << "," << g.label(path.start) << "\n";
    for (const Jump& j : path.jumps) {
        std::snprintf(buf, sizeof buf, "%.17g", j.time);
        out << buf << "," << g.label(j.target) << "\n";
    }
    return out.str();
}

}  // namespace rklab
