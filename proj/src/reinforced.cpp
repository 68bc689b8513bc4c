#include "rklab/reinforced.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

#include "rklab/ising.hpp"

namespace rklab {

namespace {

constexpr double kDepletionEps = 1e-9;   // site depleted when L <= eps * Phi
constexpr double kMagUnderflow = 1e-15;  // magnetization treated as numerically 0
constexpr long kMaxHazardEvals = 1000000;

struct EvalBudget {
    long evals = 0;
    void charge(long n) {
        evals += n;
        if (evals > kMaxHazardEvals)
            throw NumericalFailure("hazard integration exceeded step budget");
    }
};

double simpson(double a, double fa, double fm, double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double fa,
                        double b, double fb, double m, double fm, double whole,
                        double tol, int depth, EvalBudget& budget) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    budget.charge(2);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, fa, flm, m, fm);
    double right = simpson(m, fm, frm, b, fb);
    double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * tol)
        return left + right + err / 15.0;
    return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, budget) +
           adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, budget);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol, EvalBudget& budget) {
    if (b <= a) return 0.0;
    double m = 0.5 * (a + b);
    budget.charge(3);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = simpson(a, fa, fm, b, fb);
    return adaptive_simpson(f, a, fa, b, fb, m, fm, whole, tol, 40, budget);
}

}  // namespace

std::optional<double> next_jump_time(const std::function<double(double)>& hazard,
                                     double cap, Rng& rng) {
    double target = rng.exponential();
    if (!(cap > 0.0)) return std::nullopt;

    EvalBudget budget;
    const double rel_tol = 1e-8;
    double t = 0.0;
    double lam = 0.0;  // accumulated hazard mass
    while (cap - t > std::max(1e-14 * cap, 1e-300)) {
        double h = (cap - t) / 8.0;
        double tol = rel_tol * std::max(target, lam + 1.0);
        double dlam = integrate(hazard, t, t + h, tol, budget);
        if (lam + dlam >= target) {
            // bracketed bisection for the crossing inside [t, t+h]
            double lo = t, hi = t + h;
            double lam_lo = lam;
            while (hi - lo > 1e-12) {
                double mid = 0.5 * (lo + hi);
                double seg = integrate(hazard, lo, mid, tol, budget);
                if (lam_lo + seg >= target) {
                    hi = mid;
                } else {
                    lo = mid;
                    lam_lo += seg;
                }
            }
            return 0.5 * (lo + hi);
        }
        lam += dlam;
        t += h;
    }
    return std::nullopt;
}

JumpPath simulate_vrjp_timechanged(const WeightedGraph& g, const FieldVector& phi0,
                                   int start, double horizon, Rng& rng) {
    for (double p : phi0)
        if (!(p > 0.0)) throw std::invalid_argument("initial local times must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

    JumpPath path;
    path.start = start;
    path.end_reason = EndReason::Horizon;
    path.end_time = horizon;

    std::vector<double> lt(g.num_vertices(), 0.0);
    double t = 0.0;
    int v = start;
    std::vector<double> weights;
    for (;;) {
        // rate from i: (sum_j W_ij sqrt(phi_j^2+2l_j)) / sqrt(phi_i^2+2l_i(.)),
        // so the holding time inverts in closed form
        double a = phi0[v] * phi0[v] + 2.0 * lt[v];
        const auto& nb = g.neighbors(v);
        weights.clear();
        double c = 0.0;
        for (auto& [j, w] : nb) {
            double wj = w * std::sqrt(phi0[j] * phi0[j] + 2.0 * lt[j]);
            weights.push_back(wj);
            c += wj;
        }
        double e = rng.exponential();
        double s = e / c + std::sqrt(a);
        double h = 0.5 * (s * s - a);
        if (t + h >= horizon) return path;
        lt[v] += h;
        t += h;
        int k = rng.categorical(weights.data(), static_cast<int>(weights.size()));
        v = nb[k].first;
        path.jumps.push_back({t, v});
    }
}

double vrjp_inverse_timechange(const WeightedGraph& g, const FieldVector& phi0,
                               const JumpPath& path, double t) {
    LocalTimes lt = local_times(path, g.num_vertices(), t);
    double d = 0.0;
    for (int v = 0; v < g.num_vertices(); ++v)
        d += std::sqrt(phi0[v] * phi0[v] + 2.0 * lt[v]) - phi0[v];
    return d;
}

namespace {

ReversedRun finish_run(const WeightedGraph& g, const FieldVector& phi_budget,
                       JumpPath path, const std::vector<double>& lt, int end_site,
                       ReversedStop kind) {
    ReversedRun run;
    run.z_path = std::move(path);
    run.end_site = end_site;
    run.end_kind = kind;
    run.l_end.resize(g.num_vertices());
    run.y_end_time = 0.0;
    for (int v = 0; v < g.num_vertices(); ++v) {
        double sq = phi_budget[v] * phi_budget[v] - 2.0 * lt[v];
        run.l_end[v] = sq > 0.0 ? std::sqrt(sq) : 0.0;
        run.y_end_time += phi_budget[v] - run.l_end[v];
    }
    return run;
}

}  // namespace

ReversedRun simulate_reversed_vrjp(const WeightedGraph& g, const FieldVector& phi_budget,
                                   int start, Rng& rng) {
    for (double p : phi_budget)
        if (!(p > 0.0)) throw std::invalid_argument("Phi entries must be positive");

    JumpPath path;
    path.start = start;
    std::vector<double> lt(g.num_vertices(), 0.0);
    double t = 0.0;
    int v = start;
    std::vector<double> weights;
    for (;;) {
        double a = phi_budget[v] * phi_budget[v] - 2.0 * lt[v];
        const auto& nb = g.neighbors(v);
        weights.clear();
        double c = 0.0;
        for (auto& [j, w] : nb) {
            double sq = phi_budget[j] * phi_budget[j] - 2.0 * lt[j];
            double wj = w * std::sqrt(sq > 0.0 ? sq : 0.0);
            weights.push_back(wj);
            c += wj;
        }
        double e = rng.exponential();
        double sqrt_a = std::sqrt(a);
        if (e >= c * sqrt_a) {
            // hazard mass C*sqrt(a) exhausted: current budget depletes
            lt[v] = 0.5 * phi_budget[v] * phi_budget[v];
            path.end_time = t + 0.5 * a;
            path.end_reason = EndReason::BudgetDepleted;
            return finish_run(g, phi_budget, std::move(path), lt, v,
                              ReversedStop::Depletion);
        }
        double r = sqrt_a - e / c;
        double h = 0.5 * (a - r * r);
        lt[v] += h;
        t += h;
        int k = rng.categorical(weights.data(), static_cast<int>(weights.size()));
        v = nb[k].first;
        path.jumps.push_back({t, v});
    }
}

namespace {

// Per-neighbor jump rates of the magnetized reversed process: reversed
// amplitude ratio times the Ising magnetization ratio at the current
// amplitudes. Owns the scratch needed for the exact enumeration.
class MagnetizedRates {
public:
    MagnetizedRates(const WeightedGraph& g, const FieldVector& phi_budget)
        : g_(&g),
          phi_(phi_budget),
          amp_(g.num_vertices()),
          mag_(g.num_vertices()),
          zsig_(g.num_vertices()) {
        // spin lookup per configuration mask, fixed +1 at x0
        const auto& u = g.u_vertices();
        int m = static_cast<int>(u.size());
        spins_.assign(static_cast<size_t>(1u << m) * g.num_vertices(), 1);
        for (uint32_t mask = 0; mask < (1u << m); ++mask)
            for (int k = 0; k < m; ++k)
                if (mask & (1u << k))
                    spins_[static_cast<size_t>(mask) * g.num_vertices() + u[k]] = -1;
    }

    // amplitudes for local times lt, with the current site's remaining budget
    // rem_site = Phi_i^2/2 - l_i(t) passed directly: recomputing it as a
    // difference of O(1) quantities cancels catastrophically near depletion;
    // recomputes the exact Ising moments in place (no allocations)
    void set_state(const std::vector<double>& lt, int site, double rem_site) {
        site_ = site;
        const int nv = g_->num_vertices();
        for (int v = 0; v < nv; ++v) {
            double sq;
            if (v == site) {
                sq = 2.0 * rem_site;
            } else {
                sq = phi_[v] * phi_[v] - 2.0 * lt[v];
            }
            amp_[v] = sq > 0.0 ? std::sqrt(sq) : 0.0;
        }
        const auto& edges = g_->edges();
        double hmax = 0.0;
        for (const Edge& e : edges) hmax += e.w * amp_[e.u] * amp_[e.v];
        int m = static_cast<int>(g_->u_vertices().size());
        double z = 0.0;
        for (int v = 0; v < nv; ++v) zsig_[v] = 0.0;
        for (uint32_t mask = 0; mask < (1u << m); ++mask) {
            const int8_t* s = &spins_[static_cast<size_t>(mask) * nv];
            double h = 0.0;
            for (const Edge& e : edges)
                h += e.w * amp_[e.u] * amp_[e.v] * s[e.u] * s[e.v];
            double w = std::exp(h - hmax);
            z += w;
            for (int v = 0; v < nv; ++v) zsig_[v] += s[v] * w;
        }
        for (int v = 0; v < nv; ++v) mag_[v] = zsig_[v] / z;
        mag_[g_->x0()] = 1.0;
        if (mag_[site_] <= kMagUnderflow)
            throw NumericalFailure("magnetization underflow at current site");
    }

    double total_rate() const {
        double lam = 0.0;
        for (auto& [j, w] : g_->neighbors(site_))
            lam += w * (amp_[j] / amp_[site_]) * (mag_[j] / mag_[site_]);
        return lam;
    }

    void neighbor_rates(std::vector<double>& out) const {
        out.clear();
        for (auto& [j, w] : g_->neighbors(site_))
            out.push_back(w * (amp_[j] / amp_[site_]) * (mag_[j] / mag_[site_]));
    }

private:
    const WeightedGraph* g_;
    FieldVector phi_;
    FieldVector amp_;
    FieldVector mag_;
    FieldVector zsig_;
    std::vector<int8_t> spins_;
    int site_ = 0;
};

}  // namespace

ReversedRun simulate_magnetized_reversed(const WeightedGraph& g,
                                         const FieldVector& phi_budget, int start,
                                         ReversedStop stop, Rng& rng) {
    for (double p : phi_budget)
        if (!(p > 0.0)) throw std::invalid_argument("Phi entries must be positive");
    if (stop == ReversedStop::HitX0 && start == g.x0())
        throw std::invalid_argument("hit-x0 mode requires start != x0");

    JumpPath path;
    path.start = start;
    std::vector<double> lt(g.num_vertices(), 0.0);
    double t = 0.0;
    int v = start;
    MagnetizedRates rates(g, phi_budget);
    std::vector<double> weights;
    for (;;) {
        double rem = 0.5 * phi_budget[v] * phi_budget[v] - lt[v];
        // integrate the hazard only down to L = eps * Phi at the current
        // site; the residual mass is assigned to depletion
        double eps_l = kDepletionEps * phi_budget[v];
        double cap = rem - 0.5 * eps_l * eps_l;
        auto hazard = [&](double tau) {
            rates.set_state(lt, v, rem - tau);
            return rates.total_rate();
        };
        std::optional<double> h = next_jump_time(hazard, cap, rng);
        if (!h) {
            lt[v] = 0.5 * phi_budget[v] * phi_budget[v];
            path.end_time = t + rem;
            path.end_reason = EndReason::BudgetDepleted;
            return finish_run(g, phi_budget, std::move(path), lt, v,
                              ReversedStop::Depletion);
        }
        lt[v] += *h;
        t += *h;
        rates.set_state(lt, v, rem - *h);
        rates.neighbor_rates(weights);
        int k = rng.categorical(weights.data(), static_cast<int>(weights.size()));
        int target = g.neighbors(v)[k].first;
        path.jumps.push_back({t, target});
        if (stop == ReversedStop::HitX0 && target == g.x0()) {
            path.end_time = t;
            path.end_reason = EndReason::HitX0;
            return finish_run(g, phi_budget, std::move(path), lt, g.x0(),
                              ReversedStop::HitX0);
        }
        v = target;
    }
}

std::string reversed_run_to_csv(const WeightedGraph& g, const FieldVector& phi_budget,
                                const ReversedRun& run) {
    std::ostringstream out;
    out << "z_time,vertex";
    for (int v = 0; v < g.num_vertices(); ++v) out << ",L_" << g.label(v);
    out << "\n";
    char buf[32];
    auto emit = [&](double time, int vertex) {
        LocalTimes lt = local_times(run.z_path, g.num_vertices(), time);
        std::snprintf(buf, sizeof buf, "%.17g", time);
        out << buf << "," << g.label(vertex);
        for (int v = 0; v < g.num_vertices(); ++v) {
            double sq = phi_budget[v] * phi_budget[v] - 2.0 * lt[v];
            std::snprintf(buf, sizeof buf, "%.17g", sq > 0.0 ? std::sqrt(sq) : 0.0);
            out << "," << buf;
        }
        out << "\n";
    };
    emit(0.0, run.z_path.start);
    for (const Jump& j : run.z_path.jumps) emit(j.time, j.target);
    return out.str();
}

}  // namespace rklab
