#include "rklab/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "rklab/functionals.hpp"
#include "rklab/gff.hpp"
#include "rklab/ising.hpp"
#include "rklab/mjp.hpp"
#include "rklab/parallel.hpp"
#include "rklab/reinforced.hpp"
#include "rklab/rng.hpp"
#include "rklab/stats.hpp"

namespace rklab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

constexpr double kZLimit = 4.0;
constexpr double kKsPMin = 0.001;

CheckRecord check_z(const std::string& name, double est, double se, double target) {
    CheckRecord c;
    c.name = name;
    c.estimate = est;
    c.stderr_ = se;
    c.target = target;
    c.stat_kind = "z";
    c.stat = se > 0.0 ? (est - target) / se : (est == target ? 0.0 : INFINITY);
    c.p = std::erfc(std::abs(c.stat) / std::sqrt(2.0));
    c.pass = std::abs(c.stat) <= kZLimit;
    return c;
}

CheckRecord check_diff_z(const std::string& name, const MeanStderr& a,
                         const MeanStderr& b) {
    CheckRecord c;
    c.name = name;
    c.estimate = a.mean;
    c.stderr_ = std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
    c.target = b.mean;
    c.stat_kind = "z";
    c.stat = two_sample_mean_z(a, b);
    c.p = std::erfc(std::abs(c.stat) / std::sqrt(2.0));
    c.pass = std::abs(c.stat) <= kZLimit;
    return c;
}

CheckRecord check_ks(const std::string& name, const KsResult& ks) {
    CheckRecord c;
    c.name = name;
    c.estimate = ks.statistic;
    c.stat_kind = "ks";
    c.stat = ks.statistic;
    c.p = ks.p_value;
    c.pass = ks.p_value >= kKsPMin;
    return c;
}

CheckRecord check_exact(const std::string& name, double value, double target,
                        double tol) {
    CheckRecord c;
    c.name = name;
    c.estimate = value;
    c.target = target;
    c.stat_kind = "exact";
    c.stat = std::abs(value - target);
    c.pass = c.stat <= tol;
    return c;
}

CheckRecord check_count(const std::string& name, long violations, long total,
                        double max_rate) {
    CheckRecord c;
    c.name = name;
    c.estimate = static_cast<double>(violations);
    c.target = max_rate * static_cast<double>(total);
    c.stat_kind = "count";
    c.stat = total > 0 ? static_cast<double>(violations) / total : 0.0;
    c.pass = static_cast<double>(violations) <= c.target;
    return c;
}

std::vector<double> column(const std::vector<FieldVector>& rows, int v) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[v]);
    return out;
}

}  // namespace

FieldVector phi_pattern_constant(const WeightedGraph& g, double value) {
    return FieldVector(g.num_vertices(), value);
}

FieldVector phi_pattern_mixed(const WeightedGraph& g) {
    FieldVector phi(g.num_vertices());
    phi[g.x0()] = std::sqrt(2.0);
    const auto& u = g.u_vertices();
    for (size_t k = 0; k < u.size(); ++k) phi[u[k]] = (k % 2 == 0) ? 1.3 : 0.7;
    return phi;
}

// ---------------------------------------------------------------------------
// rk2

ExperimentReport run_rk2(const WeightedGraph& g, double u, long n, uint64_t seed,
                         int threads, double control_scale) {
    if (!(u > 0.0)) throw std::invalid_argument("rk2 requires u > 0");
    if (n < 1000) throw std::invalid_argument("rk2 requires N >= 1000");
    ExperimentReport rep;
    rep.experiment = "rk2";
    rep.master_seed = seed;
    rep.replicates = 2 * n;

    GffSampler gff(g);
    const double shift_b = std::sqrt(2.0 * u * control_scale);

    auto sample_a = run_replicates<FieldVector>(n, threads, [&](long r) {
        Rng rng = Rng::derive(seed, stream_id(ExperimentId::Rk2, 0), r);
        FieldVector phi = gff.sample(rng);
        JumpPath path = simulate_until_tau(g, u, rng);
        LocalTimes lt = local_times(path, g.num_vertices(), path.end_time);
        FieldVector v(g.num_vertices());
        for (int x = 0; x < g.num_vertices(); ++x)
            v[x] = lt[x] + 0.5 * phi[x] * phi[x];
        return v;
    });
    auto sample_b = run_replicates<FieldVector>(n, threads, [&](long r) {
        Rng rng = Rng::derive(seed, stream_id(ExperimentId::Rk2, 1), r);
        FieldVector phi = gff.sample(rng);
        FieldVector v(g.num_vertices());
        for (int x = 0; x < g.num_vertices(); ++x)
            v[x] = 0.5 * (phi[x] + shift_b) * (phi[x] + shift_b);
        return v;
    });

    // x0 marginal is degenerate: A gives u exactly, B gives the shifted value
    double worst_a = 0.0, worst_b = 0.0;
    for (long r = 0; r < n; ++r) {
        worst_a = std::max(worst_a, std::abs(sample_a[r][g.x0()] - u));
        worst_b = std::max(worst_b,
                           std::abs(sample_b[r][g.x0()] - 0.5 * shift_b * shift_b));
    }
    rep.checks.push_back(check_exact("x0_degenerate_A", worst_a, 0.0, 1e-12));
    rep.checks.push_back(check_exact("x0_degenerate_B", worst_b, 0.0, 1e-12));

    Eigen::MatrixXd green = green_function(g);
    for (int x = 0; x < g.num_vertices(); ++x) {
        if (x == g.x0()) continue;
        const std::string lbl = g.label(x);
        std::vector<double> ca = column(sample_a, x), cb = column(sample_b, x);
        rep.checks.push_back(check_ks("ks_" + lbl, two_sample_ks(ca, cb)));
        rep.checks.push_back(
            check_diff_z("mean_" + lbl, mean_stderr(ca), mean_stderr(cb)));
        rep.checks.push_back(
            check_diff_z("var_" + lbl, variance_stderr(ca), variance_stderr(cb)));
        int p = g.u_position(x);
        double target = u + 0.5 * green(p, p);
        MeanStderr ms = mean_stderr(ca);
        rep.checks.push_back(
            check_z("analytic_mean_" + lbl, ms.mean, ms.stderr_, target));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// inverse rk2

namespace {

struct InverseRec {
    FieldVector phi_cap;  // Phi
    FieldVector field;    // phi (pipeline A) or sigma * L (pipeline B)
    FieldVector ell;      // occupation vector
    bool failed = false;
    bool end_ok = true;
};

void add_panel_checks(ExperimentReport& rep, const WeightedGraph& g,
                      const std::vector<InverseRec>& a,
                      const std::vector<InverseRec>& b) {
    const auto& uvs = g.u_vertices();
    int va = uvs[0];
    int vb = uvs.size() > 1 ? uvs[1] : -1;
    auto col = [&](const std::vector<InverseRec>& rows, auto&& f) {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(f(r));
        return out;
    };
    auto panel = [&](const std::string& name, auto&& f) {
        rep.checks.push_back(check_diff_z(name, mean_stderr(col(a, f)),
                                          mean_stderr(col(b, f))));
    };
    const std::string la = g.label(va);
    panel("panel_Phi_" + la, [&](const InverseRec& r) { return r.phi_cap[va]; });
    panel("panel_Phi2_" + la,
          [&](const InverseRec& r) { return r.phi_cap[va] * r.phi_cap[va]; });
    panel("panel_field_" + la, [&](const InverseRec& r) { return r.field[va]; });
    panel("panel_field2_" + la,
          [&](const InverseRec& r) { return r.field[va] * r.field[va]; });
    panel("panel_Phi_field_" + la,
          [&](const InverseRec& r) { return r.phi_cap[va] * r.field[va]; });
    if (vb >= 0)
        panel("panel_field_" + la + "_field_" + g.label(vb),
              [&](const InverseRec& r) { return r.field[va] * r.field[vb]; });
    panel("ell_recovery_mean_" + la, [&](const InverseRec& r) { return r.ell[va]; });
    panel("ell_recovery_m2_" + la,
          [&](const InverseRec& r) { return r.ell[va] * r.ell[va]; });
}

std::vector<InverseRec> drop_failed(const std::vector<InverseRec>& rows,
                                    long& failures) {
    std::vector<InverseRec> ok;
    ok.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.failed)
            ++failures;
        else
            ok.push_back(r);
    }
    return ok;
}

}  // namespace

ExperimentReport run_inverse_rk2(const WeightedGraph& g, double u, long n,
                                 uint64_t seed, int threads) {
    if (!(u > 0.0)) throw std::invalid_argument("inverse-rk2 requires u > 0");
    ExperimentReport rep;
    rep.experiment = "inverse-rk2";
    rep.master_seed = seed;
    rep.replicates = 2 * n;

    GffSampler gff(g);

    auto pipeline_a = run_replicates<InverseRec>(n, threads, [&](long r) {
        Rng rng = Rng::derive(seed, stream_id(ExperimentId::InverseRk2, 0), r);
        InverseRec rec;
        FieldVector phi = gff.sample(rng);
        JumpPath path = simulate_until_tau(g, u, rng);
        rec.ell = local_times(path, g.num_vertices(), path.end_time);
        rec.phi_cap.resize(g.num_vertices());
        for (int x = 0; x < g.num_vertices(); ++x)
            rec.phi_cap[x] = std::sqrt(phi[x] * phi[x] + 2.0 * rec.ell[x]);
        rec.field = phi;
        return rec;
    });

    auto pipeline_b = run_replicates<InverseRec>(n, threads, [&](long r) {
        Rng rng = Rng::derive(seed, stream_id(ExperimentId::InverseRk2, 1), r);
        InverseRec rec;
        FieldVector phi = gff.sample(rng);
        JumpPath path = simulate_until_tau(g, u, rng);
        LocalTimes lt = local_times(path, g.num_vertices(), path.end_time);
        rec.phi_cap.resize(g.num_vertices());
        for (int x = 0; x < g.num_vertices(); ++x)
            rec.phi_cap[x] = std::sqrt(phi[x] * phi[x] + 2.0 * lt[x]);
        try {
            ReversedRun run = simulate_magnetized_reversed(
                g, rec.phi_cap, g.x0(), ReversedStop::Depletion, rng);
            rec.end_ok = run.end_site == g.x0();
            IsingSpec spec = IsingSpec::from_amplitudes(g, run.l_end);
            SpinVector sigma = sample_spins(spec, rng);
            rec.field.resize(g.num_vertices());
            rec.ell.resize(g.num_vertices());
            for (int x = 0; x < g.num_vertices(); ++x) {
                rec.field[x] = sigma[x] * run.l_end[x];
                rec.ell[x] = 0.5 * (rec.phi_cap[x] * rec.phi_cap[x] -
                                    run.l_end[x] * run.l_end[x]);
            }
        } catch (const NumericalFailure&) {
            rec.failed = true;
        }
        return rec;
    });

    std::vector<InverseRec> b_ok = drop_failed(pipeline_b, rep.numerical_failures);
    rep.checks.push_back(
        check_count("numerical_failure_rate", rep.numerical_failures, n, 0.001));

    long end_violations = 0;
    for (const auto& r : b_ok)
        if (!r.end_ok) ++end_violations;
    rep.checks.push_back(check_count("depletion_ends_at_x0", end_violations,
                                     static_cast<long>(b_ok.size()), 0.0));

    // Phi at x0 is sqrt(2u) in both pipelines by construction
    double worst = 0.0;
    const double target = std::sqrt(2.0 * u);
    for (const auto& r : pipeline_a) worst = std::max(worst, std::abs(r.phi_cap[g.x0()] - target));
    for (const auto& r : b_ok) worst = std::max(worst, std::abs(r.phi_cap[g.x0()] - target));
    rep.checks.push_back(check_exact("Phi_x0_sqrt2u", worst, 0.0, 1e-12));

    add_panel_checks(rep, g, pipeline_a, b_ok);
    return rep;
}

// ---------------------------------------------------------------------------
// rk1

ExperimentReport run_rk1(const WeightedGraph& g, int z0, double s, long n,
                         uint64_t seed, int threads) {
    if (!(s > 0.0)) throw std::invalid_argument("rk1 requires s > 0");
    if (z0 == g.x0()) throw std::invalid_argument("rk1 requires z0 != x0");
    ExperimentReport rep;
    rep.experiment = "rk1";
    rep.master_seed = seed;
    rep.replicates = 2 * n;

    GffSampler gff(g);

    auto sample_a = run_replicates<FieldVector>(n, threads, [&](long r) {
        Rng rng = Rng::derive(seed, stream_id(ExperimentId::Rk1, 0), r);
        FieldVector phi = gff.sample(rng);
        JumpPath path = simulate_until_hit(g, z0, rng);
        LocalTimes lt = local_times(path, g.num_vertices(), path.end_time);
        FieldVector v(g.num_vertices());
        for (int x = 0; x < g.num_vertices(); ++x)
            v[x] = lt[x] + 0.5 * (phi[x] + s) * (phi[x] + s);
        return v;
    });

    struct BRec {
        FieldVector v;
        double w_signed;
        double w_pos;
    };
    auto sample_b = run_replicates<BRec>(n, threads, [&](long r) {
        Rng rng = Rng::derive(seed, stream_id(ExperimentId::Rk1, 1), r);
        FieldVector phi = gff.sample(rng);
        BRec rec;
        rec.v.resize(g.num_vertices());
        FieldVector amp(g.num_vertices());
        for (int x = 0; x < g.num_vertices(); ++x) {
            rec.v[x] = 0.5 * (phi[x] + s) * (phi[x] + s);
            amp[x] = std::abs(phi[x] + s);
        }
        rec.w_signed = 1.0 + phi[z0] / s;
        IsingSpec spec = IsingSpec::from_amplitudes(g, amp);
        FieldVector mag = magnetizations(spec);
        rec.w_pos = mag[z0] * std::abs(s + phi[z0]) / s;
        return rec;
    });

    std::vector<double> w_signed, w_pos;
    for (const auto& r : sample_b) {
        w_signed.push_back(r.w_signed);
        w_pos.push_back(r.w_pos);
    }
    MeanStderr wm = mean_stderr(w_signed);
    rep.checks.push_back(check_z("signed_weight_mean", wm.mean, wm.stderr_, 1.0));

    double worst_a = 0.0, worst_b = 0.0;
    for (long r = 0; r < n; ++r) {
        worst_a = std::max(worst_a, std::abs(sample_a[r][g.x0()] - 0.5 * s * s));
        worst_b = std::max(worst_b, std::abs(sample_b[r].v[g.x0()] - 0.5 * s * s));
    }
    rep.checks.push_back(check_exact("x0_exact_A", worst_a, 0.0, 1e-12));
    rep.checks.push_back(check_exact("x0_exact_B", worst_b, 0.0, 1e-12));

    for (int x : g.u_vertices()) {
        const std::string lbl = g.label(x);
        std::vector<double> ca = column(sample_a, x);
        std::vector<double> ca2(ca);
        for (double& v : ca2) v *= v;
        std::vector<double> cb, cb2;
        for (const auto& r : sample_b) {
            cb.push_back(r.v[x]);
            cb2.push_back(r.v[x] * r.v[x]);
        }
        WeightedMoment wb1 = weighted_moment_ci(cb, w_signed);
        WeightedMoment wb2 = weighted_moment_ci(cb2, w_signed);
        WeightedMoment pb1 = weighted_moment_ci(cb, w_pos);
        WeightedMoment pb2 = weighted_moment_ci(cb2, w_pos);
        MeanStderr ma1 = mean_stderr(ca), ma2 = mean_stderr(ca2);
        rep.checks.push_back(check_diff_z("moment1_" + lbl, ma1,
                                          {wb1.mean, wb1.stderr_, n}));
        rep.checks.push_back(check_diff_z("moment2_" + lbl, ma2,
                                          {wb2.mean, wb2.stderr_, n}));
        rep.checks.push_back(check_diff_z("signed_vs_positive_m1_" + lbl,
                                          {wb1.mean, wb1.stderr_, n},
                                          {pb1.mean, pb1.stderr_, n}));
        rep.checks.push_back(check_diff_z("signed_vs_positive_m2_" + lbl,
                                          {wb2.mean, wb2.stderr_, n},
                                          {pb2.mean, pb2.stderr_, n}));
    }
    WeightedMoment ess_probe = weighted_moment_ci(w_signed, w_signed);
    CheckRecord ess;
    ess.name = "signed_weight_ess";
    ess.estimate = ess_probe.ess;
    ess.target = 10.0;
    ess.stat_kind = "count";
    ess.stat = ess_probe.ess;
    ess.pass = ess_probe.ess >= 10.0;
    rep.checks.push_back(ess);
    return rep;
}

// ---------------------------------------------------------------------------
// inverse rk1

ExperimentReport run_inverse_rk1(const WeightedGraph& g, int z0, double s, long n,
                                 uint64_t seed, int threads) {
    if (!(s > 0.0)) throw std::invalid_argument("inverse-rk1 requires s > 0");
    if (z0 == g.x0()) throw std::invalid_argument("inverse-rk1 requires z0 != x0");
    ExperimentReport rep;
    rep.experiment = "inverse-rk1";
    rep.master_seed = seed;
    rep.replicates = n;

    GffSampler gff(g);

    struct PairRec {
        InverseRec a, b;
    };
    auto pairs = run_replicates<PairRec>(n, threads, [&](long r) {
        Rng rng = Rng::derive(seed, stream_id(ExperimentId::InverseRk1, 0), r);
        PairRec rec;
        FieldVector phi = gff.sample(rng);
        JumpPath path = simulate_until_hit(g, z0, rng);
        rec.a.ell = local_times(path, g.num_vertices(), path.end_time);
        rec.a.phi_cap.resize(g.num_vertices());
        rec.a.field.resize(g.num_vertices());
        for (int x = 0; x < g.num_vertices(); ++x) {
            rec.a.field[x] = phi[x] + s;
            rec.a.phi_cap[x] = std::sqrt(2.0 * rec.a.ell[x] +
                                         rec.a.field[x] * rec.a.field[x]);
        }
        // pipeline B reuses the same Phi (shared conditioning variable)
        Rng rng_b = Rng::derive(seed, stream_id(ExperimentId::InverseRk1, 1), r);
        rec.b.phi_cap = rec.a.phi_cap;
        try {
            ReversedRun run = simulate_magnetized_reversed(
                g, rec.b.phi_cap, z0, ReversedStop::HitX0, rng_b);
            rec.b.end_ok = run.end_kind == ReversedStop::HitX0;
            IsingSpec spec = IsingSpec::from_amplitudes(g, run.l_end);
            SpinVector sigma = sample_spins(spec, rng_b);
            rec.b.field.resize(g.num_vertices());
            rec.b.ell.resize(g.num_vertices());
            for (int x = 0; x < g.num_vertices(); ++x) {
                rec.b.field[x] = sigma[x] * run.l_end[x];
                rec.b.ell[x] = 0.5 * (rec.b.phi_cap[x] * rec.b.phi_cap[x] -
                                      run.l_end[x] * run.l_end[x]);
            }
        } catch (const NumericalFailure&) {
            rec.b.failed = true;
        }
        return rec;
    });

    std::vector<InverseRec> a_rows, b_rows;
    for (auto& p : pairs) {
        if (p.b.failed) {
            ++rep.numerical_failures;
            continue;
        }
        a_rows.push_back(std::move(p.a));
        b_rows.push_back(std::move(p.b));
    }
    rep.checks.push_back(
        check_count("numerical_failure_rate", rep.numerical_failures, n, 0.001));

    long miss = 0;
    for (const auto& r : b_rows)
        if (!r.end_ok) ++miss;
    rep.checks.push_back(check_count("hit_before_depletion", miss,
                                     static_cast<long>(b_rows.size()), 0.0));

    double worst = 0.0;
    for (const auto& r : a_rows)
        worst = std::max(worst, std::abs(r.field[g.x0()] - s));
    rep.checks.push_back(check_exact("field_x0_equals_s", worst, 0.0, 1e-12));

    add_panel_checks(rep, g, a_rows, b_rows);
    return rep;
}

// ---------------------------------------------------------------------------
// martingale suite

namespace {

std::vector<SpinVector> sign_patterns(const WeightedGraph& g) {
    const auto& u = g.u_vertices();
    SpinVector all_plus(g.num_vertices(), 1);
    SpinVector flip_first = all_plus;
    flip_first[u[0]] = -1;
    SpinVector flip_all(g.num_vertices(), 1);
    for (int v : u) flip_all[v] = -1;
    return {all_plus, flip_first, flip_all};
}

JumpPath trivial_path(int start) {
    JumpPath p;
    p.start = start;
    p.end_time = 0.0;
    return p;
}

}  // namespace

ExperimentReport run_martingale_check(const WeightedGraph& g, long n, uint64_t seed,
                                      int threads) {
    ExperimentReport rep;
    rep.experiment = "martingale-check";
    rep.master_seed = seed;

    const std::vector<double> horizons = {0.25, 1.0};
    const std::vector<FieldVector> phis = {phi_pattern_constant(g, 1.5),
                                           phi_pattern_mixed(g)};
    const std::vector<SpinVector> sigmas = sign_patterns(g);

    uint64_t group = 0;
    for (size_t ti = 0; ti < horizons.size(); ++ti) {
        for (size_t pi = 0; pi < phis.size(); ++pi) {
            const double t = horizons[ti];
            const FieldVector& phi = phis[pi];
            const uint64_t gid = group++;
            struct Vals {
                double m[3];
                double nval;
                bool pre_stop;
            };
            auto vals = run_replicates<Vals>(n, threads, [&](long r) {
                Rng rng = Rng::derive(
                    seed, stream_id(ExperimentId::MartingaleCheck, gid), r);
                JumpPath path =
                    simulate_until_budget_or_horizon(g, g.x0(), phi, t, rng);
                Vals v;
                for (int si = 0; si < 3; ++si)
                    v.m[si] = eval_M(g, sigmas[si], phi, path, path.end_time);
                v.nval = eval_N(g, phi, path, path.end_time, NMethod::Closed);
                v.pre_stop = path.end_reason == EndReason::Horizon;
                return v;
            });
            rep.replicates += n;
            std::string tag =
                "_t" + std::to_string(ti) + "_phi" + std::to_string(pi);
            for (int si = 0; si < 3; ++si) {
                double m0 = eval_M(g, sigmas[si], phi, trivial_path(g.x0()), 0.0);
                std::vector<double> col;
                col.reserve(n);
                for (const auto& v : vals) col.push_back(v.m[si]);
                MeanStderr ms = mean_stderr(col);
                rep.checks.push_back(check_z("M_mean_sigma" + std::to_string(si) + tag,
                                             ms.mean, ms.stderr_, m0));
            }
            double n0 = eval_N(g, phi, trivial_path(g.x0()), 0.0, NMethod::Closed);
            std::vector<double> ncol;
            long nonpos = 0;
            for (const auto& v : vals) {
                ncol.push_back(v.nval);
                if (v.pre_stop && !(v.nval > 0.0)) ++nonpos;
            }
            MeanStderr ns = mean_stderr(ncol);
            rep.checks.push_back(check_z("N_mean" + tag, ns.mean, ns.stderr_, n0));
            rep.checks.push_back(check_count("N_positive_pre_stop" + tag, nonpos, n, 0.0));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// rn suite

namespace {

// path functional panel on the trajectory truncated at time tt
struct PanelVals {
    double few_jumps;     // indicator: at most 2 jumps
    double first_target;  // indicator: first jump goes to the probe vertex
    double occupation;    // local time at the probe vertex
};

PanelVals eval_panel(const WeightedGraph& g, const JumpPath& path, double tt,
                     int probe) {
    double t = std::min(tt, path.end_time);
    PanelVals v;
    long count = 0;
    for (const Jump& j : path.jumps)
        if (j.time <= t) ++count;
    v.few_jumps = count <= 2 ? 1.0 : 0.0;
    v.first_target = (!path.jumps.empty() && path.jumps[0].time <= t &&
                      path.jumps[0].target == probe)
                         ? 1.0
                         : 0.0;
    v.occupation = local_times(path, g.num_vertices(), t)[probe];
    return v;
}

void add_panel_diff(ExperimentReport& rep, const std::string& prefix,
                    const std::vector<PanelVals>& weighted_mjp,
                    const std::vector<PanelVals>& direct) {
    auto col = [](const std::vector<PanelVals>& rows, auto&& f) {
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(f(r));
        return out;
    };
    auto add = [&](const std::string& name, auto&& f) {
        rep.checks.push_back(check_diff_z(prefix + name,
                                          mean_stderr(col(weighted_mjp, f)),
                                          mean_stderr(col(direct, f))));
    };
    add("few_jumps", [](const PanelVals& v) { return v.few_jumps; });
    add("first_target", [](const PanelVals& v) { return v.first_target; });
    add("occupation", [](const PanelVals& v) { return v.occupation; });
}

}  // namespace

ExperimentReport run_rn_check(const WeightedGraph& g, long n, uint64_t seed,
                              int threads) {
    ExperimentReport rep;
    rep.experiment = "rn-check";
    rep.master_seed = seed;
    rep.replicates = 6 * n;

    const int probe = g.u_vertices()[0];
    const FieldVector ones = phi_pattern_constant(g, 1.0);
    const FieldVector phi_mixed = phi_pattern_mixed(g);
    const double t_vrjp = 1.0;
    const double t_rev = 0.5;

    // (a) normalization of the forward VRJP density
    {
        auto vals = run_replicates<double>(n, threads, [&](long r) {
            Rng rng = Rng::derive(seed, stream_id(ExperimentId::RnCheck, 0), r);
            JumpPath path =
                simulate_until_budget_or_horizon(g, g.x0(), {}, t_vrjp, rng);
            return rn_vrjp(g, ones, path, t_vrjp);
        });
        MeanStderr ms = mean_stderr(vals);
        rep.checks.push_back(check_z("rn_vrjp_unit_mass", ms.mean, ms.stderr_, 1.0));
    }
    // (b) normalization of the reversed VRJP density
    {
        auto vals = run_replicates<double>(n, threads, [&](long r) {
            Rng rng = Rng::derive(seed, stream_id(ExperimentId::RnCheck, 1), r);
            JumpPath path =
                simulate_until_budget_or_horizon(g, g.x0(), phi_mixed, t_rev, rng);
            return rn_reversed(g, phi_mixed, path, t_rev);
        });
        MeanStderr ms = mean_stderr(vals);
        rep.checks.push_back(
            check_z("rn_reversed_unit_mass", ms.mean, ms.stderr_, 1.0));
    }
    // (c) change of measure: N-weighted MJP against the magnetized process
    {
        double n0 = eval_N(g, phi_mixed, trivial_path(g.x0()), 0.0, NMethod::Closed);
        auto mjp = run_replicates<PanelVals>(n, threads, [&](long r) {
            Rng rng = Rng::derive(seed, stream_id(ExperimentId::RnCheck, 2), r);
            JumpPath path =
                simulate_until_budget_or_horizon(g, g.x0(), phi_mixed, t_rev, rng);
            double w =
                eval_N(g, phi_mixed, path, path.end_time, NMethod::Closed) / n0;
            PanelVals v = eval_panel(g, path, path.end_time, probe);
            v.few_jumps *= w;
            v.first_target *= w;
            v.occupation *= w;
            return v;
        });
        struct MagRec {
            PanelVals v;
            bool failed;
        };
        auto mag = run_replicates<MagRec>(n, threads, [&](long r) {
            Rng rng = Rng::derive(seed, stream_id(ExperimentId::RnCheck, 3), r);
            MagRec rec{{}, false};
            try {
                ReversedRun run = simulate_magnetized_reversed(
                    g, phi_mixed, g.x0(), ReversedStop::Depletion, rng);
                rec.v = eval_panel(g, run.z_path, t_rev, probe);
            } catch (const NumericalFailure&) {
                rec.failed = true;
            }
            return rec;
        });
        std::vector<PanelVals> mag_ok;
        for (const auto& r : mag) {
            if (r.failed)
                ++rep.numerical_failures;
            else
                mag_ok.push_back(r.v);
        }
        add_panel_diff(rep, "com_N_", mjp, mag_ok);
    }
    // (d) change of measure: VRJP density against the time-changed VRJP
    {
        auto mjp = run_replicates<PanelVals>(n, threads, [&](long r) {
            Rng rng = Rng::derive(seed, stream_id(ExperimentId::RnCheck, 4), r);
            JumpPath path =
                simulate_until_budget_or_horizon(g, g.x0(), {}, t_vrjp, rng);
            double w = rn_vrjp(g, ones, path, t_vrjp);
            PanelVals v = eval_panel(g, path, t_vrjp, probe);
            v.few_jumps *= w;
            v.first_target *= w;
            v.occupation *= w;
            return v;
        });
        auto vrjp = run_replicates<PanelVals>(n, threads, [&](long r) {
            Rng rng = Rng::derive(seed, stream_id(ExperimentId::RnCheck, 5), r);
            JumpPath path = simulate_vrjp_timechanged(g, ones, g.x0(), t_vrjp, rng);
            return eval_panel(g, path, t_vrjp, probe);
        });
        add_panel_diff(rep, "com_vrjp_", mjp, vrjp);
    }
    // only the magnetized group can raise a numerical failure
    rep.checks.push_back(check_count("numerical_failure_rate",
                                     rep.numerical_failures, n, 0.001));
    return rep;
}

// ---------------------------------------------------------------------------
// ising table

ExperimentReport run_ising_table(const WeightedGraph& g, double scale) {
    ExperimentReport rep;
    rep.experiment = "ising-table";
    std::vector<double> j;
    for (const Edge& e : g.edges()) j.push_back(scale * e.w);
    IsingSpec spec(g, std::move(j));
    IsingMoments mom = ising_moments(spec);

    CheckRecord logf;
    logf.name = "log_partition";
    logf.estimate = mom.log_f;
    logf.stat_kind = "exact";
    logf.pass = std::isfinite(mom.log_f);
    rep.checks.push_back(logf);
    rep.checks.push_back(check_exact("magnetization_x0", mom.mag[g.x0()], 1.0, 0.0));
    for (int v : g.u_vertices()) {
        CheckRecord c;
        c.name = "magnetization_" + g.label(v);
        c.estimate = mom.mag[v];
        c.stat_kind = "exact";
        c.pass = mom.mag[v] >= 0.0 && mom.mag[v] <= 1.0;
        rep.checks.push_back(c);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string report_to_json(const ExperimentReport& r) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"experiment\": \"" << json_escape(r.experiment) << "\",\n";
    out << "  \"config\": {";
    for (size_t i = 0; i < r.config.size(); ++i) {
        if (i) out << ", ";
        out << "\"" << json_escape(r.config[i].first) << "\": \""
            << json_escape(r.config[i].second) << "\"";
    }
    out << "},\n";
    out << "  \"config_hash\": \"" << std::hex << r.config_hash << std::dec
        << "\",\n";
    out << "  \"master_seed\": " << r.master_seed << ",\n";
    out << "  \"replicates\": " << r.replicates << ",\n";
    out << "  \"numerical_failures\": " << r.numerical_failures << ",\n";
    out << "  \"all_pass\": " << (r.all_pass() ? "true" : "false") << ",\n";
    out << "  \"note\": \"thresholds are per-check (|z| <= 4, KS p >= 0.001); "
           "no multiple-testing correction applied\",\n";
    out << "  \"checks\": [\n";
    for (size_t i = 0; i < r.checks.size(); ++i) {
        const CheckRecord& c = r.checks[i];
        out << "    {\"name\": \"" << json_escape(c.name) << "\", \"estimate\": "
            << format_double(c.estimate) << ", \"stderr\": "
            << format_double(c.stderr_) << ", \"target\": "
            << format_double(c.target) << ", \"kind\": \"" << c.stat_kind
            << "\", \"stat\": " << format_double(c.stat) << ", \"p\": "
            << format_double(c.p) << ", \"verdict\": \""
            << (c.pass ? "pass" : "fail") << "\"}";
        out << (i + 1 < r.checks.size() ? ",\n" : "\n");
    }
    out << "  ]\n}\n";
    return out.str();
}

std::string report_to_csv(const ExperimentReport& r) {
    std::ostringstream out;
    out << "name,estimate,stderr,target,kind,stat,p,verdict\n";
    for (const CheckRecord& c : r.checks) {
        out << c.name << "," << format_double(c.estimate) << ","
            << format_double(c.stderr_) << "," << format_double(c.target) << ","
            << c.stat_kind << "," << format_double(c.stat) << ","
            << format_double(c.p) << "," << (c.pass ? "pass" : "fail") << "\n";
    }
    return out.str();
}

}  // namespace rklab
