#include "rklab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rklab {

MeanStderr mean_stderr(const std::vector<double>& values) {
    long n = static_cast<long>(values.size());
    if (n == 0) throw std::invalid_argument("empty sample");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double var = n > 1 ? ss / (n - 1) : 0.0;
    return {mean, std::sqrt(var / n), n};
}

double two_sample_mean_z(const MeanStderr& a, const MeanStderr& b) {
    double se = std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
    if (se == 0.0) return a.mean == b.mean ? 0.0 : INFINITY;
    return (a.mean - b.mean) / se;
}

MeanStderr variance_stderr(const std::vector<double>& values) {
    long n = static_cast<long>(values.size());
    if (n < 2) throw std::invalid_argument("variance needs n >= 2");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : values) {
        double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    double var = m2 * n / (n - 1);
    double se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
    return {var, se, n};
}

double kolmogorov_tail(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.18) {
        // theta-function form of the CDF, accurate for small arguments
        double y = std::exp(-3.14159265358979323846 * 3.14159265358979323846 /
                            (8.0 * x * x));
        double p = std::sqrt(2.0 * 3.14159265358979323846) / x *
                   (y + std::pow(y, 9.0) + std::pow(y, 25.0));
        return 1.0 - p;
    }
    double q = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * x * x);
        q += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::max(0.0, 2.0 * q);
}

KsResult two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty KS sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    size_t i = 0, j = 0;
    double d = 0.0;
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    double en = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_tail(en * d)};
}

namespace {

// regularized upper incomplete gamma Q(a, x)
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        // series for P(a,x)
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        return 1.0 - p;
    }
    // continued fraction for Q(a,x)
    double b = x + 1.0 - a;
    double c = 1e300;
    double dd = 1.0 / b;
    double h = dd;
    for (int n = 1; n < 500; ++n) {
        double an = -n * (n - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::abs(dd) < 1e-300) dd = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        dd = 1.0 / dd;
        double del = dd * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_tail(double x, int dof) {
    return gamma_q(0.5 * dof, 0.5 * x);
}

WeightedMoment weighted_moment_ci(const std::vector<double>& values,
                                  const std::vector<double>& weights) {
    if (values.size() != weights.size() || values.empty())
        throw std::invalid_argument("weighted_moment_ci: size mismatch or empty");
    double sw = 0.0, sw2 = 0.0;
    for (double w : weights) {
        sw += w;
        sw2 += w * w;
    }
    if (sw2 == 0.0 || sw == 0.0)
        throw std::invalid_argument("weighted_moment_ci: degenerate weights");
    double mean = 0.0;
    for (size_t i = 0; i < values.size(); ++i) mean += weights[i] * values[i];
    mean /= sw;
    double var = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        double d = values[i] - mean;
        var += weights[i] * weights[i] * d * d;
    }
    return {mean, std::sqrt(var) / std::abs(sw), sw * sw / sw2};
}

}  // namespace rklab
