#pragma once

#include <utility>
#include <vector>

namespace rklab {

struct MeanStderr {
    double mean;
    double stderr_;
    long n;
};

MeanStderr mean_stderr(const std::vector<double>& values);

// z-score of the difference of two independent sample means
double two_sample_mean_z(const MeanStderr& a, const MeanStderr& b);

// sample variance with a delta-method standard error (fourth moment)
MeanStderr variance_stderr(const std::vector<double>& values);

struct KsResult {
    double statistic;
    double p_value;
};

// two-sample Kolmogorov-Smirnov statistic with the asymptotic
// Kolmogorov-distribution tail for the p-value
KsResult two_sample_ks(std::vector<double> a, std::vector<double> b);

// upper tail of the Kolmogorov distribution: Q(x) = 2 sum (-1)^{k-1} e^{-2k^2x^2}
double kolmogorov_tail(double x);

// upper tail of the chi-square distribution with k degrees of freedom
double chi_square_tail(double x, int dof);

struct WeightedMoment {
    double mean;
    double stderr_;
    double ess;  // (sum w)^2 / sum w^2
};

// self-normalized weighted mean with delta-method standard error;
// weights may be signed (serves signed-measure estimators)
WeightedMoment weighted_moment_ci(const std::vector<double>& values,
                                  const std::vector<double>& weights);

}  // namespace rklab
