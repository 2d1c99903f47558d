#pragma once

#include <vector>

namespace vawt {

enum class Alternative { two_sided, greater, less };

struct TestResult {
    double statistic = 0;  // t or U (of the first sample)
    double p_value = 1;
    double df = 0;  // Welch only
};

// Welch's two-sample t-test (unequal variances), p from the Student t
// distribution via the regularized incomplete beta function.
TestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b,
                        Alternative alt = Alternative::two_sided);

// Mann-Whitney U, normal approximation with continuity correction and tie
// correction; matches scipy.stats.mannwhitneyu(method="asymptotic"). The
// two-sided p uses max(U1, U2) and is clipped to [0, 1], so identical samples
// give exactly 1.
TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                          Alternative alt = Alternative::two_sided);

struct SampleSummary {
    std::size_t n = 0;
    double mean = 0;
    double sd = 0;  // sample standard deviation (n-1)
    double median = 0;
};

SampleSummary summarize(std::vector<double> values);

double regularized_incomplete_beta(double a, double b, double x);
double student_t_sf(double t, double df);  // P(T > t)
double normal_sf(double z);                // P(Z > z)

}  // namespace vawt
