#include "vawt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vawt {

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-15;
    constexpr double kTiny = 1e-300;
    double qab = a + b, qap = a + 1, qam = a - 1;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0) return 0;
    if (x >= 1) return 1;
    double front = std::exp(a * std::log(x) + b * std::log(1 - x) - log_beta(a, b));
    if (x < (a + 1) / (a + b + 2)) return front * beta_cf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log(1 - x) + a * std::log(x) - log_beta(b, a)) *
                     beta_cf(b, a, 1 - x) / b;
}

double student_t_sf(double t, double df) {
    double x = df / (df + t * t);
    double tail = 0.5 * regularized_incomplete_beta(df / 2, 0.5, x);
    return t >= 0 ? tail : 1.0 - tail;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

TestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b,
                        Alternative alt) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("welch t-test needs at least 2 values per sample");
    auto moments = [](const std::vector<double>& v) {
        double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double ss = 0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair<double, double>(mean, ss / (v.size() - 1));
    };
    auto [ma, va] = moments(a);
    auto [mb, vb] = moments(b);
    double sa = va / a.size(), sb = vb / b.size();
    double se2 = sa + sb;
    TestResult r;
    if (se2 == 0) {  // identical constant samples
        r.statistic = 0;
        r.df = static_cast<double>(a.size() + b.size() - 2);
        r.p_value = alt == Alternative::two_sided ? 1.0 : 0.5;
        return r;
    }
    r.statistic = (ma - mb) / std::sqrt(se2);
    r.df = se2 * se2 /
           (sa * sa / (a.size() - 1) + sb * sb / (b.size() - 1));
    switch (alt) {
        case Alternative::two_sided:
            r.p_value = 2.0 * student_t_sf(std::fabs(r.statistic), r.df);
            break;
        case Alternative::greater:
            r.p_value = student_t_sf(r.statistic, r.df);
            break;
        case Alternative::less:
            r.p_value = 1.0 - student_t_sf(r.statistic, r.df);
            break;
    }
    return r;
}

TestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b,
                          Alternative alt) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("mann-whitney needs non-empty samples");
    std::size_t n1 = a.size(), n2 = b.size(), n = n1 + n2;

    struct Entry {
        double value;
        bool from_a;
    };
    std::vector<Entry> all;
    all.reserve(n);
    for (double x : a) all.push_back({x, true});
    for (double x : b) all.push_back({x, false});
    std::sort(all.begin(), all.end(), [](const Entry& u, const Entry& v) { return u.value < v.value; });

    double rank_sum_a = 0;
    double tie_term = 0;  // sum of t^3 - t over tie groups
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && all[j].value == all[i].value) ++j;
        double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k < j; ++k)
            if (all[k].from_a) rank_sum_a += midrank;
        i = j;
    }

    double u1 = rank_sum_a - static_cast<double>(n1) * (n1 + 1) / 2.0;
    double u2 = static_cast<double>(n1) * n2 - u1;
    double mu = static_cast<double>(n1) * n2 / 2.0;
    double sigma2 = static_cast<double>(n1) * n2 / 12.0 *
                    ((n + 1) - tie_term / (static_cast<double>(n) * (n - 1)));
    TestResult r;
    r.statistic = u1;
    if (sigma2 <= 0) {  // all values tied
        r.p_value = 1.0;
        return r;
    }
    double sigma = std::sqrt(sigma2);
    auto z_of = [&](double u) { return (u - mu - 0.5) / sigma; };  // continuity correction
    switch (alt) {
        case Alternative::greater:
            r.p_value = normal_sf(z_of(u1));
            break;
        case Alternative::less:
            r.p_value = normal_sf(z_of(u2));
            break;
        case Alternative::two_sided:
            r.p_value = std::min(1.0, 2.0 * normal_sf(z_of(std::max(u1, u2))));
            break;
    }
    return r;
}

SampleSummary summarize(std::vector<double> values) {
    SampleSummary s;
    s.n = values.size();
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    if (values.size() > 1) {
        double ss = 0;
        for (double x : values) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / (values.size() - 1));
    }
    std::sort(values.begin(), values.end());
    std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    return s;
}

}  // namespace vawt
