#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace sdot {

/// Fixed-order pairwise summation. The reduction tree depends only on the
/// length, so results are bit-stable regardless of how the inputs were
/// produced.
inline double pairwise_sum(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n <= 32) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& x) {
    return pairwise_sum(std::span<const double>(x));
}

inline double sample_mean(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("sample_mean: empty sample");
    return pairwise_sum(x) / double(x.size());
}

/// Unbiased sample variance (two-pass, pairwise reductions).
inline double sample_variance(const std::vector<double>& x) {
    if (x.size() < 2) throw std::invalid_argument("sample_variance: need n >= 2");
    const double m = sample_mean(x);
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m) * (x[i] - m);
    return pairwise_sum(sq) / double(x.size() - 1);
}

/// Quantile of a sample by linear interpolation between order statistics.
inline double sample_quantile(std::vector<double> x, double q) {
    if (x.empty()) throw std::invalid_argument("sample_quantile: empty sample");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("sample_quantile: q outside [0,1]");
    std::sort(x.begin(), x.end());
    const double pos = q * double(x.size() - 1);
    const std::size_t i = std::size_t(pos);
    if (i + 1 >= x.size()) return x.back();
    const double frac = pos - double(i);
    return x[i] * (1.0 - frac) + x[i + 1] * frac;
}

/// Two-sample Kolmogorov-Smirnov statistic: sup-distance between the two
/// empirical CDFs.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }
    return d;
}

/// Two-sample KS critical value at level alpha ~ 5% (c(alpha) = 1.36).
inline double ks_critical_5pct(std::size_t na, std::size_t nb) {
    return 1.36 * std::sqrt(double(na + nb) / (double(na) * double(nb)));
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double deriv = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
            }
            deriv = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / deriv;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * deriv * deriv);
    }
}

} // namespace sdot
