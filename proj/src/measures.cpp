#include "sdot/measures.hpp"

#include <cmath>
#include <stdexcept>

#include "sdot/errors.hpp"
#include "sdot/stats.hpp"

namespace sdot {

DiscreteMeasure DiscreteMeasure::create(std::vector<Vec> points, Vec weights) {
    if (points.empty()) throw std::invalid_argument("DiscreteMeasure: need at least one atom");
    if (int(points.size()) != weights.size())
        throw std::invalid_argument("DiscreteMeasure: points/weights size mismatch");
    const int d = int(points.front().size());
    for (const Vec& x : points)
        if (int(x.size()) != d)
            throw std::invalid_argument("DiscreteMeasure: inconsistent point dimensions");
    for (int i = 0; i < weights.size(); ++i)
        if (!(weights[i] > 0.0))
            throw std::invalid_argument("DiscreteMeasure: weights must be strictly positive");
    if (std::abs(weights.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if ((points[i] - points[j]).norm() == 0.0)
                throw std::invalid_argument("DiscreteMeasure: atoms must be pairwise distinct");
    DiscreteMeasure P;
    P.points = std::move(points);
    P.weights = std::move(weights);
    return P;
}

bool DiscreteMeasure::sorted_1d() const {
    if (dim() != 1) return false;
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i - 1][0] < points[i][0])) return false;
    return true;
}

ContinuousMeasure uniform_box(Vec lo, Vec hi, QuadratureScheme scheme) {
    if (lo.size() != hi.size() || lo.size() == 0)
        throw std::invalid_argument("uniform_box: bad bounds");
    double volume = 1.0;
    for (int k = 0; k < lo.size(); ++k) {
        if (!(lo[k] < hi[k])) throw std::invalid_argument("uniform_box: lo < hi required");
        volume *= hi[k] - lo[k];
    }

    ContinuousMeasure Q;
    Q.dim = int(lo.size());
    Q.lo = lo;
    Q.hi = hi;
    Q.quadrature = scheme;
    Q.sampler = [lo, hi](Rng& rng) {
        Vec y(lo.size());
        for (int k = 0; k < lo.size(); ++k) y[k] = rng.uniform(lo[k], hi[k]);
        return y;
    };
    Q.density = [lo, hi, volume](const Vec& y) {
        for (int k = 0; k < lo.size(); ++k)
            if (y[k] < lo[k] || y[k] > hi[k]) return 0.0;
        return 1.0 / volume;
    };
    if (Q.dim == 1) {
        const double a = lo[0], b = hi[0];
        Q.cdf = [a, b](double y) {
            if (y <= a) return 0.0;
            if (y >= b) return 1.0;
            return (y - a) / (b - a);
        };
        Q.quantile = [a, b](double p) { return a + p * (b - a); };
    }
    return Q;
}

namespace {

struct MonotoneMap1D {
    std::function<double(double)> forward;   // u -> y
    std::function<double(double)> d_forward; // du of forward
    std::function<double(double)> inverse;   // y -> u
};

MonotoneMap1D named_map(const std::string& id) {
    if (id == "sqrt") {
        return {
            [](double u) { return std::sqrt(u); },
            [](double u) { return 0.5 / std::sqrt(u); },
            [](double y) { return y * y; },
        };
    }
    throw std::invalid_argument("pushforward_1d: unknown map id '" + id + "'");
}

} // namespace

ContinuousMeasure pushforward_1d(const ContinuousMeasure& base, const std::string& map_id) {
    if (base.dim != 1) throw std::invalid_argument("pushforward_1d: base must be 1D");
    const MonotoneMap1D map = named_map(map_id);

    ContinuousMeasure Q;
    Q.dim = 1;
    Q.lo = Vec::Constant(1, map.forward(base.lo[0]));
    Q.hi = Vec::Constant(1, map.forward(base.hi[0]));
    Q.quadrature = base.quadrature;
    Q.sampler = [base, map](Rng& rng) {
        Vec u = base.sample(rng);
        return Vec::Constant(1, map.forward(u[0]));
    };
    if (base.has_density()) {
        Q.density = [base, map](const Vec& y) {
            const double u = map.inverse(y[0]);
            const double du = map.d_forward(u);
            return base.density(Vec::Constant(1, u)) / std::abs(du);
        };
    }
    if (base.has_cdf()) {
        Q.cdf = [base, map](double y) { return base.cdf(map.inverse(y)); };
        Q.quantile = [base, map](double p) { return map.forward(base.quantile(p)); };
    }
    return Q;
}

Vec EmpiricalWeights::frequencies() const {
    Vec f(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) f[int(k)] = double(counts[k]) / double(n);
    return f;
}

EmpiricalWeights sample_discrete(const DiscreteMeasure& P, long n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_discrete: n >= 1 required");
    Rng rng(derive_seed(seed, {streams::sample_discrete}));

    const int m = P.size();
    std::vector<double> cumulative(m);
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
        acc += P.weights[k];
        cumulative[k] = acc;
    }
    cumulative[m - 1] = 1.0;

    EmpiricalWeights out;
    out.counts.assign(m, 0);
    out.n = n;
    for (long i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        int k = 0;
        while (k + 1 < m && u >= cumulative[k]) ++k;
        ++out.counts[k];
    }
    return out;
}

McEstimate mc_integrate(const ContinuousMeasure& Q,
                        const std::function<double(const Vec&)>& f,
                        long N, std::uint64_t seed) {
    if (N < 2) throw std::invalid_argument("mc_integrate: N >= 2 required");
    Rng rng(derive_seed(seed, {streams::mc_integrate}));

    std::vector<double> values(static_cast<std::size_t>(N));
    for (long i = 0; i < N; ++i) {
        const Vec y = Q.sample(rng);
        const double v = f(y);
        if (!std::isfinite(v))
            throw IntegrationError("mc_integrate: non-finite integrand value", y);
        values[std::size_t(i)] = v;
    }
    const double mean = pairwise_sum(values) / double(N);
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        sq[i] = (values[i] - mean) * (values[i] - mean);
    const double variance = pairwise_sum(sq) / double(N - 1);
    return {mean, std::sqrt(variance / double(N))};
}

double quad_integrate(const ContinuousMeasure& Q,
                      const std::function<double(const Vec&)>& f) {
    if (!Q.has_density() || !Q.has_quadrature())
        throw UnsupportedBackend("quad_integrate: measure has no density or no quadrature scheme");
    if (Q.dim > 3)
        throw UnsupportedBackend("quad_integrate: tensor scheme limited to d <= 3");

    const QuadratureScheme& scheme = *Q.quadrature;
    std::vector<double> gl_nodes, gl_weights;
    gauss_legendre(scheme.nodes_per_cell, gl_nodes, gl_weights);

    // Per-axis node/weight lists for the composite rule.
    const int per_axis = scheme.cells_per_dim * scheme.nodes_per_cell;
    std::vector<std::vector<double>> nodes(Q.dim), weights(Q.dim);
    for (int k = 0; k < Q.dim; ++k) {
        nodes[k].resize(per_axis);
        weights[k].resize(per_axis);
        const double width = (Q.hi[k] - Q.lo[k]) / scheme.cells_per_dim;
        for (int c = 0; c < scheme.cells_per_dim; ++c) {
            const double a = Q.lo[k] + c * width;
            for (int g = 0; g < scheme.nodes_per_cell; ++g) {
                nodes[k][c * scheme.nodes_per_cell + g] = a + 0.5 * width * (gl_nodes[g] + 1.0);
                weights[k][c * scheme.nodes_per_cell + g] = 0.5 * width * gl_weights[g];
            }
        }
    }

    long total = 1;
    for (int k = 0; k < Q.dim; ++k) total *= per_axis;

    std::vector<double> terms(static_cast<std::size_t>(total));
    std::vector<int> idx(Q.dim, 0);
    Vec y(Q.dim);
    for (long t = 0; t < total; ++t) {
        long rem = t;
        double w = 1.0;
        for (int k = 0; k < Q.dim; ++k) {
            idx[k] = int(rem % per_axis);
            rem /= per_axis;
            y[k] = nodes[k][idx[k]];
            w *= weights[k][idx[k]];
        }
        const double v = f(y);
        if (!std::isfinite(v))
            throw IntegrationError("quad_integrate: non-finite integrand value", y);
        terms[std::size_t(t)] = w * Q.density(y) * v;
    }
    return pairwise_sum(terms);
}

} // namespace sdot
