#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sdot/rng.hpp"
#include "sdot/types.hpp"

namespace sdot {

/// Finitely supported probability measure: distinct atoms with strictly
/// positive weights summing to one.
struct DiscreteMeasure {
    std::vector<Vec> points;
    Vec weights;

    int size() const { return int(points.size()); }
    int dim() const { return points.empty() ? 0 : int(points.front().size()); }

    /// Validating constructor; throws std::invalid_argument on any broken
    /// invariant (weight signs, sum, duplicate atoms).
    static DiscreteMeasure create(std::vector<Vec> points, Vec weights);

    /// True if d == 1 and the atom positions are strictly increasing.
    bool sorted_1d() const;
};

/// Parameters of a composite Gauss-Legendre scheme on the support box:
/// cells_per_dim equal cells per axis, nodes_per_cell Gauss points on each.
struct QuadratureScheme {
    int cells_per_dim = 32;
    int nodes_per_cell = 5;
    double unit_mass_tol = 1e-10;

    int polynomial_degree() const { return 2 * nodes_per_cell - 1; }
};

/// Reference measure exposed through sampling and, when available, a density
/// on a box support, a deterministic quadrature scheme, and (1D) cdf /
/// quantile functions.
struct ContinuousMeasure {
    int dim = 0;
    Vec lo, hi; // support box

    std::function<Vec(Rng&)> sampler;
    std::function<double(const Vec&)> density;   // may be empty
    std::optional<QuadratureScheme> quadrature;
    std::function<double(double)> cdf;           // 1D only, may be empty
    std::function<double(double)> quantile;      // 1D only, may be empty

    bool has_density() const { return bool(density); }
    bool has_quadrature() const { return quadrature.has_value(); }
    bool has_cdf() const { return bool(cdf) && bool(quantile); }

    Vec sample(Rng& rng) const { return sampler(rng); }
};

/// Uniform distribution on the box [lo, hi].
ContinuousMeasure uniform_box(Vec lo, Vec hi, QuadratureScheme scheme = {});

/// Pushforward of a 1D measure through a named monotone C^1 map.
/// Known ids: "sqrt" (y = sqrt(u) on [0,1], density 2y).
ContinuousMeasure pushforward_1d(const ContinuousMeasure& base, const std::string& map_id);

/// Category counts of an i.i.d. sample from a discrete measure.
struct EmpiricalWeights {
    std::vector<long> counts;
    long n = 0;

    Vec frequencies() const;
};

/// Multinomial(n, P.weights) draw, deterministic given (P, n, seed).
EmpiricalWeights sample_discrete(const DiscreteMeasure& P, long n, std::uint64_t seed);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo integral of f against Q with N seeded draws. The mean and the
/// deviation sums use the fixed-order pairwise reduction, so the result is
/// bit-stable for a given seed. Throws IntegrationError if f is non-finite
/// at a sampled point.
McEstimate mc_integrate(const ContinuousMeasure& Q,
                        const std::function<double(const Vec&)>& f,
                        long N, std::uint64_t seed);

/// Deterministic integral of f against Q using the attached quadrature
/// scheme and density: sum of w_i f(y_i) q(y_i) over the tensor-product
/// composite Gauss-Legendre nodes. Throws UnsupportedBackend when Q carries
/// no density or no scheme.
double quad_integrate(const ContinuousMeasure& Q,
                      const std::function<double(const Vec&)>& f);

} // namespace sdot
