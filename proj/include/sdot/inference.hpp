#pragma once

#include <optional>
#include <vector>

#include "sdot/costs.hpp"
#include "sdot/discrete.hpp"
#include "sdot/measures.hpp"
#include "sdot/rng.hpp"
#include "sdot/types.hpp"

namespace sdot {

/// Covariance of the sqrt(n)-scaled empirical frequencies of a discrete
/// distribution: diag(p) - p p'. Kernel contains the all-ones vector.
Mat multinomial_covariance(const Vec& p);

/// Draw from N(0, multinomial_covariance(p)) via the centered construction
/// W - p (1'W) with W ~ N(0, diag(p)); every draw has zero component sum.
Vec sample_frequency_gaussian(const Vec& p, Rng& rng);

/// Variance of z'X with X ~ N(0, multinomial_covariance(p)), computed in
/// the centered form sum p_i (z_i - zbar)^2 so adding a constant to z is a
/// no-op up to roundoff.
double cost_fluctuation_variance(const Vec& z, const Vec& p);

/// Directional derivative of the optimal-cost functional in the weights, at
/// a point with a unique dual solution z: sum_i (z_i - sum_j z_j p_j) q_i.
double weight_derivative(const Vec& z, const Vec& p, const Vec& direction);

/// Non-unique version: the supremum over the dual-optimal face, realized as
/// sup_over_face applied to the centered direction q - (1'q) p.
double weight_derivative(const DualFace& face, const Vec& p, const Vec& direction);

/// Asymptotic law of a sqrt(n)-scaled fluctuation. Draws are multiplied by
/// scale_factor at the end, so gaussian laws have effective variance
/// variance * scale_factor^2.
struct LimitLaw {
    enum class Kind { gaussian, sup_of_gaussian, sup_abs_gaussian };

    Kind kind = Kind::gaussian;
    double variance = 0.0;     // gaussian: pre-scale variance
    double scale_factor = 1.0;
    bool plug_in = false;      // built from estimated rather than true inputs

    std::optional<DualFace> face; // sup_of_gaussian
    Vec weights;                  // sup_of_gaussian: p of the Gaussian vector
    Mat covariance;               // sup_abs_gaussian

    double gaussian_variance() const; // variance * scale^2; gaussian kind only
};

/// Gaussian cost law (unique dual solution). Requires a strictly convex
/// superlinear cost and an absolutely continuous Q (a density must be
/// attached); throws AssumptionViolation otherwise.
LimitLaw cost_limit_law(const Vec& z, const Vec& p, const CostFunction& c,
                        const ContinuousMeasure& Q, bool plug_in = false);

/// Sup-of-Gaussian cost law over the dual-optimal face (finite Q).
LimitLaw cost_limit_law(const DualFace& face, const Vec& p, bool plug_in = false);

/// Delta-method transfer from the cost law to the p-th root statistic:
/// scale factor 1 / (exponent * t_value^{(exponent-1)/exponent}). Throws
/// DeltaMethodError at t_value == 0.
LimitLaw wp_limit_law(const LimitLaw& cost_law, double exponent, double t_value);

/// Outer-product moment of the per-atom objective gradients at the optimum,
/// sum_k p_k (e_k - p)(e_k - p)'. Identical to multinomial_covariance(p),
/// but assembled from the gradients; both routes are kept and tested against
/// each other.
Mat score_outer_moment(const Vec& p);

/// Asymptotic covariance of the sqrt(n)-scaled potential estimates on the
/// zero-sum hyperplane: Hinv A Hinv with Hinv the pseudo-inverse of the
/// Hessian restricted to that hyperplane and A = score_outer_moment(p).
/// Throws SingularHessian when a restricted eigenvalue is above -1e-8.
Mat potentials_covariance(const Mat& hessian, const Vec& p);

/// Law of the sup-norm of the potential fluctuations: max_i |N_i| with
/// N ~ N(0, cov).
LimitLaw sup_norm_potential_law(const Mat& cov, bool plug_in = false);

/// i.i.d. draws from a limit law; draw i uses the seed derived from
/// (seed, law_draw, i), so results do not depend on evaluation order.
std::vector<double> simulate_limit(const LimitLaw& law, long draws, std::uint64_t seed);

} // namespace sdot
