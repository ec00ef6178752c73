#include "sdot/inference.hpp"

#include <cmath>
#include <stdexcept>

#include "sdot/errors.hpp"

namespace sdot {

Mat multinomial_covariance(const Vec& p) {
    const int m = int(p.size());
    Mat sigma(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) sigma(i, j) = i == j ? p[i] * (1.0 - p[i]) : -p[i] * p[j];
    return sigma;
}

Vec sample_frequency_gaussian(const Vec& p, Rng& rng) {
    const int m = int(p.size());
    Vec w(m);
    for (int k = 0; k < m; ++k) w[k] = std::sqrt(p[k]) * rng.normal();
    return w - p * w.sum();
}

double cost_fluctuation_variance(const Vec& z, const Vec& p) {
    const double zbar = p.dot(z) / p.sum();
    double var = 0.0;
    for (int i = 0; i < z.size(); ++i) var += p[i] * (z[i] - zbar) * (z[i] - zbar);
    return var;
}

double weight_derivative(const Vec& z, const Vec& p, const Vec& direction) {
    const double zbar = p.dot(z);
    double out = 0.0;
    for (int i = 0; i < z.size(); ++i) out += (z[i] - zbar) * direction[i];
    return out;
}

double weight_derivative(const DualFace& face, const Vec& p, const Vec& direction) {
    const Vec centered = direction - direction.sum() * p;
    return sup_over_face(face, centered);
}

double LimitLaw::gaussian_variance() const {
    if (kind != Kind::gaussian)
        throw std::logic_error("gaussian_variance: law is not gaussian");
    return variance * scale_factor * scale_factor;
}

LimitLaw cost_limit_law(const Vec& z, const Vec& p, const CostFunction& c,
                        const ContinuousMeasure& Q, bool plug_in) {
    if (!c.flags.uniqueness_preconditions())
        throw AssumptionViolation(
            "cost_limit_law: unique mode needs a strictly convex superlinear cost");
    if (!Q.has_density())
        throw AssumptionViolation(
            "cost_limit_law: unique mode needs an absolutely continuous Q (density attached)");
    LimitLaw law;
    law.kind = LimitLaw::Kind::gaussian;
    law.variance = cost_fluctuation_variance(z, p);
    law.plug_in = plug_in;
    return law;
}

LimitLaw cost_limit_law(const DualFace& face, const Vec& p, bool plug_in) {
    LimitLaw law;
    law.kind = LimitLaw::Kind::sup_of_gaussian;
    law.face = face;
    law.weights = p;
    law.plug_in = plug_in;
    return law;
}

LimitLaw wp_limit_law(const LimitLaw& cost_law, double exponent, double t_value) {
    if (!(exponent >= 1.0))
        throw std::invalid_argument("wp_limit_law: exponent >= 1 required");
    if (t_value == 0.0)
        throw DeltaMethodError("wp_limit_law: degenerate at zero transport cost");
    LimitLaw law = cost_law;
    law.scale_factor = cost_law.scale_factor /
                       (exponent * std::pow(t_value, (exponent - 1.0) / exponent));
    return law;
}

Mat score_outer_moment(const Vec& p) {
    const int m = int(p.size());
    Mat a = Mat::Zero(m, m);
    for (int k = 0; k < m; ++k) {
        Vec g = -p;
        g[k] += 1.0;
        a += p[k] * g * g.transpose();
    }
    return a;
}

Mat potentials_covariance(const Mat& hessian, const Vec& p) {
    const int m = int(p.size());
    if (hessian.rows() != m || hessian.cols() != m)
        throw std::invalid_argument("potentials_covariance: shape mismatch");
    if (m == 1) return Mat::Zero(1, 1);

    const Mat basis = ones_complement_basis(m);
    const Mat sym = 0.5 * (hessian + hessian.transpose());
    const Mat restricted = basis.transpose() * sym * basis;

    Eigen::SelfAdjointEigenSolver<Mat> eig(restricted);
    if (eig.info() != Eigen::Success)
        throw SingularHessian("potentials_covariance: eigendecomposition failed");
    for (int k = 0; k < m - 1; ++k)
        if (eig.eigenvalues()[k] > -1e-8)
            throw SingularHessian(
                "potentials_covariance: restricted Hessian not negative definite");

    const Mat inv_restricted = eig.eigenvectors() *
                               eig.eigenvalues().cwiseInverse().asDiagonal() *
                               eig.eigenvectors().transpose();
    const Mat pinv = basis * inv_restricted * basis.transpose();

    const Mat cov = pinv * score_outer_moment(p) * pinv;
    return 0.5 * (cov + cov.transpose());
}

LimitLaw sup_norm_potential_law(const Mat& cov, bool plug_in) {
    if (cov.rows() != cov.cols())
        throw std::invalid_argument("sup_norm_potential_law: square covariance required");
    LimitLaw law;
    law.kind = LimitLaw::Kind::sup_abs_gaussian;
    law.covariance = 0.5 * (cov + cov.transpose());
    law.plug_in = plug_in;
    return law;
}

namespace {

// PSD square root factor via eigendecomposition; tiny negative eigenvalues
// are clamped to zero.
Mat covariance_factor(const Mat& cov) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
    Vec roots = eig.eigenvalues();
    for (int k = 0; k < roots.size(); ++k) roots[k] = std::sqrt(std::max(roots[k], 0.0));
    return eig.eigenvectors() * roots.asDiagonal();
}

} // namespace

std::vector<double> simulate_limit(const LimitLaw& law, long draws, std::uint64_t seed) {
    if (draws < 1) throw std::invalid_argument("simulate_limit: draws >= 1 required");

    std::vector<double> out(static_cast<std::size_t>(draws));
    switch (law.kind) {
    case LimitLaw::Kind::gaussian: {
        const double sd = std::sqrt(law.variance);
        for (long i = 0; i < draws; ++i) {
            Rng rng(derive_seed(seed, {streams::law_draw, std::uint64_t(i)}));
            out[std::size_t(i)] = law.scale_factor * sd * rng.normal();
        }
        break;
    }
    case LimitLaw::Kind::sup_of_gaussian: {
        if (!law.face) throw std::invalid_argument("simulate_limit: law has no face");
        for (long i = 0; i < draws; ++i) {
            Rng rng(derive_seed(seed, {streams::law_draw, std::uint64_t(i)}));
            const Vec x = sample_frequency_gaussian(law.weights, rng);
            out[std::size_t(i)] = law.scale_factor * sup_over_face(*law.face, x);
        }
        break;
    }
    case LimitLaw::Kind::sup_abs_gaussian: {
        const Mat factor = covariance_factor(law.covariance);
        const int m = int(factor.rows());
        for (long i = 0; i < draws; ++i) {
            Rng rng(derive_seed(seed, {streams::law_draw, std::uint64_t(i)}));
            Vec xi(m);
            for (int k = 0; k < m; ++k) xi[k] = rng.normal();
            out[std::size_t(i)] = law.scale_factor * (factor * xi).cwiseAbs().maxCoeff();
        }
        break;
    }
    }
    return out;
}

} // namespace sdot
