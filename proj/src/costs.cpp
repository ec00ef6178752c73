#include "sdot/costs.hpp"

#include <cmath>
#include <stdexcept>

#include "sdot/errors.hpp"

namespace sdot {

CostFunction power_cost(double p) {
    if (!(p > 0.0)) throw std::invalid_argument("power_cost: exponent must be positive");

    CostFunction c;
    c.exponent = p;
    c.eval = [p](const Vec& x, const Vec& y) { return std::pow((x - y).norm(), p); };
    if (p >= 1.0) {
        c.grad_y = [p](const Vec& x, const Vec& y) -> Vec {
            const Vec diff = y - x;
            const double r = diff.norm();
            if (r == 0.0) return Vec::Zero(diff.size());
            return p * std::pow(r, p - 2.0) * diff;
        };
    }

    const bool convex = p > 1.0;
    c.flags.strict_convexity = convex ? FlagStatus::declared_true : FlagStatus::declared_false;
    c.flags.superlinear_growth = convex ? FlagStatus::declared_true : FlagStatus::declared_false;
    c.flags.cone_condition = convex ? FlagStatus::declared_true : FlagStatus::unchecked;
    if (p == 2.0) {
        c.flags.regularity = FlagStatus::declared_true;
        c.flags.twist = FlagStatus::declared_true;
        c.flags.quasi_convex_differences = FlagStatus::declared_true;
    }
    return c;
}

std::vector<McEstimate> check_integrability(const CostFunction& c,
                                            const DiscreteMeasure& P,
                                            const ContinuousMeasure& Q,
                                            long N, std::uint64_t seed) {
    std::vector<McEstimate> estimates;
    estimates.reserve(std::size_t(P.size()));
    for (int i = 0; i < P.size(); ++i) {
        const Vec& atom = P.points[std::size_t(i)];
        McEstimate est;
        try {
            est = mc_integrate(
                Q, [&c, &atom](const Vec& y) { return c.eval(atom, y); }, N, seed);
        } catch (const IntegrationError&) {
            throw IntegrabilityError(
                "check_integrability: non-finite cost integrand for atom " + std::to_string(i), i);
        }
        if (!std::isfinite(est.value) || !std::isfinite(est.std_error))
            throw IntegrabilityError(
                "check_integrability: non-finite estimate for atom " + std::to_string(i), i);
        estimates.push_back(est);
    }
    return estimates;
}

} // namespace sdot
