#pragma once

#include <functional>
#include <vector>

#include "sdot/measures.hpp"
#include "sdot/types.hpp"

namespace sdot {

/// Status of a structural property of a cost function. Properties are either
/// established by construction for the built-in families or left unchecked;
/// nothing here is verified numerically at runtime.
enum class FlagStatus { declared_true, declared_false, unchecked };

struct AssumptionFlags {
    FlagStatus strict_convexity = FlagStatus::unchecked;   // of h, c(x,y)=h(x-y)
    FlagStatus cone_condition = FlagStatus::unchecked;     // geometric existence statement
    FlagStatus superlinear_growth = FlagStatus::unchecked; // h(x)/|x| unbounded
    FlagStatus regularity = FlagStatus::unchecked;         // c(x,.) in C^{1,1}
    FlagStatus twist = FlagStatus::unchecked;              // y-gradient injective in y
    FlagStatus quasi_convex_differences = FlagStatus::unchecked;

    bool uniqueness_preconditions() const {
        return strict_convexity == FlagStatus::declared_true &&
               cone_condition == FlagStatus::declared_true &&
               superlinear_growth == FlagStatus::declared_true;
    }
    bool second_order_preconditions() const {
        return regularity == FlagStatus::declared_true &&
               twist == FlagStatus::declared_true &&
               quasi_convex_differences == FlagStatus::declared_true;
    }
};

/// Translation-invariant cost c(x,y) together with its y-gradient (when
/// defined) and declared structural flags.
struct CostFunction {
    std::function<double(const Vec&, const Vec&)> eval;    // c(x, y)
    std::function<Vec(const Vec&, const Vec&)> grad_y;     // may be empty
    AssumptionFlags flags;
    double exponent = 0.0; // > 0 for the power family |x-y|^p

    bool has_grad() const { return bool(grad_y); }
};

/// Power cost |x - y|^p (Euclidean norm), p > 0. The y-gradient is attached
/// for p >= 1 (for p == 1 it is the unit vector away from x, zero at y == x).
/// Strict convexity and superlinear growth hold exactly when p > 1; the
/// second-order flags are declared only for the quadratic case.
CostFunction power_cost(double p);

/// Monte Carlo estimates of the cost integral against each atom of P. Throws
/// IntegrabilityError naming the atom if an estimate or its standard error
/// is non-finite.
std::vector<McEstimate> check_integrability(const CostFunction& c,
                                            const DiscreteMeasure& P,
                                            const ContinuousMeasure& Q,
                                            long N, std::uint64_t seed);

} // namespace sdot
