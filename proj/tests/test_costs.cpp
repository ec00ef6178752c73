#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdot/costs.hpp"
#include "sdot/errors.hpp"
#include "sdot/rng.hpp"

using namespace sdot;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

Vec v2(double x, double y) { return (Vec(2) << x, y).finished(); }

// Central finite differences of eval in y.
Vec fd_grad_y(const CostFunction& c, const Vec& x, const Vec& y, double h = 1e-6) {
    Vec g(y.size());
    for (int k = 0; k < y.size(); ++k) {
        Vec yp = y, ym = y;
        yp[k] += h;
        ym[k] -= h;
        g[k] = (c.eval(x, yp) - c.eval(x, ym)) / (2.0 * h);
    }
    return g;
}

} // namespace

TEST_CASE("power cost: quadratic values and gradient") {
    const CostFunction c = power_cost(2.0);
    CHECK(c.eval(v2(0, 0), v2(1, 1)) == doctest::Approx(2.0));
    const Vec g = c.grad_y(v2(0, 0), v2(1, 1));
    CHECK(g[0] == doctest::Approx(2.0));
    CHECK(g[1] == doctest::Approx(2.0));
    CHECK(c.flags.uniqueness_preconditions());
    CHECK(c.flags.second_order_preconditions());
}

TEST_CASE("power cost: p = 1 absolute value, flags off") {
    const CostFunction c = power_cost(1.0);
    CHECK(c.eval(v1(0), v1(3)) == doctest::Approx(3.0));
    CHECK(c.grad_y(v1(0), v1(3))[0] == doctest::Approx(1.0));
    CHECK(c.flags.strict_convexity == FlagStatus::declared_false);
    CHECK_FALSE(c.flags.uniqueness_preconditions());
}

TEST_CASE("power cost: p = 3 derivative matches finite differences") {
    const CostFunction c = power_cost(3.0);
    CHECK(c.eval(v1(0), v1(2)) == doctest::Approx(8.0));
    CHECK(c.grad_y(v1(0), v1(2))[0] == doctest::Approx(12.0).epsilon(1e-9));
    const Vec fd = fd_grad_y(c, v1(0), v1(2));
    CHECK(c.grad_y(v1(0), v1(2))[0] == doctest::Approx(fd[0]).epsilon(1e-6));
}

TEST_CASE("power cost: invalid exponent") {
    CHECK_THROWS_AS(power_cost(0.0), std::invalid_argument);
    CHECK_THROWS_AS(power_cost(-1.5), std::invalid_argument);
}

TEST_CASE("gradient matches finite differences at random probes") {
    Rng rng(derive_seed(7, {streams::property}));
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const CostFunction c = power_cost(p);
        for (int trial = 0; trial < 50; ++trial) {
            const int d = 1 + (trial % 3);
            Vec x(d), y(d);
            for (int k = 0; k < d; ++k) {
                x[k] = rng.uniform(-2.0, 2.0);
                y[k] = rng.uniform(-2.0, 2.0);
            }
            if ((x - y).norm() < 0.1) continue; // keep probes away from the kink scale
            const Vec analytic = c.grad_y(x, y);
            const Vec numeric = fd_grad_y(c, x, y);
            const double scale = std::max(1.0, analytic.norm());
            CHECK((analytic - numeric).norm() / scale < 1e-6);
        }
    }
}

TEST_CASE("power costs are symmetric and translation invariant") {
    Rng rng(derive_seed(8, {streams::property}));
    for (double p : {1.0, 2.0, 2.5}) {
        const CostFunction c = power_cost(p);
        for (int trial = 0; trial < 30; ++trial) {
            Vec x(2), y(2), t(2);
            for (int k = 0; k < 2; ++k) {
                x[k] = rng.uniform(-3.0, 3.0);
                y[k] = rng.uniform(-3.0, 3.0);
                t[k] = rng.uniform(-5.0, 5.0);
            }
            CHECK(c.eval(x, y) == doctest::Approx(c.eval(y, x)).epsilon(1e-12));
            CHECK(c.eval(x + t, y + t) == doctest::Approx(c.eval(x, y)).epsilon(1e-9));
            CHECK(c.eval(x, y) >= 0.0);
        }
    }
}

TEST_CASE("check_integrability: quadratic cost against Uniform[0,1]") {
    const DiscreteMeasure P = DiscreteMeasure::create(
        {Vec::Constant(1, 0.0), Vec::Constant(1, 1.0)}, (Vec(2) << 0.5, 0.5).finished());
    const ContinuousMeasure Q = uniform_box(Vec::Zero(1), Vec::Ones(1));
    const auto estimates = check_integrability(power_cost(2.0), P, Q, 200000, 5);
    REQUIRE(estimates.size() == 2);
    // both integrals are 1/3 by symmetry
    CHECK(std::abs(estimates[0].value - 1.0 / 3.0) < 4.0 * estimates[0].std_error);
    CHECK(std::abs(estimates[1].value - 1.0 / 3.0) < 4.0 * estimates[1].std_error);
}

TEST_CASE("check_integrability: barycenter atom gives the variance") {
    const DiscreteMeasure P =
        DiscreteMeasure::create({Vec::Constant(1, 0.5)}, (Vec(1) << 1.0).finished());
    const ContinuousMeasure Q = uniform_box(Vec::Zero(1), Vec::Ones(1));
    const auto estimates = check_integrability(power_cost(2.0), P, Q, 400000, 6);
    CHECK(std::abs(estimates[0].value - 1.0 / 12.0) < 4.0 * estimates[0].std_error);
}

TEST_CASE("check_integrability: zero cost integrates to zero") {
    const DiscreteMeasure P =
        DiscreteMeasure::create({Vec::Constant(1, 0.25)}, (Vec(1) << 1.0).finished());
    const ContinuousMeasure Q = uniform_box(Vec::Zero(1), Vec::Ones(1));
    CostFunction zero = power_cost(2.0);
    zero.eval = [](const Vec&, const Vec&) { return 0.0; };
    const auto estimates = check_integrability(zero, P, Q, 100, 1);
    CHECK(estimates[0].value == doctest::Approx(0.0));
    CHECK(estimates[0].std_error == doctest::Approx(0.0));
}

TEST_CASE("check_integrability: non-finite integrand names the atom") {
    const DiscreteMeasure P = DiscreteMeasure::create(
        {Vec::Constant(1, 0.0), Vec::Constant(1, 1.0)}, (Vec(2) << 0.5, 0.5).finished());
    const ContinuousMeasure Q = uniform_box(Vec::Zero(1), Vec::Ones(1));
    CostFunction bad = power_cost(2.0);
    bad.eval = [](const Vec& x, const Vec& y) {
        return x[0] == 1.0 ? std::numeric_limits<double>::infinity() : (x - y).squaredNorm();
    };
    try {
        check_integrability(bad, P, Q, 100, 1);
        FAIL("expected IntegrabilityError");
    } catch (const IntegrabilityError& e) {
        CHECK(e.atom() == 1);
    }
}
