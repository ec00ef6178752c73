#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sdot/errors.hpp"
#include "sdot/measures.hpp"
#include "sdot/stats.hpp"

using namespace sdot;

namespace {

DiscreteMeasure two_atoms(double w1, double w2) {
    return DiscreteMeasure::create({Vec::Constant(1, 0.0), Vec::Constant(1, 1.0)},
                                   (Vec(2) << w1, w2).finished());
}

} // namespace

TEST_CASE("discrete measure invariants are enforced") {
    CHECK_THROWS_AS(DiscreteMeasure::create({}, Vec()), std::invalid_argument);
    CHECK_THROWS_AS(
        DiscreteMeasure::create({Vec::Constant(1, 0.0)}, (Vec(1) << 0.5).finished()),
        std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure::create({Vec::Constant(1, 0.0), Vec::Constant(1, 0.0)},
                                            (Vec(2) << 0.5, 0.5).finished()),
                    std::invalid_argument);
    CHECK_THROWS_AS(two_atoms(-0.25, 1.25), std::invalid_argument);
    CHECK(two_atoms(0.25, 0.75).size() == 2);
}

TEST_CASE("sample_discrete: single atom puts all mass there") {
    const DiscreteMeasure P =
        DiscreteMeasure::create({Vec::Constant(1, 0.3)}, (Vec(1) << 1.0).finished());
    const EmpiricalWeights w = sample_discrete(P, 5, 123);
    CHECK(w.counts == std::vector<long>{5});
    CHECK(w.n == 5);
}

TEST_CASE("sample_discrete: rejects n = 0 and is deterministic") {
    const DiscreteMeasure P = two_atoms(0.5, 0.5);
    CHECK_THROWS_AS(sample_discrete(P, 0, 1), std::invalid_argument);
    const EmpiricalWeights a = sample_discrete(P, 1000, 42);
    const EmpiricalWeights b = sample_discrete(P, 1000, 42);
    CHECK(a.counts == b.counts);
    // n = 2 lands in the multinomial support
    const EmpiricalWeights c = sample_discrete(P, 2, 7);
    CHECK(c.counts[0] + c.counts[1] == 2);
}

TEST_CASE("sample_discrete: frequency within the binomial band at n = 1e6") {
    const DiscreteMeasure P = two_atoms(0.25, 0.75);
    const EmpiricalWeights w = sample_discrete(P, 1000000, 1);
    const double p_hat = double(w.counts[0]) / 1e6;
    // 3-sigma band, sigma = sqrt(p(1-p)/n) ~ 4.33e-4
    CHECK(p_hat > 0.2487);
    CHECK(p_hat < 0.2513);
    // counts always sum to n exactly
    CHECK(w.counts[0] + w.counts[1] == 1000000);
}

TEST_CASE("sample_discrete: 5-sigma band across several measures at n = 1e6") {
    for (double p1 : {0.1, 0.37, 0.5}) {
        const DiscreteMeasure P = two_atoms(p1, 1.0 - p1);
        const EmpiricalWeights w = sample_discrete(P, 1000000, 99);
        const Vec f = w.frequencies();
        const double sigma = std::sqrt(p1 * (1.0 - p1) / 1e6);
        CHECK(std::abs(f[0] - p1) < 5.0 * sigma);
    }
}

TEST_CASE("mc_integrate: constants integrate exactly with zero error") {
    const ContinuousMeasure Q = uniform_box(Vec::Zero(1), Vec::Ones(1));
    const McEstimate est = mc_integrate(Q, [](const Vec&) { return 1.0; }, 100, 5);
    CHECK(est.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(est.std_error == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("mc_integrate: second moment of Uniform[0,1]") {
    const ContinuousMeasure Q = uniform_box(Vec::Zero(1), Vec::Ones(1));
    const McEstimate est =
        mc_integrate(Q, [](const Vec& y) { return y[0] * y[0]; }, 1000000, 11);
    CHECK(std::abs(est.value - 1.0 / 3.0) < 3.0 * est.std_error);
}

TEST_CASE("mc_integrate: sum of coordinates on the unit square") {
    const ContinuousMeasure Q = uniform_box(Vec::Zero(2), Vec::Ones(2));
    const McEstimate est =
        mc_integrate(Q, [](const Vec& y) { return y[0] + y[1]; }, 1000000, 3);
    CHECK(std::abs(est.value - 1.0) < 3.0 * est.std_error);
}

TEST_CASE("mc_integrate: n < 2 rejected, non-finite integrand reported with the point") {
    const ContinuousMeasure Q = uniform_box(Vec::Zero(1), Vec::Ones(1));
    CHECK_THROWS_AS(mc_integrate(Q, [](const Vec&) { return 1.0; }, 1, 5),
                    std::invalid_argument);
    try {
        mc_integrate(Q, [](const Vec& y) { return std::log(-y[0]); }, 10, 5);
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.point().size() == 1);
        CHECK(e.point()[0] >= 0.0);
    }
}

TEST_CASE("mc_integrate converges: |value - 1/3| < 4 se in >= 99% of 1000 seeds") {
    const ContinuousMeasure Q = uniform_box(Vec::Zero(1), Vec::Ones(1));
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const McEstimate est =
            mc_integrate(Q, [](const Vec& y) { return y[0] * y[0]; }, 2000, seed);
        if (std::abs(est.value - 1.0 / 3.0) < 4.0 * est.std_error) ++hits;
    }
    CHECK(hits >= 990);
}

TEST_CASE("quad_integrate: constants, moments, tensor products") {
    const ContinuousMeasure Q1 = uniform_box(Vec::Zero(1), Vec::Ones(1));
    CHECK(quad_integrate(Q1, [](const Vec&) { return 3.25; }) ==
          doctest::Approx(3.25).epsilon(1e-14));
    CHECK(quad_integrate(Q1, [](const Vec& y) { return y[0] * y[0]; }) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const ContinuousMeasure Q2 = uniform_box(Vec::Zero(2), Vec::Ones(2));
    CHECK(quad_integrate(Q2, [](const Vec& y) { return y[0] * y[1]; }) ==
          doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("quad_integrate: missing scheme or density is an unsupported backend") {
    ContinuousMeasure Q = uniform_box(Vec::Zero(1), Vec::Ones(1));
    Q.quadrature.reset();
    CHECK_THROWS_AS(quad_integrate(Q, [](const Vec&) { return 1.0; }), UnsupportedBackend);
    ContinuousMeasure Q2 = uniform_box(Vec::Zero(1), Vec::Ones(1));
    Q2.density = nullptr;
    CHECK_THROWS_AS(quad_integrate(Q2, [](const Vec&) { return 1.0; }), UnsupportedBackend);
}

TEST_CASE("integration is linear in the integrand (same backend state)") {
    const ContinuousMeasure Q = uniform_box(Vec::Zero(1), Vec::Ones(1));
    auto f = [](const Vec& y) { return y[0] * y[0]; };
    auto g = [](const Vec& y) { return std::sin(3.0 * y[0]); };
    const double a = 2.5, b = -1.25;

    const double lhs_q = quad_integrate(Q, [&](const Vec& y) { return a * f(y) + b * g(y); });
    const double rhs_q = a * quad_integrate(Q, f) + b * quad_integrate(Q, g);
    CHECK(lhs_q == doctest::Approx(rhs_q).epsilon(1e-12));

    const double lhs_mc =
        mc_integrate(Q, [&](const Vec& y) { return a * f(y) + b * g(y); }, 5000, 17).value;
    const double rhs_mc = a * mc_integrate(Q, f, 5000, 17).value +
                          b * mc_integrate(Q, g, 5000, 17).value;
    CHECK(lhs_mc == doctest::Approx(rhs_mc).epsilon(1e-12));
}

TEST_CASE("sampled points stay inside the declared support box") {
    const ContinuousMeasure Q = uniform_box((Vec(2) << -1.0, 2.0).finished(),
                                            (Vec(2) << 1.5, 3.0).finished());
    Rng rng(2024);
    for (int i = 0; i < 2000; ++i) {
        const Vec y = Q.sample(rng);
        for (int k = 0; k < 2; ++k) {
            CHECK(y[k] >= Q.lo[k]);
            CHECK(y[k] <= Q.hi[k]);
        }
    }
}

TEST_CASE("density integrates to one under the attached scheme") {
    for (const ContinuousMeasure& Q :
         {uniform_box(Vec::Zero(1), Vec::Ones(1)),
          pushforward_1d(uniform_box(Vec::Zero(1), Vec::Ones(1)), "sqrt")}) {
        const double mass = quad_integrate(Q, [](const Vec&) { return 1.0; });
        CHECK(std::abs(mass - 1.0) <= Q.quadrature->unit_mass_tol);
    }
}

TEST_CASE("1D cdf/quantile: nondecreasing, quantile-cdf roundtrip") {
    const ContinuousMeasure Q = pushforward_1d(uniform_box(Vec::Zero(1), Vec::Ones(1)), "sqrt");
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double y = i / 100.0;
        const double c = Q.cdf(y);
        CHECK(c >= prev);
        prev = c;
        CHECK(std::abs(Q.quantile(Q.cdf(y)) - y) < 1e-10);
    }
    // sqrt pushforward of Uniform[0,1] has cdf y^2
    CHECK(Q.cdf(0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(Q.density(Vec::Constant(1, 0.5)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mc_integrate is bit-stable for a fixed seed") {
    const ContinuousMeasure Q = uniform_box(Vec::Zero(1), Vec::Ones(1));
    auto f = [](const Vec& y) { return std::exp(y[0]); };
    const McEstimate a = mc_integrate(Q, f, 20000, 9);
    const McEstimate b = mc_integrate(Q, f, 20000, 9);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("pairwise sum and quantiles behave") {
    std::vector<double> xs(1000);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = double(i);
    CHECK(pairwise_sum(xs) == doctest::Approx(999.0 * 1000.0 / 2.0));
    CHECK(sample_quantile(xs, 0.0) == doctest::Approx(0.0));
    CHECK(sample_quantile(xs, 1.0) == doctest::Approx(999.0));
    CHECK(sample_quantile(xs, 0.5) == doctest::Approx(499.5));
}
