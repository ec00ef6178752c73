#pragma once

#include <memory>
#include <optional>
#include <stdexcept>

#include "sdot/costs.hpp"
#include "sdot/laguerre.hpp"
#include "sdot/measures.hpp"
#include "sdot/types.hpp"

namespace sdot {

/// Dual potential vector together with the representative convention used.
struct Potentials {
    Vec values;
    Gauge gauge = Gauge::raw;
};

/// Re-express potentials in another gauge (a shift by a multiple of 1).
Potentials regauge(const Potentials& z, Gauge target);

enum class HessianMethod { fd_gradient, interface_quadrature };

struct SolverConfig {
    Backend backend = Backend::quadrature;
    std::uint64_t seed = 0;

    long mc_samples = 8192;   // fixed sample size (mc backend)
    int segment_nodes = 32;   // Gauss-Legendre nodes per 1D cell segment
    int column_cells = 64;    // outer composite cells along x (2D)
    int column_nodes = 8;     // outer Gauss-Legendre nodes per cell (2D)
    int interface_nodes = 16; // nodes along a 2D cell interface

    double grad_tol = 1e-7;        // deterministic backends
    double mc_tol_sigma = 3.0;     // mc backend: tol = sigma * max std error of masses
    int max_iterations = 300;
    double cell_floor_scale = 0.5; // Newton activates once all masses exceed scale*min(p)
    double hessian_mass_floor = 1e-9;
    double fd_step = 1e-3;
};

struct SolveReport {
    Potentials potentials; // sum-zero gauge
    double cost = 0.0;
    Vec cell_probs;
    double grad_norm = 0.0;
    std::optional<Mat> hessian;
    int iterations = 0;
    Backend backend = Backend::quadrature;
    double integration_noise = 0.0;
};

/// Iteration cap exceeded; carries the best iterate found.
class NoConvergence : public std::runtime_error {
public:
    NoConvergence(const std::string& what, SolveReport best)
        : std::runtime_error(what), best_(std::move(best)) {}
    const SolveReport& best() const { return best_; }

private:
    SolveReport best_;
};

/// Backend evaluation of the z-dependent integrals: the integral of
/// min_k(c(x_k, y) - z_k) against Q and the per-cell masses Q(A_k(z)).
class CellIntegrator {
public:
    struct Values {
        double min_integral = 0.0;
        Vec masses;
    };

    virtual ~CellIntegrator() = default;
    virtual Values evaluate(const Vec& z) const = 0;
    virtual long sample_count() const { return 0; } // > 0 for the mc backend
};

/// Semidiscrete dual problem for fixed (P, Q, cost): evaluation of the dual
/// objective, its gradient and Hessian in z, and maximization.
///
/// The objective is sum_k w_k z_k / |w|_1 plus the backend integral; the
/// gradient component k is w_k / |w|_1 - Q(A_k(z)). The mc backend draws one
/// sample at construction and keeps it for every evaluation, so the
/// maximized function is deterministic given the seed.
class SemidiscreteProblem {
public:
    SemidiscreteProblem(DiscreteMeasure P, ContinuousMeasure Q, CostFunction cost,
                        SolverConfig config = {});

    double value(const Vec& z) const { return value(z, P_.weights); }
    double value(const Vec& z, const Vec& weights) const;

    Vec gradient(const Vec& z) const { return gradient(z, P_.weights); }
    Vec gradient(const Vec& z, const Vec& weights) const;

    Vec cell_masses(const Vec& z) const;

    /// Second derivative matrix of the objective in z. The interface method
    /// integrates 1/|grad_y c(x_i,y) - grad_y c(x_j,y)| against Q over the
    /// (i,j) cell interface (off-diagonal) with diagonal minus the row sum;
    /// the fd method takes central differences of the gradient on the same
    /// backend state. Throws DegenerateHessian when a cell mass is below the
    /// configured floor.
    Mat hessian(const Vec& z, HessianMethod method = HessianMethod::interface_quadrature) const;

    SolveReport solve() const { return solve(P_.weights); }
    SolveReport solve(const Vec& weights, const Vec* warm_start = nullptr) const;

    const DiscreteMeasure& P() const { return P_; }
    const ContinuousMeasure& Q() const { return Q_; }
    const CostFunction& cost() const { return cost_; }
    const SolverConfig& config() const { return config_; }

private:
    Mat interface_hessian(const Vec& z) const;
    Mat fd_hessian(const Vec& z) const;
    double effective_tol(const Vec& masses) const;

    DiscreteMeasure P_;
    ContinuousMeasure Q_;
    CostFunction cost_;
    SolverConfig config_;
    std::shared_ptr<const CellIntegrator> integrator_;
};

/// Exact 1D solution for a sorted discrete measure against a 1D measure with
/// a quantile function and a strictly convex power cost. Cell boundaries are
/// the quantiles of the cumulative weights; potentials follow from score
/// continuity across boundaries; the cost integral uses the quantile
/// substitution, so no density is needed.
SolveReport solve_exact_1d(const DiscreteMeasure& P, const ContinuousMeasure& Q,
                           const CostFunction& cost, const Vec* weight_override = nullptr,
                           int segment_nodes = 64);

} // namespace sdot
