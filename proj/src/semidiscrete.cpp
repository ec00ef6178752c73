#include "sdot/semidiscrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sdot/errors.hpp"
#include "sdot/rng.hpp"
#include "sdot/stats.hpp"

namespace sdot {

Potentials regauge(const Potentials& z, Gauge target) {
    Potentials out;
    out.gauge = target;
    switch (target) {
    case Gauge::sum_zero: out.values = project_sum_zero(z.values); break;
    case Gauge::first_zero: out.values = project_first_zero(z.values); break;
    case Gauge::raw: out.values = z.values; break;
    }
    return out;
}

namespace {

// ------------------------------------------------------------------
// Integrators
// ------------------------------------------------------------------

// 1D: exact cell intervals plus Gauss-Legendre on each segment. Masses and
// the objective integral are smooth functions of z because the segment
// boundaries move smoothly.
class Geometric1D final : public CellIntegrator {
public:
    Geometric1D(const DiscreteMeasure& P, const ContinuousMeasure& Q, const CostFunction& c,
                int nodes)
        : P_(P), Q_(Q), cost_(c) {
        if (!Q.has_density())
            throw UnsupportedBackend("quadrature backend: 1D measure must carry a density");
        gauss_legendre(nodes, gl_nodes_, gl_weights_);
    }

    Values evaluate(const Vec& z) const override {
        Values out;
        out.masses = Vec::Zero(P_.size());
        double integral = 0.0;
        const auto segments = line_cells(P_, z, cost_, Q_.lo[0], Q_.hi[0]);
        Vec y(1);
        for (const Segment1D& seg : segments) {
            // Split at the atom position: |y - x|^p has a kink there for
            // non-even exponents.
            const double atom_pos = P_.points[std::size_t(seg.atom)][0];
            const double split = std::clamp(atom_pos, seg.lo, seg.hi);
            for (const auto [a, b] : {std::pair{seg.lo, split}, std::pair{split, seg.hi}}) {
                if (!(b > a)) continue;
                const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
                double mass = 0.0, contrib = 0.0;
                for (std::size_t g = 0; g < gl_nodes_.size(); ++g) {
                    y[0] = mid + half * gl_nodes_[g];
                    const double w = half * gl_weights_[g] * Q_.density(y);
                    mass += w;
                    contrib += w * (cost_.eval(P_.points[std::size_t(seg.atom)], y) - z[seg.atom]);
                }
                out.masses[seg.atom] += mass;
                integral += contrib;
            }
        }
        out.min_integral = integral;
        return out;
    }

private:
    DiscreteMeasure P_;
    ContinuousMeasure Q_;
    CostFunction cost_;
    std::vector<double> gl_nodes_, gl_weights_;
};

// 2D quadratic cost: composite Gauss-Legendre over x; per column the cells
// are intervals from a lower envelope of lines, integrated segment by
// segment.
class Column2D final : public CellIntegrator {
public:
    Column2D(const DiscreteMeasure& P, const ContinuousMeasure& Q, const CostFunction& c,
             int cells, int outer_nodes, int inner_nodes)
        : P_(P), Q_(Q), cost_(c) {
        if (!Q.has_density())
            throw UnsupportedBackend("quadrature backend: 2D measure must carry a density");
        if (c.exponent != 2.0)
            throw UnsupportedBackend("quadrature backend in 2D requires the quadratic cost");
        std::vector<double> gn, gw;
        gauss_legendre(outer_nodes, gn, gw);
        const double width = (Q.hi[0] - Q.lo[0]) / cells;
        for (int cell = 0; cell < cells; ++cell) {
            const double a = Q.lo[0] + cell * width;
            for (int g = 0; g < outer_nodes; ++g) {
                columns_.push_back(a + 0.5 * width * (gn[std::size_t(g)] + 1.0));
                column_weights_.push_back(0.5 * width * gw[std::size_t(g)]);
            }
        }
        gauss_legendre(inner_nodes, gl_nodes_, gl_weights_);
    }

    Values evaluate(const Vec& z) const override {
        Values out;
        out.masses = Vec::Zero(P_.size());
        double integral = 0.0;
        Vec y(2);
        for (std::size_t col = 0; col < columns_.size(); ++col) {
            const double x0 = columns_[col], wx = column_weights_[col];
            y[0] = x0;
            const auto segments = column_cells_quadratic(P_, z, x0, Q_.lo[1], Q_.hi[1]);
            for (const Segment1D& seg : segments) {
                const double mid = 0.5 * (seg.lo + seg.hi), half = 0.5 * (seg.hi - seg.lo);
                double mass = 0.0, contrib = 0.0;
                for (std::size_t g = 0; g < gl_nodes_.size(); ++g) {
                    y[1] = mid + half * gl_nodes_[g];
                    const double w = half * gl_weights_[g] * Q_.density(y);
                    mass += w;
                    contrib += w * (cost_.eval(P_.points[std::size_t(seg.atom)], y) - z[seg.atom]);
                }
                out.masses[seg.atom] += wx * mass;
                integral += wx * contrib;
            }
        }
        out.min_integral = integral;
        return out;
    }

private:
    DiscreteMeasure P_;
    ContinuousMeasure Q_;
    CostFunction cost_;
    std::vector<double> columns_, column_weights_;
    std::vector<double> gl_nodes_, gl_weights_;
};

// Sample-average approximation: one fixed sample per problem instance, so
// the maximized function is deterministic and common random numbers apply
// across evaluations.
class FixedSample final : public CellIntegrator {
public:
    FixedSample(const DiscreteMeasure& P, const ContinuousMeasure& Q, const CostFunction& c,
                long n, std::uint64_t seed)
        : P_(P), cost_(c) {
        Rng rng(derive_seed(seed, {streams::solver_sample}));
        points_.reserve(std::size_t(n));
        for (long i = 0; i < n; ++i) points_.push_back(Q.sample(rng));
    }

    Values evaluate(const Vec& z) const override {
        Values out;
        out.masses = Vec::Zero(P_.size());
        std::vector<double> terms(points_.size());
        const double inv_n = 1.0 / double(points_.size());
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const int k = cell_index(points_[i], z, cost_, P_);
            out.masses[k] += inv_n;
            terms[i] = inv_n * (cost_.eval(P_.points[std::size_t(k)], points_[i]) - z[k]);
        }
        out.min_integral = pairwise_sum(terms);
        return out;
    }

    long sample_count() const override { return long(points_.size()); }

private:
    DiscreteMeasure P_;
    CostFunction cost_;
    std::vector<Vec> points_;
};

Vec normalized_weights(const Vec& w) {
    double sum = 0.0;
    for (int k = 0; k < w.size(); ++k) {
        if (!(w[k] > 0.0))
            throw std::invalid_argument("semidiscrete: weights must be strictly positive");
        sum += std::abs(w[k]);
    }
    return w / sum;
}

double mass_std_error(const Vec& masses, long n) {
    if (n <= 0) return 0.0;
    double worst = 0.0;
    for (int k = 0; k < masses.size(); ++k) {
        const double m = std::clamp(masses[k], 0.0, 1.0);
        worst = std::max(worst, std::sqrt(m * (1.0 - m) / double(n)));
    }
    return worst;
}

} // namespace

SemidiscreteProblem::SemidiscreteProblem(DiscreteMeasure P, ContinuousMeasure Q,
                                         CostFunction cost, SolverConfig config)
    : P_(std::move(P)), Q_(std::move(Q)), cost_(std::move(cost)), config_(config) {
    if (P_.dim() != Q_.dim)
        throw std::invalid_argument("semidiscrete: dimension mismatch between P and Q");

    switch (config_.backend) {
    case Backend::mc:
        integrator_ = std::make_shared<FixedSample>(P_, Q_, cost_, config_.mc_samples,
                                                    config_.seed);
        break;
    case Backend::quadrature:
    case Backend::exact1d:
        if (Q_.dim == 1) {
            integrator_ = std::make_shared<Geometric1D>(P_, Q_, cost_, config_.segment_nodes);
        } else if (Q_.dim == 2) {
            integrator_ = std::make_shared<Column2D>(P_, Q_, cost_, config_.column_cells,
                                                     config_.column_nodes, config_.segment_nodes);
        } else {
            throw UnsupportedBackend("quadrature backend supports d <= 2 only");
        }
        break;
    }
}

double SemidiscreteProblem::value(const Vec& z, const Vec& weights) const {
    if (z.size() != P_.size() || weights.size() != P_.size())
        throw std::invalid_argument("semidiscrete: dimension mismatch");
    const Vec u = normalized_weights(weights);
    const auto cv = integrator_->evaluate(z);
    if (!std::isfinite(cv.min_integral))
        throw IntegrationError("semidiscrete: non-finite objective integral", Vec());
    return u.dot(z) + cv.min_integral;
}

Vec SemidiscreteProblem::gradient(const Vec& z, const Vec& weights) const {
    if (z.size() != P_.size() || weights.size() != P_.size())
        throw std::invalid_argument("semidiscrete: dimension mismatch");
    const Vec u = normalized_weights(weights);
    return u - integrator_->evaluate(z).masses;
}

Vec SemidiscreteProblem::cell_masses(const Vec& z) const {
    return integrator_->evaluate(z).masses;
}

Mat SemidiscreteProblem::interface_hessian(const Vec& z) const {
    if (!cost_.has_grad() || !Q_.has_density())
        throw UnsupportedBackend("interface hessian needs a cost gradient and a density");

    const int m = P_.size();
    Mat H = Mat::Zero(m, m);
    Vec y(Q_.dim);

    if (Q_.dim == 1) {
        const auto segments = line_cells(P_, z, cost_, Q_.lo[0], Q_.hi[0]);
        for (std::size_t s = 0; s + 1 < segments.size(); ++s) {
            const double b = segments[s].hi;
            if (b <= Q_.lo[0] || b >= Q_.hi[0]) continue;
            const int i = segments[s].atom, j = segments[s + 1].atom;
            y[0] = b;
            const double gap = std::abs(cost_.grad_y(P_.points[std::size_t(i)], y)[0] -
                                        cost_.grad_y(P_.points[std::size_t(j)], y)[0]);
            const double off = Q_.density(y) / gap;
            H(i, j) += off;
            H(j, i) += off;
        }
    } else if (Q_.dim == 2) {
        if (cost_.exponent != 2.0)
            throw UnsupportedBackend("2D interface hessian requires the quadratic cost");
        std::vector<double> gn, gw;
        gauss_legendre(config_.interface_nodes, gn, gw);
        constexpr double kInf = std::numeric_limits<double>::infinity();

        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                const Vec &xi = P_.points[std::size_t(i)], &xj = P_.points[std::size_t(j)];
                const Vec n = xj - xi;
                const double n2 = n.squaredNorm();
                // Bisector: 2 y.n = kappa.
                const double kappa = z[i] - z[j] + xj.squaredNorm() - xi.squaredNorm();
                const Vec p0 = (kappa / (2.0 * n2)) * n;
                Vec dir(2);
                dir << -n[1], n[0];
                dir /= dir.norm();

                double t0 = -kInf, t1 = kInf;
                auto clip = [&](double coeff, double bound_lo, double bound_hi, double at) {
                    // bound_lo <= at + t*coeff <= bound_hi
                    if (std::abs(coeff) < 1e-300) {
                        if (at < bound_lo || at > bound_hi) t0 = kInf;
                        return;
                    }
                    double a = (bound_lo - at) / coeff, b = (bound_hi - at) / coeff;
                    if (a > b) std::swap(a, b);
                    t0 = std::max(t0, a);
                    t1 = std::min(t1, b);
                };
                clip(dir[0], Q_.lo[0], Q_.hi[0], p0[0]);
                clip(dir[1], Q_.lo[1], Q_.hi[1], p0[1]);
                // Both i and j must win against every other atom along the line.
                for (int k = 0; k < m && t0 < t1; ++k) {
                    if (k == i || k == j) continue;
                    const Vec& xk = P_.points[std::size_t(k)];
                    // 2 y.(xk - xi) <= |xk|^2 - |xi|^2 + z_i - z_k, affine in t.
                    const Vec d = xk - xi;
                    const double rhs = xk.squaredNorm() - xi.squaredNorm() + z[i] - z[k];
                    const double c0 = 2.0 * p0.dot(d), c1 = 2.0 * dir.dot(d);
                    if (std::abs(c1) < 1e-300) {
                        if (c0 > rhs) t0 = kInf;
                    } else if (c1 > 0.0) {
                        t1 = std::min(t1, (rhs - c0) / c1);
                    } else {
                        t0 = std::max(t0, (rhs - c0) / c1);
                    }
                }
                if (!(t0 < t1) || !std::isfinite(t0) || !std::isfinite(t1)) continue;

                const double gap = 2.0 * std::sqrt(n2);
                const double mid = 0.5 * (t0 + t1), half = 0.5 * (t1 - t0);
                double off = 0.0;
                for (std::size_t g = 0; g < gn.size(); ++g) {
                    const Vec yt = p0 + (mid + half * gn[g]) * dir;
                    off += half * gw[g] * Q_.density(yt) / gap;
                }
                H(i, j) += off;
                H(j, i) += off;
            }
        }
    } else {
        throw UnsupportedBackend("interface hessian supports d <= 2 only");
    }

    for (int i = 0; i < m; ++i) H(i, i) = -(H.row(i).sum() - H(i, i));
    return H;
}

Mat SemidiscreteProblem::fd_hessian(const Vec& z) const {
    const int m = P_.size();
    const double h = config_.fd_step;
    Mat H(m, m);
    for (int k = 0; k < m; ++k) {
        Vec zp = z, zm = z;
        zp[k] += h;
        zm[k] -= h;
        const Vec gp = P_.weights - integrator_->evaluate(zp).masses;
        const Vec gm = P_.weights - integrator_->evaluate(zm).masses;
        H.col(k) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
}

Mat SemidiscreteProblem::hessian(const Vec& z, HessianMethod method) const {
    const Vec masses = integrator_->evaluate(z).masses;
    if (masses.minCoeff() < config_.hessian_mass_floor)
        throw DegenerateHessian("hessian: a cell mass is below the configured floor");
    return method == HessianMethod::interface_quadrature ? interface_hessian(z) : fd_hessian(z);
}

double SemidiscreteProblem::effective_tol(const Vec& masses) const {
    if (config_.backend == Backend::mc)
        return config_.mc_tol_sigma * mass_std_error(masses, integrator_->sample_count());
    return config_.grad_tol;
}

SolveReport SemidiscreteProblem::solve(const Vec& weights, const Vec* warm_start) const {
    if (config_.backend == Backend::exact1d)
        return solve_exact_1d(P_, Q_, cost_, &weights, config_.segment_nodes);

    const int m = P_.size();
    const Vec u = normalized_weights(weights);

    SolveReport report;
    report.backend = config_.backend;

    if (m == 1) {
        const Vec z = Vec::Zero(1);
        const auto cv = integrator_->evaluate(z);
        report.potentials = {z, Gauge::sum_zero};
        report.cost = u.dot(z) + cv.min_integral;
        report.cell_probs = cv.masses;
        report.grad_norm = (u - cv.masses).norm();
        report.hessian = Mat::Zero(1, 1);
        report.integration_noise = mass_std_error(cv.masses, integrator_->sample_count());
        return report;
    }

    Vec z = warm_start ? project_sum_zero(*warm_start) : Vec::Zero(m);
    const Mat basis = ones_complement_basis(m);
    const double newton_floor = config_.cell_floor_scale * u.minCoeff();
    const bool hessian_available = cost_.has_grad() && Q_.has_density() &&
                                   (Q_.dim == 1 || (Q_.dim == 2 && cost_.exponent == 2.0));

    double grad_step = 1.0;
    double best_gnorm = std::numeric_limits<double>::infinity();
    SolveReport best;

    for (int iter = 0; iter <= config_.max_iterations; ++iter) {
        const auto cv = integrator_->evaluate(z);
        const Vec g = u - cv.masses;
        const double gnorm = g.norm();
        const double value = u.dot(z) + cv.min_integral;

        if (gnorm < best_gnorm) {
            best_gnorm = gnorm;
            best.potentials = {z, Gauge::sum_zero};
            best.cost = value;
            best.cell_probs = cv.masses;
            best.grad_norm = gnorm;
            best.iterations = iter;
            best.backend = config_.backend;
        }

        if (gnorm < effective_tol(cv.masses)) {
            report = best;
            report.integration_noise =
                mass_std_error(report.cell_probs, integrator_->sample_count());
            if (hessian_available) {
                try {
                    report.hessian = interface_hessian(report.potentials.values);
                } catch (const UnsupportedBackend&) {
                }
            }
            return report;
        }

        // Direction: damped Newton on the zero-sum hyperplane once every
        // cell holds enough mass, otherwise plain gradient ascent.
        Vec dir = g;
        bool newton = false;
        if (hessian_available && cv.masses.minCoeff() > newton_floor) {
            try {
                const Mat H = interface_hessian(z);
                const Mat Hr = basis.transpose() * H * basis;
                Eigen::LLT<Mat> llt(-Hr);
                if (llt.info() == Eigen::Success) {
                    const Vec d = llt.solve(basis.transpose() * g);
                    const Vec candidate = basis * d;
                    if (candidate.dot(g) > 0.0) {
                        dir = candidate;
                        newton = true;
                    }
                }
            } catch (const UnsupportedBackend&) {
            } catch (const DegenerateHessian&) {
            }
        }

        // Backtracking line search (Armijo) on the objective.
        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            double t = newton ? 1.0 : grad_step;
            const double slope = g.dot(dir);
            for (int halving = 0; halving < 60; ++halving) {
                const Vec zt = project_sum_zero(z + t * dir);
                const double vt = u.dot(zt) + integrator_->evaluate(zt).min_integral;
                if (vt >= value + 1e-4 * t * slope) {
                    z = zt;
                    if (!newton) grad_step = std::min(t * 2.0, 1e6);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted && newton) {
                dir = g; // fall back to a gradient step
                newton = false;
            } else {
                break;
            }
        }
        if (!accepted)
            throw NoConvergence("semidiscrete solve: line search stalled", best);
    }
    throw NoConvergence("semidiscrete solve: iteration cap exceeded", best);
}

SolveReport solve_exact_1d(const DiscreteMeasure& P, const ContinuousMeasure& Q,
                           const CostFunction& cost, const Vec* weight_override,
                           int segment_nodes) {
    if (P.dim() != 1 || Q.dim != 1)
        throw std::invalid_argument("solve_exact_1d: 1D measures required");
    if (!P.sorted_1d())
        throw std::invalid_argument("solve_exact_1d: support points must be strictly increasing");
    if (!Q.has_cdf())
        throw std::invalid_argument("solve_exact_1d: Q must carry a quantile function");
    if (cost.flags.strict_convexity != FlagStatus::declared_true)
        throw std::invalid_argument("solve_exact_1d: strictly convex cost required");

    const int m = P.size();
    Vec u = weight_override ? *weight_override : P.weights;
    {
        double sum = 0.0;
        for (int k = 0; k < m; ++k) {
            if (!(u[k] > 0.0))
                throw std::invalid_argument("solve_exact_1d: weights must be strictly positive");
            sum += u[k];
        }
        u /= sum;
    }

    // Boundaries at the quantiles of the cumulative weights; cell k is
    // [b_k, b_{k+1}] and carries exactly mass u_k.
    Vec boundaries(m + 1);
    boundaries[0] = Q.quantile(0.0);
    double cum = 0.0;
    for (int k = 0; k + 1 < m; ++k) {
        cum += u[k];
        boundaries[k + 1] = Q.quantile(std::clamp(cum, 0.0, 1.0));
    }
    boundaries[m] = Q.quantile(1.0);

    // Score continuity across each interior boundary fixes the potential
    // increments; gauge to sum-zero afterwards.
    Vec z = Vec::Zero(m);
    Vec yb(1);
    for (int k = 0; k + 1 < m; ++k) {
        yb[0] = boundaries[k + 1];
        z[k + 1] = z[k] + cost.eval(P.points[std::size_t(k + 1)], yb) -
                   cost.eval(P.points[std::size_t(k)], yb);
    }
    z = project_sum_zero(z);

    // Cost by quantile substitution: the cell integral of c(x_k, .) dQ is
    // the integral of c(x_k, quantile(s)) ds over the cell's weight range.
    std::vector<double> gl_nodes, gl_weights;
    gauss_legendre(segment_nodes, gl_nodes, gl_weights);
    double cost_value = 0.0;
    double s_lo = 0.0;
    Vec y(1);
    for (int k = 0; k < m; ++k) {
        const double s_hi = (k + 1 == m) ? 1.0 : s_lo + u[k];
        // Split the weight range where the quantile passes the atom: the
        // integrand kinks there for non-even exponents.
        double s_split = s_lo;
        const double atom_pos = P.points[std::size_t(k)][0];
        if (atom_pos > boundaries[k] && atom_pos < boundaries[k + 1])
            s_split = std::clamp(Q.cdf(atom_pos), s_lo, s_hi);
        for (const auto [a, b] : {std::pair{s_lo, s_split}, std::pair{s_split, s_hi}}) {
            if (!(b > a)) continue;
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (std::size_t g = 0; g < gl_nodes.size(); ++g) {
                y[0] = Q.quantile(mid + half * gl_nodes[g]);
                cost_value += half * gl_weights[g] * cost.eval(P.points[std::size_t(k)], y);
            }
        }
        s_lo = s_hi;
    }

    SolveReport report;
    report.potentials = {z, Gauge::sum_zero};
    report.cost = cost_value;
    report.cell_probs = u;
    report.grad_norm = 0.0;
    report.iterations = 0;
    report.backend = Backend::exact1d;
    report.integration_noise = 0.0;

    if (Q.has_density() && cost.has_grad()) {
        Mat H = Mat::Zero(m, m);
        for (int k = 0; k + 1 < m; ++k) {
            yb[0] = boundaries[k + 1];
            const double gap = std::abs(cost.grad_y(P.points[std::size_t(k)], yb)[0] -
                                        cost.grad_y(P.points[std::size_t(k + 1)], yb)[0]);
            const double off = Q.density(yb) / gap;
            H(k, k + 1) += off;
            H(k + 1, k) += off;
        }
        for (int i = 0; i < m; ++i) H(i, i) = -(H.row(i).sum() - H(i, i));
        report.hessian = H;
    }
    return report;
}

} // namespace sdot
