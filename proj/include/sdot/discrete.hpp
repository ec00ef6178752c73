#pragma once

#include <utility>
#include <vector>

#include "sdot/types.hpp"

namespace sdot {

/// Optimal plan and a complementary dual pair for a finite transport
/// problem min sum c_ij g_ij with row sums p and column sums q.
struct TransportPlan {
    Mat cost;
    Mat plan;
    double value = 0.0;
    Vec dual_u, dual_v;
    Vec p, q;
};

/// Exact solution of the discrete problem (two-phase simplex, long-double
/// pivoting). Throws std::invalid_argument when the marginals are not
/// strictly positive probability vectors.
TransportPlan solve_discrete(const Vec& p, const Vec& q, const Mat& cost);

/// The set of dual maximizers, represented implicitly by its constraint
/// system: u_i + v_j <= c_ij everywhere, with equality on the support of one
/// optimal plan, in the gauge sum(u) = 0. A vector u lies in the face iff
/// the pair (u, c-transform of u) attains the primal value.
struct DualFace {
    Mat cost;
    Vec p, q;
    double value = 0.0;
    std::vector<std::pair<int, int>> support;

    int m() const { return int(cost.rows()); }
    int l() const { return int(cost.cols()); }
};

DualFace extract_dual_face(const TransportPlan& sol);

/// c-transform of u: v_j = min_i (c_ij - u_i).
Vec c_transform(const DualFace& face, const Vec& u);

/// Dual objective p'u + q'v(u) of the completed pair.
double reevaluate(const DualFace& face, const Vec& u);

/// Membership oracle: does (u, c-transform of u) attain the primal value?
bool face_contains(const DualFace& face, const Vec& u, double tol = 1e-9);

/// LP maximum of x'u over the gauge-fixed face. Throws FaceError if the LP
/// is unbounded (the gauged face must be a bounded polytope).
double sup_over_face(const DualFace& face, const Vec& x);

/// Maximizer version of sup_over_face (used by tests and diagnostics).
Vec argmax_over_face(const DualFace& face, const Vec& x);

} // namespace sdot
