#include "sdot/discrete.hpp"

#include <cmath>
#include <stdexcept>

#include "sdot/errors.hpp"
#include "sdot/simplex.hpp"

namespace sdot {

namespace {

void validate_marginal(const Vec& w, const char* name) {
    if (w.size() < 1) throw std::invalid_argument(std::string(name) + " is empty");
    for (int i = 0; i < w.size(); ++i)
        if (!(w[i] > 0.0))
            throw std::invalid_argument(std::string(name) + " must be strictly positive");
    if (std::abs(w.sum() - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(name) + " must sum to 1");
}

} // namespace

TransportPlan solve_discrete(const Vec& p, const Vec& q, const Mat& cost) {
    validate_marginal(p, "p");
    validate_marginal(q, "q");
    const int m = int(p.size()), l = int(q.size());
    if (cost.rows() != m || cost.cols() != l)
        throw std::invalid_argument("solve_discrete: cost matrix shape mismatch");

    // Variables g_ij laid out row-major; row-sum and column-sum equalities.
    Mat A = Mat::Zero(m + l, m * l);
    Vec b(m + l), c(m * l);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < l; ++j) {
            A(i, i * l + j) = 1.0;
            A(m + j, i * l + j) = 1.0;
            c[i * l + j] = cost(i, j);
        }
        b[i] = p[i];
    }
    for (int j = 0; j < l; ++j) b[m + j] = q[j];

    const LpResult lp = solve_standard_lp(A, b, c);
    if (lp.status != LpResult::Status::optimal)
        throw std::runtime_error("solve_discrete: simplex did not reach an optimum");

    TransportPlan sol;
    sol.cost = cost;
    sol.p = p;
    sol.q = q;
    sol.plan = Mat::Zero(m, l);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < l; ++j) sol.plan(i, j) = lp.x[i * l + j];
    sol.value = lp.objective;
    sol.dual_u = lp.duals.head(m);
    sol.dual_v = lp.duals.tail(l);
    return sol;
}

DualFace extract_dual_face(const TransportPlan& sol) {
    DualFace face;
    face.cost = sol.cost;
    face.p = sol.p;
    face.q = sol.q;
    face.value = sol.value;
    for (int i = 0; i < sol.plan.rows(); ++i)
        for (int j = 0; j < sol.plan.cols(); ++j)
            if (sol.plan(i, j) > 1e-9) face.support.emplace_back(i, j);
    return face;
}

Vec c_transform(const DualFace& face, const Vec& u) {
    Vec v(face.l());
    for (int j = 0; j < face.l(); ++j) {
        double best = face.cost(0, j) - u[0];
        for (int i = 1; i < face.m(); ++i) best = std::min(best, face.cost(i, j) - u[i]);
        v[j] = best;
    }
    return v;
}

double reevaluate(const DualFace& face, const Vec& u) {
    return face.p.dot(u) + face.q.dot(c_transform(face, u));
}

bool face_contains(const DualFace& face, const Vec& u, double tol) {
    return std::abs(reevaluate(face, u) - face.value) <= tol;
}

namespace {

// The face LP in standard form. Free variables (u, v) are split into
// positive parts; non-support inequalities receive slacks.
//   maximize x'u
//   s.t. u_i + v_j  = c_ij on the support,
//        u_i + v_j <= c_ij elsewhere,
//        sum_i u_i  = 0.
LpResult solve_face_lp(const DualFace& face, const Vec& x) {
    const int m = face.m(), l = face.l();
    std::vector<std::vector<bool>> on_support(std::size_t(m), std::vector<bool>(std::size_t(l), false));
    for (auto [i, j] : face.support) on_support[std::size_t(i)][std::size_t(j)] = true;

    int n_slack = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < l; ++j)
            if (!on_support[std::size_t(i)][std::size_t(j)]) ++n_slack;

    const int n_vars = 2 * (m + l) + n_slack;
    const int n_rows = m * l + 1;
    const auto up = [&](int i) { return i; };
    const auto um = [&](int i) { return m + i; };
    const auto vp = [&](int j) { return 2 * m + j; };
    const auto vm = [&](int j) { return 2 * m + l + j; };

    Mat A = Mat::Zero(n_rows, n_vars);
    Vec b = Vec::Zero(n_rows);
    Vec c = Vec::Zero(n_vars);

    int row = 0, slack = 2 * (m + l);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < l; ++j, ++row) {
            A(row, up(i)) = 1.0;
            A(row, um(i)) = -1.0;
            A(row, vp(j)) = 1.0;
            A(row, vm(j)) = -1.0;
            if (!on_support[std::size_t(i)][std::size_t(j)]) A(row, slack++) = 1.0;
            b[row] = face.cost(i, j);
        }
    }
    for (int i = 0; i < m; ++i) {
        A(row, up(i)) = 1.0;
        A(row, um(i)) = -1.0;
    }
    b[row] = 0.0;

    for (int i = 0; i < m; ++i) {
        c[up(i)] = -x[i]; // minimize -x'u
        c[um(i)] = x[i];
    }

    return solve_standard_lp(A, b, c);
}

} // namespace

double sup_over_face(const DualFace& face, const Vec& x) {
    if (x.size() != face.m()) throw std::invalid_argument("sup_over_face: direction size mismatch");
    const LpResult lp = solve_face_lp(face, x);
    if (lp.status == LpResult::Status::unbounded)
        throw FaceError("sup_over_face: face is unbounded in the gauge");
    if (lp.status != LpResult::Status::optimal)
        throw FaceError("sup_over_face: face LP is infeasible (inconsistent face)");
    return -lp.objective;
}

Vec argmax_over_face(const DualFace& face, const Vec& x) {
    if (x.size() != face.m()) throw std::invalid_argument("argmax_over_face: direction size mismatch");
    const LpResult lp = solve_face_lp(face, x);
    if (lp.status != LpResult::Status::optimal)
        throw FaceError("argmax_over_face: face LP not solvable");
    Vec u(face.m());
    for (int i = 0; i < face.m(); ++i) u[i] = lp.x[i] - lp.x[face.m() + i];
    return u;
}

} // namespace sdot
