#include "sdot/simplex.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sdot {

namespace {

using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

constexpr long double kPivotEps = 1e-11L;
constexpr long double kFeasEps = 1e-9L;

} // namespace

LpResult solve_standard_lp(const Mat& A, const Vec& b, const Vec& c, long max_pivots) {
    const int n_rows_in = int(A.rows());
    const int n_vars = int(A.cols());
    if (b.size() != n_rows_in || c.size() != n_vars)
        throw std::invalid_argument("solve_standard_lp: dimension mismatch");

    // Tableau [A | I | b] with nonnegative right-hand side; artificial
    // variable i occupies column n_vars + i.
    LMat T(n_rows_in, n_vars + n_rows_in + 1);
    T.setZero();
    std::vector<double> row_sign(std::size_t(n_rows_in), 1.0);
    for (int i = 0; i < n_rows_in; ++i) {
        const double s = b[i] < 0.0 ? -1.0 : 1.0;
        row_sign[std::size_t(i)] = s;
        for (int j = 0; j < n_vars; ++j) T(i, j) = (long double)(s * A(i, j));
        T(i, n_vars + i) = 1.0L;
        T(i, n_vars + n_rows_in) = (long double)(s * b[i]);
    }

    std::vector<int> basis(static_cast<std::size_t>(n_rows_in));
    for (int i = 0; i < n_rows_in; ++i) basis[std::size_t(i)] = n_vars + i;
    int n_rows = n_rows_in;
    const int rhs = n_vars + n_rows_in;

    LVec cost = LVec::Zero(n_vars + n_rows_in);
    for (int j = 0; j < n_rows_in; ++j) cost[n_vars + j] = 1.0L; // phase-one objective

    long pivots = 0;
    auto pivot_on = [&](int row, int col) {
        const long double piv = T(row, col);
        T.row(row) /= piv;
        for (int i = 0; i < n_rows; ++i) {
            if (i == row) continue;
            const long double factor = T(i, col);
            if (factor != 0.0L) T.row(i) -= factor * T.row(row);
        }
        basis[std::size_t(row)] = col;
    };

    auto run_phase = [&](int allowed_cols) -> bool {
        // Returns false only if the problem is unbounded in this phase.
        while (true) {
            // Reduced costs recomputed from scratch each pivot (small dense
            // problems; avoids drift).
            int enter = -1;
            for (int j = 0; j < allowed_cols; ++j) {
                long double r = cost[j];
                for (int i = 0; i < n_rows; ++i) {
                    const int bj = basis[std::size_t(i)];
                    if (cost[bj] != 0.0L) r -= cost[bj] * T(i, j);
                }
                if (r < -kPivotEps) {
                    enter = j; // Bland: smallest eligible index
                    break;
                }
            }
            if (enter < 0) return true;

            int leave = -1;
            long double best_ratio = 0.0L;
            for (int i = 0; i < n_rows; ++i) {
                if (T(i, enter) > kPivotEps) {
                    const long double ratio = T(i, rhs) / T(i, enter);
                    if (leave < 0 || ratio < best_ratio ||
                        (ratio == best_ratio &&
                         basis[std::size_t(i)] < basis[std::size_t(leave)])) {
                        leave = i;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave < 0) return false;
            pivot_on(leave, enter);
            if (++pivots > max_pivots)
                throw std::runtime_error("solve_standard_lp: pivot limit exceeded");
        }
    };

    // Phase one: minimize the artificial sum.
    if (!run_phase(n_vars + n_rows_in))
        throw std::runtime_error("solve_standard_lp: phase one unbounded");
    long double phase1 = 0.0L;
    for (int i = 0; i < n_rows; ++i)
        if (basis[std::size_t(i)] >= n_vars) phase1 += T(i, rhs);
    if (phase1 > kFeasEps) {
        LpResult res;
        res.status = LpResult::Status::infeasible;
        return res;
    }

    // Drive out artificials still basic at zero; rows with no real pivot are
    // redundant and get removed.
    for (int i = 0; i < n_rows;) {
        if (basis[std::size_t(i)] < n_vars) {
            ++i;
            continue;
        }
        int col = -1;
        for (int j = 0; j < n_vars; ++j) {
            if (std::abs((double)T(i, j)) > (double)kPivotEps) {
                col = j;
                break;
            }
        }
        if (col >= 0) {
            pivot_on(i, col);
            ++i;
        } else {
            // Redundant row: remove it from the working tableau.
            for (int k = i; k + 1 < n_rows; ++k) {
                T.row(k) = T.row(k + 1);
                basis[std::size_t(k)] = basis[std::size_t(k + 1)];
            }
            --n_rows;
        }
    }

    // Phase two on the real objective; artificial columns are never allowed
    // to re-enter.
    for (int j = 0; j < n_vars; ++j) cost[j] = (long double)c[j];
    for (int j = 0; j < n_rows_in; ++j) cost[n_vars + j] = 0.0L;
    if (!run_phase(n_vars)) {
        LpResult res;
        res.status = LpResult::Status::unbounded;
        return res;
    }

    LpResult res;
    res.status = LpResult::Status::optimal;
    res.x = Vec::Zero(n_vars);
    for (int i = 0; i < n_rows; ++i)
        if (basis[std::size_t(i)] < n_vars) res.x[basis[std::size_t(i)]] = double(T(i, rhs));
    res.objective = c.dot(res.x);

    // Duals: the artificial block of the tableau holds the accumulated row
    // operations, so y = c_B' (that block) is dual feasible with the same
    // objective (this covers dropped redundant rows too). Undo the sign
    // flips applied to negative right-hand sides.
    res.duals = Vec::Zero(n_rows_in);
    for (int orig = 0; orig < n_rows_in; ++orig) {
        long double y = 0.0L;
        for (int k = 0; k < n_rows; ++k) {
            const int bk = basis[std::size_t(k)];
            if (bk < n_vars && c[bk] != 0.0) y += (long double)c[bk] * T(k, n_vars + orig);
        }
        res.duals[orig] = double(y) * row_sign[std::size_t(orig)];
    }
    return res;
}

} // namespace sdot
