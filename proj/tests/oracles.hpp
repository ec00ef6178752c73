// Test-only oracles, independent of the library's integration and solver
// paths: composite Simpson integration, brute-force LP solving by vertex
// enumeration, and closed-form reference constants.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; i += 2) sum += 4.0 * f(a + i * h);
    for (int i = 2; i < n; i += 2) sum += 2.0 * f(a + i * h);
    return (h / 3.0) * sum;
}

/// 2D tensor Simpson on [ax,bx] x [ay,by].
inline double simpson2d(const std::function<double(double, double)>& f, double ax, double bx,
                        double ay, double by, int n = 600) {
    return simpson([&](double x) { return simpson([&](double y) { return f(x, y); }, ay, by, n); },
                   ax, bx, n);
}

/// Mean of |X| for X ~ N(0, sigma^2).
inline double half_normal_mean(double sigma) { return sigma * std::sqrt(2.0 / M_PI); }

/// Variance of |X| for X ~ N(0, sigma^2).
inline double half_normal_variance(double sigma) {
    const double mean = half_normal_mean(sigma);
    return sigma * sigma - mean * mean;
}

/// Brute-force vertex enumeration for  max x'u  over
///   { (u, v) : u_i + v_j <= C_ij, equality on support, sum_i u_i = 0 }.
/// Enumerates all candidate active sets of the inequality constraints,
/// solves the square systems, and keeps feasible basic solutions. Only
/// usable at toy sizes.
struct FaceVertexOracle {
    Mat cost;
    std::vector<std::pair<int, int>> support;

    std::vector<Vec> vertices() const {
        const int m = int(cost.rows()), l = int(cost.cols());
        const int dim = m + l;

        // Build the fixed equality system (support + gauge).
        std::vector<Eigen::RowVectorXd> eq_rows;
        std::vector<double> eq_rhs;
        for (auto [i, j] : support) {
            Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim);
            row[i] = 1.0;
            row[m + j] = 1.0;
            eq_rows.push_back(row);
            eq_rhs.push_back(cost(i, j));
        }
        {
            Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim);
            for (int i = 0; i < m; ++i) row[i] = 1.0;
            eq_rows.push_back(row);
            eq_rhs.push_back(0.0);
        }

        std::vector<std::pair<int, int>> inequalities;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < l; ++j) {
                bool on = false;
                for (auto [si, sj] : support) on = on || (si == i && sj == j);
                if (!on) inequalities.emplace_back(i, j);
            }

        const int n_eq = int(eq_rows.size());
        const int need = dim - n_eq; // how many inequalities to activate
        std::vector<Vec> verts;
        std::vector<int> pick(std::size_t(std::max(need, 0)));

        std::function<void(int, int)> recurse = [&](int start, int k) {
            if (k == need) {
                Mat A(dim, dim);
                Vec b(dim);
                for (int r = 0; r < n_eq; ++r) {
                    A.row(r) = eq_rows[std::size_t(r)];
                    b[r] = eq_rhs[std::size_t(r)];
                }
                for (int r = 0; r < need; ++r) {
                    auto [i, j] = inequalities[std::size_t(pick[std::size_t(r)])];
                    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dim);
                    row[i] = 1.0;
                    row[m + j] = 1.0;
                    A.row(n_eq + r) = row;
                    b[n_eq + r] = cost(i, j);
                }
                Eigen::FullPivLU<Mat> lu(A);
                if (!lu.isInvertible()) return;
                const Vec x = lu.solve(b);
                for (auto [i, j] : inequalities)
                    if (x[i] + x[m + j] > cost(i, j) + 1e-8) return;
                verts.push_back(x.head(m));
                return;
            }
            for (int c = start; c < int(inequalities.size()); ++c) {
                pick[std::size_t(k)] = c;
                recurse(c + 1, k + 1);
            }
        };
        if (need >= 0) recurse(0, 0);
        return verts;
    }

    double maximize(const Vec& x) const {
        double best = -std::numeric_limits<double>::infinity();
        for (const Vec& u : vertices()) best = std::max(best, x.dot(u));
        return best;
    }
};

} // namespace oracle
