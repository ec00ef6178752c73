#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace sdot {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Representative chosen for a potential vector, which is only defined up to
/// adding a multiple of the all-ones vector.
enum class Gauge { sum_zero, first_zero, raw };

enum class Backend { mc, quadrature, exact1d };

/// Shift z so that its entries sum to zero.
inline Vec project_sum_zero(const Vec& z) {
    return z.array() - z.mean();
}

/// Shift z so that z[0] == 0 exactly.
inline Vec project_first_zero(const Vec& z) {
    return z.array() - z[0];
}

/// Orthonormal basis of the hyperplane orthogonal to the all-ones vector,
/// returned as the columns of an m x (m-1) matrix (Helmert construction).
inline Mat ones_complement_basis(int m) {
    Mat basis = Mat::Zero(m, m - 1);
    for (int k = 1; k < m; ++k) {
        const double norm = std::sqrt(double(k) * (k + 1));
        for (int i = 0; i < k; ++i) basis(i, k - 1) = 1.0 / norm;
        basis(k, k - 1) = -double(k) / norm;
    }
    return basis;
}

} // namespace sdot
