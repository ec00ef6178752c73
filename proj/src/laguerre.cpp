#include "sdot/laguerre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sdot {

int cell_index(const Vec& y, const Vec& z, const CostFunction& c, const DiscreteMeasure& P) {
    int best = 0;
    double best_score = c.eval(P.points[0], y) - z[0];
    for (int i = 1; i < P.size(); ++i) {
        const double score = c.eval(P.points[std::size_t(i)], y) - z[i];
        if (score < best_score) {
            best = i;
            best_score = score;
        }
    }
    return best;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Crossing point of the scores of two atoms a < b (positions xa < xb): the
// unique root of g(y) = [h(y - xa) - za] - [h(y - xb) - zb], which is
// strictly increasing in y for strictly convex h. Atom a wins left of the
// root, atom b right of it.
double crossing_point(double xa, double za, double xb, double zb,
                      const CostFunction& c, double lo, double hi) {
    if (c.exponent == 2.0) {
        // (y-xa)^2 - (y-xb)^2 = za - zb  =>  (xb-xa)(2y - xa - xb) = za - zb
        return 0.5 * ((za - zb) / (xb - xa) + xa + xb);
    }
    Vec pa = Vec::Constant(1, xa), pb = Vec::Constant(1, xb);
    auto g = [&](double y) {
        Vec p = Vec::Constant(1, y);
        return (c.eval(pa, p) - za) - (c.eval(pb, p) - zb);
    };
    // Bracket the root by geometric expansion around the support.
    double a = std::min(lo, xa) - 1.0, b = std::max(hi, xb) + 1.0;
    double step = b - a;
    for (int it = 0; it < 200 && g(a) > 0.0; ++it) {
        a -= step;
        step *= 2.0;
    }
    step = b - a;
    for (int it = 0; it < 200 && g(b) < 0.0; ++it) {
        b += step;
        step *= 2.0;
    }
    if (g(a) > 0.0) return -kInf; // b wins everywhere in range
    if (g(b) < 0.0) return kInf;  // a wins everywhere in range
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        if (g(mid) <= 0.0)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

struct EnvelopeEntry {
    int atom;     // original atom index
    double start; // y where this atom begins to win
};

// Monotone-chain construction of the winning sequence given atoms processed
// in ascending order together with a crossing oracle.
template <typename Crossing>
std::vector<Segment1D> build_envelope(const std::vector<int>& order, Crossing crossing,
                                      double lo, double hi) {
    std::vector<EnvelopeEntry> chain;
    for (int atom : order) {
        double start = -kInf;
        while (!chain.empty()) {
            start = crossing(chain.back().atom, atom);
            if (start <= chain.back().start)
                chain.pop_back(); // the top never gets to win
            else
                break;
        }
        if (chain.empty()) start = -kInf;
        chain.push_back({atom, start});
    }

    std::vector<Segment1D> cells;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        const double a = std::max(chain[k].start, lo);
        const double b = std::min(k + 1 < chain.size() ? chain[k + 1].start : kInf, hi);
        if (b > a) cells.push_back({chain[k].atom, a, b});
    }
    return cells;
}

} // namespace

std::vector<Segment1D> line_cells(const DiscreteMeasure& P, const Vec& z,
                                  const CostFunction& c, double lo, double hi) {
    if (P.dim() != 1) throw std::invalid_argument("line_cells: 1D measure required");
    if (!(c.exponent > 1.0))
        throw std::invalid_argument("line_cells: strictly convex power cost required");

    std::vector<int> order(static_cast<std::size_t>(P.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&P](int a, int b) { return P.points[std::size_t(a)][0] < P.points[std::size_t(b)][0]; });

    auto crossing = [&](int a, int b) {
        return crossing_point(P.points[std::size_t(a)][0], z[a],
                              P.points[std::size_t(b)][0], z[b], c, lo, hi);
    };
    return build_envelope(order, crossing, lo, hi);
}

std::vector<Segment1D> column_cells_quadratic(const DiscreteMeasure& P, const Vec& z,
                                              double x0, double tlo, double thi) {
    if (P.dim() != 2) throw std::invalid_argument("column_cells_quadratic: 2D measure required");

    // Score of atom i at (x0, t) minus the common t^2 term:
    //   slope_i * t + intercept_i,  slope_i = -2 x_{i,2}.
    const int m = P.size();
    std::vector<double> slope(static_cast<std::size_t>(m)), intercept(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double xi1 = P.points[std::size_t(i)][0], xi2 = P.points[std::size_t(i)][1];
        slope[std::size_t(i)] = -2.0 * xi2;
        intercept[std::size_t(i)] = xi2 * xi2 + (x0 - xi1) * (x0 - xi1) - z[i];
    }

    // As t grows, winners move from the largest slope to the smallest; among
    // equal slopes only the line with the smallest intercept can win (lowest
    // index on exact ties).
    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (slope[std::size_t(a)] != slope[std::size_t(b)])
            return slope[std::size_t(a)] > slope[std::size_t(b)];
        if (intercept[std::size_t(a)] != intercept[std::size_t(b)])
            return intercept[std::size_t(a)] < intercept[std::size_t(b)];
        return a < b;
    });
    std::vector<int> filtered;
    for (int atom : order)
        if (filtered.empty() || slope[std::size_t(filtered.back())] != slope[std::size_t(atom)])
            filtered.push_back(atom);

    auto crossing = [&](int a, int b) {
        return (intercept[std::size_t(b)] - intercept[std::size_t(a)]) /
               (slope[std::size_t(a)] - slope[std::size_t(b)]);
    };
    return build_envelope(filtered, crossing, tlo, thi);
}

} // namespace sdot
