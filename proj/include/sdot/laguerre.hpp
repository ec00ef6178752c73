#pragma once

#include <vector>

#include "sdot/costs.hpp"
#include "sdot/measures.hpp"
#include "sdot/types.hpp"

namespace sdot {

/// Index of the cell containing y: argmin over atoms of c(x_i, y) - z_i,
/// ties resolved to the lowest index.
int cell_index(const Vec& y, const Vec& z, const CostFunction& c, const DiscreteMeasure& P);

/// One winning interval of a 1D cell decomposition: atom `atom` attains the
/// minimum of c(x_i, y) - z_i for y in [lo, hi].
struct Segment1D {
    int atom;
    double lo, hi;
};

/// Decomposition of [lo, hi] into the winning intervals of a strictly convex
/// translation-invariant 1D cost (the power family with exponent > 1). The
/// winning atom index is monotone in y, so the cells are consecutive
/// intervals; empty cells are dropped. Boundaries are exact up to bisection
/// tolerance (closed form for the quadratic cost).
std::vector<Segment1D> line_cells(const DiscreteMeasure& P, const Vec& z,
                                  const CostFunction& c, double lo, double hi);

/// Winning intervals along the vertical line x = x0 for the quadratic cost
/// in 2D, for t (the second coordinate) in [tlo, thi]. After dropping the
/// common t^2 term the per-atom scores are affine in t, so this is a lower
/// envelope of lines with exact breakpoints.
std::vector<Segment1D> column_cells_quadratic(const DiscreteMeasure& P, const Vec& z,
                                              double x0, double tlo, double thi);

} // namespace sdot
