#pragma once

#include "sdot/types.hpp"

namespace sdot {

/// Result of a standard-form linear program  min c'x  s.t.  Ax = b, x >= 0.
struct LpResult {
    enum class Status { optimal, infeasible, unbounded };
    Status status = Status::optimal;
    double objective = 0.0;
    Vec x;
    Vec duals; // one multiplier per input row (0 for redundant rows)
};

/// Dense two-phase primal simplex with Bland's rule (no cycling) and
/// long-double pivoting. Intended for the small, well-scaled instances this
/// project produces; redundant equality rows are detected in phase one and
/// dropped.
LpResult solve_standard_lp(const Mat& A, const Vec& b, const Vec& c, long max_pivots = 200000);

} // namespace sdot
