#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rcp/errors.hpp"

namespace rcp::numerics {

inline constexpr double pi = std::numbers::pi;
inline constexpr double inv_e = 0.36787944117144233;  // 1/e

/// Bisection for a sign change of `f` on [lo, hi]. Stops when the bracket is
/// below `rel_tol * max(1, |mid|)` or after 200 halvings.
template <typename F>
[[nodiscard]] double bisect(F&& f, double lo, double hi, double rel_tol = 1e-14) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw ConvergenceError("bisect: no sign change on the bracket");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) return mid;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section search for the maximiser of a unimodal `f` on [lo, hi].
template <typename F>
[[nodiscard]] double golden_max(F&& f, double lo, double hi, double abs_tol = 1e-15) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 300 && (hi - lo) > abs_tol; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? x1 : x2;
}

}  // namespace rcp::numerics
