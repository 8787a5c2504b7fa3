#pragma once

#include <cmath>
#include <utility>

namespace cwpotts::roots {

// Newton steps kept inside a shrinking sign bracket; falls back to bisection.
// Requires f(lo) and f(hi) of opposite sign (or one of them zero).
template <class F, class D>
double safe_newton(F&& f, D&& df, double lo, double hi, double xtol = 1e-15, int max_iter = 200)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if (flo > 0.0) {
        std::swap(lo, hi);
        std::swap(flo, fhi);
    }
    // now f(lo) < 0 < f(hi), lo may exceed hi
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        const double fx = f(x);
        if (fx == 0.0)
            return x;
        if (fx < 0.0)
            lo = x;
        else
            hi = x;
        if (std::abs(hi - lo) <= xtol * std::max(1.0, std::abs(x)))
            break;
        const double d = df(x);
        double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : 0.5 * (lo + hi);
        const double a = std::min(lo, hi), b = std::max(lo, hi);
        if (!(next > a && next < b))
            next = 0.5 * (lo + hi);
        if (next == x)
            break;
        x = next;
    }
    return x;
}

// Smallest x in [lo, hi] (to tolerance) where the monotone predicate turns true.
// Assumes pred(lo) is false and pred(hi) is true.
template <class P>
double bisect_predicate(P&& pred, double lo, double hi, double xtol, int max_iter = 200)
{
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace cwpotts::roots
