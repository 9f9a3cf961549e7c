#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "mpclt/common.hpp"

namespace mpclt {

/// Tolerances shared by the limit integrals. rel_tol applies to single
/// integrals, rel_tol_double to the inner/outer passes of double integrals.
/// diagonal_exclusion is the half-width around the covariance log singularity
/// below which anchored panels are not refined further.
struct QuadConfig {
    double rel_tol = 1e-9;
    double rel_tol_double = 1e-7;
    double abs_tol = 1e-12;  // floor for integrals whose true value is ~0
    int max_subdivisions = 2000;
    double diagonal_exclusion = 1e-12;
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gauss_kronrod_15(F&& f, double lo, double hi, double& value, double& error) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(mid);
    double result_g = kWg[3] * fc;
    double result_k = kWgk[7] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double fsum = f(mid - dx) + f(mid + dx);
        result_k += kWgk[j] * fsum;
        if (j % 2 == 1) result_g += kWg[j / 2] * fsum;
    }
    value = result_k * half;
    error = std::fabs((result_k - result_g) * half);
}

struct Panel {
    double error;
    double lo, hi, value;
    long seq;
    bool operator<(const Panel& o) const {
        if (error != o.error) return error < o.error;
        return seq > o.seq;
    }
};

// Heap-driven bisection. Panels with an endpoint at `anchor` are never split
// below min_width; their residual error is kept in a separate frozen pool.
template <class F>
QuadResult adapt(F&& f, const std::vector<double>& breakpoints, double anchor, double min_width,
                 double rel_tol, double abs_tol, int max_subdivisions) {
    std::priority_queue<Panel> heap;
    long seq = 0;
    double total = 0.0, active_err = 0.0, frozen_err = 0.0;
    auto push = [&](double lo, double hi) {
        double v, e;
        gauss_kronrod_15(f, lo, hi, v, e);
        total += v;
        const bool frozen = (lo == anchor || hi == anchor) && (hi - lo) <= min_width;
        if (frozen)
            frozen_err += e;
        else {
            active_err += e;
            heap.push(Panel{e, lo, hi, v, seq++});
        }
    };
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (breakpoints[i + 1] > breakpoints[i]) push(breakpoints[i], breakpoints[i + 1]);

    int subdivisions = 0;
    while (active_err + frozen_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
        const double achieved = active_err + frozen_err;
        if (subdivisions >= max_subdivisions)
            throw QuadratureError("adaptive quadrature hit the subdivision limit", achieved);
        if (heap.empty())
            throw QuadratureError("adaptive quadrature stalled at the anchored floor", achieved);
        const Panel p = heap.top();
        heap.pop();
        total -= p.value;
        active_err -= p.error;
        const double mid = 0.5 * (p.lo + p.hi);
        push(p.lo, mid);
        push(mid, p.hi);
        ++subdivisions;
    }
    return {total, active_err + frozen_err, subdivisions};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod 15(7) integration of f over [lo, hi].
template <class F>
QuadResult integrate(F&& f, double lo, double hi, double rel_tol = 1e-9, double abs_tol = 0.0,
                     int max_subdivisions = 2000) {
    if (!(lo <= hi)) throw DomainError("integrate: requires lo <= hi");
    if (lo == hi) return {0.0, 0.0, 0};
    return detail::adapt(f, {lo, hi}, std::numeric_limits<double>::quiet_NaN(), 0.0, rel_tol,
                         abs_tol, max_subdivisions);
}

/// Adaptive integration with the subdivision anchored at an interior singular
/// point: the anchor is a breakpoint of the initial mesh, and panels touching
/// it are refined toward it but never below min_width, so integrand
/// evaluations keep a guaranteed distance from the singularity.
template <class F>
QuadResult integrate_anchored(F&& f, double lo, double hi, double anchor, double min_width,
                              double rel_tol = 1e-9, double abs_tol = 0.0,
                              int max_subdivisions = 2000) {
    if (!(lo <= hi)) throw DomainError("integrate_anchored: requires lo <= hi");
    if (lo == hi) return {0.0, 0.0, 0};
    std::vector<double> pts = {lo, hi};
    if (anchor > lo && anchor < hi) pts = {lo, anchor, hi};
    return detail::adapt(f, pts, anchor, min_width, rel_tol, abs_tol, max_subdivisions);
}

}  // namespace mpclt
