#pragma once

#include "optomech/core.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

namespace optomech::quad {

struct Result {
    double value = 0;
    double error = 0;
};

/// Globally adaptive Gauss-Kronrod (15/31 point) over the consecutive
/// intervals of a sorted breakpoint list: the interval with the largest error
/// is bisected until the summed error meets the relative tolerance. Throws
/// NumericalError naming `op` otherwise.
///
/// Boost's own recursion is not used: its per-interval error estimate is not
/// rescaled by the interval length, which makes narrow resonances look
/// unconverged.
template <class F>
Result integrate(F&& f, std::span<const double> points, double rel_tol, const std::string& op,
                 std::size_t max_intervals = 20000) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    struct Piece {
        double a, b, value, error, l1;
        bool operator<(const Piece& o) const { return error < o.error; }
    };
    auto eval = [&](double a, double b) {
        double err = 0, l1 = 0;
        const double v = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
        return Piece{a, b, v, err * 0.5 * (b - a), l1};
    };
    std::priority_queue<Piece> heap;
    double value = 0, error = 0, l1 = 0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!(points[i + 1] > points[i])) continue;
        const Piece p = eval(points[i], points[i + 1]);
        value += p.value;
        error += p.error;
        l1 += p.l1;
        heap.push(p);
    }
    // Cancellation-limited integrands are judged against their L1 norm.
    auto target = [&] { return rel_tol * std::max(std::abs(value), 1e-8 * l1) + std::numeric_limits<double>::min(); };
    const std::size_t cap = std::max(max_intervals, 4 * points.size());
    while (!heap.empty() && error > target() && heap.size() < cap) {
        const Piece p = heap.top();
        const double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) break;
        heap.pop();
        const Piece left = eval(p.a, mid), right = eval(mid, p.b);
        value += left.value + right.value - p.value;
        error += left.error + right.error - p.error;
        l1 += left.l1 + right.l1 - p.l1;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed accumulated rounding from the running updates.
    Result r;
    for (; !heap.empty(); heap.pop()) {
        r.value += heap.top().value;
        r.error += heap.top().error;
    }
    if (!(r.error <= 10.0 * target())) {
        const double scale = std::max(std::abs(r.value), 1e-8 * l1);
        throw NumericalError(op, rel_tol, scale > 0 ? r.error / scale : r.error);
    }
    return r;
}

template <class F>
Result integrate(F&& f, double a, double b, double rel_tol, const std::string& op) {
    const double pts[2] = {a, b};
    return integrate(std::forward<F>(f), std::span<const double>(pts), rel_tol, op);
}

/// Breakpoints on [lo, hi] that resolve a peak of the given width at `center`
/// plus a geometric ladder for long tails.
inline std::vector<double> peak_breakpoints(double center, double width, double lo, double hi) {
    std::vector<double> pts{lo, hi};
    for (double k : {0.25, 1.0, 4.0, 16.0, 64.0, 256.0, 1024.0}) {
        pts.push_back(center - k * width);
        pts.push_back(center + k * width);
    }
    pts.push_back(center);
    for (double x = 1.0; x < hi; x *= 4.0) pts.push_back(x);
    for (double x = 0.25; x > lo && x > 1e-6; x /= 4.0) pts.push_back(x);
    std::vector<double> out;
    for (double x : pts) {
        if (x >= lo && x <= hi) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace optomech::quad
