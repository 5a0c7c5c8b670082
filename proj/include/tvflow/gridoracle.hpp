#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "tvflow/error.hpp"
#include "tvflow/grid.hpp"

namespace tvflow {

// Discrete problem shared by both solvers: with mu = h / dx and the end
// values pinned, minimize
//   sum_{interior j} 1/2 (u_j - v_j)^2 + mu * sum_j |u_{j+1} - u_j|
// (the ROF objective divided by dx).

namespace detail {

inline double discrete_objective(const std::vector<double>& u, const std::vector<double>& v, double mu) {
    double acc = 0.0;
    for (std::size_t j = 1; j + 1 < u.size(); ++j) acc += 0.5 * (u[j] - v[j]) * (u[j] - v[j]);
    for (std::size_t j = 0; j + 1 < u.size(); ++j) acc += mu * std::abs(u[j + 1] - u[j]);
    return acc;
}

/// Duality gap for the pinned problem, in the cancellation-free form
///   sum 1/2 (u_j - v_j - mu (p_j - p_{j-1}))^2 + mu sum (|d_j| - p_j d_j)
/// with the dual edge variables p recovered from u and clipped to [-1, 1].
inline double duality_gap(const std::vector<double>& u, const std::vector<double>& v, double mu) {
    const std::size_t n = u.size();
    const std::size_t edges = n - 1;
    std::vector<double> c(edges, 0.0);  // p_j = p_0 + c_j
    for (std::size_t j = 1; j < edges; ++j) c[j] = c[j - 1] + (u[j] - v[j]) / mu;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < edges; ++j) {
        const double d = u[j + 1] - u[j];
        const double slo = d > 0.0 ? 1.0 : -1.0;
        const double shi = d < 0.0 ? -1.0 : 1.0;
        lo = std::max(lo, slo - c[j]);
        hi = std::min(hi, shi - c[j]);
    }
    const double p0 = 0.5 * (lo + hi);
    double gap = 0.0;
    std::vector<double> p(edges);
    for (std::size_t j = 0; j < edges; ++j) p[j] = std::clamp(p0 + c[j], -1.0, 1.0);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double r = u[j] - v[j] - mu * (p[j] - p[j - 1]);
        gap += 0.5 * r * r;
    }
    for (std::size_t j = 0; j < edges; ++j) {
        const double d = u[j + 1] - u[j];
        gap += mu * (std::abs(d) - p[j] * d);
    }
    return gap;
}

// Derivative of a convex message, piecewise linear with possible upward
// jumps: value a*x + b on [x, next.x).
struct DerivSegment {
    double x;
    double a;
    double b;
};

/// Smallest x where the nondecreasing piecewise function reaches `target`.
inline double first_reach(const std::vector<DerivSegment>& segs, double target) {
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const DerivSegment& s = segs[k];
        const double end = k + 1 < segs.size() ? segs[k + 1].x : std::numeric_limits<double>::infinity();
        const double at_start = std::isinf(s.x) ? (s.a > 0.0 ? -std::numeric_limits<double>::infinity() : s.b)
                                                : s.a * s.x + s.b;
        if (at_start >= target) return s.x;
        if (s.a > 0.0) {
            const double x = (target - s.b) / s.a;
            if (x < end) return std::max(x, s.x);
        } else if (s.b >= target) {
            return s.x;
        }
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace detail

struct ProxOptions {
    double gap_tol = 1e-12;  // relative to the value scale
};

/// Exact minimizer of the pinned discrete ROF problem by dynamic programming
/// on message derivatives, certified by the duality gap.
inline GridFunction discrete_tv_prox(const GridFunction& v, double h, ProxOptions opt = {}) {
    const std::size_t n = v.size();
    if (n < 3) throw Error(ErrorCode::Precondition, "discrete prox needs n >= 3");
    if (!(h > 0.0) || !(v.dx > 0.0)) throw Error(ErrorCode::Precondition, "h and dx must be positive");
    const double mu = h / v.dx;
    const auto& val = v.values;
    const double left = val.front();
    const double right = val.back();
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Message derivative of mu |x - left| before the first interior node.
    std::vector<detail::DerivSegment> segs{{-inf, 0.0, -mu}, {left, 0.0, mu}};
    std::vector<double> lo(n, 0.0);
    std::vector<double> hi(n, 0.0);
    std::vector<detail::DerivSegment> next;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        for (auto& s : segs) {
            s.a += 1.0;
            s.b -= val[j];
        }
        lo[j] = detail::first_reach(segs, -mu);
        hi[j] = detail::first_reach(segs, mu);
        next.clear();
        next.push_back({-inf, 0.0, -mu});
        for (std::size_t k = 0; k < segs.size(); ++k) {
            const double end = k + 1 < segs.size() ? segs[k + 1].x : inf;
            if (end <= lo[j] || segs[k].x >= hi[j]) continue;
            next.push_back({std::max(segs[k].x, lo[j]), segs[k].a, segs[k].b});
        }
        next.push_back({hi[j], 0.0, mu});
        // A segment starting where the clamp starts is shadowed by it.
        std::vector<detail::DerivSegment> clean;
        for (const auto& s : next) {
            if (!clean.empty() && clean.back().x == s.x) clean.back() = s;
            else clean.push_back(s);
        }
        segs.swap(clean);
    }
    GridFunction u = v;
    u.values.back() = right;
    for (std::size_t j = n - 1; j-- > 1;) u.values[j] = std::clamp(u.values[j + 1], lo[j], hi[j]);
    u.values.front() = left;

    double scale = 1.0;
    for (double x : val) scale = std::max(scale, std::abs(x));
    const double gap = detail::duality_gap(u.values, val, mu) * v.dx;
    if (!(gap <= opt.gap_tol * scale * std::max(1.0, v.dx * static_cast<double>(n)))) {
        throw Error(ErrorCode::NotConverged, "duality gap certificate failed");
    }
    return u;
}

/// Exhaustive solver for n <= 8: every sign pattern of the n - 1 differences
/// fixes the grouping of equal neighbours; each free group then has a
/// closed-form value, and the best candidate under the true objective wins.
inline GridFunction brute_force_tv_prox(const GridFunction& v, double h) {
    const std::size_t n = v.size();
    if (n < 2 || n > 8) throw Error(ErrorCode::Precondition, "brute force supports 2 <= n <= 8");
    if (!(h > 0.0) || !(v.dx > 0.0)) throw Error(ErrorCode::Precondition, "h and dx must be positive");
    const double mu = h / v.dx;
    const auto& val = v.values;
    const std::size_t edges = n - 1;
    std::size_t patterns = 1;
    for (std::size_t k = 0; k < edges; ++k) patterns *= 3;
    std::vector<double> best = val;
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<int> sgn(edges);
    std::vector<double> cand(n);
    for (std::size_t code = 0; code < patterns; ++code) {
        std::size_t c = code;
        for (std::size_t k = 0; k < edges; ++k) {
            sgn[k] = static_cast<int>(c % 3) - 1;
            c /= 3;
        }
        std::size_t start = 0;
        while (start < n) {
            std::size_t end = start;
            while (end < edges && sgn[end] == 0) ++end;
            // Group [start, end].
            double value = 0.0;
            if (start == 0) {
                value = val.front();
            } else if (end == n - 1) {
                value = val.back();
            } else {
                double mean = 0.0;
                for (std::size_t k = start; k <= end; ++k) mean += val[k];
                const double size = static_cast<double>(end - start + 1);
                mean /= size;
                // Linear coefficient of the group value in mu * sum s_j (u_{j+1} - u_j).
                const double lin = mu * (static_cast<double>(sgn[start - 1]) - static_cast<double>(sgn[end]));
                value = mean - lin / size;
            }
            for (std::size_t k = start; k <= end; ++k) cand[k] = value;
            start = end + 1;
        }
        if (std::abs(cand.front() - val.front()) > 0.0 || std::abs(cand.back() - val.back()) > 0.0) continue;
        const double obj = detail::discrete_objective(cand, val, mu);
        if (obj < best_obj) {
            best_obj = obj;
            best = cand;
        }
    }
    GridFunction u = v;
    u.values = best;
    return u;
}

}  // namespace tvflow
