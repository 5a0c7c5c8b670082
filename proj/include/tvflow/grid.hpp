#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "tvflow/error.hpp"
#include "tvflow/profile.hpp"

namespace tvflow {

/// Uniformly sampled signal: values[j] lives at x0 + j*dx.
struct GridFunction {
    double x0 = 0.0;
    double dx = 1.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double x(std::size_t j) const { return x0 + static_cast<double>(j) * dx; }
};

/// n uniform samples including both endpoints.
inline GridFunction grid_sample(const PiecewiseProfile& p, std::size_t n) {
    if (n < 2) throw Error(ErrorCode::Precondition, "grid needs at least two samples");
    GridFunction g;
    g.x0 = p.a();
    g.dx = (p.b() - p.a()) / static_cast<double>(n - 1);
    g.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = (j + 1 == n) ? p.b() : g.x(j);
        g.values[j] = p(x);
    }
    return g;
}

struct GridNorms {
    double l1;
    double l2;
    double sup;
    double tv;
};

inline GridNorms norms(const GridFunction& u) {
    GridNorms r{0.0, 0.0, 0.0, 0.0};
    const std::size_t n = u.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double v = u.values[j];
        const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
        r.l1 += w * std::abs(v);
        r.l2 += w * v * v;
        r.sup = std::max(r.sup, std::abs(v));
        if (j + 1 < n) r.tv += std::abs(u.values[j + 1] - v);
    }
    if (n < 2) {
        r.l1 = r.l2 = 0.0;
    }
    r.l1 *= u.dx;
    r.l2 = std::sqrt(r.l2 * u.dx);
    return r;
}

inline double grid_sup_distance(const GridFunction& a, const GridFunction& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::Precondition, "grid sizes differ");
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a.values[j] - b.values[j]));
    return m;
}

inline double grid_l2_distance(const GridFunction& a, const GridFunction& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::Precondition, "grid sizes differ");
    GridFunction d = a;
    for (std::size_t j = 0; j < a.size(); ++j) d.values[j] -= b.values[j];
    return norms(d).l2;
}

}  // namespace tvflow
