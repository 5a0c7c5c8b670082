#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "tvflow/error.hpp"
#include "tvflow/profile.hpp"

namespace tvflow {

enum class FacetKind { ConvexEssential, ConcaveEssential, ZeroCurvature, BoundaryPinned };

inline const char* to_string(FacetKind k) {
    switch (k) {
        case FacetKind::ConvexEssential: return "ConvexEssential";
        case FacetKind::ConcaveEssential: return "ConcaveEssential";
        case FacetKind::ZeroCurvature: return "ZeroCurvature";
        case FacetKind::BoundaryPinned: return "BoundaryPinned";
    }
    return "?";
}

inline int transition_of(FacetKind k) {
    if (k == FacetKind::ConvexEssential) return 1;
    if (k == FacetKind::ConcaveEssential) return -1;
    return 0;
}

/// A maximal flat portion of the graph, or a strict local extremum
/// (degenerate facet, xi_minus == xi_plus).
struct Facet {
    double xi_minus;
    double xi_plus;
    double level;
    FacetKind kind;
    int transition;
    bool degenerate;

    bool essential() const { return transition != 0; }
    double width() const { return xi_plus - xi_minus; }
};

struct FacetDecomposition {
    std::vector<Facet> facets;
    std::vector<MonotoneArc> arcs;
    double a = 0.0;
    double b = 0.0;
    int k_ess = 0;
    double l_min = std::numeric_limits<double>::infinity();
    double bv_seminorm_ux = 0.0;

    std::vector<Facet> essential() const {
        std::vector<Facet> out;
        for (const Facet& f : facets)
            if (f.essential()) out.push_back(f);
        return out;
    }
    int count(FacetKind kind) const {
        int n = 0;
        for (const Facet& f : facets) n += f.kind == kind ? 1 : 0;
        return n;
    }
    double essential_width() const {
        double w = 0.0;
        for (const Facet& f : facets)
            if (f.essential()) w += f.width();
        return w;
    }
};

struct FacetOptions {
    std::size_t max_arcs = 1'000'000;
};

inline FacetDecomposition detect_facets(const PiecewiseProfile& p, FacetOptions opt = {}) {
    FacetDecomposition d;
    d.a = p.a();
    d.b = p.b();
    d.arcs = monotone_arcs(p);
    if (d.arcs.size() > opt.max_arcs)
        throw Error(ErrorCode::NotJRegular, "monotone arc count exceeds the configured cap");
    const auto& arcs = d.arcs;
    const std::size_t m = arcs.size();
    for (std::size_t k = 0; k < m; ++k) {
        const MonotoneArc& arc = arcs[k];
        if (arc.dir == Direction::Flat) {
            FacetKind kind = FacetKind::ZeroCurvature;
            if (k == 0 || k + 1 == m) {
                kind = FacetKind::BoundaryPinned;
            } else if (arcs[k - 1].dir == Direction::Decreasing && arcs[k + 1].dir == Direction::Increasing) {
                kind = FacetKind::ConvexEssential;
            } else if (arcs[k - 1].dir == Direction::Increasing && arcs[k + 1].dir == Direction::Decreasing) {
                kind = FacetKind::ConcaveEssential;
            }
            const double level = p(0.5 * (arc.x0 + arc.x1));
            d.facets.push_back({arc.x0, arc.x1, level, kind, transition_of(kind), false});
        } else if (k + 1 < m && arcs[k + 1].dir != Direction::Flat) {
            // Direct switch between opposite directions: strict local extremum.
            const double x = arc.x1;
            const FacetKind kind = arc.dir == Direction::Decreasing ? FacetKind::ConvexEssential
                                                                    : FacetKind::ConcaveEssential;
            d.facets.push_back({x, x, p(x), kind, transition_of(kind), true});
        }
    }
    for (const Facet& f : d.facets) {
        if (!f.essential()) continue;
        ++d.k_ess;
        d.l_min = std::min(d.l_min, f.width());
    }
    d.bv_seminorm_ux = bv_seminorm_derivative(p);
    return d;
}

/// Pointwise value of the composition sgn o u_x: +-1 on monotone stretches,
/// a linear ramp across every essential facet preimage.
inline double sgn_bar_compose(const FacetDecomposition& d, double x) {
    const double tol = Tolerances::abscissa * std::max({1.0, std::abs(d.a), std::abs(d.b)});
    if (x < d.a - tol || x > d.b + tol) throw Error(ErrorCode::OutOfDomain, "sgn_bar_compose outside domain");
    if (d.k_ess > 0 && d.l_min <= 0.0)
        throw Error(ErrorCode::DegenerateFacet, "composition undefined with a degenerate essential facet");
    for (const Facet& f : d.facets) {
        if (!f.essential() || x < f.xi_minus || x > f.xi_plus) continue;
        const double ramp = 2.0 * (x - f.xi_minus) / f.width() - 1.0;
        return f.transition > 0 ? ramp : -ramp;
    }
    // Direction of the nearest non-flat arc; zero-curvature flats sit inside a
    // monotone stretch and pinned flats inherit from their only neighbour.
    std::size_t k = 0;
    while (k + 1 < d.arcs.size() && d.arcs[k].x1 < x) ++k;
    for (std::size_t r = 0; r < d.arcs.size(); ++r) {
        for (std::size_t idx : {k + r, k - r}) {
            if (idx >= d.arcs.size()) continue;
            if (d.arcs[idx].dir == Direction::Increasing) return 1.0;
            if (d.arcs[idx].dir == Direction::Decreasing) return -1.0;
        }
    }
    return 1.0;  // constant profile
}

/// Slope of the ramp on an essential facet, kappa * 2 / width: the facet's
/// vertical velocity.
inline double d_sgn_bar(const FacetDecomposition&, const Facet& facet) {
    if (!facet.essential()) return 0.0;
    if (facet.width() <= 0.0) throw Error(ErrorCode::DegenerateFacet, "degenerate essential facet has no finite velocity");
    return facet.transition * 2.0 / facet.width();
}

}  // namespace tvflow
