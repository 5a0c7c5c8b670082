#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <variant>
#include <vector>

#include "tvflow/error.hpp"
#include "tvflow/facets.hpp"
#include "tvflow/grid.hpp"
#include "tvflow/profile.hpp"

namespace tvflow {

/// Step size of the implicit step, h = 1/lambda.
struct ResolventStep {
    double h;
    double lambda;

    static ResolventStep from_h(double h) {
        if (!(h > 0.0)) throw Error(ErrorCode::Precondition, "step size must be positive");
        return {h, 1.0 / h};
    }
    static ResolventStep from_lambda(double lambda) {
        if (!(lambda > 0.0)) throw Error(ErrorCode::Precondition, "lambda must be positive");
        return {1.0 / lambda, lambda};
    }
};

// ---------------------------------------------------------------------------
// Per-facet area clocks.
//
// An essential facet at `level` with transition kappa is flanked by two
// monotone stretches running to its essential neighbours (or to the domain
// ends). Raising the facet to level y = level + kappa*tau replaces w on
// [abar(y), bbar(y)] by y, where abar/bbar are the outermost preimages of y on
// the flanks. The swept area F(y) = integral (y - w) over that interval is
// strictly monotone in kappa*tau and dF/dy = bbar - abar; the facet reaches y
// at time (kappa*F)/2.

struct FacetClock {
    std::size_t facet_index;  // into FacetDecomposition::facets
    Facet facet;
    MonotoneArc left;   // [previous essential end or a, xi_minus]
    MonotoneArc right;  // [xi_plus, next essential start or b]
    bool left_at_boundary;
    bool right_at_boundary;
    double left_limit;   // level at the far end of the left flank
    double right_limit;  // level at the far end of the right flank

    int kappa() const { return facet.transition; }
    double reach_left() const { return kappa() * (left_limit - facet.level); }
    double reach_right() const { return kappa() * (right_limit - facet.level); }
    double reach() const { return std::max(0.0, std::min(reach_left(), reach_right())); }
    double level_at(double tau) const { return facet.level + kappa() * tau; }
    double max_level() const { return level_at(reach()); }
};

inline std::vector<FacetClock> facet_clocks(const PiecewiseProfile& w, const FacetDecomposition& d) {
    std::vector<std::size_t> ess;
    for (std::size_t k = 0; k < d.facets.size(); ++k)
        if (d.facets[k].essential()) ess.push_back(k);
    std::vector<FacetClock> clocks;
    for (std::size_t n = 0; n < ess.size(); ++n) {
        const Facet& f = d.facets[ess[n]];
        const Direction into = f.transition > 0 ? Direction::Decreasing : Direction::Increasing;
        const Direction out = f.transition > 0 ? Direction::Increasing : Direction::Decreasing;
        FacetClock c;
        c.facet_index = ess[n];
        c.facet = f;
        c.left_at_boundary = n == 0;
        c.right_at_boundary = n + 1 == ess.size();
        const double lx = c.left_at_boundary ? w.a() : d.facets[ess[n - 1]].xi_plus;
        const double rx = c.right_at_boundary ? w.b() : d.facets[ess[n + 1]].xi_minus;
        c.left = {lx, f.xi_minus, into};
        c.right = {f.xi_plus, rx, out};
        c.left_limit = c.left_at_boundary ? w.left_value() : d.facets[ess[n - 1]].level;
        c.right_limit = c.right_at_boundary ? w.right_value() : d.facets[ess[n + 1]].level;
        clocks.push_back(c);
    }
    return clocks;
}

namespace detail {

inline double clamp_level(const FacetClock& c, double y) {
    const double lo = std::min(c.facet.level, c.max_level());
    const double hi = std::max(c.facet.level, c.max_level());
    return std::clamp(y, lo, hi);
}

inline double outer_left(const PiecewiseProfile& w, const FacetClock& c, double y) {
    if (c.left.x1 <= c.left.x0) return c.left.x0;
    const double lo = std::min(w(c.left.x0), w(c.left.x1));
    const double hi = std::max(w(c.left.x0), w(c.left.x1));
    return solve_level(w, c.left, std::clamp(y, lo, hi), LevelSide::FirstFromLeft);
}

inline double outer_right(const PiecewiseProfile& w, const FacetClock& c, double y) {
    if (c.right.x1 <= c.right.x0) return c.right.x1;
    const double lo = std::min(w(c.right.x0), w(c.right.x1));
    const double hi = std::max(w(c.right.x0), w(c.right.x1));
    return solve_level(w, c.right, std::clamp(y, lo, hi), LevelSide::LastFromRight);
}

/// integral_s^e (y - w) evaluated piecewise on centred polynomials.
inline double area_under_level(const PiecewiseProfile& w, double s, double e, double y) {
    if (e <= s) return 0.0;
    double acc = 0.0;
    for (std::size_t k = w.locate(s); k < w.pieces().size(); ++k) {
        const Piece& pc = w.pieces()[k];
        if (pc.x0 >= e) break;
        const double cs = std::max(s, pc.x0);
        const double ce = std::min(e, pc.x1);
        if (ce > cs) acc += (Polynomial::constant(y) - pc.poly).integrate(cs, ce);
    }
    return acc;
}

struct ClockReading {
    double level;
    double a;
    double b;
    double area;  // signed integral of (level - w) over [a, b]
    double time() const { return 0.5 * std::abs(area); }
};

inline ClockReading read_clock(const PiecewiseProfile& w, const FacetClock& c, double y) {
    y = clamp_level(c, y);
    ClockReading r{y, outer_left(w, c, y), outer_right(w, c, y), 0.0};
    r.area = area_under_level(w, r.a, r.b, y);
    // Signed area has the sign of kappa by monotonicity; rounding at tau ~ 0
    // must not flip it.
    if (r.area * c.kappa() < 0.0) r.area = 0.0;
    return r;
}

/// Time for facet c to reach y: kappa*F(y)/2.
inline double clock_time(const PiecewiseProfile& w, const FacetClock& c, double y) {
    return read_clock(w, c, y).time();
}

}  // namespace detail

inline FacetClock clock_for(const PiecewiseProfile& w, const Facet& facet) {
    const FacetDecomposition d = detect_facets(w);
    const double tol = Tolerances::level * w.scale();
    for (const FacetClock& c : facet_clocks(w, d)) {
        if (std::abs(c.facet.xi_minus - facet.xi_minus) <= tol && std::abs(c.facet.xi_plus - facet.xi_plus) <= tol)
            return c;
    }
    throw Error(ErrorCode::Precondition, "facet is not an essential facet of the profile");
}

/// F_i(tau) = (bbar - abar)*(level + tau) - integral_{abar}^{bbar} w with the
/// outermost preimages of level + tau on the flanks.
inline double area_deficit(const PiecewiseProfile& w, const Facet& facet, double tau) {
    const FacetClock c = clock_for(w, facet);
    if (tau * c.kappa() < 0.0) throw Error(ErrorCode::Precondition, "tau must have the sign of the transition number");
    const double s = std::abs(tau);
    if (s > c.reach() + Tolerances::level * w.scale()) {
        std::ostringstream os;
        os << "|tau| = " << s << " exceeds the flank reach " << c.reach();
        throw Error(ErrorCode::LevelOutOfRange, os.str());
    }
    if (s == 0.0) return 0.0;
    return detail::read_clock(w, c, c.level_at(s)).area;
}

struct FacetStepResult {
    double a;
    double b;
    double level;
    double tau;
};

struct Blocked {
    double h_max;
};

using FacetStepOutcome = std::variant<FacetStepResult, Blocked>;

/// Solves F(tau) = 2*h*kappa on a prepared clock.
inline FacetStepOutcome facet_step(const PiecewiseProfile& w, const FacetClock& c, double h) {
    const double reach = c.reach();
    const double h_cap = detail::clock_time(w, c, c.max_level());
    if (h > h_cap) return Blocked{h_cap};
    if (h <= 0.0) return FacetStepResult{c.facet.xi_minus, c.facet.xi_plus, c.facet.level, 0.0};
    auto g = [&](double tau) { return detail::clock_time(w, c, c.level_at(tau)) - h; };
    auto dg = [&](double tau) {
        const double y = c.level_at(tau);
        return 0.5 * (detail::outer_right(w, c, y) - detail::outer_left(w, c, y));
    };
    const double tau = detail::bracketed_newton(g, dg, 0.0, reach, 0.0);
    const auto r = detail::read_clock(w, c, c.level_at(tau));
    return FacetStepResult{r.a, r.b, r.level, r.level - c.facet.level};
}

inline FacetStepOutcome facet_step(const PiecewiseProfile& w, const Facet& facet, double h) {
    return facet_step(w, clock_for(w, facet), h);
}

// ---------------------------------------------------------------------------
// Interactions: two adjacent facets reaching a common level, or an outer facet
// reaching the Dirichlet level of its boundary.

enum class InteractionKind { Meet, BoundaryLeft, BoundaryRight };

struct Interaction {
    InteractionKind kind;
    std::size_t clock;  // left clock of a Meet, or the clock hitting the boundary
    double h;
    double level;
};

struct InteractionGroup {
    double h;
    std::vector<Interaction> items;
};

namespace detail {

inline std::optional<Interaction> pair_meet(const PiecewiseProfile& w, const FacetClock& l, const FacetClock& r,
                                            std::size_t index) {
    // Parametrize by s = kappa_l * (y - level_l); H_l increases and H_r
    // decreases with s on the shared flank.
    const int kl = l.kappa();
    const double gap = kl * (r.facet.level - l.facet.level);
    if (gap < 0.0) return std::nullopt;
    const double s_lo = std::max(0.0, gap - r.reach());
    const double s_hi = std::min(l.reach(), gap);
    if (s_lo > s_hi) return std::nullopt;
    auto level = [&](double s) { return l.facet.level + kl * s; };
    auto g = [&](double s) { return clock_time(w, l, level(s)) - clock_time(w, r, level(s)); };
    const double g_lo = g(s_lo);
    const double g_hi = g(s_hi);
    if (g_lo > 0.0 || g_hi < 0.0) return std::nullopt;
    auto dg = [&](double s) {
        const double y = level(s);
        return 0.5 * (outer_right(w, l, y) - outer_left(w, l, y)) + 0.5 * (outer_right(w, r, y) - outer_left(w, r, y));
    };
    const double s = bracketed_newton(g, dg, s_lo, s_hi, 0.0);
    const double y = level(s);
    const double t = 0.5 * (clock_time(w, l, y) + clock_time(w, r, y));
    return Interaction{InteractionKind::Meet, index, t, y};
}

}  // namespace detail

/// Earliest interaction among the clocks, grouped with every other
/// interaction within Tolerances::level * scale of it.
inline std::optional<InteractionGroup> first_interaction(const PiecewiseProfile& w, const std::vector<FacetClock>& clocks) {
    std::vector<Interaction> all;
    const double ltol = Tolerances::level * w.scale();
    for (std::size_t i = 0; i < clocks.size(); ++i) {
        const FacetClock& c = clocks[i];
        if (c.left_at_boundary && c.reach_left() <= c.reach() + ltol) {
            const double y = w.left_value();
            all.push_back({InteractionKind::BoundaryLeft, i, detail::clock_time(w, c, y), y});
        }
        if (c.right_at_boundary && c.reach_right() <= c.reach() + ltol) {
            const double y = w.right_value();
            all.push_back({InteractionKind::BoundaryRight, i, detail::clock_time(w, c, y), y});
        }
        if (i + 1 < clocks.size())
            if (auto m = detail::pair_meet(w, c, clocks[i + 1], i)) all.push_back(*m);
    }
    if (all.empty()) return std::nullopt;
    const double h_min = std::min_element(all.begin(), all.end(), [](const Interaction& a, const Interaction& b) {
                             return a.h < b.h;
                         })->h;
    InteractionGroup grp{h_min, {}};
    for (const Interaction& it : all)
        if (it.h <= h_min + ltol) grp.items.push_back(it);
    return grp;
}

struct FacetStepRecord {
    std::size_t facet_index;
    double a;
    double b;
    double level;
    double tau;
};

/// One merged region produced by an interaction group: clocks first..last
/// became a single flat.
struct MergeRecord {
    std::size_t first;
    std::size_t last;
    double level;
    double x_lo;
    double x_hi;
    bool hit_left;
    bool hit_right;
};

struct StageStep {
    PiecewiseProfile profile;
    std::vector<FacetStepRecord> steps;
    std::vector<MergeRecord> merges;
};

/// Moves every essential facet of w by step h (no interaction strictly before
/// h). When `group` is given its interactions are resolved at h: met facets are
/// unified at their common level and boundary hits extend to the domain end.
inline StageStep step_profile(const PiecewiseProfile& w, const std::vector<FacetClock>& clocks, double h,
                              const InteractionGroup* group) {
    const std::size_t n = clocks.size();
    std::vector<double> level(n);
    std::vector<FacetStepRecord> steps;
    for (std::size_t i = 0; i < n; ++i) {
        const auto out = facet_step(w, clocks[i], h);
        level[i] = std::holds_alternative<FacetStepResult>(out) ? std::get<FacetStepResult>(out).level
                                                                 : clocks[i].max_level();
    }
    // Components of met clocks.
    std::vector<std::size_t> comp(n);
    std::iota(comp.begin(), comp.end(), 0);
    std::vector<bool> hit_left(n, false);
    std::vector<bool> hit_right(n, false);
    std::vector<double> meet_sum(n, 0.0);
    std::vector<int> meet_count(n, 0);
    if (group) {
        for (const Interaction& it : group->items) {
            if (it.kind == InteractionKind::Meet) {
                comp[it.clock + 1] = comp[it.clock];
            }
        }
        // comp is non-decreasing; propagate chains left to right.
        for (std::size_t i = 1; i < n; ++i)
            if (comp[i] != i) comp[i] = comp[i - 1];
        for (const Interaction& it : group->items) {
            const std::size_t root = comp[it.clock];
            if (it.kind == InteractionKind::Meet) {
                meet_sum[root] += it.level;
                meet_count[root] += 1;
            } else if (it.kind == InteractionKind::BoundaryLeft) {
                hit_left[root] = true;
            } else {
                hit_right[root] = true;
            }
        }
    }
    std::vector<Flat> flats;
    std::vector<MergeRecord> merges;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && comp[j + 1] == comp[i]) ++j;
        const std::size_t root = comp[i];
        double y = level[i];
        if (hit_left[root]) {
            y = w.left_value();
        } else if (hit_right[root]) {
            y = w.right_value();
        } else if (meet_count[root] > 0) {
            y = meet_sum[root] / meet_count[root];
        }
        const double x_lo = hit_left[root] ? w.a() : detail::outer_left(w, clocks[i], y);
        const double x_hi = hit_right[root] ? w.b() : detail::outer_right(w, clocks[j], y);
        for (std::size_t k = i; k <= j; ++k)
            steps.push_back({clocks[k].facet_index, x_lo, x_hi, y, y - clocks[k].facet.level});
        if (j > i || hit_left[root] || hit_right[root])
            merges.push_back({i, j, y, x_lo, x_hi, hit_left[root], hit_right[root]});
        if (x_hi > x_lo || hit_left[root] || hit_right[root]) {
            double s = x_lo;
            if (!flats.empty()) s = std::max(s, flats.back().x1);
            flats.push_back({s, std::max(s, x_hi), y});
        }
        i = j + 1;
    }
    if (h <= 0.0 && !group) return {w, std::move(steps), {}};
    return {with_flats(w, flats), std::move(steps), std::move(merges)};
}

// ---------------------------------------------------------------------------

struct ResolventResult {
    PiecewiseProfile u;
    std::vector<FacetStepRecord> facet_steps;  // final stage, relative to its base
    std::vector<double> splits;                // cumulative h at each internal split
};

/// Proximal map of h*TV with Dirichlet data: u minimizes
/// h * TV(u) + 1/2 ||u - w||^2. Facets move by the area clocks until the first
/// interaction; there the step is split, facets merge or pin, and the
/// remainder is applied to the merged profile.
inline ResolventResult resolve(const PiecewiseProfile& w, double h) {
    if (!(h >= 0.0) || !std::isfinite(h)) throw Error(ErrorCode::Precondition, "step size must be a finite nonnegative number");
    const double ttol = Tolerances::level * w.scale();
    ResolventResult res{w, {}, {}};
    double done = 0.0;
    const int k0 = detect_facets(w).k_ess;
    for (int iter = 0; iter <= 4 * k0 + 8; ++iter) {
        const FacetDecomposition d = detect_facets(res.u);
        const std::vector<FacetClock> clocks = facet_clocks(res.u, d);
        const double rem = h - done;
        if (clocks.empty() || rem <= 0.0) return res;
        const auto grp = first_interaction(res.u, clocks);
        if (grp && grp->h <= rem + ttol) {
            StageStep st = step_profile(res.u, clocks, grp->h, &*grp);
            res.u = std::move(st.profile);
            res.facet_steps = std::move(st.steps);
            if (grp->h >= rem - ttol) {
                // facets that merged at the final instant share one record
                const double xtol = Tolerances::abscissa * std::max({1.0, std::abs(w.a()), std::abs(w.b())});
                auto same = [&](const FacetStepRecord& p, const FacetStepRecord& q) {
                    return std::abs(p.a - q.a) <= xtol && std::abs(p.b - q.b) <= xtol;
                };
                res.facet_steps.erase(std::unique(res.facet_steps.begin(), res.facet_steps.end(), same), res.facet_steps.end());
                res.splits.push_back(h);
                return res;
            }
            done += grp->h;
            res.splits.push_back(done);
            continue;
        }
        StageStep st = step_profile(res.u, clocks, rem, nullptr);
        res.u = std::move(st.profile);
        res.facet_steps = std::move(st.steps);
        return res;
    }
    throw Error(ErrorCode::NotConverged, "interaction splitting did not terminate");
}

// ---------------------------------------------------------------------------
// Certificates and energies.

struct FluxField {
    PiecewiseProfile sigma;
    double sigma0;
};

/// sigma(x) = sigma0 + (1/h) integral_a^x (u - w). sigma0 is fixed by the
/// first non-flat arc of u, where sigma must equal the sign of u_x. For a
/// constant u it is centred in the feasible range.
inline FluxField flux_sigma(const PiecewiseProfile& u, const PiecewiseProfile& w, double h) {
    if (!(h > 0.0)) throw Error(ErrorCode::Precondition, "step size must be positive");
    PiecewiseProfile anti = antiderivative(combine(u, 1.0 / h, w, -1.0 / h));
    double sigma0 = 0.0;
    const auto arcs = monotone_arcs(u);
    const auto first = std::find_if(arcs.begin(), arcs.end(), [](const MonotoneArc& a) { return a.dir != Direction::Flat; });
    if (first != arcs.end()) {
        const double s = first->dir == Direction::Increasing ? 1.0 : -1.0;
        sigma0 = s - anti(0.5 * (first->x0 + first->x1));
    } else {
        sigma0 = -0.5 * (anti.min_value() + anti.max_value());
    }
    return {translated(anti, sigma0), sigma0};
}

namespace detail {

inline std::vector<double> dense_abscissae(const PiecewiseProfile& u, const PiecewiseProfile& w, std::size_t n) {
    std::vector<double> xs;
    for (std::size_t j = 0; j < n; ++j) xs.push_back(u.a() + (u.b() - u.a()) * static_cast<double>(j) / static_cast<double>(n - 1));
    for (const auto* p : {&u, &w})
        for (const Piece& pc : p->pieces()) {
            xs.push_back(pc.x0);
            xs.push_back(0.5 * (pc.x0 + pc.x1));
            xs.push_back(pc.x1);
        }
    std::sort(xs.begin(), xs.end());
    return xs;
}

}  // namespace detail

/// Max over a dense abscissa set of dist(sigma(x), sgn(u_x(x))) with sgn the
/// maximal monotone graph. Zero certifies the integrated inclusion.
inline double mild_residual(const PiecewiseProfile& u, const PiecewiseProfile& w, double h, std::size_t n = 4096) {
    detail::require_same_domain(u, w);
    const double tol = Tolerances::continuity * std::max(u.scale(), w.scale());
    if (std::abs(u.left_value() - w.left_value()) > tol || std::abs(u.right_value() - w.right_value()) > tol)
        throw Error(ErrorCode::Precondition, "u and w must share boundary values");
    const FluxField flux = flux_sigma(u, w, h);
    double worst = 0.0;
    for (double x : detail::dense_abscissae(u, w, std::max<std::size_t>(n, 2))) {
        const auto [lo, hi] = clarke_interval(u, x);
        const double s = flux.sigma(x);
        double dist = 0.0;
        if (lo > 0.0) dist = std::abs(s - 1.0);
        else if (hi < 0.0) dist = std::abs(s + 1.0);
        else dist = std::max(0.0, std::abs(s) - 1.0);
        worst = std::max(worst, dist);
    }
    return worst;
}

struct YosidaReport {
    GridFunction a_lambda;
    GridFunction limit;
    double l1_error;
};

/// Samples A_lambda w = lambda (w - R(lambda) w) and its limit
/// -d/dx sgn o w_x (facet velocities with reversed sign).
inline YosidaReport yosida_apply(const PiecewiseProfile& w, double lambda, std::size_t n = 4096) {
    const ResolventStep step = ResolventStep::from_lambda(lambda);
    const PiecewiseProfile u = resolve(w, step.h).u;
    const FacetDecomposition d = detect_facets(w);
    if (d.k_ess > 0 && d.l_min <= 0.0)
        throw Error(ErrorCode::DegenerateFacet, "limit operator needs L(w_x) > 0");
    GridFunction gw = grid_sample(w, n);
    GridFunction gu = grid_sample(u, n);
    YosidaReport rep{gw, gw, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
        rep.a_lambda.values[j] = lambda * (gw.values[j] - gu.values[j]);
        const double x = gw.x(j);
        double lim = 0.0;
        for (const Facet& f : d.facets)
            if (f.essential() && x >= f.xi_minus && x <= f.xi_plus) lim = -d_sgn_bar(d, f);
        rep.limit.values[j] = lim;
    }
    GridFunction diff = rep.a_lambda;
    for (std::size_t j = 0; j < n; ++j) diff.values[j] -= rep.limit.values[j];
    rep.l1_error = norms(diff).l1;
    return rep;
}

/// Total variation, the sum of arc-wise value changes.
inline double tv_energy(const PiecewiseProfile& u) { return derivative_norm(u, 1); }

/// h * TV(u) + 1/2 ||u - v||_2^2.
inline double rof_energy(const PiecewiseProfile& u, const PiecewiseProfile& v, double h) {
    const double d = l2_distance(u, v);
    return h * tv_energy(u) + 0.5 * d * d;
}

}  // namespace tvflow
