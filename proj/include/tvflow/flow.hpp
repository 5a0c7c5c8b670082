#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tvflow/error.hpp"
#include "tvflow/facets.hpp"
#include "tvflow/profile.hpp"
#include "tvflow/resolvent.hpp"

namespace tvflow {

/// The flow between two events: u(t) is the implicit step of size t - t_base
/// applied to `base`, which is exact until the next event.
struct FlowState {
    double t = 0.0;
    double t_base = 0.0;
    PiecewiseProfile base;
    FacetDecomposition facets;  // of base
    PiecewiseProfile u;         // u(t)

    /// Swept area of every essential facet since t_base.
    std::vector<double> clocks() const {
        return std::vector<double>(static_cast<std::size_t>(facets.k_ess), 2.0 * (t - t_base));
    }
};

inline FlowState initial_state(const PiecewiseProfile& u0) {
    return FlowState{0.0, 0.0, u0, detect_facets(u0), u0};
}

enum class EventKind { Merge, BoundaryHit, Extinction };

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Merge: return "Merge";
        case EventKind::BoundaryHit: return "BoundaryHit";
        case EventKind::Extinction: return "Extinction";
    }
    return "?";
}

enum class Side { None, Left, Right, Both };

inline const char* to_string(Side s) {
    switch (s) {
        case Side::None: return "none";
        case Side::Left: return "left";
        case Side::Right: return "right";
        case Side::Both: return "both";
    }
    return "?";
}

struct Event {
    double time;
    EventKind kind;
    std::vector<std::size_t> facets;  // indices into the base decomposition before the event
    double level;
    double x_lo;
    double x_hi;
    FacetKind resulting_kind;
    Side side;
    int parity;  // number of facets joined; kept for diagnostics only
};

struct ExtinctionBound {
    double B;
    double b_small;
    double delta_M;
    double delta_m;
    double A;
    double ell;
    int k_ess0;
    double bound;      // 2 K A / ell
    double bound_alt;  // K A ell / 2, from the facet speed 2/ell
};

inline ExtinctionBound extinction_bound(const PiecewiseProfile& u0) {
    ExtinctionBound e{};
    e.B = std::max(u0.left_value(), u0.right_value());
    e.b_small = std::min(u0.left_value(), u0.right_value());
    e.delta_M = std::max(0.0, u0.max_value() - e.B);
    e.delta_m = std::max(0.0, e.b_small - u0.min_value());
    e.A = std::max({e.delta_M, e.delta_m, e.B - e.b_small});
    e.ell = u0.b() - u0.a();
    e.k_ess0 = detect_facets(u0).k_ess;
    e.bound = 2.0 * e.k_ess0 * e.A / e.ell;
    e.bound_alt = e.k_ess0 * e.A * e.ell / 2.0;
    return e;
}

/// |integral of (y - base)| over the outermost preimage interval of y around
/// the facet: the area swept when the facet reaches y.
inline double swept_area(const PiecewiseProfile& base, const Facet& facet, double y) {
    const FacetClock c = clock_for(base, facet);
    const double tau = c.kappa() * (y - facet.level);
    if (tau < -Tolerances::level * base.scale() || tau > c.reach() + Tolerances::level * base.scale()) {
        throw Error(ErrorCode::LevelOutOfRange, "level is not reachable by the facet");
    }
    if (tau <= 0.0) return 0.0;
    return std::abs(detail::read_clock(base, c, y).area);
}

struct NextEvent {
    double time;
    InteractionGroup group;
};

inline NextEvent next_event(const FlowState& s) {
    if (s.facets.k_ess == 0) throw Error(ErrorCode::NoEssentialFacets, "no essential facets left");
    const auto clocks = facet_clocks(s.base, s.facets);
    const auto grp = first_interaction(s.base, clocks);
    if (!grp) throw Error(ErrorCode::NotConverged, "essential facets without any interaction");
    return {s.t_base + grp->h, *grp};
}

inline FlowState advance_to(const FlowState& s, double t) {
    if (t < s.t) throw Error(ErrorCode::Precondition, "cannot advance backwards in time");
    if (t == s.t) return s;
    FlowState out = s;
    out.t = t;
    if (s.facets.k_ess == 0) return out;
    const auto clocks = facet_clocks(s.base, s.facets);
    const double h = t - s.t_base;
    if (const auto grp = first_interaction(s.base, clocks)) {
        if (grp->h < h - Tolerances::level * s.base.scale())
            throw Error(ErrorCode::EventSkipped, "an event lies before the requested time");
    }
    out.u = step_profile(s.base, clocks, h, nullptr).profile;
    return out;
}

struct AppliedEvent {
    FlowState state;
    std::vector<Event> events;
};

inline AppliedEvent apply_event(const FlowState& s, const NextEvent& ev) {
    const auto clocks = facet_clocks(s.base, s.facets);
    StageStep st = step_profile(s.base, clocks, ev.time - s.t_base, &ev.group);
    FlowState out{ev.time, ev.time, st.profile, detect_facets(st.profile), st.profile};
    std::vector<Event> events;
    const double ltol = Tolerances::level * out.base.scale();
    for (const MergeRecord& m : st.merges) {
        Event e{};
        e.time = ev.time;
        for (std::size_t k = m.first; k <= m.last; ++k) e.facets.push_back(clocks[k].facet_index);
        e.level = m.level;
        e.x_lo = m.x_lo;
        e.x_hi = m.x_hi;
        e.parity = static_cast<int>(m.last - m.first + 1);
        e.side = m.hit_left && m.hit_right ? Side::Both : m.hit_left ? Side::Left : m.hit_right ? Side::Right : Side::None;
        e.kind = e.side == Side::None ? EventKind::Merge : EventKind::BoundaryHit;
        e.resulting_kind = FacetKind::ZeroCurvature;
        for (const Facet& f : out.facets.facets) {
            if (f.xi_minus <= m.x_lo + ltol && f.xi_plus >= m.x_hi - ltol && std::abs(f.level - m.level) <= ltol) {
                e.resulting_kind = f.kind;
                break;
            }
        }
        events.push_back(std::move(e));
    }
    if (out.facets.k_ess == 0 && !events.empty()) {
        Event ext = events.back();
        ext.kind = EventKind::Extinction;
        for (std::size_t k = 0; k + 1 < events.size(); ++k) {
            ext.facets.insert(ext.facets.end(), events[k].facets.begin(), events[k].facets.end());
            ext.x_lo = std::min(ext.x_lo, events[k].x_lo);
            ext.x_hi = std::max(ext.x_hi, events[k].x_hi);
            ext.parity += events[k].parity;
        }
        std::sort(ext.facets.begin(), ext.facets.end());
        events = {ext};
    }
    return {std::move(out), std::move(events)};
}

struct Snapshot {
    double t;
    PiecewiseProfile u;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    std::vector<Event> events;
    std::optional<double> t_ext;
    ExtinctionBound bound;
};

/// Runs until extinction (until = nullopt) or the given time. Snapshots are
/// taken at {0} U snapshot_times U event times U {t_ext} (and `until`).
inline Trajectory evolve(const PiecewiseProfile& u0, std::optional<double> until, std::vector<double> snapshot_times = {}) {
    if (until && !(*until >= 0.0)) throw Error(ErrorCode::Precondition, "final time must be nonnegative");
    Trajectory tr{{}, {}, std::nullopt, extinction_bound(u0)};
    std::sort(snapshot_times.begin(), snapshot_times.end());
    std::erase_if(snapshot_times, [&](double t) { return t < 0.0 || (until && t > *until); });
    if (until) snapshot_times.push_back(*until);
    const double ttol = Tolerances::level * u0.scale();
    auto push = [&](double t, const PiecewiseProfile& u) {
        if (!tr.snapshots.empty() && std::abs(tr.snapshots.back().t - t) <= ttol) {
            tr.snapshots.back().u = u;  // keep the post-event profile
            return;
        }
        tr.snapshots.push_back({t, u});
    };
    push(0.0, u0);
    std::size_t next_snap = 0;
    FlowState s = initial_state(u0);
    const int max_events = 2 * s.facets.k_ess + 4;
    for (int n = 0; n <= max_events; ++n) {
        if (s.facets.k_ess == 0) {
            tr.t_ext = s.t_base;
            break;
        }
        const NextEvent ev = next_event(s);
        const double t_stop = until ? std::min(*until, ev.time) : ev.time;
        while (next_snap < snapshot_times.size() && snapshot_times[next_snap] < ev.time - ttol &&
               snapshot_times[next_snap] <= t_stop) {
            s = advance_to(s, std::max(s.t, snapshot_times[next_snap]));
            push(snapshot_times[next_snap], s.u);
            ++next_snap;
        }
        if (until && ev.time > *until + ttol) break;
        AppliedEvent applied = apply_event(s, ev);
        s = std::move(applied.state);
        for (Event& e : applied.events) tr.events.push_back(std::move(e));
        push(ev.time, s.u);
        while (next_snap < snapshot_times.size() && snapshot_times[next_snap] <= ev.time + ttol) ++next_snap;
    }
    if (s.facets.k_ess > 0 && !until) throw Error(ErrorCode::NotConverged, "event loop did not reach extinction");
    // Past extinction the profile is stationary.
    for (; next_snap < snapshot_times.size(); ++next_snap) {
        const double t = snapshot_times[next_snap];
        if (s.facets.k_ess == 0) {
            push(t, s.u);
        } else {
            s = advance_to(s, t);
            push(t, s.u);
        }
    }
    return tr;
}

struct ParabolaState {
    double a;
    double level;
};

/// Closed-form flow of x^2 on [-1, 1]: the facet [-a, a] with a = (3t/2)^(1/3).
inline ParabolaState explicit_parabola(double t) {
    if (t < 0.0) throw Error(ErrorCode::OutOfRange, "time must be nonnegative");
    if (t > 2.0 / 3.0) throw Error(ErrorCode::OutOfRange, "the parabola is extinct after t = 2/3");
    const double a = std::cbrt(1.5 * t);
    return {a, a * a};
}

struct YosidaFlowResult {
    PiecewiseProfile u;                 // v(dt)
    std::vector<double> increments;     // sup-distance between successive iterates at t = dt
    int iterations;
};

/// Picard iteration for v' = -A_lambda v on [0, dt]:
///   v(t) = e^{-lambda t} u0 + int_0^t lambda e^{-lambda (t - s)} R(v(s)) ds,
/// with R the resolvent of step 1/lambda, on `nodes` uniform time nodes and
/// R(v(s)) interpolated linearly in s (the kernel integrals are exact).
inline YosidaFlowResult yosida_flow_step(const PiecewiseProfile& u0, double lambda, double dt, int iters, int nodes = 16) {
    if (!(lambda > 0.0)) throw Error(ErrorCode::Precondition, "lambda must be positive");
    if (!(dt > 0.0) || dt > 1.0 / (3.0 * lambda) * (1.0 + 1e-12))
        throw Error(ErrorCode::Precondition, "dt must lie in (0, 1/(3 lambda)]");
    if (iters < 1 || nodes < 1) throw Error(ErrorCode::Precondition, "iters and nodes must be positive");
    const double h = 1.0 / lambda;
    const double ds = dt / nodes;
    const std::size_t m = static_cast<std::size_t>(nodes) + 1;
    // Exact weights of the hat functions against lambda e^{-lambda (t_j - s)}.
    const double q = std::exp(-lambda * ds);
    const double x = lambda * ds;
    const double w_near = (x - 1.0 + q) / x;      // weight of the right node of a cell
    const double w_far = (1.0 - q - x * q) / x;   // weight of the left node of a cell
    std::vector<PiecewiseProfile> v(m, u0);
    YosidaFlowResult out{u0, {}, 0};
    for (int it = 0; it < iters; ++it) {
        std::vector<PiecewiseProfile> r;
        r.reserve(m);
        // kernel applied to R(v) - u0, so fixed points of R are reproduced exactly
        for (const auto& vk : v) r.push_back(combine(resolve(vk, h).u, 1.0, u0, -1.0));
        std::vector<PiecewiseProfile> next;
        next.reserve(m);
        next.push_back(u0);
        // acc_j = q * acc_{j-1} + w_far D_{j-1} + w_near D_j
        PiecewiseProfile acc = combine(u0, 0.0, u0, 0.0);
        for (std::size_t j = 1; j < m; ++j) {
            acc = combine(combine(acc, q, r[j - 1], w_far), 1.0, r[j], w_near);
            next.push_back(combine(u0, 1.0, acc, 1.0));
        }
        const double inc = sup_distance(next.back(), v.back());
        v = std::move(next);
        out.increments.push_back(inc);
        out.iterations = it + 1;
        if (inc <= 1e-8 * u0.scale() * 1e-3) break;
    }
    out.u = v.back();
    if (out.increments.back() > 1e-8 * u0.scale())
        throw Error(ErrorCode::NotConverged, "Picard iteration did not converge");
    return out;
}

}  // namespace tvflow
