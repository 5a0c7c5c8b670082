#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tvflow/facets.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/profile.hpp"
#include "tvflow/resolvent.hpp"

namespace tvflow {

/// Random continuous piecewise quadratics on [0, ell].
struct RandomProfileOptions {
    double min_length = 1.0;
    double max_length = 4.0;
    int min_pieces = 2;
    int max_pieces = 5;
    double max_curvature = 3.0;
    double max_slope = 2.0;
};

inline PiecewiseProfile random_profile(std::mt19937_64& rng, const RandomProfileOptions& opt = {}) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    const double ell = uniform(opt.min_length, opt.max_length);
    const int k = opt.min_pieces + static_cast<int>(rng() % static_cast<std::uint64_t>(opt.max_pieces - opt.min_pieces + 1));
    std::vector<double> xs{0.0, ell};
    for (int j = 1; j < k; ++j) xs.push_back(uniform(0.05, 0.95) * ell);
    std::sort(xs.begin(), xs.end());
    std::vector<Piece> pieces;
    double y = uniform(-1.0, 1.0);
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
        const double x0 = xs[j];
        const double c1 = uniform(-opt.max_slope, opt.max_slope);
        const double c2 = uniform(-opt.max_curvature, opt.max_curvature);
        // y + c1 (x - x0) + c2 (x - x0)^2 in global coordinates.
        Polynomial p{y - c1 * x0 + c2 * x0 * x0, c1 - 2.0 * c2 * x0, c2};
        y = p(xs[j + 1]);
        pieces.push_back({x0, xs[j + 1], std::move(p)});
    }
    return PiecewiseProfile::from_pieces(std::move(pieces));
}

/// Random continuous piecewise quadratic on [a, b] vanishing at both ends,
/// with amplitude about `eps`.
inline PiecewiseProfile random_perturbation(std::mt19937_64& rng, double a, double b, double eps) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    const int cells = 1 + static_cast<int>(rng() % 4);
    std::vector<double> xs{a, b};
    for (int j = 1; j < cells; ++j) xs.push_back(a + uniform(0.05, 0.95) * (b - a));
    std::sort(xs.begin(), xs.end());
    std::vector<double> ys(xs.size(), 0.0);
    for (std::size_t j = 1; j + 1 < ys.size(); ++j) ys[j] = eps * uniform(-1.0, 1.0);
    std::vector<Piece> pieces;
    for (std::size_t j = 0; j + 1 < xs.size(); ++j) {
        const double x0 = xs[j];
        const double x1 = xs[j + 1];
        const double len = x1 - x0;
        const double slope = (ys[j + 1] - ys[j]) / len;
        const double bubble = eps * uniform(-4.0, 4.0) / (len * len);
        // ys[j] + slope (x - x0) + bubble (x - x0)(x1 - x)
        Polynomial line{ys[j] - slope * x0, slope};
        Polynomial cap{-x0 * x1, x0 + x1, -1.0};
        pieces.push_back({x0, x1, line + cap * bubble});
    }
    return PiecewiseProfile::from_pieces(std::move(pieces), 0.0, 0.0);
}

inline std::vector<PiecewiseProfile> random_profiles(std::size_t count, std::uint64_t seed,
                                                     const RandomProfileOptions& opt = {}) {
    std::mt19937_64 rng(seed);
    std::vector<PiecewiseProfile> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(random_profile(rng, opt));
    return out;
}

struct PropertyResult {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    double worst = 0.0;  // largest violation measure seen
    double tol = 0.0;
    bool skipped() const { return checks == 0; }
    bool passed() const { return failures == 0; }

    void record(double violation, double tolerance) {
        ++checks;
        tol = tolerance;
        worst = std::max(worst, violation);
        if (!(violation <= tolerance)) ++failures;
    }
};

struct ValidationReport {
    std::vector<PropertyResult> properties;
    bool all_passed() const {
        return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.passed(); });
    }
};

struct ValidationOptions {
    std::size_t perturbations = 50;  // minimizer optimality probes per profile
    std::size_t snapshots = 12;      // interior snapshot times per trajectory
};

namespace detail {

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

inline double pick_step(std::mt19937_64& rng, const Trajectory& tr) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double horizon = tr.t_ext && *tr.t_ext > 0.0 ? *tr.t_ext : 1.0;
    return horizon * (0.01 + 1.2 * unit(rng));
}

}  // namespace detail

/// Runs the invariant suites over the given profiles.
inline ValidationReport validate_profiles(const std::vector<PiecewiseProfile>& profiles, std::uint64_t seed,
                                          const ValidationOptions& opt = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PropertyResult semigroup{"semigroup splitting"};
    PropertyResult contraction{"L2 contraction"};
    PropertyResult decay{"derivative norm decay"};
    PropertyResult mass{"mass rate"};
    PropertyResult kess{"K_ess nonincreasing"};
    PropertyResult bv{"BV of u_x nonincreasing"};
    PropertyResult residual{"mild residual"};
    PropertyResult optimality{"minimizer optimality"};
    PropertyResult opening{"instant opening"};
    PropertyResult consistency{"flow equals resolvent"};
    PropertyResult supbound{"sup-norm bound"};
    PropertyResult events{"event count <= K_ess(u0)"};

    for (const PiecewiseProfile& w : profiles) {
        const double scale = w.scale();
        const FacetDecomposition d0 = detect_facets(w);
        const Trajectory tr0 = evolve(w, std::nullopt);
        const double t_ext = tr0.t_ext.value_or(0.0);
        if (d0.k_ess > 0) events.record(static_cast<double>(tr0.events.size()) - d0.k_ess, 0.0);

        // Resolvent properties.
        if (d0.k_ess > 0) {
            const double h = detail::pick_step(rng, tr0);
            const auto res = resolve(w, h);
            residual.record(mild_residual(res.u, w, h), 1e-10);
            for (int p : {1, 2, 0})
                decay.record(derivative_norm(res.u, p) - derivative_norm(w, p), 1e-10 * scale);
            decay.record(bv_seminorm_derivative(res.u) - bv_seminorm_derivative(w), 1e-9 * scale);

            const double base = rof_energy(res.u, w, h);
            for (std::size_t k = 0; k < opt.perturbations; ++k) {
                const double eps = std::pow(10.0, -3.0 + 3.0 * unit(rng)) * scale;
                const auto phi = random_perturbation(rng, w.a(), w.b(), eps);
                const auto probe = combine(res.u, 1.0, phi, 1.0);
                optimality.record(base - rof_energy(probe, w, h), 1e-10 * scale);
            }

            // Split the step, preferably across the first event.
            double h1 = detail::pick_step(rng, tr0);
            double h2 = detail::pick_step(rng, tr0);
            if (!tr0.events.empty() && unit(rng) < 0.7) {
                const double t1 = tr0.events.front().time;
                h1 = t1 * (0.2 + 0.79 * unit(rng));
                h2 = t1 * (0.05 + 1.5 * unit(rng));
            }
            const auto whole = resolve(w, h1 + h2).u;
            const auto split = resolve(resolve(w, h1).u, h2).u;
            semigroup.record(sup_distance(whole, split), 1e-8 * scale);

            const auto wbar = combine(w, 1.0, random_perturbation(rng, w.a(), w.b(), 0.3 * scale * unit(rng)), 1.0);
            const double dist_in = l2_distance(w, wbar);
            const double dist_out = l2_distance(resolve(w, h).u, resolve(wbar, h).u);
            contraction.record(dist_out - dist_in, 1e-9);
        }

        // Trajectory properties.
        if (d0.k_ess == 0) continue;
        std::vector<double> times;
        for (std::size_t k = 1; k <= opt.snapshots; ++k)
            times.push_back(t_ext * static_cast<double>(k) / static_cast<double>(opt.snapshots + 1));
        // Two probes inside every inter-event interval for the mass rate.
        std::vector<std::pair<double, double>> windows;
        double prev = 0.0;
        for (const Event& e : tr0.events) {
            if (e.time - prev > 1e-6 * std::max(1.0, t_ext)) {
                const double t1 = prev + 0.25 * (e.time - prev);
                const double t2 = prev + 0.75 * (e.time - prev);
                windows.push_back({t1, t2});
                times.push_back(t1);
                times.push_back(t2);
            }
            prev = e.time;
        }
        const Trajectory tr = evolve(w, std::nullopt, times);
        const double sup0 = std::max({std::abs(w.min_value()), std::abs(w.max_value()), std::abs(w.left_value()),
                                      std::abs(w.right_value())});
        const bool degenerate0 = d0.l_min <= 0.0;
        int prev_k = d0.k_ess;
        double prev_bv = bv_seminorm_derivative(w);
        for (const Snapshot& s : tr.snapshots) {
            const FacetDecomposition d = detect_facets(s.u);
            kess.record(static_cast<double>(d.k_ess - prev_k), 0.0);
            prev_k = d.k_ess;
            const double bvs = bv_seminorm_derivative(s.u);
            bv.record(bvs - prev_bv, 1e-9 * scale);
            prev_bv = bvs;
            supbound.record(std::max(std::abs(s.u.min_value()), std::abs(s.u.max_value())) - sup0, 1e-12 * scale);
            if (s.t > 0.0) {
                if (degenerate0) opening.record(d.k_ess > 0 && d.l_min <= 0.0 ? 1.0 : 0.0, 0.0);
                consistency.record(sup_distance(s.u, resolve(w, s.t).u), 1e-9 * scale);
            }
        }
        for (const auto& [t1, t2] : windows) {
            auto at = [&](double t) -> const Snapshot& {
                return *std::min_element(tr.snapshots.begin(), tr.snapshots.end(), [&](const Snapshot& a, const Snapshot& b) {
                    return std::abs(a.t - t) < std::abs(b.t - t);
                });
            };
            const Snapshot& s1 = at(t1);
            const Snapshot& s2 = at(t2);
            const FacetDecomposition d = detect_facets(s1.u);
            const double expected = 2.0 * (d.count(FacetKind::ConvexEssential) - d.count(FacetKind::ConcaveEssential));
            const double m1 = integrate(s1.u, s1.u.a(), s1.u.b());
            const double m2 = integrate(s2.u, s2.u.a(), s2.u.b());
            mass.record(std::abs((m2 - m1) / (s2.t - s1.t) - expected), 1e-8 * scale);
        }
    }
    return {{mass, bv, kess, residual, contraction, optimality, semigroup, decay, opening, consistency, supbound, events}};
}

}  // namespace tvflow
