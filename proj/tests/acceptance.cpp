// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tvflow/tvflow.hpp"

using namespace tvflow;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

PiecewiseProfile scenario(const std::string& name) {
    return load_scenario(read_file(std::string(TVFLOW_SCENARIO_DIR) + "/" + name + ".json"));
}

PiecewiseProfile parabola() { return PiecewiseProfile::single(-1.0, 1.0, Polynomial{0.0, 0.0, 1.0}); }

PiecewiseProfile w_profile() {
    return PiecewiseProfile::from_pieces({{-1.0, 0.0, Polynomial{0.25, 1.0, 1.0}}, {0.0, 1.0, Polynomial{0.25, -1.0, 1.0}}});
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome explicit_solution() {
    const auto t0 = Clock::now();
    const auto tr = evolve(parabola(), std::nullopt, {1.0 / 12.0, 1.0 / 6.0, 1.0 / 3.0});
    const double elapsed = seconds_since(t0);
    double worst = 0.0;
    int matched = 0;
    for (const Snapshot& s : tr.snapshots) {
        for (double t : {1.0 / 12.0, 1.0 / 6.0, 1.0 / 3.0}) {
            if (s.t != t) continue;
            const Facet f = detect_facets(s.u).essential().front();
            const auto ref = explicit_parabola(t);
            worst = std::max({worst, std::abs(f.xi_plus - ref.a), std::abs(-f.xi_minus - ref.a), std::abs(f.level - ref.level)});
            ++matched;
        }
    }
    const double ext_err = tr.t_ext ? std::abs(*tr.t_ext - 2.0 / 3.0) : 1.0;
    const bool pass = matched == 3 && worst <= 1e-9 && ext_err <= 1e-9 && elapsed < 0.1;
    return {pass, fmt("max |a-a(t)|,|level-a^2| = %.2e", worst) + fmt(", |t_ext-2/3| = %.2e", ext_err) +
                      fmt(", runtime %.4f s", elapsed)};
}

Outcome w_profile_closed_form() {
    const auto tr = evolve(w_profile(), std::nullopt);
    const double t1 = std::sqrt(3.0) / 108.0;
    const double edge = 0.5 + 1.0 / std::sqrt(12.0);
    bool ok = tr.events.size() == 2 && tr.events[0].kind == EventKind::Merge && tr.events[0].facets.size() == 3;
    double dt = 1.0, dl = 1.0, dx = 1.0;
    if (ok) {
        const Event& m = tr.events[0];
        dt = std::abs(m.time - t1);
        dl = std::abs(m.level - 1.0 / 12.0);
        dx = std::max(std::abs(m.x_lo + edge), std::abs(m.x_hi - edge));
    }
    const double ext = tr.t_ext ? std::abs(*tr.t_ext - 1.0 / 6.0) : 1.0;
    const double final_err = sup_distance(tr.snapshots.back().u, PiecewiseProfile::single(-1.0, 1.0, Polynomial{0.25}));
    // Discrete confirmation at n = 8192, before and after the merge.
    const std::size_t n = 8192;
    double oracle = 0.0;
    double dxg = 0.0;
    for (double h : {0.5 * t1, t1, 0.1}) {
        const auto v = grid_sample(w_profile(), n);
        dxg = v.dx;
        oracle = std::max(oracle, grid_sup_distance(discrete_tv_prox(v, h), grid_sample(resolve(w_profile(), h).u, n)));
    }
    ok = ok && dt <= 1e-9 && dl <= 1e-12 && dx <= 1e-8 && ext <= 1e-9 && final_err <= 1e-12 && oracle <= 5 * dxg;
    return {ok, fmt("|t1 err| = %.2e", dt) + fmt(", |level err| = %.2e", dl) + fmt(", |edge err| = %.2e", dx) +
                    fmt(", |t_ext err| = %.2e", ext) + fmt(", final sup err %.2e", final_err) +
                    fmt(", oracle sup err %.2e", oracle) + fmt(" (5dx = %.2e)", 5 * dxg)};
}

Outcome extinction_bound_holds() {
    std::vector<PiecewiseProfile> all;
    for (const char* name : {"parabola", "w_profile", "monotone", "table1_v1", "table1_v2", "table1_v3"}) all.push_back(scenario(name));
    const std::size_t shipped = all.size();
    for (auto& p : random_profiles(100, 2024)) all.push_back(std::move(p));
    int violations = 0;
    int alt_violations = 0;
    double worst_ratio = 0.0;
    for (std::size_t k = 0; k < all.size(); ++k) {
        const auto tr = evolve(all[k], std::nullopt);
        const double t_ext = tr.t_ext.value_or(0.0);
        if (t_ext > tr.bound.bound * (1.0 + 1e-12)) {
            ++violations;
            worst_ratio = std::max(worst_ratio, t_ext / tr.bound.bound);
        }
        if (t_ext > tr.bound.bound_alt * (1.0 + 1e-12)) ++alt_violations;
    }
    return {violations == 0, std::to_string(shipped) + " shipped + 100 random: " + std::to_string(violations) +
                                 " exceed 2KA/l" + (violations ? fmt(" (worst t_ext/bound %.3f)", worst_ratio) : "") + ", " +
                                 std::to_string(alt_violations) + " exceed KAl/2"};
}

Outcome semigroup_splitting() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    int straddling = 0;
    bool ok = true;
    for (int k = 0; k < 20; ++k) {
        const auto w = random_profile(rng);
        const auto tr = evolve(w, std::nullopt);
        const double horizon = tr.t_ext.value_or(1.0) > 0.0 ? *tr.t_ext : 1.0;
        double h1 = horizon * unit(rng);
        double h2 = horizon * unit(rng);
        if (!tr.events.empty() && k % 2 == 0) {
            const double te = tr.events.front().time;
            h1 = te * (0.3 + 0.69 * unit(rng));
            h2 = te * (0.1 + unit(rng));
        }
        for (const Event& e : tr.events)
            if (h1 < e.time && h1 + h2 > e.time) {
                ++straddling;
                break;
            }
        const double d = sup_distance(resolve(w, h1 + h2).u, resolve(resolve(w, h1).u, h2).u);
        worst = std::max(worst, d / w.scale());
        ok = ok && d <= 1e-8 * w.scale();
    }
    return {ok, fmt("max sup-dist/scale = %.2e", worst) + ", " + std::to_string(straddling) + "/20 pairs straddle an event"};
}

Outcome yosida_convergence() {
    const auto traj = evolve(w_profile(), 0.05);
    const auto w = traj.snapshots.back().u;
    const auto d = detect_facets(w);
    std::vector<double> errs;
    for (double lambda : {1e2, 1e3, 1e4}) errs.push_back(yosida_apply(w, lambda).l1_error);
    const bool ok = d.l_min > 0.0 && errs[0] > errs[1] && errs[1] > errs[2] && errs[2] <= 1e-2;
    return {ok, fmt("L = %.4f", d.l_min) + fmt(", l1 errors %.3e", errs[0]) + fmt(", %.3e", errs[1]) + fmt(", %.3e", errs[2])};
}

Outcome oracle_agreement() {
    std::vector<std::pair<std::string, PiecewiseProfile>> cases{{"parabola", parabola()}};
    for (const char* name : {"table1_v1", "table1_v2", "table1_v3"}) cases.push_back({name, scenario(name)});
    bool sup_ok = true;
    bool ratio_ok = true;
    double worst_rel = 0.0;
    double rmin = 1e300, rmax = 0.0;
    for (const auto& [name, w] : cases) {
        for (double h : {1.0 / 24.0, 1.0 / 12.0, 1.0 / 6.0}) {
            double err[2];
            double dx = 0.0;
            const std::size_t ns[2] = {2048, 4096};
            const auto u = resolve(w, h).u;
            for (int k = 0; k < 2; ++k) {
                const auto v = grid_sample(w, ns[k]);
                dx = v.dx;
                err[k] = grid_sup_distance(discrete_tv_prox(v, h), grid_sample(u, ns[k]));
            }
            worst_rel = std::max(worst_rel, err[1] / (5 * dx));
            sup_ok = sup_ok && err[1] <= 5 * dx;
            const double ratio = err[0] / err[1];
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
            ratio_ok = ratio_ok && ratio >= 1.7 && ratio <= 2.3;
        }
    }
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double bf = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 3 + rng() % 6;
        GridFunction g{0.0, 0.05 + unit(rng), std::vector<double>(n)};
        for (double& x : g.values) x = 2.0 * unit(rng) - 1.0;
        const double h = 0.001 + 0.5 * unit(rng);
        bf = std::max(bf, grid_sup_distance(discrete_tv_prox(g, h), brute_force_tv_prox(g, h)));
    }
    const bool bf_ok = bf <= 1e-10;
    return {sup_ok && ratio_ok && bf_ok,
            std::string("sup err <= 5dx: ") + (sup_ok ? "yes" : "no") + fmt(" (max err/5dx %.2e)", worst_rel) +
                "; 2048->4096 ratio in [1.7,2.3]: " + (ratio_ok ? "yes" : "no") + fmt(" (observed %.2f", rmin) +
                fmt("..%.2f)", rmax) + "; brute force: " + fmt("%.2e", bf)};
}

Outcome table1_qualitative() {
    bool ok = true;
    std::string detail;
    for (const char* name : {"table1_v1", "table1_v2", "table1_v3"}) {
        const auto u0 = scenario(name);
        const auto t0 = Clock::now();
        const auto probe = evolve(u0, std::nullopt);
        std::vector<double> times;
        const double te = probe.t_ext.value_or(0.0);
        for (int k = 1; k < 40; ++k) times.push_back(te * k / 40.0);
        const auto tr = evolve(u0, std::nullopt, times);
        const double elapsed = seconds_since(t0);
        const double sup0 = std::max(std::abs(u0.min_value()), std::abs(u0.max_value()));
        bool opened = true, kmono = true, wmono = true, bounded = true;
        int prev_k = detect_facets(u0).k_ess;
        double prev_w = -1.0;
        std::size_t ev = 0;
        for (const Snapshot& s : tr.snapshots) {
            const auto d = detect_facets(s.u);
            if (s.t > 0.0 && d.k_ess > 0 && !(d.l_min > 0.0)) opened = false;
            if (d.k_ess > prev_k) kmono = false;
            bool crossed = false;
            while (ev < tr.events.size() && tr.events[ev].time <= s.t) {
                crossed = true;
                ++ev;
            }
            const double width = d.essential_width();
            if (s.t > 0.0 && !crossed && prev_w >= 0.0 && width < prev_w - 1e-12) wmono = false;
            prev_w = crossed ? -1.0 : width;
            prev_k = d.k_ess;
            if (std::max(std::abs(s.u.min_value()), std::abs(s.u.max_value())) > sup0 * (1.0 + 1e-12)) bounded = false;
        }
        const bool final_mono = detect_facets(tr.snapshots.back().u).k_ess == 0;
        const bool fast = elapsed < 1.0;
        ok = ok && opened && kmono && wmono && bounded && final_mono && fast;
        detail += std::string(detail.empty() ? "" : "; ") + name + ": " + std::to_string(tr.events.size()) + " events" +
                  fmt(", t_ext %.4f", te) + fmt(", %.3f s", elapsed) +
                  (opened && kmono && wmono && bounded && final_mono ? "" : " [property violated]");
    }
    return {ok, detail};
}

Outcome invariant_suite() {
    const auto rep = validate_profiles(random_profiles(100, 7), 7);
    std::string failed;
    for (const auto& p : rep.properties)
        if (!p.passed()) failed += (failed.empty() ? "" : ", ") + p.name;
    std::size_t checks = 0;
    for (const auto& p : rep.properties) checks += p.checks;
    return {rep.all_passed(), std::to_string(rep.properties.size()) + " properties, " + std::to_string(checks) + " checks" +
                                  (failed.empty() ? "" : "; failed: " + failed)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 explicit x^2 solution", explicit_solution},
        {"2 W-profile closed form", w_profile_closed_form},
        {"3 extinction bound", extinction_bound_holds},
        {"4 semigroup splitting", semigroup_splitting},
        {"5 Yosida convergence", yosida_convergence},
        {"6 oracle agreement", oracle_agreement},
        {"7 Table 1 qualitative claims", table1_qualitative},
        {"8 invariant suite", invariant_suite},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o{false, ""};
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
