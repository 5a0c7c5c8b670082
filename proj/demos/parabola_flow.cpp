// Evolves u0(x) = x^2 on [-1, 1] and prints the facet at a few times.

#include <cstdio>

#include "tvflow/tvflow.hpp"

int main() {
    using namespace tvflow;
    const auto u0 = PiecewiseProfile::single(-1.0, 1.0, Polynomial{0.0, 0.0, 1.0});
    const auto tr = evolve(u0, std::nullopt, {1.0 / 12.0, 1.0 / 6.0, 1.0 / 3.0, 0.5});
    for (const Snapshot& s : tr.snapshots) {
        const auto d = detect_facets(s.u);
        if (d.k_ess == 0) {
            std::printf("t = %-8.5f monotone, u = %.6f\n", s.t, s.u(0.0));
            continue;
        }
        const Facet f = d.essential().front();
        std::printf("t = %-8.5f facet [%.6f, %.6f] at level %.6f\n", s.t, f.xi_minus, f.xi_plus, f.level);
    }
    std::printf("extinction at t = %.12f (bound %.6f)\n", tr.t_ext.value_or(0.0), tr.bound.bound);
}
