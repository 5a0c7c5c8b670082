// One resolvent step on the W-shaped profile, followed by the flux certificate.

#include <cmath>
#include <cstdio>

#include "tvflow/tvflow.hpp"

int main() {
    using namespace tvflow;
    const auto w = PiecewiseProfile::from_pieces(
        {{-1.0, 0.0, Polynomial{0.25, 1.0, 1.0}}, {0.0, 1.0, Polynomial{0.25, -1.0, 1.0}}});
    for (double h : {0.01, std::sqrt(3.0) / 108.0, 0.1}) {
        const auto r = resolve(w, h);
        const auto d = detect_facets(r.u);
        std::printf("h = %.6f  splits %zu  K_ess %d  mild residual %.2e\n", h, r.splits.size(), d.k_ess,
                    mild_residual(r.u, w, h));
        for (const auto& s : r.facet_steps) std::printf("    facet [%.9f, %.9f] level %.9f\n", s.a, s.b, s.level);
    }
}
