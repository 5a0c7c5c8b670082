#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "tvflow/error.hpp"
#include "tvflow/polynomial.hpp"

namespace tvflow {

/// Tolerances shared by the whole library. Every one of them is relative to
/// the profile scale max(1, |a_b|, |a_e|, max|u|, b - a).
struct Tolerances {
    static constexpr double continuity = 1e-9;  // piece agreement at breakpoints
    static constexpr double abscissa = 1e-13;   // root isolation
    static constexpr double level = 1e-11;      // "same level" and event grouping
    static constexpr double sliver = 1e-12;     // pieces/arcs shorter than this are absorbed
};

struct Piece {
    double x0;
    double x1;
    Polynomial poly;
};

enum class Direction { Increasing, Decreasing, Flat };

inline const char* to_string(Direction d) {
    switch (d) {
        case Direction::Increasing: return "Increasing";
        case Direction::Decreasing: return "Decreasing";
        case Direction::Flat: return "Flat";
    }
    return "?";
}

struct MonotoneArc {
    double x0;
    double x1;
    Direction dir;
};

enum class LevelSide { FirstFromLeft, LastFromRight };

/// A continuous function on [a, b] made of polynomial pieces, together with
/// its Dirichlet data a_b = u(a), a_e = u(b). Immutable after construction.
class PiecewiseProfile {
public:
    /// Validating factory. Checks tiling, continuity within
    /// Tolerances::continuity * scale and the Dirichlet values. Boundary values
    /// default to the endpoint values.
    static PiecewiseProfile from_pieces(std::vector<Piece> pieces,
                                        std::optional<double> left = std::nullopt,
                                        std::optional<double> right = std::nullopt) {
        if (pieces.empty()) throw Error(ErrorCode::EmptyDomain, "profile has no pieces");
        for (const Piece& pc : pieces) {
            if (!(pc.x0 < pc.x1))
                throw Error(ErrorCode::EmptyDomain, "piece interval must satisfy x0 < x1");
        }
        for (std::size_t k = 1; k < pieces.size(); ++k) {
            const double gap = pieces[k].x0 - pieces[k - 1].x1;
            if (std::abs(gap) > Tolerances::abscissa * std::max(1.0, std::abs(pieces[k].x0)) * 10.0) {
                std::ostringstream os;
                os << "pieces do not tile the domain near x = " << pieces[k].x0;
                throw Error(ErrorCode::SchemaError, os.str());
            }
            pieces[k].x0 = pieces[k - 1].x1;
        }
        PiecewiseProfile p;
        p.pieces_ = std::move(pieces);
        p.left_ = p.pieces_.front().poly(p.pieces_.front().x0);
        p.right_ = p.pieces_.back().poly(p.pieces_.back().x1);
        p.compute_range();
        p.scale_ = std::max({1.0, std::abs(p.min_), std::abs(p.max_), p.b() - p.a()});
        const double tol = Tolerances::continuity * p.scale_;
        for (std::size_t k = 1; k < p.pieces_.size(); ++k) {
            const double x = p.pieces_[k].x0;
            const double jump = p.pieces_[k].poly(x) - p.pieces_[k - 1].poly(x);
            if (std::abs(jump) > tol) {
                std::ostringstream os;
                os << "pieces disagree by " << jump << " at x = " << x;
                throw Error(ErrorCode::ContinuityViolation, os.str());
            }
        }
        if (left && std::abs(*left - p.left_) > tol)
            throw Error(ErrorCode::BoundaryMismatch, "left boundary value differs from u(a)");
        if (right && std::abs(*right - p.right_) > tol)
            throw Error(ErrorCode::BoundaryMismatch, "right boundary value differs from u(b)");
        if (left) p.left_ = *left;
        if (right) p.right_ = *right;
        p.scale_ = std::max({p.scale_, std::abs(p.left_), std::abs(p.right_)});
        return p;
    }

    static PiecewiseProfile single(double a, double b, Polynomial poly) {
        return from_pieces({Piece{a, b, std::move(poly)}});
    }

    double a() const { return pieces_.front().x0; }
    double b() const { return pieces_.back().x1; }
    double left_value() const { return left_; }
    double right_value() const { return right_; }
    double min_value() const { return min_; }
    double max_value() const { return max_; }
    double scale() const { return scale_; }
    std::span<const Piece> pieces() const { return pieces_; }

    bool contains(double x) const {
        const double tol = Tolerances::abscissa * scale_;
        return x >= a() - tol && x <= b() + tol;
    }

    /// Index of the piece containing x; at a shared breakpoint the left piece.
    std::size_t locate(double x) const {
        auto it = std::lower_bound(pieces_.begin(), pieces_.end(), x,
                                   [](const Piece& pc, double v) { return pc.x1 < v; });
        if (it == pieces_.end()) return pieces_.size() - 1;
        return static_cast<std::size_t>(it - pieces_.begin());
    }

    double operator()(double x) const {
        if (x <= a()) return left_;
        if (x >= b()) return right_;
        return pieces_[locate(x)].poly(x);
    }

private:
    PiecewiseProfile() = default;

    void compute_range() {
        min_ = std::numeric_limits<double>::infinity();
        max_ = -min_;
        for (const Piece& pc : pieces_) {
            auto visit = [&](double x) {
                const double v = pc.poly(x);
                min_ = std::min(min_, v);
                max_ = std::max(max_, v);
            };
            visit(pc.x0);
            visit(pc.x1);
            if (pc.poly.degree() >= 2)
                for (double r : real_roots(pc.poly.derivative(), pc.x0, pc.x1)) visit(r);
        }
    }

    std::vector<Piece> pieces_;
    double left_ = 0.0;
    double right_ = 0.0;
    double min_ = 0.0;
    double max_ = 0.0;
    double scale_ = 1.0;
};

inline void require_in_domain(const PiecewiseProfile& p, double x) {
    if (!p.contains(x)) {
        std::ostringstream os;
        os << "x = " << x << " outside [" << p.a() << ", " << p.b() << "]";
        throw Error(ErrorCode::OutOfDomain, os.str());
    }
}

inline double eval(const PiecewiseProfile& p, double x) {
    require_in_domain(p, x);
    return p(x);
}

inline double integrate(const PiecewiseProfile& p, double x0, double x1) {
    require_in_domain(p, x0);
    require_in_domain(p, x1);
    if (x0 > x1) throw Error(ErrorCode::OutOfDomain, "integration bounds reversed");
    x0 = std::max(x0, p.a());
    x1 = std::min(x1, p.b());
    if (x0 >= x1) return 0.0;
    double acc = 0.0;
    for (std::size_t k = p.locate(x0); k < p.pieces().size(); ++k) {
        const Piece& pc = p.pieces()[k];
        if (pc.x0 >= x1) break;
        const double s = std::max(pc.x0, x0);
        const double e = std::min(pc.x1, x1);
        if (e > s) acc += pc.poly.integrate(s, e);
    }
    return acc;
}

namespace detail {

struct SignSegment {
    double x0;
    double x1;
    Direction dir;
};

inline Direction direction_on(const Polynomial& poly, const Polynomial& dpoly, double s, double e) {
    const double d = dpoly(0.5 * (s + e));
    if (d > 0.0) return Direction::Increasing;
    if (d < 0.0) return Direction::Decreasing;
    const double dv = poly(e) - poly(s);
    if (dv > 0.0) return Direction::Increasing;
    if (dv < 0.0) return Direction::Decreasing;
    return Direction::Flat;
}

}  // namespace detail

/// Maximal monotone arcs tiling [a, b]. Flat arcs are the constant stretches;
/// derivative zeros without a sign change stay inside their arc.
inline std::vector<MonotoneArc> monotone_arcs(const PiecewiseProfile& p, int max_degree = 16) {
    const double sliver = Tolerances::sliver * p.scale();
    std::vector<detail::SignSegment> segs;
    for (const Piece& pc : p.pieces()) {
        if (pc.poly.degree() > max_degree)
            throw Error(ErrorCode::DegreeOverflow, "piece degree exceeds root-isolation limit");
        if (pc.poly.is_constant()) {
            segs.push_back({pc.x0, pc.x1, Direction::Flat});
            continue;
        }
        const Polynomial dp = pc.poly.derivative();
        std::vector<double> cuts{pc.x0};
        for (double r : real_roots(dp, pc.x0, pc.x1))
            if (r - cuts.back() > sliver && pc.x1 - r > sliver) cuts.push_back(r);
        cuts.push_back(pc.x1);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
            segs.push_back({cuts[k], cuts[k + 1], detail::direction_on(pc.poly, dp, cuts[k], cuts[k + 1])});
    }
    // Absorb slivers into their left neighbour (or the right one at the start).
    std::vector<detail::SignSegment> clean;
    for (const auto& s : segs) {
        if (s.x1 - s.x0 <= sliver && !clean.empty()) {
            clean.back().x1 = s.x1;
            continue;
        }
        if (!clean.empty() && clean.back().x1 - clean.back().x0 <= sliver && clean.size() == 1) {
            clean.back() = {clean.back().x0, s.x1, s.dir};
            continue;
        }
        clean.push_back(s);
    }
    std::vector<MonotoneArc> arcs;
    for (const auto& s : clean) {
        if (!arcs.empty() && arcs.back().dir == s.dir) {
            arcs.back().x1 = s.x1;
        } else {
            arcs.push_back({s.x0, s.x1, s.dir});
        }
    }
    return arcs;
}

/// Ordered interval spanned by the one-sided derivatives at x (Clarke
/// differential); one-sided at the domain ends.
inline std::pair<double, double> clarke_interval(const PiecewiseProfile& p, double x) {
    require_in_domain(p, x);
    x = std::clamp(x, p.a(), p.b());
    const auto pcs = p.pieces();
    std::size_t k = p.locate(x);
    double left = 0.0;
    double right = 0.0;
    if (x <= p.a()) {
        left = right = pcs.front().poly.derivative()(x);
    } else if (x >= p.b()) {
        left = right = pcs.back().poly.derivative()(x);
    } else if (x == pcs[k].x1 && k + 1 < pcs.size()) {
        left = pcs[k].poly.derivative()(x);
        right = pcs[k + 1].poly.derivative()(x);
    } else {
        left = right = pcs[k].poly.derivative()(x);
    }
    return {std::min(left, right), std::max(left, right)};
}

/// Extreme preimage of level y on a (non-strictly) monotone arc. Constant
/// stretches within Tolerances::level of y count as being at level y, and
/// `side` picks their left or right edge.
inline double solve_level(const PiecewiseProfile& p, const MonotoneArc& arc, double y, LevelSide side) {
    const double ltol = Tolerances::level * p.scale();
    const double v0 = p(arc.x0);
    const double v1 = p(arc.x1);
    if (y < std::min(v0, v1) - ltol || y > std::max(v0, v1) + ltol) {
        std::ostringstream os;
        os << "level " << y << " outside [" << std::min(v0, v1) << ", " << std::max(v0, v1) << "]";
        throw Error(ErrorCode::LevelOutOfRange, os.str());
    }
    if (arc.dir == Direction::Flat) return side == LevelSide::FirstFromLeft ? arc.x0 : arc.x1;
    const double sgn = arc.dir == Direction::Increasing ? 1.0 : -1.0;
    const auto pcs = p.pieces();
    const std::size_t first = p.locate(arc.x0);
    const std::size_t last = p.locate(arc.x1);
    auto root_in = [&](const Polynomial& poly, double s, double e) {
        auto g = [&](double x) { return sgn * (poly(x) - y); };
        const Polynomial dpoly = poly.derivative();
        auto dg = [&](double x) { return sgn * dpoly(x); };
        return detail::bracketed_newton(g, dg, s, e, 0.0);
    };
    if (side == LevelSide::FirstFromLeft) {
        for (std::size_t k = first; k <= last; ++k) {
            const Piece& pc = pcs[k];
            const double s = std::max(pc.x0, arc.x0);
            const double e = std::min(pc.x1, arc.x1);
            if (e <= s) continue;
            if (pc.poly.is_constant()) {
                const double c = pc.poly.coeff(0);
                if (std::abs(c - y) <= ltol || sgn * (c - y) > 0.0) return s;
                continue;
            }
            const double gs = sgn * (pc.poly(s) - y);
            if (gs >= 0.0) return s;
            const double ge = sgn * (pc.poly(e) - y);
            if (ge < 0.0) continue;
            return root_in(pc.poly, s, e);
        }
        return arc.x1;
    }
    for (std::size_t k = last + 1; k-- > first;) {
        const Piece& pc = pcs[k];
        const double s = std::max(pc.x0, arc.x0);
        const double e = std::min(pc.x1, arc.x1);
        if (e <= s) continue;
        if (pc.poly.is_constant()) {
            const double c = pc.poly.coeff(0);
            if (std::abs(c - y) <= ltol || sgn * (c - y) < 0.0) return e;
            continue;
        }
        const double ge = sgn * (pc.poly(e) - y);
        if (ge <= 0.0) return e;
        const double gs = sgn * (pc.poly(s) - y);
        if (gs > 0.0) continue;
        return root_in(pc.poly, s, e);
    }
    return arc.x0;
}

// ---------------------------------------------------------------------------
// Calculus helpers used across the library.

/// Visits the common refinement of two profiles on a shared domain:
/// fn(s, e, poly_p, poly_q) for every maximal subinterval.
template <class Fn>
void for_each_common_piece(const PiecewiseProfile& p, const PiecewiseProfile& q, Fn&& fn) {
    const auto pp = p.pieces();
    const auto qp = q.pieces();
    std::size_t i = 0;
    std::size_t j = 0;
    double s = std::max(p.a(), q.a());
    const double end = std::min(p.b(), q.b());
    while (i < pp.size() && j < qp.size() && s < end) {
        const double e = std::min({pp[i].x1, qp[j].x1, end});
        if (e > s) fn(s, e, pp[i].poly, qp[j].poly);
        s = std::max(s, e);
        if (pp[i].x1 <= s) ++i;
        if (j < qp.size() && qp[j].x1 <= s) ++j;
    }
}

namespace detail {

inline double max_abs_on(const Polynomial& d, double s, double e) {
    double m = std::max(std::abs(d(s)), std::abs(d(e)));
    if (d.degree() >= 2)
        for (double r : real_roots(d.derivative(), s, e)) m = std::max(m, std::abs(d(r)));
    return m;
}

inline void require_same_domain(const PiecewiseProfile& p, const PiecewiseProfile& q) {
    const double tol = Tolerances::abscissa * std::max(p.scale(), q.scale()) * 10.0;
    if (std::abs(p.a() - q.a()) > tol || std::abs(p.b() - q.b()) > tol)
        throw Error(ErrorCode::Precondition, "profiles live on different domains");
}

}  // namespace detail

/// Exact sup |p - q| over the shared domain.
inline double sup_distance(const PiecewiseProfile& p, const PiecewiseProfile& q) {
    detail::require_same_domain(p, q);
    double m = 0.0;
    for_each_common_piece(p, q, [&](double s, double e, const Polynomial& a, const Polynomial& b) {
        m = std::max(m, detail::max_abs_on(a - b, s, e));
    });
    return m;
}

/// Exact L2 distance over the shared domain.
inline double l2_distance(const PiecewiseProfile& p, const PiecewiseProfile& q) {
    detail::require_same_domain(p, q);
    double acc = 0.0;
    for_each_common_piece(p, q, [&](double s, double e, const Polynomial& a, const Polynomial& b) {
        const Polynomial d = a - b;
        acc += (d * d).integrate(s, e);
    });
    return std::sqrt(std::max(acc, 0.0));
}

/// Pointwise combination alpha*p + beta*q on the common refinement.
inline PiecewiseProfile combine(const PiecewiseProfile& p, double alpha, const PiecewiseProfile& q, double beta) {
    detail::require_same_domain(p, q);
    std::vector<Piece> out;
    for_each_common_piece(p, q, [&](double s, double e, const Polynomial& a, const Polynomial& b) {
        out.push_back({s, e, a * alpha + b * beta});
    });
    return PiecewiseProfile::from_pieces(std::move(out));
}

inline PiecewiseProfile translated(const PiecewiseProfile& p, double dy) {
    std::vector<Piece> out(p.pieces().begin(), p.pieces().end());
    for (Piece& pc : out) pc.poly += dy;
    return PiecewiseProfile::from_pieces(std::move(out));
}

/// Continuous antiderivative x -> c + integral_a^x p.
inline PiecewiseProfile antiderivative(const PiecewiseProfile& p, double c = 0.0) {
    std::vector<Piece> out;
    double acc = c;
    for (const Piece& pc : p.pieces()) {
        Polynomial anti = pc.poly.antiderivative();
        anti += acc - anti(pc.x0);
        acc += pc.poly.integrate(pc.x0, pc.x1);
        out.push_back({pc.x0, pc.x1, std::move(anti)});
    }
    return PiecewiseProfile::from_pieces(std::move(out));
}

/// ||u_x||_p for p in {1, 2, inf} (pass 0 for inf), by exact piecewise calculus.
inline double derivative_norm(const PiecewiseProfile& p, int order) {
    double acc = 0.0;
    for (const Piece& pc : p.pieces()) {
        const Polynomial d = pc.poly.derivative();
        if (order == 1) {
            std::vector<double> cuts{pc.x0};
            for (double r : real_roots(d, pc.x0, pc.x1)) cuts.push_back(r);
            cuts.push_back(pc.x1);
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
                acc += std::abs(pc.poly(cuts[k + 1]) - pc.poly(cuts[k]));
        } else if (order == 2) {
            acc += (d * d).integrate(pc.x0, pc.x1);
        } else {
            acc = std::max(acc, detail::max_abs_on(d, pc.x0, pc.x1));
        }
    }
    return order == 2 ? std::sqrt(acc) : acc;
}

/// Total variation of u_x: arc-wise variation of the piece derivatives plus the
/// slope jumps at interior breakpoints.
inline double bv_seminorm_derivative(const PiecewiseProfile& p) {
    double acc = 0.0;
    const auto pcs = p.pieces();
    for (std::size_t k = 0; k < pcs.size(); ++k) {
        const Polynomial d = pcs[k].poly.derivative();
        const Polynomial dd = d.derivative();
        std::vector<double> cuts{pcs[k].x0};
        for (double r : real_roots(dd, pcs[k].x0, pcs[k].x1)) cuts.push_back(r);
        cuts.push_back(pcs[k].x1);
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) acc += std::abs(d(cuts[j + 1]) - d(cuts[j]));
        if (k + 1 < pcs.size()) {
            const double x = pcs[k].x1;
            acc += std::abs(pcs[k + 1].poly.derivative()(x) - d(x));
        }
    }
    return acc;
}

/// A constant stretch [x0, x1] at `level`, inserted by with_flats.
struct Flat {
    double x0;
    double x1;
    double level;
};

/// Replaces w on each flat interval by the constant level; w is kept
/// elsewhere. Flats must be sorted and pairwise disjoint. Pieces shorter than
/// Tolerances::sliver * scale are absorbed by their neighbours.
inline PiecewiseProfile with_flats(const PiecewiseProfile& w, std::span<const Flat> flats) {
    const double sliver = Tolerances::sliver * w.scale();
    std::vector<Piece> out;
    auto append_w = [&](double s, double e) {
        if (e - s <= sliver) return;
        for (std::size_t k = w.locate(s); k < w.pieces().size(); ++k) {
            const Piece& pc = w.pieces()[k];
            if (pc.x0 >= e) break;
            const double cs = std::max(s, pc.x0);
            const double ce = std::min(e, pc.x1);
            if (ce - cs > sliver) out.push_back({cs, ce, pc.poly});
        }
    };
    double cursor = w.a();
    for (const Flat& fl : flats) {
        const double x0 = std::max(fl.x0, cursor);
        const double x1 = std::min(fl.x1, w.b());
        append_w(cursor, x0);
        if (x1 - x0 > sliver) out.push_back({x0, x1, Polynomial::constant(fl.level)});
        cursor = std::max(cursor, x1);
    }
    append_w(cursor, w.b());
    if (out.empty()) return w;
    out.front().x0 = w.a();
    out.back().x1 = w.b();
    for (std::size_t k = 1; k < out.size(); ++k) out[k].x0 = out[k - 1].x1;
    std::vector<Piece> merged;
    for (Piece& pc : out) {
        if (!merged.empty() && merged.back().poly.is_constant() && pc.poly.is_constant() &&
            std::abs(merged.back().poly.coeff(0) - pc.poly.coeff(0)) <= Tolerances::level * w.scale()) {
            merged.back().x1 = pc.x1;
            continue;
        }
        merged.push_back(std::move(pc));
    }
    return PiecewiseProfile::from_pieces(std::move(merged), w.left_value(), w.right_value());
}

}  // namespace tvflow
