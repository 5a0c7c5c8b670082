#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace tvflow {

// Dense real polynomial c0 + c1 x + ... + cd x^d in the global abscissa.
// Trailing exact zeros are trimmed, so the leading coefficient is nonzero
// unless the polynomial is constant.
class Polynomial {
public:
    Polynomial() : c_{0.0} {}
    Polynomial(std::initializer_list<double> c) : c_(c) { trim(); }
    explicit Polynomial(std::vector<double> c) : c_(std::move(c)) { trim(); }

    static Polynomial constant(double v) { return Polynomial(std::vector<double>{v}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_constant() const { return c_.size() == 1; }
    std::span<const double> coeffs() const { return c_; }
    double coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

    double operator()(double x) const {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Polynomial derivative() const {
        if (c_.size() == 1) return Polynomial{};
        std::vector<double> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
        return Polynomial(std::move(d));
    }

    // Antiderivative vanishing at x = 0.
    Polynomial antiderivative() const {
        std::vector<double> a(c_.size() + 1, 0.0);
        for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
        return Polynomial(std::move(a));
    }

    double integrate(double x0, double x1) const {
        if (x0 == x1) return 0.0;
        // Integrate in coordinates centred on the interval to limit cancellation.
        const double mid = 0.5 * (x0 + x1);
        const Polynomial local = taylor_shift(mid);
        const double half = 0.5 * (x1 - x0);
        double acc = 0.0;
        double pw = half;  // half^(k+1)
        for (std::size_t k = 0; k < local.c_.size(); ++k) {
            if (k % 2 == 0) acc += 2.0 * local.c_[k] * pw / static_cast<double>(k + 1);
            pw *= half;
        }
        return acc;
    }

    // Coefficients of q(s) = p(s + x0).
    Polynomial taylor_shift(double x0) const {
        std::vector<double> c = c_;
        const std::size_t n = c.size();
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = n - 1; j > i; --j) c[j - 1] += x0 * c[j];
        return Polynomial(std::move(c));
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        trim();
        return *this;
    }
    Polynomial& operator*=(double s) {
        for (double& v : c_) v *= s;
        trim();
        return *this;
    }
    Polynomial& operator+=(double s) {
        c_[0] += s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator+(Polynomial a, double s) { return a += s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(c));
    }

    bool operator==(const Polynomial&) const = default;

private:
    void trim() {
        if (c_.empty()) c_.push_back(0.0);
        while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
    }

    std::vector<double> c_;
};

namespace detail {

// Safeguarded Newton on a bracket [lo, hi] where f changes sign. f and df are
// callables; the iteration falls back to bisection whenever Newton leaves the
// bracket or stalls. Returns the root to within `xtol` (absolute).
template <class F, class DF>
double bracketed_newton(F&& f, DF&& df, double lo, double hi, double xtol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    const bool increasing = flo < 0.0;
    double x = 0.5 * (lo + hi);
    double prev_width = hi - lo;
    for (int iter = 0; iter < 200; ++iter) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx < 0.0) == increasing) lo = x; else hi = x;
        const double width = hi - lo;
        if (width <= xtol) return 0.5 * (lo + hi);
        const double d = df(x);
        double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : lo - 1.0;
        if (!(next > lo && next < hi) || width > 0.5 * prev_width) next = 0.5 * (lo + hi);
        prev_width = width;
        if (next == x) return x;
        x = next;
    }
    return x;
}

// Bisection on a monotone predicate-free function g over [lo, hi] with
// g(lo) <= 0 <= g(hi) (or the reverse); narrows until the floating point
// interval collapses.
template <class G>
double bisect(G&& g, double lo, double hi, int max_iter = 200) {
    double glo = g(lo);
    if (glo == 0.0) return lo;
    const bool increasing = glo < 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == increasing) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline void append_roots(const Polynomial& p, double lo, double hi, double xtol,
                         std::vector<double>& out);

}  // namespace detail

// Roots of p in [lo, hi] at which p changes sign (odd multiplicity), plus
// exact zeros found at the monotone-segment boundaries. Isolation recurses on
// the derivative: between consecutive critical points p is monotone, so each
// sign change brackets exactly one root, refined by safeguarded Newton.
inline std::vector<double> real_roots(const Polynomial& p, double lo, double hi, double xtol = 1e-13) {
    std::vector<double> roots;
    if (lo > hi) return roots;
    detail::append_roots(p, lo, hi, xtol, roots);
    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    for (double r : roots)
        if (unique.empty() || r - unique.back() > xtol) unique.push_back(r);
    return unique;
}

namespace detail {

inline void append_roots(const Polynomial& p, double lo, double hi, double xtol,
                         std::vector<double>& out) {
    const double abs_tol = xtol * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (p.is_constant()) return;
    if (p.degree() == 1) {
        const double r = -p.coeff(0) / p.coeff(1);
        if (r >= lo && r <= hi) out.push_back(r);
        return;
    }
    const Polynomial dp = p.derivative();
    std::vector<double> cuts{lo};
    for (double c : real_roots(dp, lo, hi, xtol))
        if (c > lo && c < hi) cuts.push_back(c);
    cuts.push_back(hi);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double s = cuts[k];
        const double e = cuts[k + 1];
        const double fs = p(s);
        const double fe = p(e);
        if (fs == 0.0) { out.push_back(s); continue; }
        if (fe == 0.0) { out.push_back(e); continue; }
        if ((fs < 0.0) != (fe < 0.0))
            out.push_back(bracketed_newton(p, dp, s, e, abs_tol));
    }
}

}  // namespace detail

}  // namespace tvflow
