#pragma once

// Multivariate polynomials over real coefficients, with interval enclosures
// over axis-aligned boxes. Every condition check in the verifier runs on top
// of this: evaluation at grid centers, gradients, and sound bounds on cells.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cra_safety/linalg.hpp"

namespace cra {

/// Relative outward widening applied to every enclosure in place of directed rounding.
inline constexpr double kOutwardFudge = 1e-12;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static Interval point(double v) { return {v, v}; }
    double mag() const { return std::max(std::abs(lo), std::abs(hi)); }
    double width() const { return hi - lo; }
    bool contains(double v) const { return lo <= v && v <= hi; }

    friend Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }
    friend Interval operator*(Interval a, Interval b) {
        const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
        return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
    }
    friend Interval operator*(double s, Interval a) {
        return s >= 0.0 ? Interval{s * a.lo, s * a.hi} : Interval{s * a.hi, s * a.lo};
    }

    Interval widened() const {
        const double w = kOutwardFudge * mag();
        return {lo - w, hi + w};
    }
};

/// Integer power of an interval; even powers of a zero-straddling interval start at 0.
inline Interval ipow(Interval x, unsigned e) {
    if (e == 0) return {1.0, 1.0};
    const double a = std::pow(x.lo, static_cast<int>(e));
    const double b = std::pow(x.hi, static_cast<int>(e));
    if (e % 2 == 1) return {a, b};
    if (x.lo >= 0.0) return {a, b};
    if (x.hi <= 0.0) return {b, a};
    return {0.0, std::max(a, b)};
}

class Box {
public:
    Box() = default;
    Box(Vec lo, Vec hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (lo_.size() != hi_.size()) throw std::invalid_argument("Box: lo/hi length mismatch");
        for (std::size_t i = 0; i < lo_.size(); ++i) {
            if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]))
                throw std::invalid_argument("Box: bounds must be finite");
            if (lo_[i] > hi_[i])
                throw std::invalid_argument("Box: lo[" + std::to_string(i) + "] > hi[" +
                                            std::to_string(i) + "]");
        }
    }

    static Box symmetric(std::size_t n, double r) { return Box(Vec(n, -r), Vec(n, r)); }

    std::size_t dim() const { return lo_.size(); }
    const Vec& lo() const { return lo_; }
    const Vec& hi() const { return hi_; }
    double lo(std::size_t i) const { return lo_[i]; }
    double hi(std::size_t i) const { return hi_[i]; }
    Interval axis(std::size_t i) const { return {lo_[i], hi_[i]}; }

    bool contains(std::span<const double> x, double tol = 0.0) const {
        if (x.size() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
        return true;
    }

    /// Vertices in lexicographic order (coordinate 0 most significant, lo before hi).
    std::vector<Vec> vertices() const {
        const std::size_t n = dim();
        std::vector<Vec> out;
        out.reserve(std::size_t{1} << n);
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            Vec v(n);
            for (std::size_t i = 0; i < n; ++i) {
                const bool high = (mask >> (n - 1 - i)) & 1U;
                v[i] = high ? hi_[i] : lo_[i];
            }
            out.push_back(std::move(v));
        }
        return out;
    }

    bool operator==(const Box&) const = default;

private:
    Vec lo_;
    Vec hi_;
};

using Exponents = std::vector<unsigned>;

struct Term {
    Exponents exps;
    double coef = 0.0;
    bool operator==(const Term&) const = default;
};

class MultiPoly {
public:
    MultiPoly() = default;
    explicit MultiPoly(std::size_t n_vars) : n_vars_(n_vars) {}

    MultiPoly(std::size_t n_vars, const std::vector<Term>& terms) : n_vars_(n_vars) {
        std::map<Exponents, double> acc;
        for (const auto& t : terms) {
            if (t.exps.size() != n_vars)
                throw std::invalid_argument("MultiPoly: term exponent length " +
                                            std::to_string(t.exps.size()) + " != n_vars " +
                                            std::to_string(n_vars));
            acc[t.exps] += t.coef;
        }
        assign(acc);
    }

    static MultiPoly constant(std::size_t n_vars, double c) {
        return MultiPoly(n_vars, {Term{Exponents(n_vars, 0), c}});
    }

    static MultiPoly variable(std::size_t n_vars, std::size_t i, double coef = 1.0) {
        if (i >= n_vars) throw std::invalid_argument("MultiPoly::variable: index out of range");
        Exponents e(n_vars, 0);
        e[i] = 1;
        return MultiPoly(n_vars, {Term{e, coef}});
    }

    /// Linear form sum_j row[j] * x_j (+ offset).
    static MultiPoly linear(std::span<const double> row, double offset = 0.0) {
        const std::size_t n = row.size();
        std::vector<Term> terms;
        if (offset != 0.0) terms.push_back({Exponents(n, 0), offset});
        for (std::size_t j = 0; j < n; ++j) {
            Exponents e(n, 0);
            e[j] = 1;
            terms.push_back({e, row[j]});
        }
        return MultiPoly(n, terms);
    }

    std::size_t n_vars() const { return n_vars_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    unsigned degree() const {
        unsigned d = 0;
        for (const auto& t : terms_) {
            unsigned s = 0;
            for (unsigned e : t.exps) s += e;
            d = std::max(d, s);
        }
        return d;
    }

    double constant_term() const {
        for (const auto& t : terms_)
            if (std::all_of(t.exps.begin(), t.exps.end(), [](unsigned e) { return e == 0; }))
                return t.coef;
        return 0.0;
    }

    double eval(std::span<const double> x) const {
        if (x.size() != n_vars_)
            throw std::invalid_argument("MultiPoly::eval: point has " + std::to_string(x.size()) +
                                        " components, polynomial has " + std::to_string(n_vars_) +
                                        " variables");
        double s = 0.0;
        for (const auto& t : terms_) {
            double p = t.coef;
            for (std::size_t i = 0; i < n_vars_; ++i)
                for (unsigned k = 0; k < t.exps[i]; ++k) p *= x[i];
            s += p;
        }
        return s;
    }

    double operator()(std::span<const double> x) const { return eval(x); }

    MultiPoly partial(std::size_t i) const {
        if (i >= n_vars_) throw std::invalid_argument("MultiPoly::partial: index out of range");
        std::vector<Term> out;
        for (const auto& t : terms_) {
            if (t.exps[i] == 0) continue;
            Term d = t;
            d.coef *= static_cast<double>(t.exps[i]);
            d.exps[i] -= 1;
            out.push_back(std::move(d));
        }
        return MultiPoly(n_vars_, out);
    }

    std::vector<MultiPoly> gradient() const {
        std::vector<MultiPoly> g;
        g.reserve(n_vars_);
        for (std::size_t i = 0; i < n_vars_; ++i) g.push_back(partial(i));
        return g;
    }

    /// Interval enclosure of the range over the box, widened outward.
    Interval range(const Box& b) const {
        check_box(b);
        Interval acc{0.0, 0.0};
        for (const auto& t : terms_) {
            Interval p{1.0, 1.0};
            for (std::size_t i = 0; i < n_vars_; ++i)
                if (t.exps[i]) p = p * ipow(b.axis(i), t.exps[i]);
            acc = acc + t.coef * p;
        }
        return acc.widened();
    }

    MultiPoly& operator+=(const MultiPoly& o) { return *this = *this + o; }
    MultiPoly& operator*=(double s) { return *this = s * *this; }

    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
        const std::size_t n = common_vars(a, b);
        std::map<Exponents, double> acc;
        for (const auto& t : a.terms_) acc[t.exps] += t.coef;
        for (const auto& t : b.terms_) acc[t.exps] += t.coef;
        MultiPoly r(n);
        r.assign(acc);
        return r;
    }
    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + (-1.0) * b; }
    friend MultiPoly operator*(double s, const MultiPoly& a) {
        MultiPoly r(a.n_vars_);
        if (s == 0.0) return r;
        r.terms_ = a.terms_;
        for (auto& t : r.terms_) t.coef *= s;
        return r;
    }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        const std::size_t n = common_vars(a, b);
        std::map<Exponents, double> acc;
        for (const auto& ta : a.terms_)
            for (const auto& tb : b.terms_) {
                Exponents e(n);
                for (std::size_t i = 0; i < n; ++i) e[i] = ta.exps[i] + tb.exps[i];
                acc[e] += ta.coef * tb.coef;
            }
        MultiPoly r(n);
        r.assign(acc);
        return r;
    }
    friend MultiPoly operator+(const MultiPoly& a, double c) {
        return a + constant(a.n_vars_, c);
    }
    friend MultiPoly operator-(const MultiPoly& a, double c) { return a + (-c); }

    bool operator==(const MultiPoly&) const = default;

private:
    static std::size_t common_vars(const MultiPoly& a, const MultiPoly& b) {
        if (a.n_vars_ != b.n_vars_)
            throw std::invalid_argument("MultiPoly: n_vars mismatch (" + std::to_string(a.n_vars_) +
                                        " vs " + std::to_string(b.n_vars_) + ")");
        return a.n_vars_;
    }

    void check_box(const Box& b) const {
        if (b.dim() != n_vars_)
            throw std::invalid_argument("MultiPoly: box dimension " + std::to_string(b.dim()) +
                                        " != n_vars " + std::to_string(n_vars_));
    }

    void assign(const std::map<Exponents, double>& acc) {
        terms_.clear();
        for (const auto& [e, c] : acc)
            if (c != 0.0) terms_.push_back({e, c});
    }

    std::size_t n_vars_ = 0;
    std::vector<Term> terms_;  // sorted by exponent vector, no zero coefficients
};

/// Sound upper bound on sup_{x in b} |p(x)|.
inline double bound_abs(const MultiPoly& p, const Box& b) { return p.range(b).mag(); }

/// L with |p(x) - p(y)| <= L * ||x - y||_inf on b, as the sum of partial-derivative bounds.
inline double lipschitz_bound(const MultiPoly& p, const Box& b) {
    double l = 0.0;
    for (std::size_t i = 0; i < p.n_vars(); ++i) l += bound_abs(p.partial(i), b);
    return l;
}

/// grad(p) . v for polynomial vectors.
inline MultiPoly dot(const std::vector<MultiPoly>& a, const std::vector<MultiPoly>& b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("dot: length mismatch");
    MultiPoly s(a.front().n_vars());
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace cra
