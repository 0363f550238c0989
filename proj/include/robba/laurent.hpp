#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "robba/field.hpp"

namespace robba {

// Known-exponent region of a series, inclusive on both sides; a missing side
// is unbounded. lo > hi encodes the empty region (nothing known exactly).
struct Window {
    std::optional<long long> lo, hi;

    static Window all() { return {}; }
    static Window range(long long lo, long long hi) { return {lo, hi}; }
    static Window at_most(long long hi) { return {std::nullopt, hi}; }
    static Window at_least(long long lo) { return {lo, std::nullopt}; }
    static Window none() { return {0, -1}; }

    bool is_all() const { return !lo && !hi; }
    bool is_empty() const { return lo && hi && *lo > *hi; }
    bool contains(long long e) const {
        if (is_empty()) return false;
        if (lo && e < *lo) return false;
        if (hi && e > *hi) return false;
        return true;
    }
    Window intersect(const Window& o) const {
        Window r;
        if (lo || o.lo) r.lo = lo ? (o.lo ? std::max(*lo, *o.lo) : *lo) : *o.lo;
        if (hi || o.hi) r.hi = hi ? (o.hi ? std::min(*hi, *o.hi) : *hi) : *o.hi;
        if (r.is_empty()) return none();
        return r;
    }
    Window shifted(long long d) const {
        if (is_empty()) return none();
        Window r;
        if (lo) r.lo = *lo + d;
        if (hi) r.hi = *hi + d;
        return r;
    }
    Window scaled(long long n) const { // n >= 1
        if (is_empty()) return none();
        Window r;
        if (lo) r.lo = *lo * n;
        if (hi) r.hi = *hi * n;
        return r;
    }
    friend bool operator==(const Window& a, const Window& b) {
        if (a.is_empty() && b.is_empty()) return true;
        return a.lo == b.lo && a.hi == b.hi;
    }
};

// Certified lower bounds on the Gauss value of the unknown part of a series,
// recorded at two anchor parameters. Between the anchors, the minimum of
// finitely or infinitely many affine functions of s is concave, so the chord
// of the two bounds is itself a valid lower bound.
struct TailBound {
    Rat s_lo, s_hi; // s_lo <= s_hi
    ExtRat b_lo, b_hi;

    ExtRat at(const Rat& s) const;
    bool covers(const Rat& s) const { return s_lo <= s && s <= s_hi; }
    std::optional<TailBound> restricted(const Rat& lo, const Rat& hi) const;
};

// A Gauss value: lambda = min over known terms of v(c_i) + s*i. When the
// flag is false, unknown terms beyond the window could push the true value
// lower, so the reported lambda is only an upper bound for it.
struct GaussValue {
    ExtRat lambda;
    bool exact;
};

// Finite-support Laurent series over a coefficient field. An exact series
// equals the finite sum of its stored terms. A truncated series means
// "the stored terms, plus unknown terms outside the window"; certified
// inequalities about it must combine the stored terms with the recorded
// tail bound. A truncated series without a tail bound certifies nothing
// beyond its stored terms.
class LaurentSeries {
public:
    explicit LaurentSeries(FieldPtr field); // exact zero

    static LaurentSeries make(FieldPtr field, std::map<long long, FieldElem> terms,
                              bool exact = true, Window window = Window::all(),
                              std::optional<TailBound> tail = std::nullopt);
    static LaurentSeries monomial(const FieldPtr& field, const FieldElem& c, long long e);
    static LaurentSeries constant(const FieldPtr& field, const Rat& c);

    const FieldPtr& field() const { return field_; }
    const std::map<long long, FieldElem>& terms() const { return terms_; }
    bool exact() const { return exact_; }
    const Window& window() const { return window_; }
    const std::optional<TailBound>& tail() const { return tail_; }

    bool stored_zero() const { return terms_.empty(); }
    FieldElem coeff(long long e) const;
    // Lowest/highest stored exponent; only valid when stored_zero() is false.
    long long lo_exp() const { return terms_.begin()->first; }
    long long hi_exp() const { return terms_.rbegin()->first; }

    LaurentSeries operator-() const;
    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b);
    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b);
    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b);
    friend bool operator==(const LaurentSeries& a, const LaurentSeries& b);
    friend bool operator!=(const LaurentSeries& a, const LaurentSeries& b) { return !(a == b); }

    LaurentSeries scaled(const FieldElem& c) const;
    LaurentSeries shifted(long long d) const; // multiply by t^d

    LaurentSeries derivative() const; // d/dt
    LaurentSeries theta() const;      // t d/dt
    FieldElem residue() const;        // c_{-1}; unknown on truncated series excluding -1
    LaurentSeries substitute_power(long long n) const; // t -> t^n, n >= 1
    LaurentSeries frobenius_twist() const;             // t -> t^p with coefficient Frobenius

    // Gauss value over the stored terms at radius p^{-s}.
    GaussValue gauss(const Rat& s) const;
    // Certified lower bound for the true Gauss value, or nullopt when the
    // series carries no certificate at this s.
    std::optional<ExtRat> certified_lambda(const Rat& s) const;

    // Drop stored terms outside keep; the result's tail records their exact
    // Gauss values at the anchors, merged with the existing tail.
    LaurentSeries truncated(const Window& keep, const Rat& s_lo, const Rat& s_hi) const;
    // Drop stored terms whose Gauss value is >= threshold at both anchors.
    LaurentSeries pruned(const ExtRat& threshold, const Rat& s_lo, const Rat& s_hi) const;
    // Reinterpret the stored terms as an exact finite sum (forget the tail).
    LaurentSeries as_exact_polynomial() const;

private:
    LaurentSeries(FieldPtr field, std::map<long long, FieldElem> terms, bool exact,
                  Window window, std::optional<TailBound> tail);
    void normalize();

    FieldPtr field_;
    std::map<long long, FieldElem> terms_;
    bool exact_ = true;
    Window window_;
    std::optional<TailBound> tail_;
};

// Geometric-series inversion certified on [s_lo, s_hi]: requires a stored
// term that strictly dominates every other term (and the tail, if any) at
// both anchors. The result's tail bound certifies the discarded remainder.
// A tail_target stops the accumulation as soon as the remainder bound
// reaches it; the stored coefficients are unaffected, only the point where
// knowledge hands over to the tail bound moves.
LaurentSeries invert(const LaurentSeries& x, const Rat& s_lo, const Rat& s_hi, long long order,
                     const std::optional<Rat>& tail_target = std::nullopt);

struct HenselStep {
    ExtRat residual_lo, residual_hi; // certified residual Gauss values at the anchors
};

struct HenselResult {
    LaurentSeries z;
    std::vector<HenselStep> steps;
    Rat margin; // minimal hypothesis margin mu_0
};

// Newton iteration for a monic P (coefficients P[0] + P[1] x + ... + x^n)
// whose reduction is X^{n-1}(X - 1): requires lambda(P[i]) > 0 for i <= n-2
// and lambda(P[n-1] + 1) > 0 at both anchors. Returns the root near 1 with
// residual Gauss value above order * margin at both anchors.
HenselResult hensel_lift(const std::vector<LaurentSeries>& P, long long order,
                         const Rat& s_lo, const Rat& s_hi);

} // namespace robba
