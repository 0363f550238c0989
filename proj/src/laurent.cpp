#include "robba/laurent.hpp"

#include <algorithm>

#include "robba/errors.hpp"

namespace robba {

namespace {

ExtRat emul(const ExtRat& a, const Rat& k) {
    // k > 0
    if (a.is_inf()) return ExtRat::infinity();
    Rat r = a.finite() * k;
    r.canonicalize();
    return ExtRat(r);
}

Rat times_exp(const Rat& s, long long e) {
    Rat r = s * static_cast<long>(e);
    r.canonicalize();
    return r;
}

ExtRat term_lambda(const FieldElem& c, long long e, const Rat& s) {
    return c.valuation() + times_exp(s, e);
}

ExtRat stored_min(const std::map<long long, FieldElem>& terms, const Rat& s) {
    ExtRat m = ExtRat::infinity();
    for (const auto& [e, c] : terms) {
        ExtRat v = term_lambda(c, e, s);
        if (v < m) m = v;
    }
    return m;
}

void order_anchors(Rat& lo, Rat& hi) {
    if (hi < lo) std::swap(lo, hi);
}

struct Anchors {
    Rat lo, hi;
};

// Common anchor interval over which both operands certify their unknown
// parts. nullopt: no certificate can be produced for the result.
std::optional<Anchors> combine_anchors(const LaurentSeries& a, const LaurentSeries& b) {
    std::optional<Anchors> r;
    if (!a.exact()) {
        if (!a.tail()) return std::nullopt;
        r = Anchors{a.tail()->s_lo, a.tail()->s_hi};
    }
    if (!b.exact()) {
        if (!b.tail()) return std::nullopt;
        if (!r) {
            r = Anchors{b.tail()->s_lo, b.tail()->s_hi};
        } else {
            if (b.tail()->s_lo > r->lo) r->lo = b.tail()->s_lo;
            if (b.tail()->s_hi < r->hi) r->hi = b.tail()->s_hi;
            if (r->lo > r->hi) return std::nullopt;
        }
    }
    return r;
}

ExtRat bound_at(const LaurentSeries& x, const Rat& s) {
    if (x.exact()) return ExtRat::infinity();
    return x.tail()->at(s);
}

void require_same_field(const LaurentSeries& a, const LaurentSeries& b) {
    if (!a.field()->same(*b.field()))
        throw precondition_error("series belong to different coefficient fields");
}

// Minimal element of the upward unknown ray of a series (exponents above the
// window), if there is one.
struct URay {
    bool exists;
    bool unbounded; // the ray covers all of Z downward as well
    long long edge;
};

URay unknown_above(const LaurentSeries& x) {
    const Window& w = x.window();
    if (w.is_all()) return {false, false, 0};
    if (w.is_empty()) return {true, true, 0};
    if (w.hi) return {true, false, *w.hi + 1};
    return {false, false, 0};
}

URay unknown_below(const LaurentSeries& x) {
    const Window& w = x.window();
    if (w.is_all()) return {false, false, 0};
    if (w.is_empty()) return {true, true, 0};
    if (w.lo) return {true, false, *w.lo - 1};
    return {false, false, 0};
}

// Possible support edge of a series: the lowest (resp. highest) exponent at
// which a nonzero term could live, counting both stored terms and unknown
// regions. kind: 0 none, 1 finite, 2 unbounded.
struct PEdge {
    int kind;
    long long v;
};

PEdge poss_lo(const LaurentSeries& x) {
    const Window& w = x.window();
    if (w.is_empty() || w.lo) return {2, 0};
    bool have = false;
    long long best = 0;
    if (!x.stored_zero()) {
        best = x.lo_exp();
        have = true;
    }
    if (w.hi) {
        long long c = *w.hi + 1;
        best = have ? std::min(best, c) : c;
        have = true;
    }
    return have ? PEdge{1, best} : PEdge{0, 0};
}

PEdge poss_hi(const LaurentSeries& x) {
    const Window& w = x.window();
    if (w.is_empty() || w.hi) return {2, 0};
    bool have = false;
    long long best = 0;
    if (!x.stored_zero()) {
        best = x.hi_exp();
        have = true;
    }
    if (w.lo) {
        long long c = *w.lo - 1;
        best = have ? std::max(best, c) : c;
        have = true;
    }
    return have ? PEdge{1, best} : PEdge{0, 0};
}

} // namespace

ExtRat TailBound::at(const Rat& s) const {
    if (!covers(s)) throw robba::error("tail bound queried outside its anchor interval");
    if (b_lo.is_inf() && b_hi.is_inf()) return ExtRat::infinity();
    if (b_lo.is_inf() || b_hi.is_inf()) {
        // Degenerate mix; fall back to the weaker constant bound.
        return b_lo.is_inf() ? b_hi : b_lo;
    }
    if (s == s_lo) return b_lo;
    if (s == s_hi) return b_hi;
    Rat t = (s - s_lo) / (s_hi - s_lo);
    Rat v = b_lo.finite() + (b_hi.finite() - b_lo.finite()) * t;
    v.canonicalize();
    return ExtRat(v);
}

std::optional<TailBound> TailBound::restricted(const Rat& lo, const Rat& hi) const {
    if (!covers(lo) || !covers(hi) || hi < lo) return std::nullopt;
    return TailBound{lo, hi, at(lo), at(hi)};
}

LaurentSeries::LaurentSeries(FieldPtr field) : field_(std::move(field)) {
    if (!field_) throw robba::error("series requires a coefficient field");
}

LaurentSeries::LaurentSeries(FieldPtr field, std::map<long long, FieldElem> terms, bool exact,
                             Window window, std::optional<TailBound> tail)
    : field_(std::move(field)),
      terms_(std::move(terms)),
      exact_(exact),
      window_(window),
      tail_(std::move(tail)) {
    if (!field_) throw robba::error("series requires a coefficient field");
    normalize();
}

LaurentSeries LaurentSeries::make(FieldPtr field, std::map<long long, FieldElem> terms, bool exact,
                                  Window window, std::optional<TailBound> tail) {
    return LaurentSeries(std::move(field), std::move(terms), exact, window, std::move(tail));
}

LaurentSeries LaurentSeries::monomial(const FieldPtr& field, const FieldElem& c, long long e) {
    std::map<long long, FieldElem> m;
    if (!c.is_zero()) m.emplace(e, c);
    return make(field, std::move(m));
}

LaurentSeries LaurentSeries::constant(const FieldPtr& field, const Rat& c) {
    return monomial(field, field->rational(c), 0);
}

void LaurentSeries::normalize() {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->second.is_zero())
            it = terms_.erase(it);
        else
            ++it;
    }
    if (exact_) {
        window_ = Window::all();
        tail_.reset();
        return;
    }
    if (window_.is_all())
        throw robba::error("internal: truncated series with a fully known window");
    if (!terms_.empty()) {
        if (window_.is_empty() || !window_.contains(lo_exp()) || !window_.contains(hi_exp()))
            throw robba::error("internal: stored term outside the known window");
    }
    if (tail_ && tail_->s_hi < tail_->s_lo)
        throw robba::error("internal: tail bound with misordered anchors");
}

FieldElem LaurentSeries::coeff(long long e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? field_->zero() : it->second;
}

LaurentSeries LaurentSeries::operator-() const {
    std::map<long long, FieldElem> m;
    for (const auto& [e, c] : terms_) m.emplace(e, -c);
    return LaurentSeries(field_, std::move(m), exact_, window_, tail_);
}

LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
    require_same_field(a, b);
    if (a.stored_zero() && a.exact_) return b;
    if (b.stored_zero() && b.exact_) return a;
    std::map<long long, FieldElem> m = a.terms_;
    for (const auto& [e, c] : b.terms_) {
        auto it = m.find(e);
        if (it == m.end()) {
            m.emplace(e, c);
        } else {
            FieldElem s = it->second + c;
            if (s.is_zero())
                m.erase(it);
            else
                it->second = s;
        }
    }
    if (a.exact_ && b.exact_) return LaurentSeries::make(a.field_, std::move(m));

    Window w = a.window_.intersect(b.window_);
    auto anchors = combine_anchors(a, b);
    ExtRat drop_lo = ExtRat::infinity(), drop_hi = ExtRat::infinity();
    for (auto it = m.begin(); it != m.end();) {
        if (!w.contains(it->first)) {
            if (anchors) {
                ExtRat llo = term_lambda(it->second, it->first, anchors->lo);
                ExtRat lhi = term_lambda(it->second, it->first, anchors->hi);
                if (llo < drop_lo) drop_lo = llo;
                if (lhi < drop_hi) drop_hi = lhi;
            }
            it = m.erase(it);
        } else {
            ++it;
        }
    }
    std::optional<TailBound> tb;
    if (anchors) {
        ExtRat blo = min(min(bound_at(a, anchors->lo), bound_at(b, anchors->lo)), drop_lo);
        ExtRat bhi = min(min(bound_at(a, anchors->hi), bound_at(b, anchors->hi)), drop_hi);
        tb = TailBound{anchors->lo, anchors->hi, blo, bhi};
    }
    return LaurentSeries::make(a.field_, std::move(m), false, w, tb);
}

LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return a + (-b); }

LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    require_same_field(a, b);
    if ((a.stored_zero() && a.exact_) || (b.stored_zero() && b.exact_))
        return LaurentSeries(a.field_);

    std::map<long long, FieldElem> m;
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            FieldElem prod = ca * cb;
            long long e = ea + eb;
            auto it = m.find(e);
            if (it == m.end())
                m.emplace(e, std::move(prod));
            else
                it->second = it->second + prod;
        }
    }
    for (auto it = m.begin(); it != m.end();) {
        if (it->second.is_zero())
            it = m.erase(it);
        else
            ++it;
    }
    if (a.exact_ && b.exact_) return LaurentSeries::make(a.field_, std::move(m));

    // Known window of the product: an exponent is known only if no pairing of
    // an unknown region of one factor with possible support of the other can
    // reach it.
    bool dead = false;
    std::optional<long long> klo, khi;
    auto up_taint = [&](const URay& r, const PEdge& p) {
        if (!r.exists || p.kind == 0) return;
        if (r.unbounded || p.kind == 2) {
            dead = true;
            return;
        }
        long long cap = r.edge + p.v - 1;
        if (!khi || cap < *khi) khi = cap;
    };
    auto down_taint = [&](const URay& r, const PEdge& p) {
        if (!r.exists || p.kind == 0) return;
        if (r.unbounded || p.kind == 2) {
            dead = true;
            return;
        }
        long long cap = r.edge + p.v + 1;
        if (!klo || cap > *klo) klo = cap;
    };
    up_taint(unknown_above(a), poss_lo(b));
    up_taint(unknown_above(b), poss_lo(a));
    down_taint(unknown_below(a), poss_hi(b));
    down_taint(unknown_below(b), poss_hi(a));
    Window w = dead ? Window::none() : Window{klo, khi};
    if (w.is_empty()) w = Window::none();

    auto anchors = combine_anchors(a, b);
    ExtRat drop_lo = ExtRat::infinity(), drop_hi = ExtRat::infinity();
    for (auto it = m.begin(); it != m.end();) {
        if (!w.contains(it->first)) {
            if (anchors) {
                ExtRat llo = term_lambda(it->second, it->first, anchors->lo);
                ExtRat lhi = term_lambda(it->second, it->first, anchors->hi);
                if (llo < drop_lo) drop_lo = llo;
                if (lhi < drop_hi) drop_hi = lhi;
            }
            it = m.erase(it);
        } else {
            ++it;
        }
    }
    std::optional<TailBound> tb;
    if (anchors) {
        auto at = [&](const Rat& s, const ExtRat& dropped) {
            ExtRat sa = stored_min(a.terms_, s), sb = stored_min(b.terms_, s);
            ExtRat ba = bound_at(a, s), bb = bound_at(b, s);
            ExtRat r = min(sa + bb, sb + ba);
            r = min(r, ba + bb);
            r = min(r, dropped);
            return r;
        };
        tb = TailBound{anchors->lo, anchors->hi, at(anchors->lo, drop_lo), at(anchors->hi, drop_hi)};
    }
    return LaurentSeries::make(a.field_, std::move(m), false, w, tb);
}

bool operator==(const LaurentSeries& a, const LaurentSeries& b) {
    if (!a.field_->same(*b.field_)) return false;
    if (a.exact_ != b.exact_) return false;
    if (a.terms_.size() != b.terms_.size()) return false;
    auto ia = a.terms_.begin();
    auto ib = b.terms_.begin();
    for (; ia != a.terms_.end(); ++ia, ++ib) {
        if (ia->first != ib->first || ia->second != ib->second) return false;
    }
    return true;
}

LaurentSeries LaurentSeries::scaled(const FieldElem& c) const {
    if (c.is_zero()) return LaurentSeries(field_);
    std::map<long long, FieldElem> m;
    for (const auto& [e, x] : terms_) m.emplace(e, x * c);
    std::optional<TailBound> tb = tail_;
    if (tb) {
        ExtRat vc = c.valuation();
        tb->b_lo = tb->b_lo + vc;
        tb->b_hi = tb->b_hi + vc;
    }
    return LaurentSeries(field_, std::move(m), exact_, window_, std::move(tb));
}

LaurentSeries LaurentSeries::shifted(long long d) const {
    std::map<long long, FieldElem> m;
    for (const auto& [e, c] : terms_) m.emplace(e + d, c);
    std::optional<TailBound> tb = tail_;
    if (tb) {
        tb->b_lo = tb->b_lo + times_exp(tb->s_lo, d);
        tb->b_hi = tb->b_hi + times_exp(tb->s_hi, d);
    }
    return LaurentSeries(field_, std::move(m), exact_, window_.shifted(d), std::move(tb));
}

LaurentSeries LaurentSeries::derivative() const {
    std::map<long long, FieldElem> m;
    for (const auto& [e, c] : terms_) {
        if (e == 0) continue;
        m.emplace(e - 1, c * field_->integer(static_cast<long>(e)));
    }
    // An unknown term c t^e maps to e c t^{e-1}: lambda drops by at most s.
    std::optional<TailBound> tb = tail_;
    if (tb) {
        tb->b_lo = tb->b_lo - tb->s_lo;
        tb->b_hi = tb->b_hi - tb->s_hi;
    }
    return LaurentSeries(field_, std::move(m), exact_, window_.shifted(-1), std::move(tb));
}

LaurentSeries LaurentSeries::theta() const {
    std::map<long long, FieldElem> m;
    for (const auto& [e, c] : terms_) {
        if (e == 0) continue;
        m.emplace(e, c * field_->integer(static_cast<long>(e)));
    }
    // v(e) >= 0, so existing tail bounds remain valid.
    return LaurentSeries(field_, std::move(m), exact_, window_, tail_);
}

FieldElem LaurentSeries::residue() const {
    if (!exact_ && !window_.contains(-1))
        throw precision_error("truncated series does not determine the residue");
    return coeff(-1);
}

LaurentSeries LaurentSeries::substitute_power(long long n) const {
    if (n < 1) throw precondition_error("substitution exponent must be a positive integer");
    std::map<long long, FieldElem> m;
    for (const auto& [e, c] : terms_) m.emplace(e * n, c);
    std::optional<TailBound> tb = tail_;
    if (tb) {
        Rat nl = tb->s_lo / static_cast<long>(n);
        Rat nh = tb->s_hi / static_cast<long>(n);
        nl.canonicalize();
        nh.canonicalize();
        tb->s_lo = nl;
        tb->s_hi = nh;
    }
    return LaurentSeries(field_, std::move(m), exact_, window_.scaled(n), std::move(tb));
}

LaurentSeries LaurentSeries::frobenius_twist() const {
    LaurentSeries r = substitute_power(field_->prime());
    std::map<long long, FieldElem> m;
    for (const auto& [e, c] : r.terms_) m.emplace(e, field_->frobenius(c));
    return LaurentSeries(field_, std::move(m), r.exact_, r.window_, std::move(r.tail_));
}

GaussValue LaurentSeries::gauss(const Rat& s) const {
    ExtRat m = stored_min(terms_, s);
    if (exact_) return {m, true};
    if (tail_ && tail_->covers(s) && tail_->at(s) >= m) return {m, true};
    return {m, false};
}

std::optional<ExtRat> LaurentSeries::certified_lambda(const Rat& s) const {
    ExtRat m = stored_min(terms_, s);
    if (exact_) return m;
    if (tail_ && tail_->covers(s)) return min(m, tail_->at(s));
    return std::nullopt;
}

LaurentSeries LaurentSeries::truncated(const Window& keep, const Rat& s_lo_in, const Rat& s_hi_in) const {
    Rat s_lo = s_lo_in, s_hi = s_hi_in;
    order_anchors(s_lo, s_hi);
    if (exact_) {
        bool all_in = true;
        for (const auto& [e, c] : terms_) {
            if (!keep.contains(e)) {
                all_in = false;
                break;
            }
        }
        if (all_in) return *this;
    }
    std::map<long long, FieldElem> kept;
    ExtRat drop_lo = ExtRat::infinity(), drop_hi = ExtRat::infinity();
    for (const auto& [e, c] : terms_) {
        if (keep.contains(e)) {
            kept.emplace(e, c);
        } else {
            ExtRat llo = term_lambda(c, e, s_lo);
            ExtRat lhi = term_lambda(c, e, s_hi);
            if (llo < drop_lo) drop_lo = llo;
            if (lhi < drop_hi) drop_hi = lhi;
        }
    }
    Window w = window_.intersect(keep);
    std::optional<TailBound> tb;
    if (exact_) {
        tb = TailBound{s_lo, s_hi, drop_lo, drop_hi};
    } else if (tail_) {
        auto r = tail_->restricted(s_lo, s_hi);
        if (r) tb = TailBound{s_lo, s_hi, min(r->b_lo, drop_lo), min(r->b_hi, drop_hi)};
    }
    return LaurentSeries(field_, std::move(kept), false, w, std::move(tb));
}

LaurentSeries LaurentSeries::pruned(const ExtRat& threshold, const Rat& s_lo_in, const Rat& s_hi_in) const {
    Rat s_lo = s_lo_in, s_hi = s_hi_in;
    order_anchors(s_lo, s_hi);
    bool have_keep = false;
    long long keep_lo = 0, keep_hi = 0;
    for (const auto& [e, c] : terms_) {
        if (term_lambda(c, e, s_lo) < threshold || term_lambda(c, e, s_hi) < threshold) {
            if (!have_keep) {
                keep_lo = keep_hi = e;
                have_keep = true;
            } else {
                keep_lo = std::min(keep_lo, e);
                keep_hi = std::max(keep_hi, e);
            }
        }
    }
    if (have_keep && keep_lo == (terms_.empty() ? 0 : lo_exp()) && keep_hi == hi_exp())
        return *this; // nothing outside the kept hull

    std::map<long long, FieldElem> kept;
    ExtRat drop_lo = ExtRat::infinity(), drop_hi = ExtRat::infinity();
    bool dropped_below = false, dropped_above = false;
    long long max_below = 0, min_above = 0, min_drop = 0, max_drop = 0;
    bool any_drop = false;
    for (const auto& [e, c] : terms_) {
        bool inside = have_keep && e >= keep_lo && e <= keep_hi;
        if (inside) {
            kept.emplace(e, c);
            continue;
        }
        ExtRat llo = term_lambda(c, e, s_lo);
        ExtRat lhi = term_lambda(c, e, s_hi);
        if (llo < drop_lo) drop_lo = llo;
        if (lhi < drop_hi) drop_hi = lhi;
        if (!any_drop) {
            min_drop = max_drop = e;
            any_drop = true;
        } else {
            min_drop = std::min(min_drop, e);
            max_drop = std::max(max_drop, e);
        }
        if (have_keep && e < keep_lo) {
            max_below = dropped_below ? std::max(max_below, e) : e;
            dropped_below = true;
        }
        if (have_keep && e > keep_hi) {
            min_above = dropped_above ? std::min(min_above, e) : e;
            dropped_above = true;
        }
    }
    if (!any_drop) return *this;

    // Knowledge is lost only at the dropped exponents; keep the largest
    // subinterval of the old window that avoids them.
    Window w;
    if (have_keep) {
        w = window_;
        if (dropped_below) w.lo = max_below + 1;
        if (dropped_above) w.hi = min_above - 1;
        w = w.intersect(window_);
    } else if (!window_.lo) {
        w = window_.intersect(Window::at_most(min_drop - 1));
    } else if (!window_.hi) {
        w = window_.intersect(Window::at_least(max_drop + 1));
    } else {
        w = Window::none();
    }
    std::optional<TailBound> tb;
    if (exact_) {
        tb = TailBound{s_lo, s_hi, drop_lo, drop_hi};
    } else if (tail_) {
        auto r = tail_->restricted(s_lo, s_hi);
        if (r) tb = TailBound{s_lo, s_hi, min(r->b_lo, drop_lo), min(r->b_hi, drop_hi)};
    }
    return LaurentSeries(field_, std::move(kept), false, w, std::move(tb));
}

LaurentSeries LaurentSeries::as_exact_polynomial() const {
    return LaurentSeries(field_, terms_, true, Window::all(), std::nullopt);
}

LaurentSeries invert(const LaurentSeries& x, const Rat& s_lo_in, const Rat& s_hi_in, long long order,
                     const std::optional<Rat>& tail_target) {
    Rat s_lo = s_lo_in, s_hi = s_hi_in;
    order_anchors(s_lo, s_hi);
    if (order < 0) order = 0;
    if (x.stored_zero()) throw precondition_error("series has no dominant term to invert");
    const FieldPtr& field = x.field();

    // Candidate dominant exponent: argmin of the stored Gauss terms at s_lo.
    long long d = x.lo_exp();
    {
        ExtRat best = ExtRat::infinity();
        for (const auto& [e, c] : x.terms()) {
            ExtRat v = term_lambda(c, e, s_lo);
            if (v < best) {
                best = v;
                d = e;
            }
        }
    }
    FieldElem cd_inv = x.coeff(d).inverse();
    LaurentSeries m = LaurentSeries::monomial(field, cd_inv, -d);
    if (x.exact() && x.terms().size() == 1) return m;

    LaurentSeries one = LaurentSeries::constant(field, Rat(1));
    LaurentSeries y = x * m - one;

    auto gap = [&](const Rat& s) {
        auto g = y.certified_lambda(s);
        if (!g) throw precondition_error("inversion requires a tail certificate covering the window");
        if (!(*g > ExtRat(Rat(0))))
            throw precondition_error("no strictly dominant term on the requested window");
        return *g;
    };
    ExtRat gy_lo = gap(s_lo), gy_hi = gap(s_hi);

    // One-sided y never maps an exponent back across the completed range, so
    // the powers can be truncated as they accumulate; what is dropped flows
    // into the tail bound the same way the final truncation does.
    PEdge ylo = poss_lo(y), yhi = poss_hi(y);
    Window cap = Window::all();
    if (ylo.kind == 1 && ylo.v >= 0)
        cap = Window::at_most((order + 1) * ylo.v - 1);
    else if (yhi.kind == 1 && yhi.v <= 0)
        cap = Window::at_least((order + 1) * yhi.v + 1);

    LaurentSeries acc = one;
    LaurentSeries pw = one;
    long long k_done = order;
    for (long long k = 1; k <= order; ++k) {
        pw = (pw * y).truncated(cap, s_lo, s_hi);
        acc = (k % 2) ? acc - pw : acc + pw;
        if (tail_target &&
            emul(min(gy_lo, gy_hi), Rat(static_cast<long>(k + 1))) >= ExtRat(*tail_target)) {
            k_done = k;
            break;
        }
    }
    LaurentSeries r0 = m * acc;

    // Exponents reachable by the discarded remainder sum_{k>k_done} (-y)^k.
    Window extra;
    if (ylo.kind == 0) {
        throw robba::error("internal: inversion of an exact monomial reached the series path");
    } else if (ylo.kind == 1 && ylo.v >= 0) {
        extra = Window::at_most(-d + (k_done + 1) * ylo.v - 1);
    } else if (yhi.kind == 1 && yhi.v <= 0) {
        extra = Window::at_least(-d + (k_done + 1) * yhi.v + 1);
    } else {
        extra = Window::none();
    }
    LaurentSeries r1 = r0.truncated(extra, s_lo, s_hi);

    ExtRat lam_m_lo = term_lambda(cd_inv, -d, s_lo);
    ExtRat lam_m_hi = term_lambda(cd_inv, -d, s_hi);
    ExtRat rem_lo = emul(gy_lo, Rat(static_cast<long>(k_done + 1))) + lam_m_lo;
    ExtRat rem_hi = emul(gy_hi, Rat(static_cast<long>(k_done + 1))) + lam_m_hi;
    ExtRat b_lo = rem_lo, b_hi = rem_hi;
    Window w = extra;
    if (!r1.exact()) {
        w = r1.window();
        if (r1.tail()) {
            b_lo = min(b_lo, r1.tail()->b_lo);
            b_hi = min(b_hi, r1.tail()->b_hi);
        } else {
            return LaurentSeries::make(field, r1.terms(), false, w, std::nullopt);
        }
    }
    return LaurentSeries::make(field, r1.terms(), false, w, TailBound{s_lo, s_hi, b_lo, b_hi});
}

namespace {

LaurentSeries horner(const std::vector<LaurentSeries>& coeffs, const LaurentSeries& z) {
    LaurentSeries acc = coeffs.back();
    for (auto it = coeffs.rbegin() + 1; it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

} // namespace

HenselResult hensel_lift(const std::vector<LaurentSeries>& P, long long order,
                         const Rat& s_lo_in, const Rat& s_hi_in) {
    Rat s_lo = s_lo_in, s_hi = s_hi_in;
    order_anchors(s_lo, s_hi);
    if (order < 1) throw precondition_error("lifting order must be positive");
    if (P.size() < 2) throw precondition_error("polynomial must have degree at least one");
    const size_t n = P.size() - 1;
    const FieldPtr& field = P[0].field();
    for (const auto& c : P) {
        if (!c.field()->same(*field))
            throw precondition_error("polynomial coefficients live in different fields");
    }
    LaurentSeries one = LaurentSeries::constant(field, Rat(1));
    if (!(P[n] == one)) throw precondition_error("polynomial must be monic");

    auto cert = [&](const LaurentSeries& c, const Rat& s) {
        auto v = c.certified_lambda(s);
        if (!v) throw precondition_error("coefficient carries no certificate on the window");
        return *v;
    };
    ExtRat mu = ExtRat::infinity();
    for (size_t i = 0; i + 2 <= n; ++i) {
        mu = min(mu, cert(P[i], s_lo));
        mu = min(mu, cert(P[i], s_hi));
    }
    LaurentSeries shifted_cn1 = P[n - 1] + one;
    mu = min(mu, cert(shifted_cn1, s_lo));
    mu = min(mu, cert(shifted_cn1, s_hi));
    if (!(mu > ExtRat(Rat(0))))
        throw precondition_error("reduction is not X^{n-1}(X-1): hypothesis margin is not positive");

    ExtRat target = mu.is_inf() ? ExtRat::infinity()
                                : ExtRat(Rat(static_cast<long>(order)) * mu.finite());
    ExtRat prune_at = target.is_inf() ? ExtRat::infinity() : ExtRat(target.finite() * 2 + 2);

    std::vector<LaurentSeries> dP;
    dP.reserve(n);
    for (size_t i = 1; i <= n; ++i) dP.push_back(P[i].scaled(field->integer(static_cast<long>(i))));

    LaurentSeries z = one;
    LaurentSeries r = horner(P, z);
    auto residuals = [&](const LaurentSeries& rr) {
        auto a = rr.certified_lambda(s_lo);
        auto b = rr.certified_lambda(s_hi);
        if (!a || !b) throw precision_error("residual certificate was lost during iteration");
        return HenselStep{*a, *b};
    };
    std::vector<HenselStep> steps;
    steps.push_back(residuals(r));
    auto met = [&](const HenselStep& st) {
        auto ok = [&](const ExtRat& v) { return v.is_inf() || v > target; };
        return ok(st.residual_lo) && ok(st.residual_hi);
    };

    long long k = 16;
    int iter = 0;
    while (!met(steps.back())) {
        if (++iter > 64) throw precision_error("lifting iteration failed to converge");
        LaurentSeries pd = horner(dP, z);
        LaurentSeries q(field);
        try {
            q = invert(pd, s_lo, s_hi, k);
        } catch (const precondition_error& e) {
            throw precision_error(std::string("derivative lost invertibility: ") + e.what());
        }
        // The candidate is its stored polynomial: residuals of an exact
        // candidate are exact, so the certificate can grow quadratically
        // instead of being capped by the previous step's tail bound.
        LaurentSeries z2 = z - r * q;
        if (!prune_at.is_inf()) z2 = z2.pruned(prune_at, s_lo, s_hi);
        z2 = z2.as_exact_polynomial();
        LaurentSeries r2 = horner(P, z2);
        if (!prune_at.is_inf()) r2 = r2.pruned(prune_at, s_lo, s_hi);
        HenselStep st = residuals(r2);
        ExtRat new_min = min(st.residual_lo, st.residual_hi);
        ExtRat old_min = min(steps.back().residual_lo, steps.back().residual_hi);
        if (new_min.is_inf() || new_min > old_min) {
            z = std::move(z2);
            r = std::move(r2);
            steps.push_back(st);
            if (k < 8192) k *= 2;
        } else {
            k *= 2;
            if (k > 8192) throw precision_error("residual stopped improving");
        }
    }
    return HenselResult{std::move(z), std::move(steps),
                        mu.is_inf() ? Rat(0) : mu.finite()};
}

} // namespace robba
