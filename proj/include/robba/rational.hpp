#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <string>
#include <utility>

#include "robba/errors.hpp"

namespace robba {

using Rat = mpq_class;
using Int = mpz_class;

// Extended rational: a finite exact rational or +infinity. Valuations and
// Gauss values live here; the zero element has value +infinity. There is no
// -infinity and no inf - inf: the operations below are total on the values
// the library actually produces.
class ExtRat {
public:
    ExtRat() : v_(0) {}
    ExtRat(Rat v) : v_(std::move(v)) {}
    ExtRat(long v) : v_(v) {}
    ExtRat(int v) : v_(v) {}

    static ExtRat infinity() {
        ExtRat e;
        e.inf_ = true;
        return e;
    }

    bool is_inf() const { return inf_; }

    const Rat& finite() const {
        if (inf_) throw error("expected a finite extended rational");
        return v_;
    }

    friend bool operator==(const ExtRat& a, const ExtRat& b) {
        if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
        return a.v_ == b.v_;
    }
    friend bool operator!=(const ExtRat& a, const ExtRat& b) { return !(a == b); }
    friend bool operator<(const ExtRat& a, const ExtRat& b) {
        if (a.inf_) return false;
        if (b.inf_) return true;
        return a.v_ < b.v_;
    }
    friend bool operator>(const ExtRat& a, const ExtRat& b) { return b < a; }
    friend bool operator<=(const ExtRat& a, const ExtRat& b) { return !(b < a); }
    friend bool operator>=(const ExtRat& a, const ExtRat& b) { return !(a < b); }

    friend ExtRat operator+(const ExtRat& a, const ExtRat& b) {
        if (a.inf_ || b.inf_) return infinity();
        return ExtRat(Rat(a.v_ + b.v_));
    }
    friend ExtRat operator+(const ExtRat& a, const Rat& b) {
        if (a.inf_) return infinity();
        return ExtRat(Rat(a.v_ + b));
    }
    friend ExtRat operator-(const ExtRat& a, const Rat& b) {
        if (a.inf_) return infinity();
        return ExtRat(Rat(a.v_ - b));
    }
    // Division by a positive integer; infinity is absorbing.
    ExtRat div(long n) const {
        if (n <= 0) throw error("ExtRat::div expects a positive divisor");
        if (inf_) return infinity();
        return ExtRat(Rat(v_ / n));
    }

private:
    bool inf_ = false;
    Rat v_;
};

inline const ExtRat& min(const ExtRat& a, const ExtRat& b) { return b < a ? b : a; }
inline const ExtRat& max(const ExtRat& a, const ExtRat& b) { return a < b ? b : a; }

// Canonical "num/den" (or plain "num") rendering.
inline std::string rat_str(const Rat& q) {
    Rat c = q;
    c.canonicalize();
    return c.get_str();
}

inline std::string ext_str(const ExtRat& x) {
    return x.is_inf() ? std::string("inf") : rat_str(x.finite());
}

// Parse "num" or "num/den" with an optional leading minus. Anything else,
// including a zero denominator, is a parse_error.
inline Rat parse_rat(const std::string& text) {
    if (text.empty()) throw parse_error("empty rational literal");
    std::size_t i = 0;
    auto scan_int = [&](bool allow_sign) {
        if (allow_sign && i < text.size() && text[i] == '-') ++i;
        std::size_t start = i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
        if (i == start) throw parse_error("bad rational literal: " + text);
    };
    scan_int(true);
    if (i < text.size()) {
        if (text[i] != '/') throw parse_error("bad rational literal: " + text);
        ++i;
        scan_int(false);
        if (i != text.size()) throw parse_error("bad rational literal: " + text);
    }
    Rat q;
    if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
        throw parse_error("bad rational literal: " + text);
    if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0)
        throw parse_error("zero denominator: " + text);
    q.canonicalize();
    return q;
}

inline Rat rat_of(long num, long den = 1) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// p-adic valuation of a nonzero integer.
inline long vp_int(const Int& z, unsigned long p) {
    if (z == 0) throw error("vp of zero");
    Int quotient;
    return static_cast<long>(mpz_remove(quotient.get_mpz_t(), z.get_mpz_t(), Int(p).get_mpz_t()));
}

// p-adic valuation of a nonzero rational (an integer, possibly negative).
inline long vp_rat(const Rat& q, unsigned long p) {
    if (q == 0) throw error("vp of zero");
    long n = (mpz_cmpabs_ui(mpq_numref(q.get_mpq_t()), 1) == 0) ? 0 : vp_int(Int(q.get_num()), p);
    long d = (mpz_cmpabs_ui(mpq_denref(q.get_mpq_t()), 1) == 0) ? 0 : vp_int(Int(q.get_den()), p);
    return n - d;
}

// v_p(m!) by Legendre's formula.
inline long factorial_vp(unsigned long m, unsigned long p) {
    long total = 0;
    for (unsigned long q = p; q <= m; ) {
        total += static_cast<long>(m / q);
        if (q > m / p) break; // next power would overflow past m anyway
        q *= p;
    }
    return total;
}

} // namespace robba
