#include "robba/field.hpp"

#include <algorithm>
#include <sstream>

namespace robba {
namespace {

using Poly = std::vector<Rat>; // coefficient i of x^i; may carry trailing zeros

void trim(Poly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

long deg(const Poly& f) { return static_cast<long>(f.size()) - 1; }

Poly mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

Poly sub(Poly a, const Poly& b) {
    if (a.size() < b.size()) a.resize(b.size(), Rat(0));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    trim(a);
    return a;
}

// Remainder of a by b, b nonzero.
Poly rem(Poly a, const Poly& b) {
    trim(a);
    while (deg(a) >= deg(b)) {
        Rat factor = a.back() / b.back();
        long shift = deg(a) - deg(b);
        for (std::size_t i = 0; i < b.size(); ++i)
            a[i + shift] -= factor * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

// Resultant of f and g over Q via the Euclidean recursion. f is monic in all
// uses here; only the p-adic valuation of the result is consumed, but the
// value is exact anyway.
Rat resultant(Poly f, Poly g) {
    trim(f);
    trim(g);
    Rat acc(1);
    bool negate = false;
    while (true) {
        if (g.empty()) return Rat(0);
        if (deg(g) == 0) {
            Rat r = acc;
            if (negate) r = -r;
            // g constant: Res(f, c) = c^deg f
            Rat c(1);
            for (long i = 0; i < deg(f); ++i) c *= g[0];
            return r * c;
        }
        Poly r = rem(f, g);
        long df = deg(f), dg = deg(g), dr = deg(r); // dr = -1 for zero remainder
        // Res(f, g) = lc(g)^(df - dr) * (-1)^(df*dg) * Res(g, r)
        Rat lc = g.back();
        for (long i = 0; i < df - (r.empty() ? 0 : dr); ++i) acc *= lc;
        if ((df % 2) && (dg % 2)) negate = !negate;
        if (r.empty()) return Rat(0);
        f = std::move(g);
        g = std::move(r);
    }
}

// Extended Euclid: returns u with u*a = gcd (mod m), for a nonzero mod m
// irreducible, so the gcd is a nonzero constant and u/gcd inverts a.
Poly invert_mod(const Poly& a, const Poly& m) {
    Poly r0 = m, r1 = a;
    trim(r1);
    Poly u0 = {}, u1 = {Rat(1)};
    while (deg(r1) > 0) {
        // divide r0 by r1
        Poly q;
        Poly rr = r0;
        trim(rr);
        if (deg(rr) >= deg(r1)) {
            q.assign(static_cast<std::size_t>(deg(rr) - deg(r1)) + 1, Rat(0));
            while (deg(rr) >= deg(r1)) {
                Rat factor = rr.back() / r1.back();
                long shift = deg(rr) - deg(r1);
                q[static_cast<std::size_t>(shift)] = factor;
                for (std::size_t i = 0; i < r1.size(); ++i)
                    rr[i + static_cast<std::size_t>(shift)] -= factor * r1[i];
                rr.pop_back();
                trim(rr);
            }
        }
        Poly r2 = rr;
        Poly u2 = sub(u0, mul(q, u1));
        r0 = std::move(r1);
        r1 = std::move(r2);
        u0 = std::move(u1);
        u1 = std::move(u2);
    }
    if (r1.empty()) throw error("element is not invertible modulo the minimal polynomial");
    // r1 is a nonzero constant: scale u1 by its inverse
    Rat inv = Rat(1) / r1[0];
    for (auto& c : u1) c *= inv;
    return u1;
}

bool is_prime(unsigned long n) {
    if (n < 2) return false;
    for (unsigned long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace

CoeffField::CoeffField(unsigned long p, Kind kind, std::vector<Rat> minpoly, bool cyclo)
    : p_(p), kind_(kind), minpoly_(std::move(minpoly)), cyclo_(cyclo) {
    degree_ = kind_ == Kind::Rational ? 1 : minpoly_.size() - 1;
}

FieldPtr CoeffField::rationals(unsigned long p) {
    if (!is_prime(p)) throw precondition_error("p must be prime");
    return FieldPtr(new CoeffField(p, Kind::Rational, {}, false));
}

FieldPtr CoeffField::cyclotomic(unsigned long p) {
    if (!is_prime(p)) throw precondition_error("p must be prime");
    if (p == 2) throw precondition_error("the 2nd cyclotomic field is Q; use rationals(2)");
    std::vector<Rat> phi(p, Rat(1)); // 1 + x + ... + x^(p-1)
    return extension(p, std::move(phi));
}

FieldPtr CoeffField::extension(unsigned long p, std::vector<Rat> minpoly) {
    if (!is_prime(p)) throw precondition_error("p must be prime");
    while (!minpoly.empty() && minpoly.back() == 0) minpoly.pop_back();
    if (minpoly.size() < 2)
        throw precondition_error("extension minimal polynomial must be nonconstant");
    for (auto& c : minpoly) c.canonicalize();
    if (minpoly.back() != 1)
        throw precondition_error("extension minimal polynomial must be monic");
    if (minpoly.size() == 2) {
        // x + a cuts out Q itself; accept the Eisenstein shape and hand back
        // the rational field so degree-1 inputs do not fork a separate kind.
        if (minpoly[0].get_den() != 1 || minpoly[0] == 0 || vp_rat(minpoly[0], p) != 1)
            throw precondition_error("degree-1 polynomial must have constant term of valuation 1");
        return rationals(p);
    }

    bool cyclo = minpoly.size() == p;
    if (cyclo)
        for (const auto& c : minpoly)
            if (c != 1) { cyclo = false; break; }

    if (!cyclo) {
        // Eisenstein at p: integer coefficients, p | c_i for i < deg, p^2 does
        // not divide c_0. Guarantees irreducibility and total ramification.
        for (const auto& c : minpoly)
            if (c.get_den() != 1)
                throw precondition_error("Eisenstein polynomial needs integer coefficients");
        Int pz(p);
        for (std::size_t i = 0; i + 1 < minpoly.size(); ++i)
            if (!mpz_divisible_p(minpoly[i].get_num().get_mpz_t(), pz.get_mpz_t()))
                throw precondition_error("polynomial is neither Eisenstein at p nor cyclotomic");
        if (minpoly[0] == 0 || vp_rat(minpoly[0], p) != 1)
            throw precondition_error("Eisenstein constant term must have valuation exactly 1");
    }

    FieldPtr k(new CoeffField(p, Kind::Extension, std::move(minpoly), cyclo));
    if (k->has_wild_pi() && k->degree() > 1 && k->prime() > 2) {
        // sanity: the designated pi really satisfies pi^(p-1) = -p
        FieldElem pi = k->wild_pi();
        if (pi.pow(p - 1) != k->integer(-static_cast<long>(p)))
            throw error("internal: wild pi verification failed");
    }
    return k;
}

FieldElem CoeffField::zero() const { return element({}); }
FieldElem CoeffField::one() const { return element({Rat(1)}); }
FieldElem CoeffField::integer(long v) const { return element({Rat(v)}); }
FieldElem CoeffField::rational(const Rat& v) const { return element({v}); }

FieldElem CoeffField::element(std::vector<Rat> coeffs) const {
    if (coeffs.size() > degree_)
        throw precondition_error("element has more coefficients than the field degree");
    coeffs.resize(degree_, Rat(0));
    for (auto& c : coeffs) c.canonicalize();
    return FieldElem(shared_from_this(), std::move(coeffs));
}

FieldElem CoeffField::generator() const {
    if (degree_ < 2) throw precondition_error("the rational field has no generator");
    std::vector<Rat> c(degree_, Rat(0));
    c[1] = 1;
    return FieldElem(shared_from_this(), std::move(c));
}

FieldElem CoeffField::uniformizer() const {
    if (kind_ == Kind::Rational) return integer(static_cast<long>(p_));
    if (cyclo_) {
        // 1 - zeta has valuation 1/(p-1)
        std::vector<Rat> c(degree_, Rat(0));
        c[0] = 1;
        c[1] = -1;
        return element(std::move(c));
    }
    return generator();
}

bool CoeffField::has_zeta() const { return p_ == 2 || cyclo_; }

FieldElem CoeffField::zeta() const {
    if (p_ == 2) return integer(-1);
    if (cyclo_) return generator();
    throw precondition_error("field has no primitive p-th root of unity");
}

bool CoeffField::has_wild_pi() const {
    if (p_ == 2) return true;
    if (kind_ != Kind::Extension) return false;
    if (cyclo_) return p_ == 3;
    // x^(p-1) + p exactly
    if (minpoly_.size() != p_) return false;
    if (minpoly_[0] != Rat(static_cast<long>(p_))) return false;
    for (std::size_t i = 1; i + 1 < minpoly_.size(); ++i)
        if (minpoly_[i] != 0) return false;
    return true;
}

FieldElem CoeffField::wild_pi() const {
    if (p_ == 2) return integer(-2);
    if (!has_wild_pi())
        throw precondition_error("field has no designated element with pi^(p-1) = -p");
    if (cyclo_) {
        // p = 3: (2*zeta + 1)^2 = -3
        std::vector<Rat> c(degree_, Rat(0));
        c[0] = 1;
        c[1] = 2;
        return element(std::move(c));
    }
    return generator();
}

bool CoeffField::same(const CoeffField& o) const {
    return p_ == o.p_ && kind_ == o.kind_ && minpoly_ == o.minpoly_;
}

std::string CoeffField::describe() const {
    std::ostringstream os;
    if (kind_ == Kind::Rational) {
        os << "Q (p=" << p_ << ")";
    } else {
        os << "Q[x]/(";
        bool first = true;
        for (std::size_t i = minpoly_.size(); i-- > 0; ) {
            if (minpoly_[i] == 0) continue;
            if (!first) os << " + ";
            os << rat_str(minpoly_[i]);
            if (i > 0) os << "*x^" << i;
            first = false;
        }
        os << ") (p=" << p_ << ")";
    }
    return os.str();
}

FieldElem::FieldElem(FieldPtr field, std::vector<Rat> coeffs) : field_(std::move(field)), c_(std::move(coeffs)) {
    if (c_.size() != field_->degree()) throw error("internal: element size mismatch");
}

bool FieldElem::is_zero() const {
    for (const auto& c : c_)
        if (c != 0) return false;
    return true;
}

bool FieldElem::is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

namespace {
void check_same_field(const FieldElem& a, const FieldElem& b) {
    if (!a.field()->same(*b.field()))
        throw precondition_error("elements belong to different fields");
}
} // namespace

FieldElem FieldElem::operator-() const {
    std::vector<Rat> r = c_;
    for (auto& c : r) c = -c;
    return FieldElem(field_, std::move(r));
}

FieldElem operator+(const FieldElem& a, const FieldElem& b) {
    check_same_field(a, b);
    std::vector<Rat> r = a.c_;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] += b.c_[i];
        r[i].canonicalize();
    }
    return FieldElem(a.field_, std::move(r));
}

FieldElem operator-(const FieldElem& a, const FieldElem& b) {
    check_same_field(a, b);
    std::vector<Rat> r = a.c_;
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] -= b.c_[i];
        r[i].canonicalize();
    }
    return FieldElem(a.field_, std::move(r));
}

FieldElem operator*(const FieldElem& a, const FieldElem& b) {
    check_same_field(a, b);
    const std::size_t d = a.field_->degree();
    if (d == 1) {
        Rat r = a.c_[0] * b.c_[0];
        r.canonicalize();
        return FieldElem(a.field_, {r});
    }
    Poly prod = mul(a.c_, b.c_);
    Poly red = rem(std::move(prod), a.field_->minpoly());
    red.resize(d, Rat(0));
    for (auto& c : red) c.canonicalize();
    return FieldElem(a.field_, std::move(red));
}

FieldElem FieldElem::inverse() const {
    if (is_zero()) throw precondition_error("division by zero");
    if (field_->degree() == 1) {
        Rat r = 1 / c_[0];
        r.canonicalize();
        return FieldElem(field_, {r});
    }
    Poly u = invert_mod(c_, field_->minpoly());
    u.resize(field_->degree(), Rat(0));
    for (auto& c : u) c.canonicalize();
    return FieldElem(field_, std::move(u));
}

FieldElem FieldElem::pow(unsigned long n) const {
    FieldElem acc = field_->one();
    FieldElem base = *this;
    while (n) {
        if (n & 1) acc = acc * base;
        base = base * base;
        n >>= 1;
    }
    return acc;
}

bool operator==(const FieldElem& a, const FieldElem& b) {
    if (!a.field()->same(*b.field())) return false;
    return a.c_ == b.c_;
}

ExtRat FieldElem::valuation() const {
    if (is_zero()) return ExtRat::infinity();
    const unsigned long p = field_->prime();
    if (field_->degree() == 1) return ExtRat(rat_of(vp_rat(c_[0], p)));
    // v(x) = v_p(Norm(x)) / [K:Q]; Norm(g(theta)) = Res(f, g) for monic f.
    Rat res = resultant(field_->minpoly(), c_);
    if (res == 0) throw error("internal: resultant vanished on a nonzero element");
    Rat v(vp_rat(res, p), static_cast<long>(field_->degree()));
    v.canonicalize();
    return ExtRat(v);
}

} // namespace robba
