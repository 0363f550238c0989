#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "robba/rational.hpp"

namespace robba {

class CoeffField;
using FieldPtr = std::shared_ptr<const CoeffField>;

// Element of a coefficient field, stored as a polynomial representative of
// degree < [K:Q] in the field's generator. Arithmetic reduces modulo the
// minimal polynomial; everything is exact.
class FieldElem {
public:
    FieldElem(FieldPtr field, std::vector<Rat> coeffs);

    const FieldPtr& field() const { return field_; }
    // Always exactly [K:Q] entries, index i = coefficient of generator^i.
    const std::vector<Rat>& coeffs() const { return c_; }

    bool is_zero() const;
    // True when the element lies in Q (all generator coefficients vanish).
    bool is_rational() const;
    const Rat& rational_part() const { return c_[0]; }

    ExtRat valuation() const;

    FieldElem operator-() const;
    friend FieldElem operator+(const FieldElem& a, const FieldElem& b);
    friend FieldElem operator-(const FieldElem& a, const FieldElem& b);
    friend FieldElem operator*(const FieldElem& a, const FieldElem& b);
    FieldElem inverse() const; // zero -> error
    FieldElem pow(unsigned long n) const;
    friend bool operator==(const FieldElem& a, const FieldElem& b);
    friend bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }

private:
    FieldPtr field_;
    std::vector<Rat> c_;
};

// An exact coefficient field: either Q or a monogenic totally ramified
// extension Q[x]/(f) with f monic and either Eisenstein at p or the p-th
// cyclotomic polynomial. The valuation is normalized by v(p) = 1 and computed
// on elements as v_p(Norm)/degree, the norm being a resultant with f.
class CoeffField : public std::enable_shared_from_this<CoeffField> {
public:
    enum class Kind { Rational, Extension };

    static FieldPtr rationals(unsigned long p);
    // minpoly: coefficient i of x^i, monic, degree >= 2. Must be Eisenstein
    // at p or equal to the p-th cyclotomic polynomial.
    static FieldPtr extension(unsigned long p, std::vector<Rat> minpoly);
    static FieldPtr cyclotomic(unsigned long p);

    unsigned long prime() const { return p_; }
    Kind kind() const { return kind_; }
    std::size_t degree() const { return degree_; }
    // Ramification index e; both accepted extension kinds are totally
    // ramified, so e = degree.
    std::size_t ram_index() const { return degree_; }
    const std::vector<Rat>& minpoly() const { return minpoly_; }
    bool is_cyclotomic() const { return cyclo_; }

    FieldElem zero() const;
    FieldElem one() const;
    FieldElem integer(long v) const;
    FieldElem rational(const Rat& v) const;
    // Pads or rejects: coeffs.size() must be <= degree.
    FieldElem element(std::vector<Rat> coeffs) const;
    FieldElem generator() const; // requires degree > 1
    FieldElem uniformizer() const;

    // A primitive p-th root of unity, when the field has one: -1 for p = 2,
    // the generator of a cyclotomic extension otherwise.
    bool has_zeta() const;
    FieldElem zeta() const;

    // An element pi with pi^(p-1) = -p, used by wildly ramified rank-1
    // constructions: -2 for p = 2, the generator of Q[x]/(x^(p-1) + p), or
    // 2*zeta + 1 in the 3rd cyclotomic field. Verified on construction.
    bool has_wild_pi() const;
    FieldElem wild_pi() const;

    // Coefficient Frobenius descriptor. Totally ramified extensions of Q_p
    // have residue field F_p, where the p-power map is the identity, so the
    // designated lift is the identity.
    FieldElem frobenius(const FieldElem& x) const { return x; }

    bool same(const CoeffField& o) const;
    std::string describe() const;

private:
    CoeffField(unsigned long p, Kind kind, std::vector<Rat> minpoly, bool cyclo);

    unsigned long p_;
    Kind kind_;
    std::size_t degree_;
    std::vector<Rat> minpoly_;
    bool cyclo_;
};

} // namespace robba
