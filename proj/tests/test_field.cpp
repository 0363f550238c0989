#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robba/field.hpp"

using namespace robba;

namespace {

// Small deterministic generator for property checks.
struct Lcg {
    unsigned long long state;
    explicit Lcg(unsigned long long seed) : state(seed) {}
    unsigned long long next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return state >> 33;
    }
    long small(long lo, long hi) {
        return lo + static_cast<long>(next() % static_cast<unsigned long long>(hi - lo + 1));
    }
};

} // namespace

TEST_CASE("rational field valuations") {
    auto q3 = CoeffField::rationals(3);
    CHECK(q3->integer(6).valuation() == ExtRat(Rat(1)));
    CHECK(q3->rational(Rat(5, 9)).valuation() == ExtRat(Rat(-2)));
    CHECK(q3->integer(7).valuation() == ExtRat(Rat(0)));
    CHECK(q3->zero().valuation().is_inf());
    CHECK(q3->uniformizer() == q3->integer(3));
}

TEST_CASE("rational arithmetic is exact") {
    auto q2 = CoeffField::rationals(2);
    FieldElem a = q2->rational(Rat(1, 2));
    FieldElem b = q2->rational(Rat(1, 3));
    CHECK((a + b) == q2->rational(Rat(5, 6)));
    CHECK((a * b) == q2->rational(Rat(1, 6)));
    CHECK((a - b) == q2->rational(Rat(1, 6)));
    CHECK(a.inverse() == q2->integer(2));
    CHECK_THROWS_AS(q2->zero().inverse(), robba::error);
}

TEST_CASE("ramified quadratic over Q_3: valuation 1/2") {
    auto k = CoeffField::extension(3, {Rat(3), Rat(0), Rat(1)}); // x^2 + 3
    CHECK(k->degree() == 2);
    CHECK(k->ram_index() == 2);
    FieldElem pi = k->generator();
    CHECK(pi.valuation() == ExtRat(Rat(1, 2)));
    CHECK((pi * pi).valuation() == ExtRat(Rat(1)));
    CHECK(pi.pow(2) == k->integer(-3));
    // 1 + pi is a unit
    CHECK((k->one() + pi).valuation() == ExtRat(Rat(0)));
    CHECK(k->uniformizer() == pi);
}

TEST_CASE("wild pi designations satisfy pi^(p-1) = -p") {
    auto q2 = CoeffField::rationals(2);
    CHECK(q2->has_wild_pi());
    CHECK(q2->wild_pi() == q2->integer(-2));
    CHECK(q2->wild_pi().pow(1) == q2->integer(-2));

    auto k3 = CoeffField::extension(3, {Rat(3), Rat(0), Rat(1)});
    CHECK(k3->has_wild_pi());
    CHECK(k3->wild_pi().pow(2) == k3->integer(-3));

    auto c3 = CoeffField::cyclotomic(3);
    CHECK(c3->has_wild_pi());
    CHECK(c3->wild_pi().pow(2) == c3->integer(-3));

    // x^2 + 9 is Eisenstein-like in shape but 9 has valuation 2
    CHECK_THROWS_AS(CoeffField::extension(3, {Rat(9), Rat(0), Rat(1)}), precondition_error);
}

TEST_CASE("cyclotomic fields") {
    auto c5 = CoeffField::cyclotomic(5);
    CHECK(c5->degree() == 4);
    CHECK(c5->has_zeta());
    FieldElem z = c5->zeta();
    CHECK(z.pow(5) == c5->one());
    CHECK(z.pow(4) != c5->one());
    // v(1 - zeta) = 1/(p-1)
    CHECK((c5->one() - z).valuation() == ExtRat(Rat(1, 4)));
    CHECK(c5->uniformizer() == (c5->one() - z));

    auto c3 = CoeffField::cyclotomic(3);
    FieldElem z3 = c3->zeta();
    CHECK((z3 * z3 * z3) == c3->one());
    CHECK((z3 * z3.pow(2)) == c3->one());

    auto q2 = CoeffField::rationals(2);
    CHECK(q2->has_zeta());
    CHECK(q2->zeta() == q2->integer(-1));
    CHECK((q2->zeta() * q2->zeta()) == q2->one());
}

TEST_CASE("degree-1 minimal polynomial folds into Q") {
    auto k = CoeffField::extension(5, {Rat(5), Rat(1)}); // x + 5
    CHECK(k->kind() == CoeffField::Kind::Rational);
    CHECK(k->degree() == 1);
    CHECK(k->same(*CoeffField::rationals(5)));
    CHECK_THROWS_AS(CoeffField::extension(5, {Rat(1), Rat(1)}), precondition_error);
    CHECK_THROWS_AS(CoeffField::extension(5, {Rat(25), Rat(1)}), precondition_error);
}

TEST_CASE("extension construction rejects bad input") {
    CHECK_THROWS_AS(CoeffField::rationals(4), precondition_error);
    // not monic
    CHECK_THROWS_AS(CoeffField::extension(3, {Rat(3), Rat(0), Rat(2)}), precondition_error);
    // not Eisenstein, not cyclotomic
    CHECK_THROWS_AS(CoeffField::extension(3, {Rat(1), Rat(0), Rat(1)}), precondition_error);
    CHECK_THROWS_AS(CoeffField::extension(3, {Rat(3), Rat(1), Rat(1)}), precondition_error);
    // fractional coefficient
    CHECK_THROWS_AS(CoeffField::extension(3, {Rat(1, 3), Rat(0), Rat(1)}), precondition_error);
    CHECK_THROWS_AS(CoeffField::cyclotomic(2), precondition_error);
}

TEST_CASE("valuation is multiplicative and ultrametric") {
    auto k = CoeffField::extension(3, {Rat(3), Rat(0), Rat(1)});
    Lcg rng(20260816);
    for (int trial = 0; trial < 50; ++trial) {
        FieldElem a = k->element({Rat(rng.small(-9, 9)), Rat(rng.small(-9, 9))});
        FieldElem b = k->element({Rat(rng.small(-9, 9)), Rat(rng.small(-9, 9))});
        ExtRat va = a.valuation(), vb = b.valuation();
        CHECK((a * b).valuation() == va + vb);
        ExtRat vs = (a + b).valuation();
        CHECK(vs >= min(va, vb));
        if (va != vb) CHECK(vs == min(va, vb));
        if (!a.is_zero()) {
            CHECK((a * a.inverse()) == k->one());
            // denominator of the valuation divides the ramification index
            if (!va.is_inf()) {
                Rat scaled = va.finite() * static_cast<long>(k->ram_index());
                scaled.canonicalize();
                CHECK(scaled.get_den() == 1);
            }
        }
    }
}

TEST_CASE("field identity and cross-field guards") {
    auto a = CoeffField::rationals(2);
    auto b = CoeffField::rationals(3);
    CHECK(!a->same(*b));
    auto k1 = CoeffField::extension(3, {Rat(3), Rat(0), Rat(1)});
    auto k2 = CoeffField::extension(3, {Rat(6), Rat(0), Rat(1)});
    CHECK(!k1->same(*k2));
    CHECK(k1->same(*CoeffField::extension(3, {Rat(3), Rat(0), Rat(1)})));
}
