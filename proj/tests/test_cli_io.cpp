#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robba/checks.hpp"
#include "robba/errors.hpp"
#include "robba/json_io.hpp"

using namespace robba;

TEST_CASE("field descriptors round trip") {
    auto q2 = CoeffField::rationals(2);
    auto back = field_from_json(field_to_json(q2));
    CHECK(back->same(*q2));

    auto k3 = CoeffField::cyclotomic(3);
    auto back3 = field_from_json(field_to_json(k3));
    CHECK(back3->same(*k3));
    CHECK(back3->is_cyclotomic());

    CHECK_THROWS_AS(field_from_json(Json{{"p", 2}, {"kind", "nope"}}), parse_error);
}

TEST_CASE("series round trip through the interchange format") {
    auto q2 = CoeffField::rationals(2);
    auto f = LaurentSeries::make(
        q2, {{-3, q2->rational(Rat(5, 4))}, {0, q2->integer(7)}, {2, q2->rational(Rat(-1, 3))}});
    CHECK(series_from_json(q2, series_to_json(f)) == f);

    // truncated with a tail certificate
    auto g = LaurentSeries::make(q2, {{1, q2->one()}}, false, Window::at_most(5),
                                 TailBound{Rat(1, 4), Rat(1, 2), ExtRat(Rat(3, 2)), ExtRat(Rat(3))});
    auto g2 = series_from_json(q2, series_to_json(g));
    CHECK(g2 == g);
    CHECK(g2.window() == g.window());
    REQUIRE(g2.tail().has_value());
    CHECK(g2.tail()->b_lo == g.tail()->b_lo);

    auto k3 = CoeffField::cyclotomic(3);
    auto h = LaurentSeries::monomial(k3, k3->generator(), -1);
    CHECK(series_from_json(k3, series_to_json(h)) == h);
}

TEST_CASE("module descriptors round trip") {
    auto q2 = CoeffField::rationals(2);
    Matrix N = identity_matrix(q2, 2);
    N[0][1] = LaurentSeries::monomial(q2, q2->integer(6), -4);
    auto M = make_module(q2, OpForm::theta, N, Rat(1, 32), Rat(1, 16));
    auto M2 = module_from_json(module_to_json(M));
    CHECK(M2.field->same(*M.field));
    CHECK(M2.form == OpForm::theta);
    CHECK(M2.rank == 2);
    CHECK(M2.N == M.N);
    CHECK(M2.s_min == M.s_min);
    CHECK(M2.s_max == M.s_max);

    Json bad = module_to_json(M);
    bad["rank"] = 3;
    CHECK_THROWS_AS(module_from_json(bad), parse_error);
}

TEST_CASE("herbrand functions and break data round trip") {
    auto f = artin_schreier_phi(3, 2);
    CHECK(herbrand_from_json(herbrand_to_json(f)) == f);

    BreakData b = {{Rat(1), 1}, {Rat(5, 2), 2}};
    CHECK(breaks_from_json(breaks_to_json(b)) == b);
}

TEST_CASE("property corpus is deterministic and clean") {
    auto a = run_property_corpus(40, 0x5eedULL);
    auto b = run_property_corpus(40, 0x5eedULL);
    CHECK(a.checks_passed == b.checks_passed);
    CHECK(a.checks_failed == 0);
    CHECK(a.cases == 40);
    CHECK(a.checks_passed > 300);
}
