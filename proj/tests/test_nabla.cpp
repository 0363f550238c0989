#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robba/nabla.hpp"

using namespace robba;

namespace {

NablaModule rank1_ddt(const FieldPtr& f, const LaurentSeries& e, const Rat& lo, const Rat& hi) {
    return make_module(f, OpForm::ddt, {{e}}, lo, hi);
}

} // namespace

TEST_CASE("derivative matrices of t d/dt by a constant: falling factorials") {
    auto q2 = CoeffField::rationals(2);
    auto M = make_module(q2, OpForm::theta, {{LaurentSeries::constant(q2, Rat(3))}},
                         Rat(1, 8), Rat(1, 2));
    auto D = derivative_matrices(M, 4);
    CHECK(D[0][0][0] == LaurentSeries::monomial(q2, q2->integer(3), -1));
    CHECK(D[1][0][0] == LaurentSeries::monomial(q2, q2->integer(6), -2));  // 3*2
    CHECK(D[2][0][0] == LaurentSeries::monomial(q2, q2->integer(6), -3));  // 3*2*1
    CHECK(D[3][0][0] == LaurentSeries(q2));                                // 3*2*1*0
}

TEST_CASE("form conversion is an exact shift") {
    auto q2 = CoeffField::rationals(2);
    auto M = make_module(q2, OpForm::theta, {{LaurentSeries::constant(q2, Rat(1))}},
                         Rat(1, 8), Rat(1, 2));
    auto Md = with_form(M, OpForm::ddt);
    CHECK(Md.N[0][0] == LaurentSeries::monomial(q2, q2->one(), -1));
    auto back = with_form(Md, OpForm::theta);
    CHECK(back.N[0][0] == M.N[0][0]);
}

TEST_CASE("generic radius: trivial, exponential, and pushed exponential") {
    auto q2 = CoeffField::rationals(2);
    Rat s(1, 4);

    auto triv = rank1_ddt(q2, LaurentSeries(q2), Rat(1, 8), Rat(1, 2));
    auto st = spectral_norm(triv, s, 16);
    CHECK(st.r == s);
    CHECK(st.lambda_tail.is_inf());
    CHECK(st.lambda_spec == st.lambda_ring);

    auto expm = rank1_ddt(q2, LaurentSeries::constant(q2, Rat(1)), Rat(1, 8), Rat(1, 2));
    auto se = spectral_norm(expm, s, 16);
    CHECK(se.r == Rat(1));
    CHECK(se.lambda_spec == Rat(0));

    // exp(t^2)-type: the true radius sits at the wild threshold 1/2. Here
    // lambda(D_m)/m approaches the limit from above on odd m, so the
    // finite-budget estimate overshoots the tail statistic by O(1/S) and
    // refines toward 1/2 as the budget grows.
    auto push = rank1_ddt(q2, LaurentSeries::monomial(q2, q2->integer(2), 1), Rat(1, 8), Rat(1, 2));
    auto sp = spectral_norm(push, s, 16);
    CHECK(sp.r == Rat(19, 44)); // 1 - (6 + 1/4)/11
    auto sp2 = spectral_norm(push, s, 64);
    CHECK(sp2.r == Rat(83, 172)); // 1 - (22 + 1/4)/43
    CHECK(abs(sp2.r - Rat(1, 2)) < abs(sp.r - Rat(1, 2)));
}

TEST_CASE("generic radius: unipotent log-type at large budget") {
    auto q2 = CoeffField::rationals(2);
    std::vector<std::vector<FieldElem>> C{{q2->zero(), q2->one()}, {q2->zero(), q2->zero()}};
    auto M = unipotent_from_nilpotent(q2, C, Rat(1, 32), Rat(1, 2));

    // D_m = +-(m-1)! C t^{-m}; the best window point is m - 1 = 1024
    auto D = derivative_matrices(M, 4);
    CHECK(D[2][0][1] == LaurentSeries::monomial(q2, q2->integer(2), -3));
    CHECK(D[3][0][1] == LaurentSeries::monomial(q2, q2->integer(-6), -4));
    CHECK(D[2][0][0] == LaurentSeries(q2));

    auto sm = spectral_norm(M, Rat(1, 16), 1025);
    CHECK(sm.r - sm.s == Rat(2, 1025));
    auto est = highest_break_estimate(M, Rat(1, 16), Rat(1, 8), 1025);
    CHECK(est.beta == Rat(32, 1025));
    CHECK(est.consistent);
    CHECK(abs(est.beta) < Rat(1, 20));
}

TEST_CASE("artin-schreier modules have integer breaks, found exactly") {
    auto q2 = CoeffField::rationals(2);
    auto M1 = artin_schreier_module(q2, q2->one(), 1, Rat(1, 64), Rat(1, 2));
    CHECK(M1.N[0][0] == LaurentSeries::monomial(q2, q2->integer(2), -2));

    auto est = highest_break_estimate(M1, Rat(1, 16), Rat(1, 32), 128);
    CHECK(est.beta == Rat(1));
    CHECK(est.beta_large == Rat(1));
    CHECK(est.consistent);
    CHECK(est.budget_used == 128);

    auto M3 = artin_schreier_module(q2, q2->one(), 3, Rat(1, 64), Rat(1, 2));
    CHECK(M3.N[0][0] == LaurentSeries::monomial(q2, q2->integer(6), -4));
    auto est3 = highest_break_estimate(M3, Rat(1, 16), Rat(1, 32), 128);
    CHECK(est3.beta == Rat(3));

    CHECK_THROWS_AS(artin_schreier_module(q2, q2->one(), 2, Rat(1, 64), Rat(1, 2)),
                    precondition_error);
    auto c5 = CoeffField::cyclotomic(5);
    CHECK_THROWS_AS(artin_schreier_module(c5, c5->one(), 1, Rat(1, 64), Rat(1, 2)),
                    precondition_error);
}

TEST_CASE("artin-schreier over the quadratic wild extension of Q_3") {
    auto k3 = CoeffField::extension(3, {Rat(3), Rat(0), Rat(1)});
    auto M = artin_schreier_module(k3, k3->one(), 1, Rat(1, 64), Rat(1, 2));
    // N = -pi n b t^{-2} with pi the generator
    CHECK(M.N[0][0] == LaurentSeries::monomial(k3, -k3->generator(), -2));
    auto est = highest_break_estimate(M, Rat(1, 16), Rat(1, 32), 81);
    CHECK(est.beta == Rat(1));
}

TEST_CASE("tame pullback multiplies breaks; frobenius pullback of constants") {
    auto q2 = CoeffField::rationals(2);
    auto M1 = artin_schreier_module(q2, q2->one(), 1, Rat(1, 64), Rat(1, 2));
    auto P = pullback_power(M1, 3);
    auto M3 = artin_schreier_module(q2, q2->one(), 3, Rat(1, 192), Rat(1, 6));
    CHECK(P.N[0][0] == M3.N[0][0]);
    CHECK(P.s_min == Rat(1, 192));
    CHECK(P.s_max == Rat(1, 6));
    CHECK_THROWS_AS(pullback_power(M1, 2), precondition_error);

    auto theta_c = make_module(q2, OpForm::theta, {{LaurentSeries::constant(q2, Rat(3))}},
                               Rat(1, 8), Rat(1, 2));
    auto F = pullback_frobenius(theta_c);
    CHECK(F.N[0][0] == LaurentSeries::constant(q2, Rat(6)));
    CHECK(F.s_min == Rat(1, 16));
    CHECK(F.s_max == Rat(1, 4));
}

TEST_CASE("tensor, direct sum, dual") {
    auto q2 = CoeffField::rationals(2);
    auto a = LaurentSeries::monomial(q2, q2->integer(6), -4);
    auto A = rank1_ddt(q2, a, Rat(1, 64), Rat(1, 2));
    std::vector<std::vector<FieldElem>> C{{q2->zero(), q2->one()}, {q2->zero(), q2->zero()}};
    auto U = with_form(unipotent_from_nilpotent(q2, C, Rat(1, 32), Rat(1, 4)), OpForm::ddt);

    auto T = tensor(A, U);
    CHECK(T.rank == 2);
    CHECK(T.s_min == Rat(1, 32));
    CHECK(T.s_max == Rat(1, 4));
    CHECK(T.N[0][0] == a);
    CHECK(T.N[1][1] == a);
    CHECK(T.N[0][1] == U.N[0][1]);
    CHECK(T.N[1][0] == LaurentSeries(q2));

    auto S = direct_sum(A, U);
    CHECK(S.rank == 3);
    CHECK(S.N[0][0] == a);
    CHECK(S.N[1][2] == U.N[0][1]);
    CHECK(S.N[0][1] == LaurentSeries(q2));

    auto Dl = dual(U);
    CHECK(Dl.N[1][0] == -U.N[0][1]);
    CHECK(Dl.N[0][1] == LaurentSeries(q2));

    // direct sum takes the larger radius exponent (dominant break wins)
    auto M1 = artin_schreier_module(q2, q2->one(), 1, Rat(1, 64), Rat(1, 2));
    auto M3 = artin_schreier_module(q2, q2->one(), 3, Rat(1, 64), Rat(1, 2));
    auto sum = direct_sum(M1, M3);
    Rat s(1, 16);
    auto rs = spectral_norm(sum, s, 128).r;
    auto r1 = spectral_norm(M1, s, 128).r;
    auto r3 = spectral_norm(M3, s, 128).r;
    CHECK(rs == (r1 > r3 ? r1 : r3));
    CHECK(rs == Rat(1, 4));

    // mismatched operator forms are rejected, as are disjoint windows
    auto Ut = unipotent_from_nilpotent(q2, C, Rat(1, 32), Rat(1, 4));
    CHECK_THROWS_AS(tensor(A, Ut), precondition_error);
    auto far = rank1_ddt(q2, a, Rat(3), Rat(4));
    CHECK_THROWS_AS(direct_sum(A, far), precondition_error);
    auto q3 = CoeffField::rationals(3);
    CHECK_THROWS_AS(tensor(A, rank1_ddt(q3, LaurentSeries(q3), Rat(1, 64), Rat(1, 2))),
                    precondition_error);
}

TEST_CASE("tensor derivative matrices satisfy the product rule") {
    auto q2 = CoeffField::rationals(2);
    auto A = rank1_ddt(q2, LaurentSeries::monomial(q2, q2->integer(2), -2), Rat(1, 32), Rat(1, 2));
    std::vector<std::vector<FieldElem>> C{{q2->zero(), q2->one()}, {q2->zero(), q2->zero()}};
    auto B = with_form(unipotent_from_nilpotent(q2, C, Rat(1, 32), Rat(1, 2)), OpForm::ddt);
    auto T = tensor(A, B);

    auto DA = derivative_matrices(A, 3);
    auto DB = derivative_matrices(B, 3);
    auto DT = derivative_matrices(T, 3);
    // D_m(tensor) = sum_k binom(m,k) D_k x D_{m-k}, with D_0 = I
    auto IA = identity_matrix(q2, 1);
    auto IB = identity_matrix(q2, 2);
    auto kron = [&](const Matrix& X, const Matrix& Y) {
        size_t n1 = X.size(), n2 = Y.size();
        Matrix R(n1 * n2, std::vector<LaurentSeries>(n1 * n2, LaurentSeries(q2)));
        for (size_t i = 0; i < n1; ++i)
            for (size_t k = 0; k < n1; ++k)
                for (size_t j = 0; j < n2; ++j)
                    for (size_t l = 0; l < n2; ++l)
                        R[i * n2 + j][k * n2 + l] = X[i][k] * Y[j][l];
        return R;
    };
    auto getA = [&](size_t m) { return m == 0 ? IA : DA[m - 1]; };
    auto getB = [&](size_t m) { return m == 0 ? IB : DB[m - 1]; };
    long long binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    for (size_t m = 1; m <= 3; ++m) {
        Matrix want(2, std::vector<LaurentSeries>(2, LaurentSeries(q2)));
        for (size_t k = 0; k <= m; ++k) {
            auto term = kron(getA(k), getB(m - k));
            for (auto& row : term)
                for (auto& e : row)
                    e = e.scaled(q2->integer(static_cast<long>(binom[m][k])));
            want = mat_add(want, term);
        }
        CHECK(DT[m - 1] == want);
    }
}

TEST_CASE("h0/h1 dimensions of unipotent modules") {
    auto q2 = CoeffField::rationals(2);
    std::vector<std::vector<FieldElem>> C{{q2->zero(), q2->one()}, {q2->zero(), q2->zero()}};
    CHECK(h0_h1_dims_unipotent(q2, C) == std::make_pair(1LL, 1LL));
    std::vector<std::vector<FieldElem>> Z{{q2->zero(), q2->zero()}, {q2->zero(), q2->zero()}};
    CHECK(h0_h1_dims_unipotent(q2, Z) == std::make_pair(2LL, 2LL));
    std::vector<std::vector<FieldElem>> C3{
        {q2->zero(), q2->one(), q2->zero()},
        {q2->zero(), q2->zero(), q2->one()},
        {q2->zero(), q2->zero(), q2->zero()}};
    CHECK(h0_h1_dims_unipotent(q2, C3) == std::make_pair(1LL, 1LL));
    std::vector<std::vector<FieldElem>> notnil{{q2->one()}};
    CHECK_THROWS_AS(unipotent_from_nilpotent(q2, notnil, Rat(1, 8), Rat(1, 2)),
                    precondition_error);
}

TEST_CASE("frobenius structure iteration gains a full power of p on positive matrices") {
    auto q2 = CoeffField::rationals(2);
    auto M = make_module(q2, OpForm::theta, {{LaurentSeries::monomial(q2, q2->one(), 1)}},
                         Rat(1, 8), Rat(1, 2));
    auto it = frobenius_structure_iterate(M, 3, Rat(1, 4));
    REQUIRE(it.mats.size() == 4);
    // N_l = 2^l t^{2^l}
    CHECK(it.mats[2][0][0] == LaurentSeries::monomial(q2, q2->integer(4), 4));
    for (int l = 0; l <= 3; ++l) {
        CHECK(it.lambda_fixed[l] == ExtRat(Rat(static_cast<long>(l)) + Rat(1, 4) * Rat(1L << l)));
        // the shrinking-radius values obey lambda_{s/p^l}(N_l) = l + lambda_s(N_0)
        CHECK(it.lambda_shrunk[l] == ExtRat(Rat(static_cast<long>(l)) + Rat(1, 4)));
    }
    CHECK(it.monotone_certified);

    // a pole eats the gain: l - 2^l s stops being monotone by a full unit
    auto P = make_module(q2, OpForm::theta, {{LaurentSeries::monomial(q2, q2->one(), -1)}},
                         Rat(1, 8), Rat(1, 2));
    auto itp = frobenius_structure_iterate(P, 3, Rat(1, 4));
    CHECK(itp.lambda_fixed[0] == ExtRat(Rat(-1, 4)));
    CHECK(itp.lambda_fixed[3] == ExtRat(Rat(1)));
    CHECK(!itp.monotone_certified);
}

TEST_CASE("taylor solution matrices and their convergence estimate") {
    auto q2 = CoeffField::rationals(2);
    auto expm = rank1_ddt(q2, LaurentSeries::constant(q2, Rat(1)), Rat(1, 16), Rat(1, 2));
    auto sol = taylor_solution_matrix(expm, 64, {Rat(1, 8)});
    CHECK(sol.coeffs[2][0][0] == LaurentSeries::constant(q2, Rat(1, 2)));
    CHECK(sol.coeffs[3][0][0] == LaurentSeries::constant(q2, Rat(1, 6)));
    REQUIRE(sol.radius.size() == 1);
    // r-hat approaches 1 = v_2(m!)/m in the limit; at S = 64 the best window
    // point is m = 64 with v(64!) = 63
    CHECK(sol.radius[0].second == Rat(63, 64));

    auto triv = rank1_ddt(q2, LaurentSeries(q2), Rat(1, 16), Rat(1, 2));
    auto ts = taylor_solution_matrix(triv, 16, {Rat(1, 8)});
    CHECK(ts.radius[0].second == Rat(1, 8)); // nothing beats the trivial bound
    CHECK(ts.coeffs[5][0][0] == LaurentSeries(q2));
}

TEST_CASE("overconvergence classification") {
    auto q2 = CoeffField::rationals(2);
    std::vector<Rat> samples{Rat(1, 4), Rat(1, 8), Rat(1, 16)};

    auto triv = rank1_ddt(q2, LaurentSeries(q2), Rat(1, 32), Rat(1, 2));
    CHECK(overconvergence_check(triv, samples, 16).solvable);

    auto expm = rank1_ddt(q2, LaurentSeries::constant(q2, Rat(1)), Rat(1, 32), Rat(1, 2));
    auto re = overconvergence_check(expm, samples, 16);
    CHECK(!re.solvable);
    CHECK(re.samples[0].r_minus_s == Rat(3, 4));
    CHECK(re.samples[2].r_minus_s == Rat(15, 16));

    auto as1 = artin_schreier_module(q2, q2->one(), 1, Rat(1, 32), Rat(1, 2));
    auto ra = overconvergence_check(as1, samples, 128);
    CHECK(ra.solvable);
    CHECK(ra.samples[0].r_minus_s == Rat(1, 4));
    CHECK(ra.samples[2].r_minus_s == Rat(1, 16));

    CHECK_THROWS_AS(overconvergence_check(triv, {Rat(1, 8), Rat(1, 4)}, 16), precondition_error);
    CHECK_THROWS_AS(overconvergence_check(triv, {Rat(1, 8)}, 16), precondition_error);
}

TEST_CASE("paired-disc transforms") {
    auto t = disc_transform(DiscKind::TameN, 2, Rat(1, 2), Rat(1, 3));
    CHECK(t.s_out == Rat(1, 4));
    CHECK(t.log_radius_out == Rat(7, 12));

    auto fs = disc_transform(DiscKind::FrobeniusSmall, 2, Rat(1, 2), Rat(3));
    CHECK(fs.s_out == Rat(1, 4));
    CHECK(fs.log_radius_out == Rat(9, 4));

    auto fl = disc_transform(DiscKind::FrobeniusLarge, 2, Rat(1, 2), Rat(1));
    CHECK(fl.s_out == Rat(1, 4));
    CHECK(fl.log_radius_out == Rat(3, 4));

    auto w = disc_transform(DiscKind::Wild, 3, Rat(1, 2), Rat(2));
    CHECK(w.s_out == Rat(1, 6));
    CHECK(w.log_radius_out == Rat(11, 6));

    CHECK_THROWS_AS(disc_transform(DiscKind::FrobeniusSmall, 2, Rat(1, 2), Rat(1)),
                    precondition_error);
    CHECK_THROWS_AS(disc_transform(DiscKind::FrobeniusLarge, 2, Rat(1, 2), Rat(3)),
                    precondition_error);
    CHECK_THROWS_AS(disc_transform(DiscKind::Wild, 3, Rat(2), Rat(1)), precondition_error);
    CHECK_THROWS_AS(disc_transform(DiscKind::TameN, 0, Rat(1, 2), Rat(1)), precondition_error);
}

TEST_CASE("wild break push and pull") {
    CHECK(wild_break_transform(Rat(2), 1, 2, BreakDirection::Push) == Rat(3));
    CHECK(wild_break_transform(Rat(3), 1, 2, BreakDirection::Pull) == Rat(2));
    CHECK(wild_break_transform(Rat(3), 3, 2, BreakDirection::Push) == Rat(3)); // fixed point
    Rat b(7, 2);
    auto pushed = wild_break_transform(b, 2, 3, BreakDirection::Push);
    CHECK(wild_break_transform(pushed, 2, 3, BreakDirection::Pull) == b);
    CHECK_THROWS_AS(wild_break_transform(Rat(1, 2), 1, 2, BreakDirection::Push),
                    precondition_error);
}

TEST_CASE("module construction guards") {
    auto q2 = CoeffField::rationals(2);
    CHECK_THROWS_AS(make_module(q2, OpForm::ddt, {}, Rat(1, 8), Rat(1, 2)), precondition_error);
    Matrix bad{{LaurentSeries(q2), LaurentSeries(q2)}};
    CHECK_THROWS_AS(make_module(q2, OpForm::ddt, bad, Rat(1, 8), Rat(1, 2)), precondition_error);
    Matrix ok{{LaurentSeries(q2)}};
    CHECK_THROWS_AS(make_module(q2, OpForm::ddt, ok, Rat(1, 2), Rat(1, 8)), precondition_error);
    CHECK_THROWS_AS(make_module(q2, OpForm::ddt, ok, Rat(0), Rat(1, 2)), precondition_error);

    auto M = make_module(q2, OpForm::ddt, ok, Rat(1, 8), Rat(1, 2));
    CHECK_THROWS_AS(spectral_norm(M, Rat(1, 16), 16), precondition_error);
    CHECK_THROWS_AS(spectral_norm(M, Rat(1, 4), 1), precondition_error);
    CHECK_THROWS_AS(highest_break_estimate(M, Rat(1, 4), Rat(1, 4), 16), precondition_error);
}
