#include "robba/nabla.hpp"

#include <algorithm>
#include <set>

#include "robba/errors.hpp"

namespace robba {

namespace {

void validate_square(const Matrix& N, long long rank) {
    if (rank < 1) throw precondition_error("module rank must be positive");
    if (static_cast<long long>(N.size()) != rank)
        throw precondition_error("matrix row count does not match the rank");
    for (const auto& row : N) {
        if (static_cast<long long>(row.size()) != rank)
            throw precondition_error("matrix is not square");
    }
}

void require_sample_in_window(const NablaModule& M, const Rat& s) {
    if (s < M.s_min || s > M.s_max)
        throw precondition_error("sample radius lies outside the module window");
}

Rat tolerance_for(const Rat& b1, const Rat& b2) {
    Rat m = abs(b1) > abs(b2) ? abs(b1) : abs(b2);
    Rat rel = m * Rat(1, 20); // 5% relative
    Rat flat(1, 20);
    return rel > flat ? rel : flat;
}

std::vector<std::vector<FieldElem>> felem_mat_mul(const FieldPtr& field,
                                                  const std::vector<std::vector<FieldElem>>& A,
                                                  const std::vector<std::vector<FieldElem>>& B) {
    size_t n = A.size();
    std::vector<std::vector<FieldElem>> R(n, std::vector<FieldElem>(n, field->zero()));
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k) {
            if (A[i][k].is_zero()) continue;
            for (size_t j = 0; j < n; ++j) R[i][j] = R[i][j] + A[i][k] * B[k][j];
        }
    return R;
}

} // namespace

NablaModule make_module(FieldPtr field, OpForm form, Matrix N, const Rat& s_min, const Rat& s_max) {
    if (!field) throw precondition_error("module requires a coefficient field");
    long long rank = static_cast<long long>(N.size());
    validate_square(N, rank);
    for (const auto& row : N)
        for (const auto& e : row)
            if (!e.field()->same(*field))
                throw precondition_error("matrix entry lives in a different field");
    if (!(Rat(0) < s_min && s_min < s_max))
        throw precondition_error("window must satisfy 0 < s_min < s_max");
    return NablaModule{std::move(field), rank, form, std::move(N), s_min, s_max};
}

NablaModule with_form(const NablaModule& M, OpForm form) {
    if (M.form == form) return M;
    Matrix N;
    N.reserve(M.N.size());
    long long d = (form == OpForm::theta) ? 1 : -1; // theta = t * ddt
    for (const auto& row : M.N) {
        std::vector<LaurentSeries> r2;
        r2.reserve(row.size());
        for (const auto& e : row) r2.push_back(e.shifted(d));
        N.push_back(std::move(r2));
    }
    return NablaModule{M.field, M.rank, form, std::move(N), M.s_min, M.s_max};
}

Matrix identity_matrix(const FieldPtr& field, long long n) {
    Matrix I(n, std::vector<LaurentSeries>(n, LaurentSeries(field)));
    for (long long i = 0; i < n; ++i) I[i][i] = LaurentSeries::constant(field, Rat(1));
    return I;
}

Matrix mat_add(const Matrix& A, const Matrix& B) {
    Matrix R = A;
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t j = 0; j < A[i].size(); ++j) R[i][j] = A[i][j] + B[i][j];
    return R;
}

Matrix mat_mul(const Matrix& A, const Matrix& B) {
    size_t n = A.size(), m = B[0].size(), k = B.size();
    const FieldPtr& field = A[0][0].field();
    Matrix R(n, std::vector<LaurentSeries>(m, LaurentSeries(field)));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (A[i][l].stored_zero() && A[i][l].exact()) continue;
            for (size_t j = 0; j < m; ++j) R[i][j] = R[i][j] + A[i][l] * B[l][j];
        }
    return R;
}

Matrix mat_derivative(const Matrix& A) {
    Matrix R = A;
    for (auto& row : R)
        for (auto& e : row) e = e.derivative();
    return R;
}

ExtRat mat_lambda(const Matrix& A, const Rat& s) {
    ExtRat m = ExtRat::infinity();
    for (const auto& row : A)
        for (const auto& e : row) {
            auto v = e.certified_lambda(s);
            if (!v)
                throw precondition_error("matrix entry carries no certificate at the requested radius");
            if (*v < m) m = *v;
        }
    return m;
}

long long default_budget(long long p) { return 8 * p * p; }

std::vector<Matrix> derivative_matrices(const NablaModule& M, long long S) {
    if (S < 1) throw precondition_error("need at least one derivative matrix");
    NablaModule Md = with_form(M, OpForm::ddt);
    std::vector<Matrix> out;
    out.reserve(S);
    Matrix D = identity_matrix(Md.field, Md.rank);
    for (long long m = 1; m <= S; ++m) {
        D = mat_add(mat_derivative(D), mat_mul(Md.N, D));
        out.push_back(D);
    }
    return out;
}

namespace {

ExtRat term_lambda(const FieldElem& c, long long e, const Rat& s) {
    return c.valuation() + Rat(Rat(static_cast<long>(e)) * s);
}

// Worst one-step drop of lambda_s under D -> D' + N D: differentiating costs
// at most s, multiplying by N costs at most its certified minimum.
std::optional<Rat> chain_decrement(const Matrix& N, const Rat& s) {
    Rat c = -s;
    for (const auto& row : N)
        for (const auto& e : row) {
            auto l = e.certified_lambda(s);
            if (!l) return std::nullopt;
            if (!l->is_inf() && l->finite() < c) c = l->finite();
        }
    return c;
}

// Uncertified trim used only to guess the eventual tail level.
void keep_smallest(LaurentSeries& f, const std::vector<Rat>& s_list, std::size_t K) {
    if (f.terms().size() <= K * s_list.size()) return;
    std::set<long long> keep;
    for (const auto& s : s_list) {
        std::vector<std::pair<ExtRat, long long>> v;
        v.reserve(f.terms().size());
        for (const auto& [e, c] : f.terms()) v.emplace_back(term_lambda(c, e, s), e);
        std::partial_sort(v.begin(), v.begin() + static_cast<long>(K), v.end());
        for (std::size_t k = 0; k < K; ++k) keep.insert(v[k].second);
    }
    std::map<long long, FieldElem> kept;
    for (long long e : keep) kept.emplace(e, f.coeff(e));
    f = LaurentSeries::make(f.field(), std::move(kept), f.exact(), f.window(), f.tail());
}

// Drop a stored term only when, at every sample radius, all of its downstream
// images provably stay above the pruning target; the projected floor of the
// dropped mass is recorded so the caller can certify the result afterwards.
void prune_threshold(Matrix& D, const std::vector<Rat>& s_list, const std::vector<Rat>& c,
                     const std::vector<std::optional<ExtRat>>& T, long long steps_left,
                     std::vector<ExtRat>& floor) {
    for (auto& row : D)
        for (auto& f : row) {
            if (f.stored_zero()) continue;
            std::map<long long, FieldElem> kept;
            bool dropped = false;
            std::vector<ExtRat> proj(s_list.size(), ExtRat::infinity());
            for (const auto& [e, coef] : f.terms()) {
                bool keep = false;
                for (std::size_t i = 0; i < s_list.size(); ++i) {
                    if (!T[i]) {
                        keep = true;
                        break;
                    }
                    proj[i] = term_lambda(coef, e, s_list[i]) +
                              Rat(c[i] * Rat(static_cast<long>(steps_left)));
                    if (!(proj[i] > *T[i])) {
                        keep = true;
                        break;
                    }
                }
                if (keep) {
                    kept.emplace(e, coef);
                } else {
                    dropped = true;
                    for (std::size_t i = 0; i < s_list.size(); ++i)
                        floor[i] = min(floor[i], proj[i]);
                }
            }
            if (dropped)
                f = LaurentSeries::make(f.field(), std::move(kept), f.exact(), f.window(), f.tail());
        }
}

struct TailStats {
    std::vector<std::optional<ExtRat>> best; // max over the tail window of lambda/m
    std::vector<std::optional<ExtRat>> raw;  // max over the tail window of lambda itself
};

template <typename PruneFn>
TailStats run_chain(const NablaModule& Md, const std::vector<Rat>& s_list, long long S,
                    long long start, PruneFn prune) {
    TailStats st{std::vector<std::optional<ExtRat>>(s_list.size()),
                 std::vector<std::optional<ExtRat>>(s_list.size())};
    Matrix D = identity_matrix(Md.field, Md.rank);
    for (long long m = 1; m <= S; ++m) {
        D = mat_add(mat_derivative(D), mat_mul(Md.N, D));
        if (m < S) prune(D, m);
        if (m < start) continue;
        for (std::size_t i = 0; i < s_list.size(); ++i) {
            ExtRat raw = mat_lambda(D, s_list[i]);
            if (!st.raw[i] || raw > *st.raw[i]) st.raw[i] = raw;
            ExtRat mu = raw.div(m);
            if (!st.best[i] || mu > *st.best[i]) st.best[i] = mu;
        }
    }
    return st;
}

std::vector<SpectralSample> spectral_many(const NablaModule& M, const std::vector<Rat>& s_list,
                                          long long S) {
    if (S < 2) throw precondition_error("iteration budget must be at least 2");
    for (const auto& s : s_list) require_sample_in_window(M, s);
    NablaModule Md = with_form(M, OpForm::ddt);
    const long long p = Md.field->prime();
    const long long W = (S + 2) / 3;
    const long long start = S - W + 1;
    const std::size_t R = s_list.size();

    std::vector<Rat> c(R);
    bool can_prune = true;
    for (std::size_t i = 0; i < R && can_prune; ++i) {
        auto ci = chain_decrement(Md.N, s_list[i]);
        if (ci)
            c[i] = *ci;
        else
            can_prune = false;
    }

    // The iterates are pruned at the sample radii to keep term growth down.
    // Dropped mass can only sink by c per step, so if its projected floor
    // stays strictly above every tail minimum that was actually read off,
    // those minima coincide with the minima of the full iterates and the
    // pruned run is exact. Otherwise rerun with a laxer target, and give up
    // on pruning entirely rather than report an uncertified value.
    TailStats stats;
    bool exact_known = false;
    if (can_prune) {
        try {
            auto probe = run_chain(Md, s_list, S, start, [&](Matrix& D, long long) {
                for (auto& row : D)
                    for (auto& f : row) keep_smallest(f, s_list, 8);
            });
            Rat slack(1);
            std::vector<std::optional<ExtRat>> T(R);
            for (std::size_t i = 0; i < R; ++i)
                if (probe.raw[i] && !probe.raw[i]->is_inf()) T[i] = *probe.raw[i] + slack;
            for (int attempt = 0; attempt < 3 && !exact_known; ++attempt) {
                std::vector<ExtRat> floor(R, ExtRat::infinity());
                auto got = run_chain(Md, s_list, S, start, [&](Matrix& D, long long m) {
                    prune_threshold(D, s_list, c, T, S - m, floor);
                });
                bool ok = true;
                for (std::size_t i = 0; i < R; ++i) {
                    if (floor[i].is_inf()) continue;
                    if (!(got.raw[i] && *got.raw[i] < floor[i])) ok = false;
                }
                if (ok) {
                    stats = std::move(got);
                    exact_known = true;
                } else {
                    slack *= 4;
                    for (std::size_t i = 0; i < R; ++i) {
                        if (got.raw[i] && !got.raw[i]->is_inf())
                            T[i] = *got.raw[i] + slack;
                        else
                            T[i] = std::nullopt;
                    }
                }
            }
        } catch (const error&) {
            exact_known = false;
        }
    }
    if (!exact_known) stats = run_chain(Md, s_list, S, start, [](Matrix&, long long) {});

    Rat inv_p1(1, static_cast<long>(p - 1));
    std::vector<SpectralSample> out;
    for (std::size_t i = 0; i < R; ++i) {
        const Rat& s = s_list[i];
        Rat ring = inv_p1 - s;
        ring.canonicalize();
        ExtRat tail = *stats.best[i];
        ExtRat spec_e = min(ExtRat(ring), tail);
        Rat spec = spec_e.finite();
        Rat r = inv_p1 - spec;
        r.canonicalize();
        if (r < s) r = s;
        out.push_back(SpectralSample{s, spec, ring, tail, r, S, W});
    }
    return out;
}

} // namespace

SpectralSample spectral_norm(const NablaModule& M, const Rat& s, long long S) {
    return spectral_many(M, {s}, S)[0];
}

RadiusProfile generic_radius_profile(const NablaModule& M, const std::vector<Rat>& s_list,
                                     long long S) {
    return RadiusProfile{spectral_many(M, s_list, S)};
}

BreakEstimate highest_break_estimate(const NablaModule& M, const Rat& s1, const Rat& s2, long long S) {
    if (s1 == s2) throw precondition_error("break estimation needs two distinct samples");
    Rat ss = s1 < s2 ? s1 : s2;
    Rat sl = s1 < s2 ? s2 : s1;
    long long budget = S;
    for (int attempt = 0;; ++attempt) {
        auto samples = spectral_many(M, {ss, sl}, budget);
        Rat bs = samples[0].r / ss - 1;
        bs.canonicalize();
        Rat bl = samples[1].r / sl - 1;
        bl.canonicalize();
        Rat delta = abs(bs - bl);
        bool consistent = delta <= tolerance_for(bs, bl);
        if (consistent || attempt >= 3)
            return BreakEstimate{ss, sl, bs, bl, bs, delta, consistent, budget};
        budget *= 2;
    }
}

NablaModule artin_schreier_module(const FieldPtr& field, const FieldElem& b, long long n,
                                  const Rat& s_min, const Rat& s_max) {
    const long long p = field->prime();
    if (n < 1 || n % p == 0)
        throw precondition_error("twist degree must be positive and prime to p");
    if (!field->has_wild_pi())
        throw precondition_error("field does not designate pi with pi^{p-1} = -p");
    if (!b.field()->same(*field)) throw precondition_error("b lives in a different field");
    FieldElem c = -(field->wild_pi() * field->integer(static_cast<long>(n)) * b);
    Matrix N{{LaurentSeries::monomial(field, c, -n - 1)}};
    return make_module(field, OpForm::ddt, std::move(N), s_min, s_max);
}

NablaModule unipotent_from_nilpotent(const FieldPtr& field,
                                     const std::vector<std::vector<FieldElem>>& C,
                                     const Rat& s_min, const Rat& s_max) {
    size_t n = C.size();
    if (n == 0) throw precondition_error("matrix is empty");
    for (const auto& row : C)
        if (row.size() != n) throw precondition_error("matrix is not square");
    auto P = C;
    for (size_t k = 1; k < n; ++k) P = felem_mat_mul(field, C, P);
    for (const auto& row : P)
        for (const auto& e : row)
            if (!e.is_zero()) throw precondition_error("matrix is not nilpotent");
    Matrix N;
    for (const auto& row : C) {
        std::vector<LaurentSeries> r2;
        for (const auto& e : row) r2.push_back(LaurentSeries::monomial(field, e, 0));
        N.push_back(std::move(r2));
    }
    return make_module(field, OpForm::theta, std::move(N), s_min, s_max);
}

std::pair<long long, long long> h0_h1_dims_unipotent(const FieldPtr& field,
                                                     const std::vector<std::vector<FieldElem>>& C) {
    auto A = C;
    size_t n = A.size();
    for (const auto& row : A)
        if (row.size() != n) throw precondition_error("matrix is not square");
    size_t rank = 0;
    for (size_t col = 0; col < n && rank < n; ++col) {
        size_t piv = rank;
        while (piv < n && A[piv][col].is_zero()) ++piv;
        if (piv == n) continue;
        std::swap(A[piv], A[rank]);
        FieldElem inv = A[rank][col].inverse();
        for (size_t r = rank + 1; r < n; ++r) {
            if (A[r][col].is_zero()) continue;
            FieldElem f = A[r][col] * inv;
            for (size_t j = col; j < n; ++j) A[r][j] = A[r][j] - f * A[rank][j];
        }
        ++rank;
    }
    long long k = static_cast<long long>(n - rank);
    (void)field;
    return {k, k};
}

namespace {

void require_combinable(const NablaModule& A, const NablaModule& B, Rat& lo, Rat& hi) {
    if (!A.field->same(*B.field))
        throw precondition_error("modules live over different coefficient fields");
    if (A.form != B.form)
        throw precondition_error("modules must be in the same operator form");
    lo = A.s_min > B.s_min ? A.s_min : B.s_min;
    hi = A.s_max < B.s_max ? A.s_max : B.s_max;
    if (!(lo < hi)) throw precondition_error("module windows do not overlap");
}

} // namespace

NablaModule tensor(const NablaModule& A, const NablaModule& B) {
    Rat lo, hi;
    require_combinable(A, B, lo, hi);
    long long n = A.rank * B.rank;
    Matrix N(n, std::vector<LaurentSeries>(n, LaurentSeries(A.field)));
    for (long long i = 0; i < A.rank; ++i)
        for (long long k = 0; k < A.rank; ++k) {
            if (A.N[i][k].stored_zero() && A.N[i][k].exact()) continue;
            for (long long j = 0; j < B.rank; ++j)
                N[i * B.rank + j][k * B.rank + j] = N[i * B.rank + j][k * B.rank + j] + A.N[i][k];
        }
    for (long long j = 0; j < B.rank; ++j)
        for (long long l = 0; l < B.rank; ++l) {
            if (B.N[j][l].stored_zero() && B.N[j][l].exact()) continue;
            for (long long i = 0; i < A.rank; ++i)
                N[i * B.rank + j][i * B.rank + l] = N[i * B.rank + j][i * B.rank + l] + B.N[j][l];
        }
    return make_module(A.field, A.form, std::move(N), lo, hi);
}

NablaModule direct_sum(const NablaModule& A, const NablaModule& B) {
    Rat lo, hi;
    require_combinable(A, B, lo, hi);
    long long n = A.rank + B.rank;
    Matrix N(n, std::vector<LaurentSeries>(n, LaurentSeries(A.field)));
    for (long long i = 0; i < A.rank; ++i)
        for (long long j = 0; j < A.rank; ++j) N[i][j] = A.N[i][j];
    for (long long i = 0; i < B.rank; ++i)
        for (long long j = 0; j < B.rank; ++j) N[A.rank + i][A.rank + j] = B.N[i][j];
    return make_module(A.field, A.form, std::move(N), lo, hi);
}

NablaModule dual(const NablaModule& A) {
    Matrix N(A.rank, std::vector<LaurentSeries>(A.rank, LaurentSeries(A.field)));
    for (long long i = 0; i < A.rank; ++i)
        for (long long j = 0; j < A.rank; ++j) N[i][j] = -A.N[j][i];
    return NablaModule{A.field, A.rank, A.form, std::move(N), A.s_min, A.s_max};
}

namespace {

NablaModule pullback_impl(const NablaModule& M, long long n, bool frobenius) {
    Matrix N;
    N.reserve(M.N.size());
    for (const auto& row : M.N) {
        std::vector<LaurentSeries> r2;
        r2.reserve(row.size());
        for (const auto& e : row) {
            LaurentSeries sub = frobenius ? e.frobenius_twist() : e.substitute_power(n);
            if (M.form == OpForm::ddt)
                sub = sub.shifted(n - 1).scaled(M.field->integer(static_cast<long>(n)));
            else
                sub = sub.scaled(M.field->integer(static_cast<long>(n)));
            r2.push_back(std::move(sub));
        }
        N.push_back(std::move(r2));
    }
    Rat lo = M.s_min / static_cast<long>(n), hi = M.s_max / static_cast<long>(n);
    lo.canonicalize();
    hi.canonicalize();
    return NablaModule{M.field, M.rank, M.form, std::move(N), lo, hi};
}

} // namespace

NablaModule pullback_power(const NablaModule& M, long long n) {
    if (n < 1) throw precondition_error("pullback degree must be positive");
    if (n % M.field->prime() == 0)
        throw precondition_error("degree divisible by p: use the Frobenius pullback");
    return pullback_impl(M, n, false);
}

NablaModule pullback_frobenius(const NablaModule& M) {
    return pullback_impl(M, M.field->prime(), true);
}

FrobeniusIteration frobenius_structure_iterate(const NablaModule& M, long long L, const Rat& s) {
    if (L < 0) throw precondition_error("step count must be nonnegative");
    require_sample_in_window(M, s);
    NablaModule Mt = with_form(M, OpForm::theta);
    const long long p = Mt.field->prime();
    FrobeniusIteration out;
    Matrix cur = Mt.N;
    Rat s_shrunk = s;
    for (long long l = 0; l <= L; ++l) {
        out.mats.push_back(cur);
        out.lambda_fixed.push_back(mat_lambda(cur, s));
        out.lambda_shrunk.push_back(mat_lambda(cur, s_shrunk));
        if (l < L) {
            Matrix next;
            next.reserve(cur.size());
            FieldElem pc = Mt.field->integer(static_cast<long>(p));
            for (const auto& row : cur) {
                std::vector<LaurentSeries> r2;
                r2.reserve(row.size());
                for (const auto& e : row) r2.push_back(e.frobenius_twist().scaled(pc));
                next.push_back(std::move(r2));
            }
            cur = std::move(next);
            s_shrunk = s_shrunk / static_cast<long>(p);
            s_shrunk.canonicalize();
        }
    }
    out.monotone_certified = true;
    for (size_t l = 0; l + 1 < out.lambda_fixed.size(); ++l) {
        const ExtRat& a = out.lambda_fixed[l];
        const ExtRat& b = out.lambda_fixed[l + 1];
        bool ok = b.is_inf() || (!a.is_inf() && b.finite() >= a.finite() + 1);
        if (!ok) out.monotone_certified = false;
    }
    return out;
}

TaylorSolution taylor_solution_matrix(const NablaModule& M, long long S,
                                      const std::vector<Rat>& s_list) {
    if (S < 2) throw precondition_error("iteration budget must be at least 2");
    for (const auto& s : s_list) require_sample_in_window(M, s);
    NablaModule Md = with_form(M, OpForm::ddt);
    const long long p = Md.field->prime();
    const long long W = (S + 2) / 3;
    const long long start = S - W + 1;

    TaylorSolution out;
    out.coeffs.push_back(identity_matrix(Md.field, Md.rank));
    std::vector<std::optional<Rat>> best(s_list.size());
    Matrix D = identity_matrix(Md.field, Md.rank);
    Rat fact(1);
    for (long long m = 1; m <= S; ++m) {
        D = mat_add(mat_derivative(D), mat_mul(Md.N, D));
        fact *= static_cast<long>(m);
        Rat inv_fact = Rat(1) / fact;
        inv_fact.canonicalize();
        FieldElem scale = Md.field->rational(inv_fact);
        Matrix A = D;
        for (auto& row : A)
            for (auto& e : row) e = e.scaled(scale);
        out.coeffs.push_back(std::move(A));
        if (m < start) continue;
        Rat vfact(static_cast<long>(factorial_vp(m, p)));
        for (size_t i = 0; i < s_list.size(); ++i) {
            ExtRat lam = mat_lambda(D, s_list[i]);
            if (lam.is_inf()) continue;
            Rat cand = (vfact - lam.finite()) / static_cast<long>(m);
            cand.canonicalize();
            if (!best[i] || cand > *best[i]) best[i] = cand;
        }
    }
    for (size_t i = 0; i < s_list.size(); ++i) {
        Rat r = best[i] && *best[i] > s_list[i] ? *best[i] : s_list[i];
        out.radius.emplace_back(s_list[i], r);
    }
    return out;
}

OverconvergenceReport overconvergence_check(const NablaModule& M, const std::vector<Rat>& s_list,
                                            long long S) {
    if (s_list.size() < 2) throw precondition_error("need at least two samples");
    for (size_t i = 0; i + 1 < s_list.size(); ++i)
        if (!(s_list[i + 1] < s_list[i]))
            throw precondition_error("samples must strictly decrease toward 0");
    if (!(s_list.back() > 0)) throw precondition_error("samples must be positive");

    auto samples = spectral_many(M, s_list, S);
    OverconvergenceReport rep;
    bool all_zero = true, nonincreasing = true;
    for (size_t i = 0; i < samples.size(); ++i) {
        Rat d = samples[i].r - samples[i].s;
        d.canonicalize();
        rep.samples.push_back(OverconvergenceSample{samples[i].s, samples[i].r, d});
        if (d != 0) all_zero = false;
        if (i > 0 && rep.samples[i].r_minus_s > rep.samples[i - 1].r_minus_s) nonincreasing = false;
    }
    rep.solvable =
        all_zero || (nonincreasing && rep.samples.back().r_minus_s < rep.samples.front().r_minus_s);
    return rep;
}

DiscTransformResult disc_transform(DiscKind kind, long long p_or_n, const Rat& s, const Rat& lambda_r) {
    if (!(s > 0)) throw precondition_error("rho-exponent must be positive");
    auto frac = [](const Rat& a, long long d) {
        Rat r = a / static_cast<long>(d);
        r.canonicalize();
        return r;
    };
    switch (kind) {
        case DiscKind::TameN: {
            if (p_or_n < 1) throw precondition_error("tame degree must be positive");
            Rat s2 = frac(s, p_or_n);
            return DiscTransformResult{s2, lambda_r + s2};
        }
        case DiscKind::FrobeniusSmall: {
            long long p = p_or_n;
            if (p < 2) throw precondition_error("p must be a prime");
            Rat thresh(static_cast<long>(p), static_cast<long>(p - 1));
            if (lambda_r < thresh)
                throw precondition_error("small-radius branch needs lambda_r >= p/(p-1)");
            Rat s2 = frac(s, p);
            return DiscTransformResult{s2, lambda_r - 1 + s2};
        }
        case DiscKind::FrobeniusLarge: {
            long long p = p_or_n;
            if (p < 2) throw precondition_error("p must be a prime");
            Rat thresh(static_cast<long>(p), static_cast<long>(p - 1));
            if (!(lambda_r > 0) || !(lambda_r < thresh))
                throw precondition_error("large-radius branch needs 0 < lambda_r < p/(p-1)");
            Rat s2 = frac(s, p);
            return DiscTransformResult{s2, frac(lambda_r, p) + s2};
        }
        case DiscKind::Wild: {
            long long p = p_or_n;
            if (p < 2) throw precondition_error("p must be a prime");
            Rat thresh(static_cast<long>(p), static_cast<long>(p - 1));
            if (!(s < thresh)) throw precondition_error("wild pairing needs s < p/(p-1)");
            if (!(lambda_r > 0)) throw precondition_error("wild pairing needs lambda_r > 0");
            Rat shift = frac(s * Rat(static_cast<long>(2 - p)), p);
            return DiscTransformResult{frac(s, p), lambda_r + shift};
        }
    }
    throw robba::error("internal: unknown disc transform kind");
}

Rat wild_break_transform(const Rat& beta, long long n, long long p, BreakDirection dir) {
    if (n < 1) throw precondition_error("n must be a positive integer");
    if (p < 2) throw precondition_error("p must be a prime");
    Rat nn(static_cast<long>(n)), pp(static_cast<long>(p));
    if (dir == BreakDirection::Push) {
        if (beta < nn) throw precondition_error("push requires beta >= n");
        Rat r = beta * pp - nn * (pp - 1);
        r.canonicalize();
        return r;
    }
    if (beta < nn) throw precondition_error("pull requires beta >= n");
    Rat r = (beta + nn * (pp - 1)) / pp;
    r.canonicalize();
    return r;
}

} // namespace robba
