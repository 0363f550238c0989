#include "robba/nabla.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace robba {

namespace {

long long floor_div(long long a, long long b) {
    long long q = a / b, r = a % b;
    return (r != 0 && (r < 0) != (b < 0)) ? q - 1 : q;
}

long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

// Certified gap between the dominant stored term and everything else, at
// both endpoints; this is exactly what geometric inversion of det W needs.
std::optional<ExtRat> dominance_gap(const LaurentSeries& x, const Rat& s_lo, const Rat& s_hi) {
    if (x.stored_zero()) return std::nullopt;
    bool have = false;
    long long d = 0;
    ExtRat best = ExtRat::infinity();
    for (const auto& [e, c] : x.terms()) {
        ExtRat val = c.valuation() + Rat(Rat(static_cast<long>(e)) * s_lo);
        if (!have || val < best) {
            best = val;
            d = e;
            have = true;
        }
    }
    LaurentSeries m = LaurentSeries::monomial(x.field(), x.coeff(d).inverse(), -d);
    LaurentSeries y = x * m - LaurentSeries::constant(x.field(), 1);
    auto lo = y.certified_lambda(s_lo);
    auto hi = y.certified_lambda(s_hi);
    if (!lo || !hi) return std::nullopt;
    ExtRat g = min(*lo, *hi);
    if (!(g > ExtRat(Rat(0)))) return std::nullopt;
    return g;
}

Matrix zero_matrix(const FieldPtr& field, std::size_t n) {
    return Matrix(n, std::vector<LaurentSeries>(n, LaurentSeries(field)));
}

Matrix mat_scaled(const Matrix& A, const FieldElem& c) {
    Matrix out = A;
    for (auto& row : out)
        for (auto& e : row) e = e.scaled(c);
    return out;
}

Matrix mat_shifted(const Matrix& A, long long d) {
    Matrix out = A;
    for (auto& row : out)
        for (auto& e : row) e = e.shifted(d);
    return out;
}

Matrix mat_theta(const Matrix& A) {
    Matrix out = A;
    for (auto& row : out)
        for (auto& e : row) e = e.theta();
    return out;
}

} // namespace

AntecedentResult frobenius_antecedent(const NablaModule& M, long long order) {
    const FieldPtr& field = M.field;
    long long p = static_cast<long long>(field->prime());
    std::size_t n = static_cast<std::size_t>(M.rank);
    if (order < 1) throw precondition_error("antecedent order must be positive");
    if (!field->has_zeta()) throw precondition_error("antecedent search needs a p-th root of unity");

    // The descent hypothesis: radius strictly above the cyclotomic one at
    // both window endpoints.
    long pl = static_cast<long>(p);
    long long budget = default_budget(p);
    Rat ring_gap(1, 1);
    ring_gap /= static_cast<long>(p - 1);
    for (const Rat& s : {M.s_min, M.s_max}) {
        SpectralSample sample = spectral_norm(M, s, budget);
        if (!(sample.r < ring_gap + s))
            throw precondition_error("radius does not clear the cyclotomic bound on this window");
    }

    NablaModule Mt = with_form(M, OpForm::theta);
    const Matrix& C = Mt.N;

    long long n_taylor = p * order + p + 1;
    std::vector<Matrix> D = derivative_matrices(M, n_taylor); // D_1..D_{n_taylor}

    // Parallel transport to zeta^e t, truncated: H_e = sum ((zeta^e-1)^n/n!) t^n D_n.
    FieldElem zeta = field->zeta();
    std::vector<Matrix> H;
    for (long long e = 0; e < p; ++e) {
        FieldElem step = zeta.pow(static_cast<unsigned long>(e)) - field->one();
        Matrix acc = identity_matrix(field, static_cast<long long>(n));
        FieldElem coeff = field->one();
        Int fact = 1;
        for (long long m = 1; m <= n_taylor; ++m) {
            coeff = coeff * step;
            fact *= static_cast<long>(m);
            if (coeff.is_zero()) break;
            FieldElem scale = coeff * field->rational(Rat(Int(1), fact));
            acc = mat_add(acc, mat_shifted(mat_scaled(D[static_cast<std::size_t>(m - 1)], scale), m));
        }
        H.push_back(std::move(acc));
    }

    // Averaged projectors F_i = (1/p) t^{-i} sum_e zeta^{-ei} H_e; their
    // columns span the candidate sections fixed by the twist.
    FieldElem inv_p = field->rational(Rat(1, 1) / pl);
    std::vector<std::vector<LaurentSeries>> cand; // cand[k] = column vector
    for (long long i = 0; i < p; ++i) {
        Matrix acc = zero_matrix(field, n);
        for (long long e = 0; e < p; ++e) {
            unsigned long k = static_cast<unsigned long>(((p - (e * i) % p) % p));
            acc = mat_add(acc, mat_scaled(H[static_cast<std::size_t>(e)], zeta.pow(k)));
        }
        acc = mat_shifted(mat_scaled(acc, inv_p), -i);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<LaurentSeries> col;
            for (std::size_t row = 0; row < n; ++row) col.push_back(acc[row][j].as_exact_polynomial());
            cand.push_back(std::move(col));
        }
    }

    // Pick the n of the p*n candidates whose determinant is best certified
    // invertible; enumeration is lexicographic and ties keep the first.
    std::size_t pn = cand.size();
    if (pn > 24) throw precondition_error("rank too large for the basis search");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::optional<ExtRat> best_gap;
    Matrix W = zero_matrix(field, n);
    while (true) {
        Matrix candW = zero_matrix(field, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t row = 0; row < n; ++row) candW[row][j] = cand[idx[j]][row];
        auto gap = dominance_gap(mat_det(candW), M.s_min, M.s_max);
        if (gap && (!best_gap || *gap > *best_gap)) {
            best_gap = gap;
            W = candW;
        }
        // next combination
        std::size_t k = n;
        while (k > 0) {
            --k;
            if (idx[k] + (n - k) < pn) {
                ++idx[k];
                for (std::size_t j = k + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (k == 0) {
                k = pn; // signal exhaustion
                break;
            }
        }
        if (k == pn || n == 0) break;
    }
    if (!best_gap) throw precision_error("no certified basis among the averaged sections");

    // Operator matrix in the new basis: A = W^{-1} (theta W + C W). The
    // inverse only needs its tail certified well past the junk threshold,
    // not all n_taylor powers of the geometric series.
    LaurentSeries detW = mat_det(W);
    LaurentSeries det_inv =
        invert(detW, M.s_min, M.s_max, n_taylor, Rat(static_cast<long>(2 * n_taylor)));
    Matrix Winv = mat_adjugate(W);
    for (auto& row : Winv)
        for (auto& e : row) e = e * det_inv;
    Matrix A = mat_mul(Winv, mat_add(mat_theta(W), mat_mul(C, W)));

    // Exponents away from the p-grid must be certified small before they
    // are discarded; what remains descends through t -> t^p.
    Rat junk_threshold = Rat(static_cast<long>(order)) * std::min(M.s_min, ring_gap) / 2;
    ExtRat junk_lambda = ExtRat::infinity();
    Matrix B = zero_matrix(field, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const LaurentSeries& a = A[i][j];
            std::map<long long, FieldElem> kept;
            for (const auto& [e, c] : a.terms()) {
                if (((e % p) + p) % p == 0) {
                    kept.emplace(e / p, c * inv_p);
                    continue;
                }
                ExtRat lo = c.valuation() + Rat(Rat(static_cast<long>(e)) * M.s_min);
                ExtRat hi = c.valuation() + Rat(Rat(static_cast<long>(e)) * M.s_max);
                ExtRat worst = min(lo, hi);
                if (!(worst >= ExtRat(junk_threshold)))
                    throw precision_error("off-grid entry mass is not certified small");
                junk_lambda = min(junk_lambda, worst);
            }
            Window win = Window::none();
            if (a.window().is_empty()) {
                win = Window::none();
            } else {
                const Window& aw = a.window();
                std::optional<long long> lo, hi;
                if (aw.lo) lo = ceil_div(*aw.lo, p);
                if (aw.hi) hi = floor_div(*aw.hi, p);
                win = Window{lo, hi};
                if (win.is_empty()) win = Window::none();
            }
            std::optional<TailBound> tail;
            if (a.tail()) {
                TailBound tb = *a.tail();
                tail = TailBound{Rat(tb.s_lo * pl), Rat(tb.s_hi * pl), tb.b_lo - Rat(1), tb.b_hi - Rat(1)};
            }
            // Off-grid terms are not the coefficient of any descended
            // exponent, so dropping them does not lose knowledge of B.
            bool exact = a.exact();
            if (exact) win = Window::all();
            B[i][j] = LaurentSeries::make(field, std::move(kept), exact, win, tail);
        }

    AntecedentResult out{
        make_module(field, OpForm::theta, std::move(B), Rat(M.s_min * pl), Rat(M.s_max * pl)),
        W,
        *best_gap,
        junk_lambda,
        {},
    };
    for (const Rat& s : {out.F.s_min, out.F.s_max})
        out.radius_check.emplace_back(s, spectral_norm(out.F, s, budget).r);
    return out;
}

} // namespace robba
