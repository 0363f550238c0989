#include "robba/nabla.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace robba {

namespace {

// Dense polynomial in t with field coefficients, no trailing zeros.
using Poly = std::vector<FieldElem>;

void ptrim(Poly& a) {
    while (!a.empty() && a.back().is_zero()) a.pop_back();
}

long long pdeg(const Poly& a) { return static_cast<long long>(a.size()) - 1; }

Poly psub(const FieldPtr& field, const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), field->zero());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = r[i] + a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = r[i] - b[i];
    ptrim(r);
    return r;
}

Poly pscale(const Poly& a, const FieldElem& c) {
    Poly r;
    r.reserve(a.size());
    for (const auto& x : a) r.push_back(x * c);
    ptrim(r);
    return r;
}

Poly pmul(const FieldPtr& field, const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, field->zero());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
    ptrim(r);
    return r;
}

// a = q b + r with deg r < deg b; b must be nonzero.
void pdivmod(const FieldPtr& field, const Poly& a, const Poly& b, Poly& q, Poly& r) {
    if (b.empty()) throw error("polynomial division by zero");
    q.assign(a.empty() ? 0 : a.size(), field->zero());
    r = a;
    FieldElem lead = b.back().inverse();
    while (pdeg(r) >= pdeg(b)) {
        long long d = pdeg(r) - pdeg(b);
        FieldElem c = r.back() * lead;
        q[d] = q[d] + c;
        for (std::size_t i = 0; i < b.size(); ++i) r[d + i] = r[d + i] - c * b[i];
        ptrim(r);
        if (r.empty()) break;
    }
    ptrim(q);
}

Poly pmonic(const Poly& a) {
    if (a.empty()) return a;
    return pscale(a, a.back().inverse());
}

Poly pgcd(const FieldPtr& field, Poly a, Poly b) {
    while (!b.empty()) {
        Poly q, r;
        pdivmod(field, a, b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    return pmonic(a);
}

struct PXgcd {
    Poly g, x, y; // x a + y b = g, g monic (empty iff a = b = 0)
};

PXgcd pxgcd(const FieldPtr& field, const Poly& a, const Poly& b) {
    Poly r0 = a, r1 = b;
    Poly x0 = {field->one()}, x1 = {};
    Poly y0 = {}, y1 = {field->one()};
    while (!r1.empty()) {
        Poly q, rem;
        pdivmod(field, r0, r1, q, rem);
        r0 = std::move(r1);
        r1 = std::move(rem);
        Poly x2 = psub(field, x0, pmul(field, q, x1));
        x0 = std::move(x1);
        x1 = std::move(x2);
        Poly y2 = psub(field, y0, pmul(field, q, y1));
        y0 = std::move(y1);
        y1 = std::move(y2);
    }
    PXgcd out;
    if (r0.empty()) return out;
    FieldElem c = r0.back().inverse();
    out.g = pscale(r0, c);
    out.x = pscale(x0, c);
    out.y = pscale(y0, c);
    return out;
}

bool punit(const Poly& g) { return pdeg(g) == 0; }

struct Stripped {
    long long shift = 0;
    Poly f; // value = t^shift * f(t), f(0) != 0 unless f empty
};

Stripped strip(const LaurentSeries& x) {
    Stripped s;
    if (x.stored_zero()) return s;
    s.shift = x.lo_exp();
    s.f.assign(static_cast<std::size_t>(x.hi_exp() - s.shift + 1), x.field()->zero());
    for (const auto& [e, c] : x.terms()) s.f[static_cast<std::size_t>(e - s.shift)] = c;
    return s;
}

LaurentSeries unstrip(const FieldPtr& field, const Poly& f, long long shift) {
    std::map<long long, FieldElem> terms;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!f[i].is_zero()) terms.emplace(shift + static_cast<long long>(i), f[i]);
    return LaurentSeries::make(field, std::move(terms));
}

// gcd over K[t, 1/t]: the t-power is a unit, so this is the monic poly gcd
// of the stripped parts. Empty means every entry is zero.
Poly row_gcd(const FieldPtr& field, const std::vector<LaurentSeries>& v) {
    Poly g;
    for (const auto& x : v) {
        if (x.stored_zero()) continue;
        g = pgcd(field, g, strip(x).f);
        if (punit(g)) break;
    }
    return g;
}

LaurentSeries divexact(const LaurentSeries& x, const Poly& g) {
    if (x.stored_zero()) return x;
    Stripped s = strip(x);
    Poly q, r;
    pdivmod(x.field(), s.f, g, q, r);
    if (!r.empty()) throw error("inexact polynomial division");
    return unstrip(x.field(), q, s.shift);
}

Matrix matrix_minor(const Matrix& A, std::size_t r, std::size_t c) {
    Matrix out;
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (i == r) continue;
        std::vector<LaurentSeries> row;
        for (std::size_t j = 0; j < A.size(); ++j)
            if (j != c) row.push_back(A[i][j]);
        out.push_back(std::move(row));
    }
    return out;
}

LaurentSeries cofactor(const Matrix& A, std::size_t r, std::size_t c) {
    if (A.size() == 1) return LaurentSeries::constant(A[0][0].field(), 1);
    LaurentSeries d = mat_det(matrix_minor(A, r, c));
    return (r + c) % 2 == 0 ? d : -d;
}

// Exact matrix with the given last row and unit-monomial determinant. The
// row's gcd over K[t, 1/t] must be a unit; single entries must then be
// monomials, which the gcd condition guarantees at the leaves.
Matrix complete_row(const FieldPtr& field, const std::vector<LaurentSeries>& v) {
    std::size_t m = v.size();
    if (m == 1) {
        if (v[0].terms().size() != 1) throw error("row completion leaf is not a monomial");
        return {{v[0]}};
    }
    LaurentSeries zero(field);
    LaurentSeries one = LaurentSeries::constant(field, 1);
    bool prefix_zero = true;
    for (std::size_t i = 0; i + 1 < m; ++i)
        if (!v[i].stored_zero()) prefix_zero = false;
    Matrix B(m, std::vector<LaurentSeries>(m, zero));
    if (prefix_zero) {
        if (v[m - 1].terms().size() != 1) throw error("row completion leaf is not a monomial");
        for (std::size_t i = 0; i + 1 < m; ++i) B[i][i] = one;
        B[m - 1] = v;
        return B;
    }
    std::vector<LaurentSeries> head(v.begin(), v.end() - 1);
    Poly d = row_gcd(field, head);
    std::vector<LaurentSeries> reduced;
    for (const auto& x : head) reduced.push_back(divexact(x, d));
    Matrix T = complete_row(field, reduced);
    Stripped tail = strip(v[m - 1]);
    PXgcd bz = pxgcd(field, d, tail.f);
    if (!punit(bz.g)) throw error("row completion gcd is not a unit");
    FieldElem norm = bz.g[0].inverse();
    LaurentSeries a = unstrip(field, pscale(bz.x, norm), 0);
    LaurentSeries b = unstrip(field, pscale(bz.y, norm), -tail.shift);
    for (std::size_t i = 0; i + 2 < m; ++i)
        for (std::size_t j = 0; j + 1 < m; ++j) B[i][j] = T[i][j];
    for (std::size_t j = 0; j + 1 < m; ++j) B[m - 2][j] = -(b * reduced[j]);
    B[m - 2][m - 1] = a;
    B[m - 1] = v;
    return B;
}

std::optional<ExtRat> mat_cert_min(const Matrix& G, const Rat& s) {
    ExtRat best = ExtRat::infinity();
    for (const auto& row : G)
        for (const auto& e : row) {
            auto l = e.certified_lambda(s);
            if (!l) return std::nullopt;
            best = min(best, *l);
        }
    return best;
}

Matrix subtract_identity(Matrix G) {
    LaurentSeries one = LaurentSeries::constant(G[0][0].field(), 1);
    for (std::size_t i = 0; i < G.size(); ++i) G[i][i] = G[i][i] - one;
    return G;
}

} // namespace

LaurentSeries mat_det(const Matrix& A) {
    std::size_t n = A.size();
    if (n == 1) return A[0][0];
    const FieldPtr& field = A[0][0].field();
    LaurentSeries acc(field);
    for (std::size_t j = 0; j < n; ++j) {
        LaurentSeries term = A[0][j] * mat_det(matrix_minor(A, 0, j));
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

Matrix mat_adjugate(const Matrix& A) {
    std::size_t n = A.size();
    Matrix out(n, std::vector<LaurentSeries>(n, LaurentSeries(A[0][0].field())));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i][j] = cofactor(A, j, i);
    return out;
}

ReduceResult approximate_reduce(const Matrix& M, const Rat& s_lo, const Rat& s_hi, long long order) {
    if (M.empty()) throw precondition_error("reduction needs a nonempty matrix");
    std::size_t n = M.size();
    for (const auto& row : M)
        if (row.size() != n) throw precondition_error("reduction needs a square matrix");
    const FieldPtr& field = M[0][0].field();
    for (const auto& row : M)
        for (const auto& e : row)
            if (e.field() != field) throw precondition_error("matrix entries live in different fields");
    if (!(0 < s_lo && s_lo <= s_hi)) throw precondition_error("reduction window must satisfy 0 < s_lo <= s_hi");
    if (order < 1) throw precondition_error("reduction order must be positive");

    const ExtRat zero_bound = ExtRat(Rat(0));
    auto both_positive = [&](const Matrix& G, ExtRat& lo, ExtRat& hi) {
        auto a = mat_cert_min(G, s_lo);
        auto b = mat_cert_min(G, s_hi);
        if (!a || !b) return false;
        lo = *a;
        hi = *b;
        return lo > zero_bound && hi > zero_bound;
    };

    LaurentSeries d = mat_det(M);
    LaurentSeries dinv = invert(d, s_lo, s_hi, order);
    Matrix V = identity_matrix(field, static_cast<long long>(n));
    V[n - 1][n - 1] = dinv.as_exact_polynomial();

    if (n == 1) {
        ReduceResult res{false, V, ExtRat(Rat(0)), ExtRat(Rat(0)), ""};
        Matrix G = subtract_identity(mat_mul(M, V));
        res.ok = both_positive(G, res.margin_lo, res.margin_hi);
        if (!res.ok) res.diagnostics = "scaled entry is not certified close to 1";
        return res;
    }

    Matrix A = mat_mul(M, V);
    LaurentSeries one = LaurentSeries::constant(field, 1);
    std::ostringstream diag;

    for (std::size_t rr = 0; rr < n; ++rr) {
        std::size_t r = n - 1 - rr; // bottom row first
        std::vector<LaurentSeries> beta;
        for (std::size_t i = 0; i < n; ++i) beta.push_back(A[r][i].as_exact_polynomial());

        std::vector<LaurentSeries> cof;
        for (std::size_t i = 0; i < n; ++i) cof.push_back(cofactor(A, r, i));

        auto expansion_margin = [&](const std::vector<LaurentSeries>& b) -> std::optional<ExtRat> {
            LaurentSeries s(field);
            for (std::size_t i = 0; i < n; ++i) s = s + b[i] * cof[i];
            s = s - one;
            auto lo = s.certified_lambda(s_lo);
            auto hi = s.certified_lambda(s_hi);
            if (!lo || !hi) return std::nullopt;
            ExtRat m = min(*lo, *hi);
            if (!(m > zero_bound)) return std::nullopt;
            return m;
        };

        if (!expansion_margin(beta)) {
            diag << "row " << r << ": cofactor expansion margin failed; ";
            continue;
        }

        // The completion needs the row's gcd to be a unit. When it is not,
        // nudge one entry by a small power of p; the margin above must
        // survive the nudge. The last entry is tried first.
        if (!punit(row_gcd(field, beta))) {
            bool fixed = false;
            for (std::size_t off = 0; off < n && !fixed; ++off) {
                std::size_t pos = n - 1 - off;
                Rat pk(1);
                for (int k = 1; k <= 24 && !fixed; ++k) {
                    pk *= field->prime();
                    std::vector<LaurentSeries> cand = beta;
                    cand[pos] = cand[pos] + LaurentSeries::constant(field, pk);
                    if (!punit(row_gcd(field, cand))) continue;
                    if (!expansion_margin(cand)) continue;
                    beta = std::move(cand);
                    fixed = true;
                }
            }
            if (!fixed) {
                diag << "row " << r << ": row gcd is not a unit and no nudge preserves the margin; ";
                continue;
            }
        }

        Matrix B0 = complete_row(field, beta);
        // The completion puts beta at the bottom; move it to row r so the
        // pivot lands on the diagonal, then normalize the determinant to 1
        // by scaling one of the other rows.
        Matrix B = B0;
        B[r] = B0[n - 1];
        for (std::size_t i = 0, src = 0; i < n; ++i) {
            if (i == r) continue;
            B[i] = B0[src++];
        }
        LaurentSeries w = mat_det(B);
        if (!w.exact() || w.terms().size() != 1) throw error("row completion determinant is not a monomial");
        {
            FieldElem c = w.terms().begin()->second;
            long long k = w.terms().begin()->first;
            std::size_t scale_row = (r == 0) ? 1 : 0;
            for (std::size_t j = 0; j < n; ++j)
                B[scale_row][j] = B[scale_row][j].scaled(c.inverse()).shifted(-k);
        }
        Matrix Binv = mat_adjugate(B);

        Matrix X = mat_mul(A, Binv);
        {
            LaurentSeries pivot = X[r][r] - one;
            auto lo = pivot.certified_lambda(s_lo);
            auto hi = pivot.certified_lambda(s_hi);
            if (!lo || !hi || !(*lo > zero_bound) || !(*hi > zero_bound)) {
                diag << "row " << r << ": pivot not certified close to 1; ";
                continue;
            }
        }

        Matrix EX = identity_matrix(field, static_cast<long long>(n));
        for (std::size_t j = 0; j < n; ++j)
            if (j != r) EX[r][j] = -(X[r][j].as_exact_polynomial());
        Matrix Y = mat_mul(X, EX);

        Matrix Ym = matrix_minor(Y, r, r);
        ReduceResult sub = approximate_reduce(Ym, s_lo, s_hi, order);
        if (!sub.ok) {
            diag << "row " << r << ": inner block failed (" << sub.diagnostics << "); ";
            continue;
        }
        Matrix EU = identity_matrix(field, static_cast<long long>(n));
        for (std::size_t i = 0, mi = 0; i < n; ++i) {
            if (i == r) continue;
            for (std::size_t j = 0, mj = 0; j < n; ++j) {
                if (j == r) continue;
                EU[i][j] = sub.U[mi][mj];
                ++mj;
            }
            ++mi;
        }
        Matrix Z = mat_mul(Y, EU);
        Matrix EW = identity_matrix(field, static_cast<long long>(n));
        for (std::size_t i = 0; i < n; ++i)
            if (i != r) EW[i][r] = -(Z[i][r].as_exact_polynomial());

        Matrix U = mat_mul(mat_mul(mat_mul(V, Binv), mat_mul(EX, EU)), EW);
        ReduceResult res{false, U, ExtRat(Rat(0)), ExtRat(Rat(0)), ""};
        Matrix G = subtract_identity(mat_mul(M, U));
        res.ok = both_positive(G, res.margin_lo, res.margin_hi);
        if (res.ok) return res;
        diag << "row " << r << ": final certificate not positive; ";
    }

    ReduceResult res{false, identity_matrix(field, static_cast<long long>(n)),
                     ExtRat(Rat(0)), ExtRat(Rat(0)), diag.str()};
    return res;
}

} // namespace robba
