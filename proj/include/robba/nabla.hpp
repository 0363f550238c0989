#pragma once

#include <utility>
#include <vector>

#include "robba/laurent.hpp"

namespace robba {

using Matrix = std::vector<std::vector<LaurentSeries>>;

enum class OpForm { ddt, theta }; // d/dt vs t d/dt

// A differential module on an annulus, presented by the matrix of the chosen
// operator on a fixed basis: op e_j = sum_i N[i][j] e_i. The window
// (s_min, s_max) is the log-radius range on which the entries are certified.
struct NablaModule {
    FieldPtr field;
    long long rank = 0;
    OpForm form = OpForm::ddt;
    Matrix N;
    Rat s_min, s_max;
};

NablaModule make_module(FieldPtr field, OpForm form, Matrix N, const Rat& s_min, const Rat& s_max);
NablaModule with_form(const NablaModule& M, OpForm form); // exact conversion

Matrix identity_matrix(const FieldPtr& field, long long n);
Matrix mat_add(const Matrix& A, const Matrix& B);
Matrix mat_mul(const Matrix& A, const Matrix& B);
Matrix mat_derivative(const Matrix& A);
// Minimum certified Gauss value over all entries.
ExtRat mat_lambda(const Matrix& A, const Rat& s);
LaurentSeries mat_det(const Matrix& A); // cofactor expansion
Matrix mat_adjugate(const Matrix& A);   // transposed cofactors; A * adj = det * I

long long default_budget(long long p); // 8 p^2

// D_0 = I, D_{m+1} = d/dt(D_m) + N D_m, in d/dt form.
std::vector<Matrix> derivative_matrices(const NablaModule& M, long long S);

struct SpectralSample {
    Rat s;
    Rat lambda_spec;   // min(lambda_ring, lambda_tail)
    Rat lambda_ring;   // 1/(p-1) - s
    ExtRat lambda_tail; // max over the tail window of lambda_s(D_m)/m
    Rat r;             // max(s, 1/(p-1) - lambda_spec)
    long long iterations;
    long long tail_window;
};

SpectralSample spectral_norm(const NablaModule& M, const Rat& s, long long S);

struct RadiusProfile {
    std::vector<SpectralSample> samples;
};

RadiusProfile generic_radius_profile(const NablaModule& M, const std::vector<Rat>& s_list, long long S);

struct BreakEstimate {
    Rat s_small, s_large;
    Rat beta_small, beta_large; // r(s)/s - 1 at each sample
    Rat beta;                   // headline: the value at s_small
    Rat delta;
    bool consistent;
    long long budget_used;
};

// Two-sample break estimate with doubling retries while the samples disagree
// beyond tolerance (at most three retries).
BreakEstimate highest_break_estimate(const NablaModule& M, const Rat& s1, const Rat& s2, long long S);

// Rank-1 module with N = [-pi n b t^{-n-1}] in d/dt form; the field must
// designate pi with pi^{p-1} = -p, and gcd(n, p) = 1.
NablaModule artin_schreier_module(const FieldPtr& field, const FieldElem& b, long long n,
                                  const Rat& s_min, const Rat& s_max);

// t d/dt acting by a constant nilpotent matrix (C^n = 0 is verified).
NablaModule unipotent_from_nilpotent(const FieldPtr& field,
                                     const std::vector<std::vector<FieldElem>>& C,
                                     const Rat& s_min, const Rat& s_max);

// Both dimensions equal dim ker C, by exact elimination.
std::pair<long long, long long> h0_h1_dims_unipotent(const FieldPtr& field,
                                                     const std::vector<std::vector<FieldElem>>& C);

NablaModule tensor(const NablaModule& A, const NablaModule& B);
NablaModule direct_sum(const NablaModule& A, const NablaModule& B);
NablaModule dual(const NablaModule& A);

// Substitute t -> t^n with the chain rule; window becomes (s/n). Requires
// gcd(n, p) = 1; the Frobenius pullback (n = p, with the coefficient
// Frobenius applied) is pullback_frobenius.
NablaModule pullback_power(const NablaModule& M, long long n);
NablaModule pullback_frobenius(const NablaModule& M);

struct FrobeniusIteration {
    std::vector<Matrix> mats; // N_0..N_L, t d/dt form
    std::vector<ExtRat> lambda_fixed;  // lambda_s(N_l) at the given s
    std::vector<ExtRat> lambda_shrunk; // lambda_{s/p^l}(N_l)
    bool monotone_certified; // every fixed-s step gained at least 1
};

// N_{l+1} = p * (Frobenius twist of N_l), for the standard lift.
FrobeniusIteration frobenius_structure_iterate(const NablaModule& M, long long L, const Rat& s);

struct TaylorSolution {
    std::vector<Matrix> coeffs; // Y = sum coeffs[m] Delta^m, coeffs[m] = D_m/m!
    std::vector<std::pair<Rat, Rat>> radius; // (s, estimated convergence r)
};

TaylorSolution taylor_solution_matrix(const NablaModule& M, long long S,
                                      const std::vector<Rat>& s_list);

struct OverconvergenceSample {
    Rat s, r, r_minus_s;
};
struct OverconvergenceReport {
    std::vector<OverconvergenceSample> samples; // s strictly decreasing
    bool solvable; // r - s nonincreasing toward 0 along shrinking s
};

OverconvergenceReport overconvergence_check(const NablaModule& M, const std::vector<Rat>& s_list,
                                            long long S);

enum class DiscKind { TameN, FrobeniusSmall, FrobeniusLarge, Wild };

struct DiscTransformResult {
    Rat s_out;
    Rat log_radius_out;
};

// Paired-disc rules in log coordinates; inputs are the rho-exponent s and the
// relative radius exponent lambda_r, output log radius is absolute.
DiscTransformResult disc_transform(DiscKind kind, long long p_or_n, const Rat& s, const Rat& lambda_r);

enum class BreakDirection { Push, Pull };
Rat wild_break_transform(const Rat& beta, long long n, long long p, BreakDirection dir);

struct ReduceResult {
    bool ok;
    Matrix U;            // exact Laurent-polynomial right multiplier
    ExtRat margin_lo, margin_hi; // certified lambda(MU - I) at the endpoints
    std::string diagnostics;
};

// Lattice-style reduction: find an exact Laurent-polynomial U with
// lambda(MU - I) > 0 across [s_lo, s_hi]. Requires det M to have a dominant
// unit term on the window.
ReduceResult approximate_reduce(const Matrix& M, const Rat& s_lo, const Rat& s_hi, long long order);

struct AntecedentResult {
    NablaModule F;  // t d/dt form on the window (p s_min, p s_max)
    Matrix W;       // change of basis: columns are the selected sections
    ExtRat det_margin; // certified margin of det W on the window
    ExtRat junk_lambda; // largest certified bound on the discarded off-grid entries
    std::vector<std::pair<Rat, Rat>> radius_check; // (p s, r_F(p s)) vs expectation handled by caller
};

// Descend through the Frobenius: requires zeta_p in the field and
// r(s) < 1/(p-1) + s at both window endpoints.
AntecedentResult frobenius_antecedent(const NablaModule& M, long long order);

} // namespace robba
