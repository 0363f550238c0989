#pragma once

#include <utility>
#include <vector>

#include "robba/rational.hpp"

namespace robba {

// Piecewise-linear increasing function through (0,0): linear interpolation
// between vertices, final_slope beyond the last vertex. Transfer functions
// phi are concave; their inverses psi are convex. Producers return the
// normalized form (no collinear interior vertices), so equal functions have
// equal vertex lists.
struct HerbrandFn {
    std::vector<std::pair<Rat, Rat>> vertices;
    Rat final_slope;

    HerbrandFn normalized() const;
    friend bool operator==(const HerbrandFn& a, const HerbrandFn& b) {
        return a.vertices == b.vertices && a.final_slope == b.final_slope;
    }
};

// Multiset of ramification breaks with multiplicities.
using BreakData = std::vector<std::pair<Rat, long long>>;

struct HasseArfPolygon {
    std::vector<std::pair<Rat, Rat>> vertices; // x = 0..n, unit-width segments
    bool integer_vertices;
};

// Transfer function of a lower-numbering filtration given by group orders
// [|G_0|, |G_1|, ...]: slope |G_{i+1}|/|G_0| on (i, i+1), integrated from 0.
HerbrandFn phi_from_lower(const std::vector<long long>& orders);

// Transfer function of an Artin-Schreier character with a single break at d:
// phi(m) = m for m <= d, d + (m-d)/p beyond. Requires gcd(d, p) = 1.
HerbrandFn artin_schreier_phi(long long d, long long p);

HerbrandFn psi(const HerbrandFn& f);
HerbrandFn compose_phi(const HerbrandFn& outer, const HerbrandFn& inner);
Rat herbrand_eval(const HerbrandFn& f, const Rat& u);

Rat highest_break_combine(const Rat& b1, const Rat& b2);

HasseArfPolygon hasse_arf_polygon(const BreakData& breaks);

Int bound_abelian_image(long long p, long long n, long long ell);
Int bound_frobenius_order(const Int& q, long long d);
Rat bound_frobenius_break(long long p, const Rat& s_eps);
Int bound_full_image(const Int& f_n, long long p, long long n, long long ell);

} // namespace robba
