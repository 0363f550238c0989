#include "robba/herbrand.hpp"

#include <algorithm>

#include "robba/errors.hpp"

namespace robba {

namespace {

void validate(const HerbrandFn& f) {
    if (f.vertices.empty()) throw precondition_error("transfer function has no vertices");
    if (f.vertices.front().first != 0 || f.vertices.front().second != 0)
        throw precondition_error("transfer function must start at (0,0)");
    for (size_t i = 1; i < f.vertices.size(); ++i) {
        if (!(f.vertices[i - 1].first < f.vertices[i].first))
            throw precondition_error("transfer function vertices must be strictly increasing in u");
        if (!(f.vertices[i - 1].second < f.vertices[i].second))
            throw precondition_error("transfer function must be strictly increasing");
    }
    if (!(f.final_slope > 0)) throw precondition_error("transfer function needs a positive final slope");
}

Rat seg_slope(const std::pair<Rat, Rat>& a, const std::pair<Rat, Rat>& b) {
    Rat s = (b.second - a.second) / (b.first - a.first);
    s.canonicalize();
    return s;
}

} // namespace

HerbrandFn HerbrandFn::normalized() const {
    validate(*this);
    HerbrandFn r;
    r.final_slope = final_slope;
    r.vertices.push_back(vertices.front());
    for (size_t i = 1; i < vertices.size(); ++i) {
        Rat incoming = seg_slope(r.vertices.back(), vertices[i]);
        Rat outgoing = (i + 1 < vertices.size()) ? seg_slope(vertices[i], vertices[i + 1]) : final_slope;
        if (incoming != outgoing) r.vertices.push_back(vertices[i]);
    }
    return r;
}

HerbrandFn phi_from_lower(const std::vector<long long>& orders) {
    if (orders.empty()) throw precondition_error("filtration is empty");
    for (size_t i = 0; i < orders.size(); ++i) {
        if (orders[i] < 1) throw precondition_error("filtration orders must be positive");
        if (i > 0) {
            if (orders[i] > orders[i - 1])
                throw precondition_error("filtration orders must be nonincreasing");
            if (orders[i - 1] % orders[i] != 0)
                throw precondition_error("each filtration order must divide the previous one");
        }
    }
    if (orders.back() != 1) throw precondition_error("filtration must terminate at the trivial group");

    HerbrandFn f;
    f.vertices.emplace_back(Rat(0), Rat(0));
    Rat y(0);
    const long g0 = static_cast<long>(orders[0]);
    for (size_t i = 1; i < orders.size(); ++i) {
        Rat slope(static_cast<long>(orders[i]), g0);
        slope.canonicalize();
        y += slope;
        y.canonicalize();
        f.vertices.emplace_back(Rat(static_cast<long>(i)), y);
    }
    f.final_slope = Rat(1, g0);
    f.final_slope.canonicalize();
    return f.normalized();
}

HerbrandFn artin_schreier_phi(long long d, long long p) {
    if (d < 1) throw precondition_error("break must be a positive integer");
    if (p < 2) throw precondition_error("p must be a prime");
    Int g = gcd(Int(static_cast<long>(d)), Int(static_cast<long>(p)));
    if (g != 1) throw precondition_error("break must be prime to p");
    HerbrandFn f;
    f.vertices.emplace_back(Rat(0), Rat(0));
    f.vertices.emplace_back(Rat(static_cast<long>(d)), Rat(static_cast<long>(d)));
    f.final_slope = Rat(1, static_cast<long>(p));
    return f;
}

HerbrandFn psi(const HerbrandFn& f) {
    validate(f);
    HerbrandFn r;
    for (const auto& [u, y] : f.vertices) r.vertices.emplace_back(y, u);
    r.final_slope = Rat(1) / f.final_slope;
    r.final_slope.canonicalize();
    return r.normalized();
}

Rat herbrand_eval(const HerbrandFn& f, const Rat& u) {
    validate(f);
    if (u < 0) throw precondition_error("transfer functions are defined for u >= 0");
    const auto& vs = f.vertices;
    if (u >= vs.back().first) {
        Rat y = vs.back().second + f.final_slope * (u - vs.back().first);
        y.canonicalize();
        return y;
    }
    for (size_t i = 1; i < vs.size(); ++i) {
        if (u <= vs[i].first) {
            Rat y = vs[i - 1].second + seg_slope(vs[i - 1], vs[i]) * (u - vs[i - 1].first);
            y.canonicalize();
            return y;
        }
    }
    return vs.back().second; // unreachable
}

HerbrandFn compose_phi(const HerbrandFn& outer, const HerbrandFn& inner) {
    validate(outer);
    validate(inner);
    HerbrandFn inner_inv = psi(inner);
    std::vector<Rat> us;
    for (const auto& [u, y] : inner.vertices) us.push_back(u);
    for (const auto& [x, y] : outer.vertices) us.push_back(herbrand_eval(inner_inv, x));
    std::sort(us.begin(), us.end());
    us.erase(std::unique(us.begin(), us.end()), us.end());

    HerbrandFn r;
    for (const auto& u : us) r.vertices.emplace_back(u, herbrand_eval(outer, herbrand_eval(inner, u)));
    r.final_slope = outer.final_slope * inner.final_slope;
    r.final_slope.canonicalize();
    return r.normalized();
}

Rat highest_break_combine(const Rat& b1, const Rat& b2) {
    if (b1 < 0 || b2 < 0) throw precondition_error("breaks must be nonnegative");
    return b1 > b2 ? b1 : b2;
}

HasseArfPolygon hasse_arf_polygon(const BreakData& breaks) {
    std::vector<Rat> slopes;
    for (const auto& [b, m] : breaks) {
        if (b < 0) throw precondition_error("breaks must be nonnegative");
        if (m < 1) throw precondition_error("multiplicities must be positive");
        for (long long i = 0; i < m; ++i) slopes.push_back(b);
    }
    std::sort(slopes.begin(), slopes.end());
    HasseArfPolygon poly;
    poly.vertices.emplace_back(Rat(0), Rat(0));
    Rat y(0);
    bool integral = true;
    long x = 0;
    for (const auto& b : slopes) {
        y += b;
        y.canonicalize();
        ++x;
        poly.vertices.emplace_back(Rat(x), y);
        if (y.get_den() != 1) integral = false;
    }
    poly.integer_vertices = integral;
    return poly;
}

Int bound_abelian_image(long long p, long long n, long long ell) {
    if (p < 2) throw precondition_error("p must be a prime");
    if (n < 1 || ell < 0) throw precondition_error("need n >= 1 and ell >= 0");
    if (n * ell > 1000000) throw precondition_error("bound exponent is too large to materialize");
    Int r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p),
                  static_cast<unsigned long>(n * ell));
    return r;
}

Int bound_frobenius_order(const Int& q, long long d) {
    if (q < 2) throw precondition_error("q must be a prime power");
    if (d < 1 || d > 8) throw precondition_error("dimension must be between 1 and 8");
    unsigned long fact = 1;
    for (long long i = 2; i <= d; ++i) fact *= static_cast<unsigned long>(i);
    Int base;
    mpz_pow_ui(base.get_mpz_t(), q.get_mpz_t(), fact);
    base -= 1;
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(d));
    return r;
}

Rat bound_frobenius_break(long long p, const Rat& s_eps) {
    if (p < 2) throw precondition_error("p must be a prime");
    if (!(s_eps > 0)) throw precondition_error("need -log_p(eps) > 0, i.e. eps < 1");
    Rat r = Rat(1) / (Rat(static_cast<long>(p) - 1) * s_eps);
    r.canonicalize();
    return r;
}

Int bound_full_image(const Int& f_n, long long p, long long n, long long ell) {
    if (f_n < 1) throw precondition_error("Jordan constant must be positive");
    return f_n * bound_abelian_image(p, n, ell);
}

} // namespace robba
