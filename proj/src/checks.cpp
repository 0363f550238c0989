#include "robba/checks.hpp"

#include <sstream>

#include "robba/laurent.hpp"

namespace robba {

namespace {

struct Rng {
    unsigned long long state;
    // Newlib-style LCG, then xor-fold; enough for corpus variety and stable
    // across platforms.
    unsigned long long next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return state >> 33;
    }
    long long range(long long lo, long long hi) { // inclusive
        return lo + static_cast<long long>(next() % static_cast<unsigned long long>(hi - lo + 1));
    }
};

Rat random_rat(Rng& rng, long p) {
    long num = static_cast<long>(rng.range(-9, 9));
    if (num == 0) num = 1;
    long den = static_cast<long>(rng.range(1, 5));
    Rat q(num, den);
    q.canonicalize();
    long long a = rng.range(0, 2);
    for (long long i = 0; i < a; ++i) q *= p;
    return q;
}

FieldElem random_elem(Rng& rng, const FieldPtr& k) {
    if (k->degree() == 1) return k->rational(random_rat(rng, static_cast<long long>(k->prime())));
    std::vector<Rat> c;
    for (std::size_t i = 0; i < k->degree(); ++i)
        c.push_back(random_rat(rng, static_cast<long long>(k->prime())));
    return k->element(std::move(c));
}

LaurentSeries random_series(Rng& rng, const FieldPtr& k) {
    std::map<long long, FieldElem> terms;
    long long n = rng.range(0, 4);
    for (long long i = 0; i < n; ++i) terms.insert_or_assign(rng.range(-4, 4), random_elem(rng, k));
    return LaurentSeries::make(k, std::move(terms));
}

Rat random_radius(Rng& rng) {
    Rat s(static_cast<long>(rng.range(1, 9)), static_cast<long>(rng.range(2, 10)));
    s.canonicalize();
    return s;
}

struct Tally {
    CheckReport& report;
    long long case_id;
    void operator()(bool ok, const char* what) {
        if (ok) {
            ++report.checks_passed;
            return;
        }
        ++report.checks_failed;
        if (report.failures.size() < 10) {
            std::ostringstream os;
            os << "case " << case_id << ": " << what;
            report.failures.push_back(os.str());
        }
    }
};

} // namespace

CheckReport run_property_corpus(long long cases, unsigned long long seed) {
    CheckReport report;
    report.cases = cases;
    Rng rng{seed};
    std::vector<FieldPtr> fields = {CoeffField::rationals(2), CoeffField::rationals(3),
                                    CoeffField::rationals(5), CoeffField::cyclotomic(3)};
    for (long long i = 0; i < cases; ++i) {
        const FieldPtr& k = fields[static_cast<std::size_t>(i) % fields.size()];
        Tally check{report, i};
        LaurentSeries f = random_series(rng, k);
        LaurentSeries g = random_series(rng, k);
        Rat s2 = random_radius(rng);
        Rat s1 = s2 / 2;
        Rat mid = (s1 + s2) / 2;

        ExtRat lf = f.gauss(s2).lambda, lg = g.gauss(s2).lambda;
        ExtRat lsum = (f + g).gauss(s2).lambda;
        check(lsum >= min(lf, lg), "ultrametric bound failed for a sum");
        if (lf != lg) check(lsum == min(lf, lg), "ultrametric equality failed at distinct values");
        check((f * g).gauss(s2).lambda == lf + lg, "Gauss value not multiplicative");

        // min of affine functions of s: the value at an interior radius
        // dominates the chord through the endpoint values
        ExtRat la = f.gauss(s1).lambda, lb = f.gauss(s2).lambda;
        if (!la.is_inf()) {
            ExtRat chord = (la + lb).div(2);
            check(f.gauss(mid).lambda >= chord, "interior Gauss value fell below the chord");
        }

        check(f.derivative().residue().is_zero(), "derivative has nonzero residue");

        long n = static_cast<long>(rng.range(2, 3));
        check(((f + g).substitute_power(n)) == (f.substitute_power(n) + g.substitute_power(n)),
              "power substitution is not additive");
        check(((f * g).substitute_power(n)) == (f.substitute_power(n) * g.substitute_power(n)),
              "power substitution is not multiplicative");
        check(f.substitute_power(n).gauss(s2).lambda == f.gauss(s2 * n).lambda,
              "power substitution does not rescale the Gauss value");
        check(((f + g).frobenius_twist()) == (f.frobenius_twist() + g.frobenius_twist()),
              "Frobenius twist is not additive");
        check(((f * g).frobenius_twist()) == (f.frobenius_twist() * g.frobenius_twist()),
              "Frobenius twist is not multiplicative");
        check(f.frobenius_twist().gauss(s2).lambda ==
                  f.gauss(s2 * static_cast<long>(k->prime())).lambda,
              "Frobenius twist does not rescale the Gauss value");
    }
    return report;
}

} // namespace robba
