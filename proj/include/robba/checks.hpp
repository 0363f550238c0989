#pragma once

#include <string>
#include <vector>

namespace robba {

struct CheckReport {
    long long cases = 0;
    long long checks_passed = 0;
    long long checks_failed = 0;
    std::vector<std::string> failures; // capped at the first ten, for diagnosis
};

// Deterministic randomized property corpus over the norm engine: ultrametric
// and multiplicative laws of the Gauss value, convexity across radii,
// residue of a derivative, and the substitution homomorphisms. The same
// corpus backs the command-line `check` verb.
CheckReport run_property_corpus(long long cases, unsigned long long seed);

} // namespace robba
