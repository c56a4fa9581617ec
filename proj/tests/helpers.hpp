#pragma once

// Shared generators for the property-style sweeps.  Everything is seeded
// mt19937_64; tests print their seed on failure via Catch2's INFO.

#include "padiclab/curves.hpp"

#include <random>

namespace padiclab::testing {

inline PadicScalar random_unit(std::mt19937_64& rng, long p, int prec) {
    BigInt m = prime_power(p, static_cast<unsigned long>(prec));
    // draw digits; force the low digit nonzero
    BigInt u = 1 + static_cast<unsigned long>(rng() % static_cast<std::uint64_t>(p - 1));
    BigInt pk(p);
    for (int i = 1; i < prec; ++i) {
        u += pk * static_cast<unsigned long>(rng() % static_cast<std::uint64_t>(p));
        pk *= p;
    }
    return PadicScalar::from_unit(0, u, p, prec);
}

inline PadicScalar random_scalar(std::mt19937_64& rng, long p, int prec, long vmin = -3,
                                 long vmax = 3) {
    long v = vmin + static_cast<long>(rng() % static_cast<std::uint64_t>(vmax - vmin + 1));
    PadicScalar u = random_unit(rng, p, prec);
    return PadicScalar::from_unit(v, u.unit(), p, prec);
}

// Uniform element of Z_p at the working precision (may be divisible by p).
inline PadicScalar random_integer(std::mt19937_64& rng, long p, int prec) {
    BigInt u(0), pk(1);
    for (int i = 0; i < prec; ++i) {
        u += pk * static_cast<unsigned long>(rng() % static_cast<std::uint64_t>(p));
        pk *= p;
    }
    return PadicScalar::from_integer(u, p, prec);
}

inline PadicPoly random_poly(std::mt19937_64& rng, long p, int prec, int max_degree,
                             long coeff_range = 50) {
    int deg = static_cast<int>(rng() % static_cast<std::uint64_t>(max_degree + 1));
    std::vector<PadicScalar> c;
    for (int k = 0; k <= deg; ++k) {
        long v = static_cast<long>(rng() % static_cast<std::uint64_t>(2 * coeff_range + 1)) -
                 coeff_range;
        c.push_back(PadicScalar::from_integer(v, p, prec));
    }
    return PadicPoly(std::move(c), p, prec);
}

}  // namespace padiclab::testing
