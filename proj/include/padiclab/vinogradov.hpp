#pragma once

// Exact counting of Vinogradov systems J_{s,n}(N), the explicit bound in
// log space, and the Fourier moment cross-check
// || sum_a chi(x . gamma(a)) 1_{p^{-ln} Z_p^n} ||_{2s}^{2s} = p^{ln} J_{s,n}(p^l).

#include "padiclab/constants.hpp"
#include "padiclab/curves.hpp"
#include "padiclab/fourier.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace padiclab {

struct VinoInstance {
    long s = 2;
    int n = 2;
    long N = 10;
};

// Memory estimate (bytes) for the meet-in-the-middle table: one entry per
// nondecreasing s-tuple of [N].
inline double vino_table_estimate(const VinoInstance& inst) {
    // C(N + s - 1, s) entries, each a key of n int64 power sums plus a count.
    double entries = 1.0;
    for (long i = 0; i < inst.s; ++i)
        entries *= static_cast<double>(inst.N + i) / static_cast<double>(i + 1);
    return entries * (8.0 * (inst.n + 1) + 48.0);
}

// J_{s,n}(N) = sum over power-sum vectors of m(vec)^2, m(vec) counting the
// ordered s-tuples with that power-sum profile.  Keys are exact packed
// integers; the per-key count of ordered tuples is accumulated through
// nondecreasing tuples weighted by multinomial coefficients.
inline BigInt count_solutions(const VinoInstance& inst, double budget_bytes = 2e9) {
    if (inst.s < 1 || inst.n < 1 || inst.N < 1)
        throw std::invalid_argument("vinogradov: s, n, N >= 1 required");
    double est = vino_table_estimate(inst);
    if (est > budget_bytes)
        throw std::overflow_error("vinogradov: table estimate " + std::to_string(est) +
                                  " bytes exceeds budget");
    // power sums fit long long iff s * N^n < 2^62
    long double maxsum = static_cast<long double>(inst.s);
    for (int d = 0; d < inst.n; ++d) maxsum *= static_cast<long double>(inst.N);
    if (maxsum > 4.0e18)
        throw std::overflow_error("vinogradov: power sums exceed the packed-key range");

    std::map<std::vector<long long>, BigInt> table;
    std::vector<long> tuple(static_cast<size_t>(inst.s), 1);
    std::vector<BigInt> factorial(static_cast<size_t>(inst.s + 1), BigInt(1));
    for (long i = 1; i <= inst.s; ++i)
        factorial[static_cast<size_t>(i)] = factorial[static_cast<size_t>(i - 1)] * i;

    // powers[a][d] = a^{d+1}
    std::vector<std::vector<long long>> powers(static_cast<size_t>(inst.N + 1));
    for (long a = 1; a <= inst.N; ++a) {
        powers[static_cast<size_t>(a)].resize(static_cast<size_t>(inst.n));
        long long v = 1;
        for (int d = 0; d < inst.n; ++d) {
            v *= a;
            powers[static_cast<size_t>(a)][static_cast<size_t>(d)] = v;
        }
    }

    while (true) {
        // multinomial weight s! / prod(mult!)
        BigInt weight = factorial[static_cast<size_t>(inst.s)];
        long run = 1;
        for (long i = 1; i < inst.s; ++i) {
            if (tuple[static_cast<size_t>(i)] == tuple[static_cast<size_t>(i - 1)]) {
                ++run;
            } else {
                weight /= factorial[static_cast<size_t>(run)];
                run = 1;
            }
        }
        weight /= factorial[static_cast<size_t>(run)];

        std::vector<long long> key(static_cast<size_t>(inst.n), 0);
        for (long i = 0; i < inst.s; ++i)
            for (int d = 0; d < inst.n; ++d)
                key[static_cast<size_t>(d)] +=
                    powers[static_cast<size_t>(tuple[static_cast<size_t>(i)])][static_cast<size_t>(d)];
        table[key] += weight;

        // next nondecreasing tuple
        long i = inst.s - 1;
        while (i >= 0 && tuple[static_cast<size_t>(i)] == inst.N) --i;
        if (i < 0) break;
        long v = tuple[static_cast<size_t>(i)] + 1;
        for (long j = i; j < inst.s; ++j) tuple[static_cast<size_t>(j)] = v;
    }

    BigInt total(0);
    for (const auto& [key, count] : table) total += count * count;
    return total;
}

// Brute-force oracle: direct enumeration of all (a, b) in [N]^{2s}.
inline BigInt count_solutions_bruteforce(const VinoInstance& inst) {
    if (inst.s > 3 || inst.N > 20) throw std::overflow_error("bruteforce: instance too large");
    BigInt total(0);
    long s = inst.s;
    std::vector<long> idx(static_cast<size_t>(2 * s), 1);
    while (true) {
        bool match = true;
        for (int d = 1; d <= inst.n && match; ++d) {
            long long lhs = 0, rhs = 0;
            for (long i = 0; i < s; ++i) {
                long long av = 1, bv = 1;
                for (int e = 0; e < d; ++e) {
                    av *= idx[static_cast<size_t>(i)];
                    bv *= idx[static_cast<size_t>(s + i)];
                }
                lhs += av;
                rhs += bv;
            }
            match = lhs == rhs;
        }
        if (match) total += 1;
        long i = 2 * s - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == inst.N) --i;
        if (i < 0) break;
        ++idx[static_cast<size_t>(i)];
        for (long j = i + 1; j < 2 * s; ++j) idx[static_cast<size_t>(j)] = 1;
    }
    return total;
}

struct VinoBoundReport {
    long double log_bound;     // natural log of the explicit bound
    bool below_threshold;      // N below the validity threshold (always at desk scale)
    long double log_count_lower;  // log N^s, the diagonal lower bound
};

inline VinoBoundReport bound_value(const VinoInstance& inst) {
    if (inst.s < 2 || inst.n < 2) throw std::invalid_argument("bound: s, n >= 2 required");
    double logN = std::log(static_cast<double>(inst.N));
    VinoBoundReport rep;
    rep.log_bound = log_vinogradov_bound(inst.s, inst.n, logN);
    rep.below_threshold = vinogradov_below_threshold(inst.n, logN);
    rep.log_count_lower = static_cast<long double>(inst.s) * logN;
    return rep;
}

struct MomentIdentityReport {
    double lattice_moment;   // || sum_a g_a ||_{2s}^{2s} under mu(Z_p^n) = 1
    BigInt exact_count;      // J_{s,n}(p^l)
    double exact_side;       // mu(p^{-ln} Z_p^n) * J = p^{l n^2} * J
    double stated_side;      // p^{ln} * J, for comparison against the source display
    double rel_error;        // |moment - exact_side| / exact_side
};

// g_a(x) = chi(x . gamma(a)) 1_{p^{-ln} Z_p^n}(x) for 1 <= a <= p^l.  The
// L^{2s} moment of the sum equals mu(p^{-ln} Z_p^n) * J_{s,n}(p^l)
// = p^{l n^2} J_{s,n}(p^l) whenever the power-sum congruences mod p^{ln}
// force equality (true at the desk-scale parameters used here).
inline MomentIdentityReport moment_identity_check(long p, int l, long s, int n,
                                                  double budget_bytes = 2e9) {
    if (p <= n) throw std::invalid_argument("moment identity: requires p > n");
    if (l < 1 || s < 1) throw std::invalid_argument("moment identity: l, s >= 1");
    const int prec = 2 * n * l + 8;
    PolyCurve gamma = PolyCurve::moment(n, p, prec);
    long N = 1;
    for (int i = 0; i < l; ++i) N *= p;

    // support exponent a_exp = l n, locally constant on Z_p^n cosets (b = 0):
    // x . gamma(a) has fractional part determined by x mod Z_p^n since
    // gamma(a) is integral.
    int a_exp = l * n;
    LatticeFunction sum(p, n, a_exp, 0);
    if (sum.cell_count() > LatticeFunction::cell_budget())
        throw std::overflow_error("moment identity: lattice exceeds budget");
    for (long a = 1; a <= N; ++a) {
        PadicVector ga = gamma.eval(PadicScalar::from_integer(a, p, prec));
        LatticeFunction g = LatticeFunction::from_cells(
            p, n, a_exp, 0, [&](const std::vector<long>& m) {
                // x = m p^{-a_exp}; chi(x . gamma(a))
                Rational dot(0);
                BigInt den = prime_power(p, static_cast<unsigned long>(a_exp));
                for (int i = 0; i < n; ++i) {
                    Rational xi{BigInt(m[static_cast<size_t>(i)]), den};
                    dot += xi * ga[i].rational_repr();
                }
                return character(dot);
            });
        sum = sum + g;
    }
    double moment = std::pow(sum.lq_norm(2.0 * static_cast<double>(s)),
                             2.0 * static_cast<double>(s));
    VinoInstance inst{s, n, N};
    BigInt j = count_solutions(inst, budget_bytes);
    double exact = std::pow(static_cast<double>(p), static_cast<double>(l) * n * n) * j.get_d();
    double stated = std::pow(static_cast<double>(p), static_cast<double>(l) * n) * j.get_d();
    double rel = std::abs(moment - exact) / std::max(1.0, exact);
    return MomentIdentityReport{moment, j, exact, stated, rel};
}

}  // namespace padiclab
