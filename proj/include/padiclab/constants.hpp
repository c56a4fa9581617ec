#pragma once

// Log-space evaluation of the explicit constants of the theory.  The
// constants themselves are of the form exp(10^4 (log p) eps^{-5n log n} n^{20n^2})
// and overflow any fixed-width float, so every evaluator returns the natural
// logarithm, accumulated in long double.

#include <cmath>
#include <stdexcept>
#include <string>

namespace padiclab {

namespace detail {
inline long double pow_ld(long double base, long double e) { return std::pow(base, e); }

inline void require_eps(double eps, double hi, const char* which) {
    if (!(eps > 0.0) || !(eps < hi))
        throw std::invalid_argument(std::string(which) + ": eps outside (0, " +
                                    std::to_string(hi) + ")");
}
}  // namespace detail

// log of exp(1e4 (log p) eps^{-c1 n log n} n^{c2 n^2}); the shared core of the
// projection / Kakeya / decoupling constants.
inline long double log_exp_core(int n, long p, double eps, double c1, double c2) {
    long double ln_n = std::log(static_cast<long double>(n));
    long double expo = c2 * static_cast<long double>(n) * n * ln_n -
                       c1 * static_cast<long double>(n) * ln_n *
                           std::log(static_cast<long double>(eps));
    long double core = std::exp(expo);
    if (!std::isfinite(core)) throw std::overflow_error("constant evaluator: n too large");
    return 1e4L * std::log(static_cast<long double>(p)) * core;
}

// Projection theorem constant: 4 max(1,C) exp(1e4 (log p) eps^{-5n log n} n^{20n^2}).
inline long double log_projection_constant(int n, long p, double eps, double frostman_c,
                                           double alpha) {
    detail::require_eps(eps, alpha / 100.0, "projection constant (requires eps in (0, alpha/100))");
    return std::log(4.0L * std::max(1.0L, static_cast<long double>(frostman_c))) +
           log_exp_core(n, p, eps, 5.0, 20.0);
}

// Kakeya constant: min(1, c^{1/eps}) exp(-1e4 (log p) eps^{-5n log n} n^{20n^2}).
inline long double log_kakeya_constant(int n, long p, double eps, double c) {
    detail::require_eps(eps, 1.0, "kakeya constant");
    if (!(c > 0.0)) throw std::invalid_argument("kakeya constant: c > 0 required");
    long double incidence = c >= 1.0 ? 0.0L
                                     : std::log(static_cast<long double>(c)) /
                                           static_cast<long double>(eps);
    return incidence - log_exp_core(n, p, eps, 5.0, 20.0);
}

// Cone decoupling constant: exp(1e4 (log p) eps^{-5n log n} n^{10n^2}).
inline long double log_decoupling_constant(int n, long p, double eps) {
    detail::require_eps(eps, 1.0, "decoupling constant");
    return log_exp_core(n, p, eps, 5.0, 10.0);
}

// Moment-curve decoupling constant: exp(1e4 (log p) eps^{-4n log n} n^{10n^2}).
inline long double log_moment_curve_constant(int n, long p, double eps) {
    detail::require_eps(eps, 1.0, "moment curve constant");
    return log_exp_core(n, p, eps, 4.0, 10.0);
}

// log[ exp(1e5 s e^{3n} (log N)^{1 - 1/(4n log n + 1)}) (N^s + N^{2s - n(n+1)/2}) ].
inline long double log_vinogradov_bound(long s, int n, double log_n_big) {
    if (s < 2 || n < 2) throw std::invalid_argument("vinogradov bound: s, n >= 2 required");
    if (!(log_n_big > 0)) throw std::invalid_argument("vinogradov bound: N > 1 required");
    long double lnN = static_cast<long double>(log_n_big);
    long double denom = 4.0L * n * std::log(static_cast<long double>(n)) + 1.0L;
    long double head = 1e5L * s * std::exp(3.0L * n) * std::pow(lnN, 1.0L - 1.0L / denom);
    long double e1 = static_cast<long double>(s) * lnN;
    long double e2 = (2.0L * s - 0.5L * n * (n + 1)) * lnN;
    long double m = std::max(e1, e2);
    long double tail = m + std::log(std::exp(e1 - m) + std::exp(e2 - m));
    return head + tail;
}

// The theorem's validity threshold N >= exp(exp(3n(4n log n + 1))), reported
// via log log N for comparability.
inline bool vinogradov_below_threshold(int n, double log_n_big) {
    long double t = 3.0L * n * (4.0L * n * std::log(static_cast<long double>(n)) + 1.0L);
    return std::log(static_cast<long double>(log_n_big)) < t;
}

enum class NamedConstant { Projection, Kakeya, Decoupling, MomentCurve, VinogradovBound };

struct ConstantQuery {
    NamedConstant which;
    int n = 3;
    long p = 5;
    double eps = 0.1;
    double c = 1.0;       // Frostman / incidence constant where applicable
    double alpha = 1.0;   // projection constant range check
    long s = 2;           // Vinogradov
    double log_N = 0.0;   // Vinogradov
};

inline long double evaluate_log_constant(const ConstantQuery& q) {
    switch (q.which) {
        case NamedConstant::Projection:
            return log_projection_constant(q.n, q.p, q.eps, q.c, q.alpha);
        case NamedConstant::Kakeya:
            return log_kakeya_constant(q.n, q.p, q.eps, q.c);
        case NamedConstant::Decoupling:
            return log_decoupling_constant(q.n, q.p, q.eps);
        case NamedConstant::MomentCurve:
            return log_moment_curve_constant(q.n, q.p, q.eps);
        case NamedConstant::VinogradovBound:
            return log_vinogradov_bound(q.s, q.n, q.log_N);
    }
    throw std::logic_error("evaluate_log_constant: unknown constant");
}

}  // namespace padiclab
