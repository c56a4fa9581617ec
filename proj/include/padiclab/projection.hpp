#pragma once

// Finite fractal sets in Z_p^n, Frostman constants, restricted projections
// and pushforward ball masses, exceptional-set experiments, tube families
// with incidence counts, and the sl_2 observable xi_r.

#include "padiclab/boxes.hpp"
#include "padiclab/constants.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace padiclab {

struct FiniteFractalSet {
    long p;
    int n;
    int depth;  // points resolved mod p^depth
    std::vector<std::vector<long long>> points;  // coordinates in [0, p^depth)
    std::string generator_tag;

    size_t size() const { return points.size(); }
    long long modulus() const {
        long long m = 1;
        for (int i = 0; i < depth; ++i) m *= p;
        return m;
    }
};

inline FiniteFractalSet full_grid_set(long p, int n, int depth) {
    FiniteFractalSet f{p, n, depth, {}, "grid"};
    long long mod = f.modulus();
    double total = std::pow(static_cast<double>(mod), n);
    if (total > 2e6) throw std::overflow_error("grid set: too many points");
    std::vector<long long> x(static_cast<size_t>(n), 0);
    while (true) {
        f.points.push_back(x);
        int i = 0;
        for (; i < n; ++i) {
            if (++x[static_cast<size_t>(i)] < mod) break;
            x[static_cast<size_t>(i)] = 0;
        }
        if (i == n) break;
    }
    return f;
}

// Points whose base-p digits all lie in `digits`.
inline FiniteFractalSet cantor_digit_set(long p, int n, int depth,
                                         const std::vector<int>& digits) {
    FiniteFractalSet f{p, n, depth, {}, "cantor"};
    for (int d : digits)
        if (d < 0 || d >= p) throw std::invalid_argument("cantor: digit out of range");
    size_t branches = digits.size();
    double total = std::pow(static_cast<double>(branches), n * depth);
    if (total > 2e6) throw std::overflow_error("cantor set: too many points");
    std::vector<int> choice(static_cast<size_t>(n * depth), 0);
    while (true) {
        std::vector<long long> x(static_cast<size_t>(n), 0);
        for (int i = 0; i < n; ++i) {
            long long v = 0, pk = 1;
            for (int l = 0; l < depth; ++l) {
                v += pk * digits[static_cast<size_t>(
                         choice[static_cast<size_t>(i * depth + l)])];
                pk *= p;
            }
            x[static_cast<size_t>(i)] = v;
        }
        f.points.push_back(std::move(x));
        size_t i = 0;
        for (; i < choice.size(); ++i) {
            if (++choice[i] < static_cast<int>(branches)) break;
            choice[i] = 0;
        }
        if (i == choice.size()) break;
    }
    return f;
}

// Seeded alpha-regular set: digit-subtree sampling with per-level branching
// ceil(p^alpha) children (distinct digit vectors) per surviving node.
inline FiniteFractalSet random_regular_set(long p, int n, int depth, double alpha,
                                           std::uint64_t seed) {
    FiniteFractalSet f{p, n, depth, {}, "regular"};
    long branch = static_cast<long>(std::ceil(std::pow(static_cast<double>(p), alpha)));
    long long digit_vectors = 1;
    for (int i = 0; i < n; ++i) digit_vectors *= p;
    if (branch > digit_vectors) branch = digit_vectors;
    double total = std::pow(static_cast<double>(branch), depth);
    if (total > 2e6) throw std::overflow_error("regular set: too many points");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<long long>> frontier{std::vector<long long>(static_cast<size_t>(n), 0)};
    long long pk = 1;
    for (int level = 0; level < depth; ++level) {
        std::vector<std::vector<long long>> next;
        for (const auto& node : frontier) {
            // sample `branch` distinct digit vectors in [0, p)^n
            std::set<long long> chosen;
            while (static_cast<long>(chosen.size()) < branch) {
                long long d = static_cast<long long>(rng() % static_cast<std::uint64_t>(digit_vectors));
                chosen.insert(d);
            }
            for (long long d : chosen) {
                std::vector<long long> child = node;
                long long rem = d;
                for (int i = 0; i < n; ++i) {
                    child[static_cast<size_t>(i)] += pk * (rem % p);
                    rem /= p;
                }
                next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
        pk *= p;
    }
    f.points = std::move(frontier);
    std::sort(f.points.begin(), f.points.end());
    return f;
}

// ---------------------------------------------------------------------------
// The projection Pi_t^{(m)}(x)_i = sum_{j >= i} t^{j-i}/(j-i)! x_j, exact mod
// p^depth.  Requires p > n - 1 so the factorials are units.

struct Projector {
    long p;
    int n, m;
    int depth;
    long long t;                 // representative of the slope parameter
    std::vector<std::vector<long long>> coeff;  // coeff[i][j] = t^{j-i}/(j-i)! mod p^depth

    std::vector<long long> apply(const std::vector<long long>& x) const {
        long long mod = 1;
        for (int i = 0; i < depth; ++i) mod *= p;
        std::vector<long long> y(static_cast<size_t>(m), 0);
        for (int i = 0; i < m; ++i) {
            unsigned long long acc = 0;
            for (int j = i; j < n; ++j)
                acc = (acc + static_cast<unsigned long long>(coeff[static_cast<size_t>(i)][static_cast<size_t>(j)]) %
                                 static_cast<unsigned long long>(mod) *
                                 static_cast<unsigned long long>(x[static_cast<size_t>(j)])) %
                      static_cast<unsigned long long>(mod);
            y[static_cast<size_t>(i)] = static_cast<long long>(acc);
        }
        return y;
    }
};

inline long long mod_inverse(long long a, long long mod) {
    long long g = mod, x = 0, x1 = 1, a1 = a % mod;
    while (a1 != 0) {
        long long q = g / a1;
        g -= q * a1;
        std::swap(g, a1);
        x -= q * x1;
        std::swap(x, x1);
    }
    if (g != 1) throw std::domain_error("mod_inverse: not invertible");
    return ((x % mod) + mod) % mod;
}

inline Projector make_projector(long p, int n, int m, int depth, long long t) {
    if (p <= n - 1) throw std::invalid_argument("projector: requires p > n - 1");
    if (m < 1 || m >= n) throw std::invalid_argument("projector: 1 <= m < n");
    long long mod = 1;
    for (int i = 0; i < depth; ++i) mod *= p;
    Projector pr{p, n, m, depth, ((t % mod) + mod) % mod, {}};
    pr.coeff.assign(static_cast<size_t>(m), std::vector<long long>(static_cast<size_t>(n), 0));
    for (int i = 0; i < m; ++i) {
        long long fact = 1, tpow = 1;
        for (int j = i; j < n; ++j) {
            if (j > i) {
                fact = fact * (j - i) % mod;
                tpow = tpow * pr.t % mod;
            }
            pr.coeff[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                tpow * mod_inverse(fact, mod) % mod;
        }
    }
    return pr;
}

// Pushforward masses: image points with multiplicities at depth `ball_exp`.
inline std::map<std::vector<long long>, long> pushforward_masses(const FiniteFractalSet& f,
                                                                 const Projector& pr,
                                                                 int ball_exp) {
    if (ball_exp > f.depth) throw std::invalid_argument("pushforward: scale finer than points");
    long long bmod = 1;
    for (int i = 0; i < ball_exp; ++i) bmod *= f.p;
    std::map<std::vector<long long>, long> mass;
    for (const auto& x : f.points) {
        std::vector<long long> y = pr.apply(x);
        for (auto& yi : y) yi %= bmod;
        ++mass[y];
    }
    return mass;
}

// ---------------------------------------------------------------------------
// Frostman constants.

struct FrostmanReport {
    double alpha;
    int b0_exp, b1_exp;          // b0 = p^{-b0_exp} <= b = p^{-k} <= 1
    double constant;             // max over scales and centers of mass * (b/b1)^{-alpha}
    Rational witness_mass;       // exact mass at the witness
    int witness_scale_exp;       // k of the witness
    std::vector<long long> witness_center;
    double c_alpha;              // sup mass / b^{alpha} (the b1 = 1 variant)
};

inline FrostmanReport frostman_constant(const FiniteFractalSet& f, double alpha, int b0_exp,
                                        int b1_exp) {
    if (f.points.empty()) throw std::invalid_argument("frostman: empty set");
    if (b0_exp < b1_exp) throw std::invalid_argument("frostman: need b0 <= b1");
    if (b0_exp > f.depth)
        throw std::invalid_argument("frostman: scale b0 finer than the set resolution");
    FrostmanReport rep;
    rep.alpha = alpha;
    rep.b0_exp = b0_exp;
    rep.b1_exp = b1_exp;
    rep.constant = 0.0;
    rep.c_alpha = 0.0;
    double logp = std::log(static_cast<double>(f.p));
    double sz = static_cast<double>(f.size());
    for (int k = 0; k <= b0_exp; ++k) {
        long long bmod = 1;
        for (int i = 0; i < k; ++i) bmod *= f.p;
        std::map<std::vector<long long>, long> counts;
        for (const auto& x : f.points) {
            std::vector<long long> c = x;
            for (auto& ci : c) ci %= bmod;
            ++counts[c];
        }
        for (const auto& [center, count] : counts) {
            // mass * (b/b1)^{-alpha} = (count/#F) * p^{alpha (k - b1_exp)}
            double v = std::exp(std::log(static_cast<double>(count) / sz) +
                                alpha * (k - b1_exp) * logp);
            if (v > rep.constant) {
                rep.constant = v;
                rep.witness_mass = Rational(count, static_cast<long>(f.size()));
                rep.witness_mass.canonicalize();
                rep.witness_scale_exp = k;
                rep.witness_center = center;
            }
            double c_alpha_v = std::exp(std::log(static_cast<double>(count) / sz) +
                                        alpha * k * logp);
            rep.c_alpha = std::max(rep.c_alpha, c_alpha_v);
        }
    }
    return rep;
}

// Frostman constant of a product set F1 x F2 at matched scales multiplies;
// used as a module-level invariant.
inline FiniteFractalSet product_set(const FiniteFractalSet& a, const FiniteFractalSet& b) {
    if (a.p != b.p || a.depth != b.depth)
        throw std::invalid_argument("product set: mismatched shapes");
    if (a.size() * b.size() > 2000000) throw std::overflow_error("product set: too large");
    FiniteFractalSet f{a.p, a.n + b.n, a.depth, {}, "product"};
    for (const auto& x : a.points)
        for (const auto& y : b.points) {
            std::vector<long long> z = x;
            z.insert(z.end(), y.begin(), y.end());
            f.points.push_back(std::move(z));
        }
    return f;
}

// ---------------------------------------------------------------------------
// Exceptional sets.  At scale b = p^{-k}, w is bad for t when
// nu_t(B(Pi_t w, b)) > c_alpha * b^s; the threshold exponent s defaults to
// the proof convention alpha - 2 * 10^{10n} sqrt(2 eps) and is exposed as a
// knob because the default makes desk-scale runs vacuous.

struct ExceptionalConfig {
    int m = 1;
    double alpha = 1.0;
    double eps = 0.01;
    double c_alpha = 1.0;     // c_alpha^{b0}(nu)
    bool use_s_override = false;
    double s_override = 0.0;
    // a slope cell counts as bad when nu(F_bad) exceeds this mass
    double t_mass_threshold = 0.0;

    double threshold_exponent(int n) const {
        if (use_s_override) return s_override;
        double eps0 = std::pow(10.0, 10.0 * n) * std::sqrt(2.0 * eps);
        return alpha - 2.0 * eps0;
    }
};

struct ExceptionalTRecord {
    long long t;
    long bad_count;          // # bad points
    Rational bad_mass;       // nu(F_bad)
};

struct ExceptionalReport {
    int b_exp;
    double s;                         // threshold exponent used
    std::vector<ExceptionalTRecord> per_t;
    double bad_t_fraction;            // fraction of t cells with any bad point
    long long worst_t;
    Rational worst_bad_mass;
};

inline ExceptionalReport exceptional_sets(const FiniteFractalSet& f, const ExceptionalConfig& cfg,
                                          int b_exp) {
    if (b_exp < 0 || b_exp > f.depth)
        throw std::invalid_argument("exceptional: scale out of range");
    ExceptionalReport rep;
    rep.b_exp = b_exp;
    rep.s = cfg.threshold_exponent(f.n);
    double logp = std::log(static_cast<double>(f.p));
    // bad <=> log(count/#F) > log c_alpha + s * log b, with b = p^{-b_exp}
    double log_threshold = std::log(cfg.c_alpha) - rep.s * b_exp * logp;
    long long tmod = 1;
    for (int i = 0; i < b_exp; ++i) tmod *= f.p;
    long bad_t = 0;
    rep.worst_t = 0;
    rep.worst_bad_mass = Rational(0);
    for (long long t = 0; t < tmod; ++t) {
        Projector pr = make_projector(f.p, f.n, cfg.m, f.depth, t);
        auto masses = pushforward_masses(f, pr, b_exp);
        long long bmod = 1;
        for (int i = 0; i < b_exp; ++i) bmod *= f.p;
        long bad = 0;
        for (const auto& x : f.points) {
            std::vector<long long> y = pr.apply(x);
            for (auto& yi : y) yi %= bmod;
            long count = masses.at(y);
            double log_mass = std::log(static_cast<double>(count) /
                                       static_cast<double>(f.size()));
            if (log_mass > log_threshold + 1e-12) ++bad;
        }
        ExceptionalTRecord rec;
        rec.t = t;
        rec.bad_count = bad;
        rec.bad_mass = Rational(bad, static_cast<long>(f.size()));
        rec.bad_mass.canonicalize();
        if (rec.bad_mass.get_d() > cfg.t_mass_threshold) ++bad_t;
        if (rec.bad_mass > rep.worst_bad_mass) {
            rep.worst_bad_mass = rec.bad_mass;
            rep.worst_t = t;
        }
        rep.per_t.push_back(std::move(rec));
    }
    rep.bad_t_fraction = static_cast<double>(bad_t) / static_cast<double>(tmod);
    return rep;
}

// ---------------------------------------------------------------------------
// Tube families and incidences.  A tube is the Z_p^n-intersected preimage of
// a depth-k ball under Pi_t^{(m)}; at resolution p^{-l} it holds exactly
// p^{l n - k m} cells (p^{l(n-m)} when k = l).

struct TubeFamily {
    long p;
    int n, m;
    int delta_exp;  // k: tubes project onto balls of radius p^{-k}
    int depth;      // l: ambient resolution
    long long theta;
    Projector projector;
    // tube index = flattened image cell (depth k in Z_p^m)
    long long image_cells() const {
        long long c = 1;
        for (int i = 0; i < m * delta_exp; ++i) c *= p;
        return c;
    }

    long long tube_of(const std::vector<long long>& x) const {
        std::vector<long long> y = projector.apply(x);
        long long bmod = 1;
        for (int i = 0; i < delta_exp; ++i) bmod *= p;
        long long idx = 0;
        for (int i = 0; i < m; ++i) idx = idx * bmod + (y[static_cast<size_t>(i)] % bmod);
        return idx;
    }
};

inline TubeFamily tube_family(long p, int n, int m, int delta_exp, int depth, long long theta) {
    if (delta_exp > depth) throw std::invalid_argument("tube family: delta finer than depth");
    TubeFamily tf{p, n, m, delta_exp, depth, theta, make_projector(p, n, m, depth, theta)};
    return tf;
}

// Incidence count of x against a selection of tubes (set of tube ids per
// family).
inline long incidence_count(const std::vector<TubeFamily>& families,
                            const std::vector<std::set<long long>>& selections,
                            const std::vector<long long>& x) {
    long c = 0;
    for (size_t i = 0; i < families.size(); ++i)
        if (selections[i].count(families[i].tube_of(x))) ++c;
    return c;
}

// Frame-form tube for the cross-check: center solved from the image cell by
// back-substitution (the coefficient matrix is unitriangular in the first m
// coordinates).  Exists for p > n - 1: the frame only needs the jet matrix.
inline AffineBox tube_box(const TubeFamily& tf, long long tube_idx, int precision = 48) {
    const long p = tf.p;
    long long bmod = 1;
    for (int i = 0; i < tf.delta_exp; ++i) bmod *= p;
    // unpack image cell
    std::vector<long long> y(static_cast<size_t>(tf.m), 0);
    long long rem = tube_idx;
    for (int i = tf.m - 1; i >= 0; --i) {
        y[static_cast<size_t>(i)] = rem % bmod;
        rem /= bmod;
    }
    // solve Pi_t (x_1..x_m, 0..0) = y mod p^{delta_exp}; the system is upper
    // triangular with unit diagonal in x_1..x_m.
    std::vector<long long> x(static_cast<size_t>(tf.n), 0);
    for (int i = tf.m - 1; i >= 0; --i) {
        long long acc = y[static_cast<size_t>(i)] % bmod;
        for (int j = i + 1; j < tf.m; ++j)
            acc = ((acc - tf.projector.coeff[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                              x[static_cast<size_t>(j)]) %
                       bmod +
                   bmod) %
                  bmod;
        x[static_cast<size_t>(i)] = acc;
    }
    std::vector<PadicScalar> c;
    for (int i = 0; i < tf.n; ++i)
        c.push_back(PadicScalar::from_integer(x[static_cast<size_t>(i)], p, precision));
    PadicScalar theta = PadicScalar::from_integer(tf.theta, p, precision);
    // A_{theta,delta} = jet * diag(delta 1_m, 1_{n-m}) with delta = p^{-k};
    // tube frame = A^{-T}
    PadicMatrix a = moment_jet_matrix(tf.n, theta);
    PadicScalar delta = PadicScalar::from_unit(-tf.delta_exp, BigInt(1), p, precision);
    for (int j = 0; j < tf.m; ++j)
        for (int i = 0; i < tf.n; ++i) a.at(i, j) = a.at(i, j) * delta;
    PadicMatrix dual = a.inverse().transpose();
    return AffineBox(PadicVector(std::move(c)), std::move(dual),
                     std::vector<long>(static_cast<size_t>(tf.n), 0), "T");
}

// ---------------------------------------------------------------------------
// xi_r(w) = w_12 - 2 r w_11 - w_21 r^2 for traceless 2x2 w; equals the (1,2)
// entry of u_r w u_r^{-1}, u_r = [[1, r], [0, 1]].

inline PadicScalar xi_map(const PadicMatrix& w, const PadicScalar& r) {
    if (w.rows() != 2 || w.cols() != 2) throw std::invalid_argument("xi: 2x2 required");
    PadicScalar tr = w.at(0, 0) + w.at(1, 1);
    if (!tr.is_zero()) throw std::invalid_argument("xi: trace must vanish");
    PadicScalar two = PadicScalar::from_integer(2, r.prime(), r.precision());
    return w.at(0, 1) - two * r * w.at(0, 0) - w.at(1, 0) * r * r;
}

struct AdjointCheck {
    PadicScalar closed_form;
    PadicScalar conjugated_entry;
    bool holds;
};

inline AdjointCheck ad_check(const PadicMatrix& w, const PadicScalar& r) {
    PadicScalar xi = xi_map(w, r);
    PadicMatrix u(2, 2, r.prime(), r.precision());
    u.at(0, 0) = PadicScalar::one(r.prime(), r.precision());
    u.at(0, 1) = r;
    u.at(1, 1) = PadicScalar::one(r.prime(), r.precision());
    PadicMatrix uinv(2, 2, r.prime(), r.precision());
    uinv.at(0, 0) = PadicScalar::one(r.prime(), r.precision());
    uinv.at(0, 1) = -r;
    uinv.at(1, 1) = PadicScalar::one(r.prime(), r.precision());
    PadicMatrix conj = u * w * uinv;
    return AdjointCheck{xi, conj.at(0, 1), xi == conj.at(0, 1)};
}

}  // namespace padiclab
