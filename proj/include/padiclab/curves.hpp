#pragma once

// Polynomial curves Z_p -> Q_p^n, the moment curve t -> (t/1!, ..., t^n/n!),
// derivative frames, the p-adic Vandermonde identity, Newton quotients and
// C^k seminorms of ultrametric calculus, and curve rescaling.

#include "padiclab/linalg.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

namespace padiclab {

class PadicPoly {
public:
    PadicPoly(long p, int precision = PadicScalar::kDefaultPrecision)
        : p_(p), prec_(precision) {}
    PadicPoly(std::vector<PadicScalar> coeffs, long p,
              int precision = PadicScalar::kDefaultPrecision)
        : p_(p), prec_(precision), c_(std::move(coeffs)) {
        trim();
    }

    long prime() const { return p_; }
    int precision() const { return prec_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero poly
    bool is_zero() const { return c_.empty(); }

    const PadicScalar& coeff(int k) const { return c_[static_cast<size_t>(k)]; }
    PadicScalar coeff_or_zero(int k) const {
        if (k < 0 || k >= static_cast<int>(c_.size())) return PadicScalar::zero(p_, prec_);
        return c_[static_cast<size_t>(k)];
    }

    PadicScalar eval(const PadicScalar& t) const {
        PadicScalar r = PadicScalar::zero(p_, prec_);
        for (int k = degree(); k >= 0; --k) r = r * t + c_[static_cast<size_t>(k)];
        return r;
    }

    PadicPoly derivative() const {
        std::vector<PadicScalar> d;
        for (int k = 1; k <= degree(); ++k)
            d.push_back(c_[static_cast<size_t>(k)] * PadicScalar::from_integer(k, p_, prec_));
        return PadicPoly(std::move(d), p_, prec_);
    }

    PadicPoly operator+(const PadicPoly& o) const {
        std::vector<PadicScalar> r;
        int d = std::max(degree(), o.degree());
        for (int k = 0; k <= d; ++k) r.push_back(coeff_or_zero(k) + o.coeff_or_zero(k));
        return PadicPoly(std::move(r), p_, prec_);
    }
    PadicPoly operator-(const PadicPoly& o) const {
        std::vector<PadicScalar> r;
        int d = std::max(degree(), o.degree());
        for (int k = 0; k <= d; ++k) r.push_back(coeff_or_zero(k) - o.coeff_or_zero(k));
        return PadicPoly(std::move(r), p_, prec_);
    }
    PadicPoly operator*(const PadicScalar& s) const {
        std::vector<PadicScalar> r;
        for (const auto& ck : c_) r.push_back(ck * s);
        return PadicPoly(std::move(r), p_, prec_);
    }

    // f(theta + lambda * t) as a polynomial in t, exact.
    PadicPoly compose_affine(const PadicScalar& theta, const PadicScalar& lambda) const {
        std::vector<PadicScalar> r(static_cast<size_t>(degree() + 1),
                                   PadicScalar::zero(p_, prec_));
        if (is_zero()) return PadicPoly(p_, prec_);
        // binomial table over Z
        int d = degree();
        std::vector<std::vector<BigInt>> binom(static_cast<size_t>(d + 1));
        for (int k = 0; k <= d; ++k) {
            binom[static_cast<size_t>(k)].resize(static_cast<size_t>(k + 1));
            for (int j = 0; j <= k; ++j) {
                BigInt b;
                mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(k),
                             static_cast<unsigned long>(j));
                binom[static_cast<size_t>(k)][static_cast<size_t>(j)] = b;
            }
        }
        for (int k = 0; k <= d; ++k) {
            if (c_[static_cast<size_t>(k)].is_zero()) continue;
            std::vector<PadicScalar> tp(static_cast<size_t>(k + 1), PadicScalar::one(p_, prec_));
            for (int e = 1; e <= k; ++e) tp[static_cast<size_t>(e)] = tp[static_cast<size_t>(e - 1)] * theta;
            PadicScalar lam_pow = PadicScalar::one(p_, prec_);
            for (int j = 0; j <= k; ++j) {
                PadicScalar term = c_[static_cast<size_t>(k)] *
                                   PadicScalar::from_integer(binom[static_cast<size_t>(k)][static_cast<size_t>(j)], p_, prec_) *
                                   tp[static_cast<size_t>(k - j)] * lam_pow;
                r[static_cast<size_t>(j)] = r[static_cast<size_t>(j)] + term;
                lam_pow = lam_pow * lambda;
            }
        }
        return PadicPoly(std::move(r), p_, prec_);
    }

    bool operator==(const PadicPoly& o) const {
        int d = std::max(degree(), o.degree());
        for (int k = 0; k <= d; ++k)
            if (coeff_or_zero(k) != o.coeff_or_zero(k)) return false;
        return true;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    long p_;
    int prec_;
    std::vector<PadicScalar> c_;
};

// A polynomial curve Z_p -> Q_p^n with formal derivatives precomputed.
class PolyCurve {
public:
    PolyCurve(std::vector<PadicPoly> components, long p,
              int precision = PadicScalar::kDefaultPrecision)
        : p_(p), prec_(precision), comp_(std::move(components)) {
        n_ = static_cast<int>(comp_.size());
        build_derivatives();
    }

    // The moment curve (t/1!, ..., t^n/n!); requires p > n so the factorials
    // are units.
    static PolyCurve moment(int n, long p, int precision = PadicScalar::kDefaultPrecision) {
        if (p <= n)
            throw std::invalid_argument("moment curve: requires p > n (factorial non-unit)");
        std::vector<PadicPoly> comps;
        BigInt fact(1);
        for (int i = 1; i <= n; ++i) {
            fact *= i;
            std::vector<PadicScalar> c(static_cast<size_t>(i + 1), PadicScalar::zero(p, precision));
            c[static_cast<size_t>(i)] =
                PadicScalar::from_rational(Rational(1, fact), p, precision);
            comps.emplace_back(std::move(c), p, precision);
        }
        return PolyCurve(std::move(comps), p, precision);
    }

    int dim() const { return n_; }
    long prime() const { return p_; }
    int precision() const { return prec_; }
    const PadicPoly& component(int i) const { return comp_[static_cast<size_t>(i)]; }

    PadicVector eval(const PadicScalar& t) const {
        std::vector<PadicScalar> v;
        v.reserve(static_cast<size_t>(n_));
        for (const auto& f : comp_) v.push_back(f.eval(t));
        return PadicVector(std::move(v));
    }

    // zeta^{(j)}(t), 1 <= j <= n+1.
    PadicVector derivative_at(int j, const PadicScalar& t) const {
        std::vector<PadicScalar> v;
        v.reserve(static_cast<size_t>(n_));
        for (const auto& comp : deriv_[static_cast<size_t>(j)]) v.push_back(comp.eval(t));
        return PadicVector(std::move(v));
    }

    const PadicPoly& derivative_poly(int i, int j) const {
        return deriv_[static_cast<size_t>(j)][static_cast<size_t>(i)];
    }

    // [zeta^{(1)}(t) | ... | zeta^{(n)}(t)] as columns.
    PadicMatrix jet_matrix(const PadicScalar& t) const {
        PadicMatrix m(n_, n_, p_, prec_);
        for (int j = 1; j <= n_; ++j) {
            PadicVector col = derivative_at(j, t);
            for (int i = 0; i < n_; ++i) m.at(i, j - 1) = col[i];
        }
        return m;
    }

    int max_degree() const {
        int d = 0;
        for (const auto& f : comp_) d = std::max(d, f.degree());
        return d;
    }

private:
    void build_derivatives() {
        deriv_.clear();
        deriv_.push_back(comp_);  // order 0
        for (int j = 1; j <= n_ + 1; ++j) {
            std::vector<PadicPoly> dj;
            for (const auto& f : deriv_.back()) dj.push_back(f.derivative());
            deriv_.push_back(std::move(dj));
        }
    }

    long p_;
    int prec_;
    int n_;
    std::vector<PadicPoly> comp_;
    std::vector<std::vector<PadicPoly>> deriv_;
};

inline PadicVector moment_curve_eval(int n, const PadicScalar& t) {
    return PolyCurve::moment(n, t.prime(), t.precision()).eval(t);
}

// The jet matrix [gamma^{(1)}(theta) | ... | gamma^{(n)}(theta)] of the
// moment curve, entries theta^{i-j}/(i-j)!.  Factorials only reach (n-1)!,
// so this exists whenever p > n - 1 (unlike the curve itself).
inline PadicMatrix moment_jet_matrix(int n, const PadicScalar& theta) {
    const long p = theta.prime();
    if (p <= n - 1) throw std::invalid_argument("moment jet: requires p > n - 1");
    const int prec = theta.precision();
    PadicMatrix m(n, n, p, prec);
    for (int j = 1; j <= n; ++j)
        for (int i = j; i <= n; ++i) {
            BigInt fact(1);
            for (int k = 2; k <= i - j; ++k) fact *= k;
            m.at(i - 1, j - 1) = theta.pow(i - j) *
                                 PadicScalar::from_rational(Rational(1, fact), p, prec);
        }
    return m;
}

// Frame A_{theta,alpha,beta}: columns j<=m are alpha*zeta^{(j)}(theta), the
// rest beta*zeta^{(j)}(theta).  alpha and beta are scalars in p^Z; the norm
// of the leading columns scales by |alpha|_p.  A_{theta,alpha} has beta = 1.
struct DerivativeFrame {
    PadicScalar theta;
    PadicScalar alpha;
    PadicScalar beta;
    int split;  // m
    PadicMatrix matrix;
};

inline void require_p_power(const PadicScalar& s, const char* name) {
    if (s.is_zero() || s.unit() != 1)
        throw std::invalid_argument(std::string(name) + " must be a power of p");
}

inline DerivativeFrame derivative_frame(const PolyCurve& zeta, const PadicScalar& theta,
                                        const PadicScalar& alpha, const PadicScalar& beta,
                                        int m) {
    require_p_power(alpha, "alpha");
    require_p_power(beta, "beta");
    if (m < 0 || m > zeta.dim()) throw std::invalid_argument("frame: split index out of range");
    PadicMatrix a(zeta.dim(), zeta.dim(), zeta.prime(), zeta.precision());
    for (int j = 1; j <= zeta.dim(); ++j) {
        PadicVector col = zeta.derivative_at(j, theta);
        const PadicScalar& s = (j <= m) ? alpha : beta;
        for (int i = 0; i < zeta.dim(); ++i) a.at(i, j - 1) = col[i] * s;
    }
    return DerivativeFrame{theta, alpha, beta, m, std::move(a)};
}

inline DerivativeFrame derivative_frame(const PolyCurve& zeta, const PadicScalar& theta,
                                        const PadicScalar& alpha, int m) {
    return derivative_frame(zeta, theta, alpha, PadicScalar::one(zeta.prime(), zeta.precision()), m);
}

// Taylor-scaled frame [zeta^{(1)}(theta)|...|zeta^{(n)}(theta)] * diag(lambda, ..., lambda^n).
inline PadicMatrix taylor_frame(const PolyCurve& zeta, const PadicScalar& theta,
                                const PadicScalar& lambda) {
    PadicMatrix a = zeta.jet_matrix(theta);
    PadicScalar lp = PadicScalar::one(zeta.prime(), zeta.precision());
    for (int j = 0; j < zeta.dim(); ++j) {
        lp = lp * lambda;
        for (int i = 0; i < zeta.dim(); ++i) a.at(i, j) = a.at(i, j) * lp;
    }
    return a;
}

// v(det[gamma^{(1)}(t),...,gamma^{(k)}(t),gamma^{(1)}(s),...,gamma^{(n-k)}(s)]),
// asserted equal to k(n-k) * v(s-t).
inline long vandermonde_valuation(int n, int k, const PadicScalar& t, const PadicScalar& s) {
    if (k <= 0 || k >= n) throw std::invalid_argument("vandermonde: need 0 < k < n");
    PadicScalar diff = s - t;
    if (diff.is_zero()) throw std::domain_error("vandermonde: t = s gives zero determinant");
    PolyCurve gamma = PolyCurve::moment(n, t.prime(), t.precision());
    PadicMatrix m(n, n, t.prime(), t.precision());
    for (int j = 1; j <= k; ++j) {
        PadicVector col = gamma.derivative_at(j, t);
        for (int i = 0; i < n; ++i) m.at(i, j - 1) = col[i];
    }
    for (int j = 1; j <= n - k; ++j) {
        PadicVector col = gamma.derivative_at(j, s);
        for (int i = 0; i < n; ++i) m.at(i, k + j - 1) = col[i];
    }
    PadicScalar d = m.det();
    if (d.is_zero()) throw std::domain_error("vandermonde: determinant vanished at precision");
    long got = d.valuation();
    long expected = static_cast<long>(k) * (n - k) * diff.valuation();
    if (got != expected)
        throw std::logic_error("vandermonde: valuation " + std::to_string(got) +
                               " != " + std::to_string(expected));
    return got;
}

// Newton quotient Phi_k f(a_1,...,a_{k+1}) = sum_j f(a_j) / prod_{i!=j}(a_j - a_i).
// Repeated points are routed through the coincident limit (polynomials only):
// the divided-difference recursion bottoms out at f^{(r)}(a)/r!.
inline PadicScalar newton_quotient(const PadicPoly& f, std::vector<PadicScalar> pts) {
    const long p = f.prime();
    const int prec = f.precision();
    const int k1 = static_cast<int>(pts.size());
    if (k1 < 1) throw std::invalid_argument("newton_quotient: need at least one point");

    bool all_distinct = true;
    for (int i = 0; i < k1 && all_distinct; ++i)
        for (int j = i + 1; j < k1; ++j)
            if (pts[static_cast<size_t>(i)] == pts[static_cast<size_t>(j)]) {
                all_distinct = false;
                break;
            }
    if (all_distinct) {
        PadicScalar acc = PadicScalar::zero(p, prec);
        for (int j = 0; j < k1; ++j) {
            PadicScalar denom = PadicScalar::one(p, prec);
            for (int i = 0; i < k1; ++i)
                if (i != j) denom = denom * (pts[static_cast<size_t>(j)] - pts[static_cast<size_t>(i)]);
            acc = acc + f.eval(pts[static_cast<size_t>(j)]) / denom;
        }
        return acc;
    }

    // Group equal points so repeats are adjacent.
    std::vector<PadicScalar> sorted;
    std::vector<char> used(pts.size(), 0);
    for (size_t i = 0; i < pts.size(); ++i) {
        if (used[i]) continue;
        for (size_t j = i; j < pts.size(); ++j)
            if (!used[j] && pts[j] == pts[i]) {
                sorted.push_back(pts[j]);
                used[j] = 1;
            }
    }

    // dd[i][j] = divided difference over sorted[i..j].
    std::vector<PadicPoly> derivs;
    derivs.push_back(f);
    for (int r = 1; r < k1; ++r) derivs.push_back(derivs.back().derivative());
    std::vector<BigInt> fact(static_cast<size_t>(k1), BigInt(1));
    for (int r = 1; r < k1; ++r) fact[static_cast<size_t>(r)] = fact[static_cast<size_t>(r - 1)] * r;

    std::map<std::pair<int, int>, PadicScalar> memo;
    std::function<PadicScalar(int, int)> dd = [&](int i, int j) -> PadicScalar {
        auto it = memo.find({i, j});
        if (it != memo.end()) return it->second;
        PadicScalar r = PadicScalar::zero(p, prec);
        if (sorted[static_cast<size_t>(i)] == sorted[static_cast<size_t>(j)]) {
            int order = j - i;
            r = derivs[static_cast<size_t>(order)].eval(sorted[static_cast<size_t>(i)]) *
                PadicScalar::from_rational(Rational(1, fact[static_cast<size_t>(order)]), p, prec);
        } else {
            r = (dd(i + 1, j) - dd(i, j - 1)) /
                (sorted[static_cast<size_t>(j)] - sorted[static_cast<size_t>(i)]);
        }
        memo.emplace(std::make_pair(i, j), r);
        return r;
    };
    return dd(0, k1 - 1);
}

// Phi_k f(x) - Phi_k f(y) = sum_j (x_j - y_j) Phi_{k+1} f(x_1,...,x_j,y_j,...,y_{k+1}).
struct NewtonDifferenceRecord {
    PadicScalar lhs;
    PadicScalar rhs;
    bool holds;
};

inline NewtonDifferenceRecord newton_quotient_difference(const PadicPoly& f,
                                                         const std::vector<PadicScalar>& x,
                                                         const std::vector<PadicScalar>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("newton difference: size mismatch");
    const long p = f.prime();
    const int prec = f.precision();
    PadicScalar lhs = newton_quotient(f, x) - newton_quotient(f, y);
    PadicScalar rhs = PadicScalar::zero(p, prec);
    const size_t k1 = x.size();
    for (size_t j = 0; j < k1; ++j) {
        std::vector<PadicScalar> mixed;
        for (size_t i = 0; i <= j; ++i) mixed.push_back(x[i]);
        for (size_t i = j; i < k1; ++i) mixed.push_back(y[i]);
        rhs = rhs + (x[j] - y[j]) * newton_quotient(f, mixed);
    }
    return NewtonDifferenceRecord{lhs, rhs, lhs == rhs};
}

// max_{1<=j<=k} max over (j+1)-subsets of the depth-d grid of |Phi_j f|_p.
// Exact for polynomials once the grid resolves the degree; a certified lower
// bound in general.
inline Rational ck_seminorm(const PadicPoly& f, int k, int depth) {
    if (depth < 1) throw std::invalid_argument("ck_seminorm: depth >= 1 required");
    const long p = f.prime();
    const int prec = f.precision();
    BigInt size = prime_power(p, static_cast<unsigned long>(depth));
    if (size > 4096) throw std::overflow_error("ck_seminorm: grid too large");
    long gs = size.get_si();
    std::vector<PadicScalar> grid;
    grid.reserve(static_cast<size_t>(gs));
    for (long i = 0; i < gs; ++i) grid.push_back(PadicScalar::from_integer(i, p, prec));

    Rational best(0);
    std::vector<int> idx;
    std::function<void(int, int, int)> rec = [&](int j, int start, int need) {
        if (need == 0) {
            std::vector<PadicScalar> pts;
            for (int t : idx) pts.push_back(grid[static_cast<size_t>(t)]);
            best = rat_max(best, newton_quotient(f, pts).norm());
            return;
        }
        for (int t = start; t <= gs - need; ++t) {
            idx.push_back(t);
            rec(j, t + 1, need - 1);
            idx.pop_back();
        }
    };
    for (int j = 1; j <= k; ++j) rec(j, 0, j + 1);
    return best;
}

// Convexity constant c = min over the grid of |det jet|, bounded-derivative
// constant C = max over entries and the grid of |zeta_i^{(j)}|.  Degenerate
// when the jet determinant vanishes somewhere on the grid.
struct ConvexityReport {
    Rational c;
    Rational C;
    bool degenerate;
};

inline ConvexityReport convexity_check(const PolyCurve& zeta, int depth) {
    const long p = zeta.prime();
    const int prec = zeta.precision();
    BigInt size = prime_power(p, static_cast<unsigned long>(depth));
    if (size > 200000) throw std::overflow_error("convexity_check: grid too large");
    long gs = size.get_si();
    Rational c(0);
    Rational C(0);
    bool first = true, degenerate = false;
    for (long i = 0; i < gs; ++i) {
        PadicScalar t = PadicScalar::from_integer(i, p, prec);
        PadicScalar d = zeta.jet_matrix(t).det();
        if (d.is_zero()) {
            degenerate = true;
            c = Rational(0);
        } else if (first || d.norm() < c) {
            c = d.norm();
        }
        first = false;
        for (int j = 1; j <= zeta.dim(); ++j) {
            PadicVector col = zeta.derivative_at(j, t);
            for (int ii = 0; ii < zeta.dim(); ++ii) C = rat_max(C, col[ii].norm());
        }
    }
    return ConvexityReport{c, C, degenerate};
}

// zeta_{theta,lambda}(t) = [A^zeta_{theta,lambda}]^{-1} (zeta(theta + lambda t) - zeta(theta)),
// lambda in pZ_p.  For polynomial zeta of degree <= n this equals the moment curve.
inline PolyCurve rescaled_curve(const PolyCurve& zeta, const PadicScalar& theta,
                                const PadicScalar& lambda) {
    if (lambda.is_zero() || lambda.valuation() < 1)
        throw std::invalid_argument("rescaled_curve: lambda must lie in pZ_p");
    const long p = zeta.prime();
    const int prec = zeta.precision();
    PadicMatrix ainv = taylor_frame(zeta, theta, lambda).inverse();
    // Component polynomials of zeta(theta + lambda t) - zeta(theta).
    std::vector<PadicPoly> shifted;
    for (int i = 0; i < zeta.dim(); ++i) {
        PadicPoly g = zeta.component(i).compose_affine(theta, lambda);
        std::vector<PadicScalar> cc;
        for (int k = 0; k <= g.degree(); ++k)
            cc.push_back(k == 0 ? g.coeff_or_zero(0) - zeta.component(i).eval(theta)
                                : g.coeff_or_zero(k));
        shifted.emplace_back(std::move(cc), p, prec);
    }
    std::vector<PadicPoly> out;
    for (int i = 0; i < zeta.dim(); ++i) {
        PadicPoly acc(p, prec);
        for (int j = 0; j < zeta.dim(); ++j)
            acc = acc + shifted[static_cast<size_t>(j)] * ainv.at(i, j);
        out.push_back(std::move(acc));
    }
    return PolyCurve(std::move(out), p, prec);
}

}  // namespace padiclab
