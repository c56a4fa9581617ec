#pragma once

// Frequency-cone regions over the moment curve and the diagonal rescaling
// operators used to flatten them.  A frequency point xi is analyzed through
// its frame coordinates lambda = [gamma^{(1)}(theta)|...|gamma^{(n)}(theta)]^{-1} xi;
// the region predicates are valuation conditions on lambda.
//
// eps must be the reciprocal of a positive integer; slice scales live on the
// grid p^{-N/eps}.  Other values are rejected, matching the convention that
// eps is a sufficiently divisible reciprocal.

#include "padiclab/curves.hpp"

#include <optional>

namespace padiclab {

struct ConeRegionSpec {
    int n;           // ambient dimension
    int m;           // projection rank, 1 <= m < n
    long p;
    int precision = 48;
    int delta_exp;   // delta = p^{-delta_exp}
    int eps_inv;     // eps = 1 / eps_inv

    void validate() const {
        if (m < 1 || m >= n) throw std::invalid_argument("cone: need 1 <= m < n");
        if (delta_exp < 1) throw std::invalid_argument("cone: delta_exp >= 1");
        if (eps_inv < 1)
            throw std::invalid_argument(
                "cone: eps must be the reciprocal of a positive integer (divisible-reciprocal "
                "convention)");
    }

    // Admissible slice exponents e (s_1 = p^{-e}): multiples of eps_inv with
    // p^{-e} >= delta^{1/(n - m1)}, plus the bottom slice delta^{1/(n - m1)}.
    long bottom_exp(int m1) const {
        if (delta_exp % (n - m1) != 0)
            throw std::invalid_argument(
                "cone: delta_exp not divisible by n - m1; pick a more divisible delta");
        return delta_exp / (n - m1);
    }
};

struct ConeClass {
    bool inside = false;
    int m1 = 0;         // class index in [1, m]
    long s1_exp = 0;    // assigned slice s_1 = p^{-s1_exp}
    bool bottom = false;  // s_1 = delta^{1/(n-m1)}
};

namespace cone_detail {
// valuation of lambda_j with +infinity for 0
inline long val(const PadicVector& lam, int j /*1-based*/) {
    const PadicScalar& x = lam[j - 1];
    return x.is_zero() ? PadicScalar::kZeroValuation : x.valuation();
}
}  // namespace cone_detail

// Membership in Omega_J for the frame at theta: all |lambda_j| <= 1 with
// max |lambda_j| = 1 and |lambda_j| <= delta for j in (m, n].
inline bool in_omega(const ConeRegionSpec& spec, const PadicVector& lambda) {
    bool has_unit = false;
    for (int j = 1; j <= spec.n; ++j) {
        long v = cone_detail::val(lambda, j);
        if (v < 0) return false;
        if (v == 0) has_unit = true;
        if (j > spec.m && v < spec.delta_exp) return false;
    }
    return has_unit;
}

// Class m1: |lambda_{m1}| = 1 and |lambda_j| < 1 for j in (m1, m].
inline bool in_omega_class(const ConeRegionSpec& spec, const PadicVector& lambda, int m1) {
    if (!in_omega(spec, lambda)) return false;
    if (cone_detail::val(lambda, m1) != 0) return false;
    for (int j = m1 + 1; j <= spec.m; ++j)
        if (cone_detail::val(lambda, j) == 0) return false;
    return true;
}

// Slice predicate for s_1 = p^{-s1_exp} within class m1:
//   (bottom slice or exists iota with s_1^iota <= |lambda_{m1+iota}|) and
//   for all iota in [1, m-m1]: |lambda_{m1+iota}| < p^{iota/eps} s_1^{iota}.
inline bool in_omega_slice(const ConeRegionSpec& spec, const PadicVector& lambda, int m1,
                           long s1_exp) {
    long bottom = spec.bottom_exp(m1);
    bool is_bottom = (s1_exp == bottom);
    bool witness = is_bottom;
    for (int iota = 1; iota <= spec.m - m1; ++iota) {
        long v = cone_detail::val(lambda, m1 + iota);
        if (v != PadicScalar::kZeroValuation && v <= static_cast<long>(iota) * s1_exp)
            witness = true;
        // |lambda| < p^{iota eps^{-1} - iota s1_exp}  <=>  v > iota (s1_exp - eps^{-1})
        if (v <= static_cast<long>(iota) * (s1_exp - spec.eps_inv)) return false;
    }
    return witness;
}

// Solve for the frame coordinates of xi at anchor theta.
inline PadicVector frame_coordinates(const PolyCurve& gamma, const PadicScalar& theta,
                                     const PadicVector& xi) {
    return gamma.jet_matrix(theta).inverse() * xi;
}

// Classify xi: the unique m1 class, and the canonical covering slice (the
// largest admissible slice exponent obtained by rounding the coefficient
// profile down to the grid; the bottom slice when everything is small).
inline ConeClass cone_classify(const ConeRegionSpec& spec, const PolyCurve& gamma,
                               const PadicScalar& theta, const PadicVector& xi) {
    spec.validate();
    PadicVector lambda = frame_coordinates(gamma, theta, xi);
    ConeClass out;
    if (!in_omega(spec, lambda)) return out;
    out.inside = true;
    int m1 = 0;
    for (int j = 1; j <= spec.m; ++j)
        if (cone_detail::val(lambda, j) == 0) m1 = j;
    if (m1 == 0) throw std::logic_error("cone: in-region point without unit coefficient");
    out.m1 = m1;

    long bottom = spec.bottom_exp(m1);
    // r* = min over iota of v(lambda_{m1+iota}) / iota; slice = r* rounded up
    // to the grid (an integer multiple of eps_inv), capped at the bottom.
    std::optional<long> chosen;
    long best_num = 0, best_den = 1;
    bool have = false;
    for (int iota = 1; iota <= spec.m - m1; ++iota) {
        long v = cone_detail::val(lambda, m1 + iota);
        if (v == PadicScalar::kZeroValuation) continue;
        if (!have || v * best_den < best_num * iota) {
            best_num = v;
            best_den = iota;
            have = true;
        }
    }
    if (have) {
        // smallest multiple of eps_inv that is >= best_num / best_den
        long mult = (best_num + spec.eps_inv * best_den - 1) / (spec.eps_inv * best_den);
        long e = mult * spec.eps_inv;
        if (e < bottom) chosen = e;
    }
    out.s1_exp = chosen.value_or(bottom);
    out.bottom = !chosen.has_value();
    if (!in_omega_slice(spec, lambda, m1, out.s1_exp))
        throw std::logic_error("cone: assigned slice does not cover the point");
    return out;
}

// ---------------------------------------------------------------------------
// Rescaling operators.  All three are diagonal with entries in p^Z (the D
// operator also carries p^{iota/eps} factors); they are stored as vectors of
// exact scalars and compose by entrywise multiplication.

class DiagonalOp {
public:
    DiagonalOp(std::vector<PadicScalar> factors) : f_(std::move(factors)) {}

    static DiagonalOp identity(int n, long p, int precision) {
        return DiagonalOp(std::vector<PadicScalar>(static_cast<size_t>(n),
                                                   PadicScalar::one(p, precision)));
    }

    int dim() const { return static_cast<int>(f_.size()); }
    const PadicScalar& factor(int j /*1-based*/) const { return f_[static_cast<size_t>(j - 1)]; }

    PadicVector apply(const PadicVector& x) const {
        std::vector<PadicScalar> y;
        y.reserve(f_.size());
        for (size_t i = 0; i < f_.size(); ++i) y.push_back(x[static_cast<int>(i)] * f_[i]);
        return PadicVector(std::move(y));
    }

    DiagonalOp inverse() const {
        std::vector<PadicScalar> g;
        for (const auto& x : f_) g.push_back(x.inverse());
        return DiagonalOp(std::move(g));
    }

    // this after other
    DiagonalOp compose(const DiagonalOp& other) const {
        std::vector<PadicScalar> g;
        for (size_t i = 0; i < f_.size(); ++i) g.push_back(f_[i] * other.f_[i]);
        return DiagonalOp(std::move(g));
    }

private:
    std::vector<PadicScalar> f_;
};

inline PadicScalar p_power(long p, long e, int precision) {
    return PadicScalar::from_unit(e, BigInt(1), p, precision);
}

// L_{m1,s1}(xi) = (xi_1, ..., xi_{m1}, s1^{-1} xi_{m1+1}, ..., s1^{m1-n} xi_n).
inline DiagonalOp op_l(int n, int m1, long s1_exp, long p, int precision) {
    if (m1 < 1 || m1 > n) throw std::invalid_argument("op_l: m1 out of range");
    std::vector<PadicScalar> f;
    for (int j = 1; j <= n; ++j) {
        long e = j <= m1 ? 0 : static_cast<long>(j - m1) * s1_exp;
        f.push_back(p_power(p, e, precision));  // s1^{m1-j} = p^{(j-m1) s1_exp}
    }
    return DiagonalOp(std::move(f));
}

// R_{m1,s1}(xi) = (s1^{1-1} xi_1, ..., s1^{1-m1} xi_{m1}, s1^{1-m1} xi_{m1+1}, ...).
inline DiagonalOp op_r(int n, int m1, long s1_exp, long p, int precision) {
    if (m1 < 1 || m1 > n) throw std::invalid_argument("op_r: m1 out of range");
    std::vector<PadicScalar> f;
    for (int j = 1; j <= n; ++j) {
        long k = j <= m1 ? (j - 1) : (m1 - 1);
        f.push_back(p_power(p, k * s1_exp, precision));  // s1^{1-j} = p^{(j-1) s1_exp}
    }
    return DiagonalOp(std::move(f));
}

// D_{m1,n1}^{s1}: s1^{j-1} for j <= m1; p^{-(j-m1)/eps} s1^{m1-1} for
// m1 < j <= m; s1^{m1-1} for m < j <= n1; identity above n1.
inline DiagonalOp op_d(int n, int m, int m1, int n1, long s1_exp, int eps_inv, long p,
                       int precision) {
    if (m1 < 1 || m1 > m || n1 < m || n1 > n) throw std::invalid_argument("op_d: index ranges");
    std::vector<PadicScalar> f;
    for (int j = 1; j <= n; ++j) {
        long e;
        if (j <= m1)
            e = -static_cast<long>(j - 1) * s1_exp;  // s1^{j-1} = p^{-(j-1) s1_exp}
        else if (j <= m)
            e = -static_cast<long>(j - m1) * eps_inv - static_cast<long>(m1 - 1) * s1_exp;
        else if (j <= n1)
            e = -static_cast<long>(m1 - 1) * s1_exp;
        else
            e = 0;
        f.push_back(p_power(p, e, precision));
    }
    return DiagonalOp(std::move(f));
}

// Composite operators for tuples (m_1..m_J), (s_1..s_J), (n_1..n_J); the
// j-th step composes on the left.
inline DiagonalOp op_l_tuple(int n, const std::vector<int>& m, const std::vector<long>& s_exp,
                             long p, int precision) {
    DiagonalOp acc = DiagonalOp::identity(n, p, precision);
    for (size_t j = 0; j < m.size(); ++j)
        acc = op_l(n, m[j], s_exp[j], p, precision).compose(acc);
    return acc;
}

inline DiagonalOp op_r_tuple(int n, const std::vector<int>& m, const std::vector<long>& s_exp,
                             long p, int precision) {
    DiagonalOp acc = DiagonalOp::identity(n, p, precision);
    for (size_t j = 0; j < m.size(); ++j)
        acc = op_r(n, m[j], s_exp[j], p, precision).compose(acc);
    return acc;
}

inline DiagonalOp op_d_tuple(int n, int m_rank, const std::vector<int>& m,
                             const std::vector<int>& n1, const std::vector<long>& s_exp,
                             int eps_inv, long p, int precision) {
    DiagonalOp acc = DiagonalOp::identity(n, p, precision);
    for (size_t j = 0; j < m.size(); ++j)
        acc = op_d(n, m_rank, m[j], n1[j], s_exp[j], eps_inv, p, precision).compose(acc);
    return acc;
}

// gamma_{m_J,s_J}(theta) := (R_{m_J,s_J} o ... o R_{m_1,s_1})(gamma(theta)),
// and the identity gamma_{m,s}(theta) = s^o * L^{-1} gamma(s^{-o} theta),
// where s^o = prod s_j.  Returns both sides for exact comparison.
struct RescaledCurveIdentity {
    PadicVector lhs;
    PadicVector rhs;
    bool holds;
};

inline RescaledCurveIdentity rescaled_gamma_identity(int n, const std::vector<int>& m,
                                                     const std::vector<long>& s_exp,
                                                     const PadicScalar& theta, long p,
                                                     int precision) {
    PolyCurve gamma = PolyCurve::moment(n, p, precision);
    DiagonalOp r = op_r_tuple(n, m, s_exp, p, precision);
    PadicVector lhs = r.apply(gamma.eval(theta));
    // s_exp stores the exponents e_j with s_j = p^{-e_j}, so s^o = p^{-total}.
    long total = 0;
    for (long e : s_exp) total += e;
    PadicScalar s_circ = p_power(p, -total, precision);
    PadicScalar s_inv = p_power(p, total, precision);
    DiagonalOp linv = op_l_tuple(n, m, s_exp, p, precision).inverse();
    PadicVector rhs = linv.apply(gamma.eval(s_inv * theta)) * s_circ;
    return RescaledCurveIdentity{lhs, rhs, lhs == rhs};
}

}  // namespace padiclab
