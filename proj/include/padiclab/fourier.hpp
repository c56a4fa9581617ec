#pragma once

// Schwartz-Bruhat functions on Q_p^n as finite arrays, the additive character
// chi(x) = e^{2 pi i {x}_p}, the exact Fourier transform (a DFT over
// (Z/p^{a+b})^n), L^q norms under mu(Z_p^n) = 1, convolution, and frequency
// projections.
//
// A function with support in p^{-a}Z_p^n and constant on cosets of p^b Z_p^n
// is stored on the cell grid (Z/p^{a+b})^n via x -> p^a x; the cell with
// multi-index m (per-axis in [0, p^{a+b})) has representative point
// x_i = m_i p^{-a} and Haar measure p^{-nb}.
//
// Transform convention: forward kernel chi(-x.xi), inverse chi(+x.xi).  This
// is the unique sign choice under which the transform of the indicator of a
// tilted box c + M[Z_p^n] is chi(-c.xi)|det M| times the indicator of the
// dual box M^{-T}[Z_p^n].

#include "padiclab/linalg.hpp"

#include <complex>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace padiclab {

using Complex = std::complex<double>;

inline Complex character(const Rational& x) {
    Rational r = x;
    // reduce mod 1
    BigInt q = r.get_num() / r.get_den();
    r -= Rational(q, 1);
    if (r < 0) r += 1;
    long double angle = 2.0L * std::numbers::pi_v<long double> * r.get_num().get_d() /
                        r.get_den().get_d();
    return Complex(static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle)));
}

inline Complex character(const PadicScalar& x) { return character(x.fractional_part()); }

class LatticeFunction {
public:
    LatticeFunction(long p, int n, int a, int b)
        : p_(p), n_(n), a_(a), b_(b) {
        if (a < 0 || b < 0) throw std::invalid_argument("lattice: negative exponent");
        axis_ = checked_axis_size(p, a + b);
        size_t cells = 1;
        for (int i = 0; i < n; ++i) {
            if (cells > budget_ref() / static_cast<size_t>(axis_))
                throw std::overflow_error("lattice: cell budget exceeded");
            cells *= static_cast<size_t>(axis_);
        }
        v_.assign(cells, Complex(0.0, 0.0));
    }

    static size_t cell_budget() { return budget_ref(); }
    static void set_cell_budget(size_t cells) { budget_ref() = cells; }

    long prime() const { return p_; }
    int dim() const { return n_; }
    int support_exp() const { return a_; }    // support within p^{-a} Z_p^n
    int constancy_exp() const { return b_; }  // constant on p^b Z_p^n cosets
    long axis_size() const { return axis_; }  // p^{a+b}
    size_t cell_count() const { return v_.size(); }

    double cell_measure() const {
        return std::pow(static_cast<double>(p_), -static_cast<double>(n_) * b_);
    }
    Rational cell_measure_exact() const {
        return Rational(1, prime_power(p_, static_cast<unsigned long>(n_) *
                                               static_cast<unsigned long>(b_)));
    }

    Complex& operator[](size_t i) { return v_[i]; }
    const Complex& operator[](size_t i) const { return v_[i]; }

    size_t flat_index(const std::vector<long>& m) const {
        size_t idx = 0;
        for (int i = 0; i < n_; ++i)
            idx = idx * static_cast<size_t>(axis_) + static_cast<size_t>(m[static_cast<size_t>(i)]);
        return idx;
    }

    std::vector<long> multi_index(size_t idx) const {
        std::vector<long> m(static_cast<size_t>(n_));
        for (int i = n_ - 1; i >= 0; --i) {
            m[static_cast<size_t>(i)] = static_cast<long>(idx % static_cast<size_t>(axis_));
            idx /= static_cast<size_t>(axis_);
        }
        return m;
    }

    // Representative point of a cell, coordinates m_i p^{-a} as exact rationals.
    std::vector<Rational> cell_point(const std::vector<long>& m) const {
        std::vector<Rational> x;
        x.reserve(static_cast<size_t>(n_));
        BigInt den = prime_power(p_, static_cast<unsigned long>(a_));
        for (int i = 0; i < n_; ++i) {
            Rational r(BigInt(m[static_cast<size_t>(i)]), den);
            r.canonicalize();
            x.push_back(r);
        }
        return x;
    }

    PadicVector cell_point_padic(const std::vector<long>& m, int precision) const {
        std::vector<PadicScalar> e;
        for (int i = 0; i < n_; ++i)
            e.push_back(PadicScalar::from_rational(
                Rational(BigInt(m[static_cast<size_t>(i)]),
                         prime_power(p_, static_cast<unsigned long>(a_))),
                p_, precision));
        return PadicVector(std::move(e));
    }

    static LatticeFunction from_cells(long p, int n, int a, int b,
                                      const std::function<Complex(const std::vector<long>&)>& f) {
        LatticeFunction g(p, n, a, b);
        std::vector<long> m(static_cast<size_t>(n), 0);
        for (size_t idx = 0; idx < g.v_.size(); ++idx) {
            g.v_[idx] = f(m);
            g.bump(m);
        }
        return g;
    }

    static LatticeFunction from_points(long p, int n, int a, int b,
                                       const std::function<Complex(const std::vector<Rational>&)>& f) {
        LatticeFunction g(p, n, a, b);
        std::vector<long> m(static_cast<size_t>(n), 0);
        for (size_t idx = 0; idx < g.v_.size(); ++idx) {
            g.v_[idx] = f(g.cell_point(m));
            g.bump(m);
        }
        return g;
    }

    // Indicator of Z_p^n within any lattice shape.
    static LatticeFunction indicator_zpn(long p, int n, int a, int b) {
        return from_points(p, n, a, b, [](const std::vector<Rational>& x) {
            for (const auto& xi : x)
                if (xi.get_den() != 1) return Complex(0.0, 0.0);
            return Complex(1.0, 0.0);
        });
    }

    // Value at an arbitrary rational point (as an element of Q_p^n): zero
    // when some coordinate lies outside p^{-a}Z_p, i.e. its denominator has a
    // p-factor left after scaling; prime-to-p denominators are inverted mod
    // the grid.
    Complex value_at(const std::vector<Rational>& x) const {
        std::vector<long> m(static_cast<size_t>(n_));
        BigInt pa = prime_power(p_, static_cast<unsigned long>(a_));
        BigInt mod = prime_power(p_, static_cast<unsigned long>(a_ + b_));
        for (int i = 0; i < n_; ++i) {
            Rational s = x[static_cast<size_t>(i)] * Rational(pa, 1);
            s.canonicalize();
            BigInt den = s.get_den();
            if (mpz_divisible_ui_p(den.get_mpz_t(), static_cast<unsigned long>(p_)))
                return Complex(0.0, 0.0);  // outside p^{-a}Z_p^n
            BigInt dinv;
            if (!mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t()))
                return Complex(0.0, 0.0);
            BigInt num = s.get_num() * dinv;
            mpz_mod(num.get_mpz_t(), num.get_mpz_t(), mod.get_mpz_t());
            m[static_cast<size_t>(i)] = num.get_si();
        }
        return v_[flat_index(m)];
    }

    LatticeFunction operator+(const LatticeFunction& o) const {
        auto [f, g] = unified(*this, o);
        for (size_t i = 0; i < f.v_.size(); ++i) f.v_[i] += g.v_[i];
        return f;
    }
    LatticeFunction operator-(const LatticeFunction& o) const {
        auto [f, g] = unified(*this, o);
        for (size_t i = 0; i < f.v_.size(); ++i) f.v_[i] -= g.v_[i];
        return f;
    }
    LatticeFunction operator*(Complex c) const {
        LatticeFunction f(*this);
        for (auto& z : f.v_) z *= c;
        return f;
    }
    LatticeFunction pointwise_mul(const LatticeFunction& o) const {
        auto [f, g] = unified(*this, o);
        for (size_t i = 0; i < f.v_.size(); ++i) f.v_[i] *= g.v_[i];
        return f;
    }

    // Reshape onto a finer / larger grid (a2 >= a, b2 >= b); values replicate.
    LatticeFunction extended(int a2, int b2) const {
        if (a2 < a_ || b2 < b_) throw std::invalid_argument("lattice: cannot shrink shape");
        if (a2 == a_ && b2 == b_) return *this;
        LatticeFunction g(p_, n_, a2, b2);
        long shift = ipow(p_, a2 - a_);
        long mod = axis_;
        std::vector<long> m(static_cast<size_t>(n_), 0);
        std::vector<long> mm(static_cast<size_t>(n_), 0);
        for (size_t idx = 0; idx < g.v_.size(); ++idx) {
            bool in_support = true;
            for (int i = 0; i < n_ && in_support; ++i) {
                if (m[static_cast<size_t>(i)] % shift != 0) in_support = false;
                else mm[static_cast<size_t>(i)] = (m[static_cast<size_t>(i)] / shift) % mod;
            }
            g.v_[idx] = in_support ? v_[flat_index(mm)] : Complex(0.0, 0.0);
            g.bump(m);
        }
        return g;
    }

    // Exact finite Fourier transform; swaps the roles of a and b.
    LatticeFunction transform() const { return dft(-1); }
    LatticeFunction inverse_transform() const { return dft(+1); }

    double lq_norm(double q) const {
        if (std::isinf(q)) {
            double m = 0;
            for (const auto& z : v_) m = std::max(m, std::abs(z));
            return m;
        }
        if (q < 1.0) throw std::invalid_argument("lq_norm: q >= 1 required");
        // compensated accumulation
        long double s = 0;
        for (const auto& z : v_) s += std::pow(static_cast<long double>(std::abs(z)), q);
        s *= static_cast<long double>(cell_measure());
        return static_cast<double>(std::pow(s, 1.0L / q));
    }
    double l1_norm() const { return lq_norm(1.0); }
    double l2_norm() const { return lq_norm(2.0); }
    double linf_norm() const { return lq_norm(std::numeric_limits<double>::infinity()); }

    double total_mass_sq() const {
        long double s = 0;
        for (const auto& z : v_) s += static_cast<long double>(std::norm(z));
        return static_cast<double>(s * cell_measure());
    }

    // Exact convolution with Haar weights.
    LatticeFunction convolve(const LatticeFunction& o) const {
        if (p_ != o.p_ || n_ != o.n_) throw std::invalid_argument("convolve: shape mismatch");
        int ar = std::max(a_, o.a_);
        int br = std::min(b_, o.b_);
        LatticeFunction r(p_, n_, ar, br);
        if (cell_count() * o.cell_count() > (size_t{1} << 28))
            throw std::overflow_error("convolve: cell budget exceeded");
        long long Pr = ipow(p_, ar + br);
        long long Pf = ipow(p_, a_ + b_);
        // Coordinates as numerators over the common denominator p^{c}, c = max(ar, a_).
        int c = std::max(ar, a_);
        long long mul_x = ipow(p_, c - ar);
        long long mul_y = ipow(p_, c - a_);
        long long og_shift_den = ipow(p_, c - o.a_);  // (x - y) must be divisible by this
        long long og_mod = ipow(p_, o.a_ + o.b_);
        double w = std::pow(static_cast<double>(p_), -static_cast<double>(n_) * b_);
        std::vector<long> mx(static_cast<size_t>(n_), 0);
        for (size_t ix = 0; ix < r.v_.size(); ++ix) {
            Complex acc(0, 0);
            std::vector<long> my(static_cast<size_t>(n_), 0);
            for (size_t iy = 0; iy < v_.size(); ++iy) {
                if (v_[iy] != Complex(0, 0)) {
                    // z = x - y at denominator p^c; g-cell index needs z * p^{o.a} mod p^{o.a+o.b}
                    bool ok = true;
                    std::vector<long> mz(static_cast<size_t>(n_));
                    for (int i = 0; i < n_ && ok; ++i) {
                        long long diff = static_cast<long long>(mx[static_cast<size_t>(i)]) * mul_x -
                                         static_cast<long long>(my[static_cast<size_t>(i)]) * mul_y;
                        long long zmod = og_shift_den * og_mod;
                        diff %= zmod;
                        if (diff < 0) diff += zmod;
                        if (diff % og_shift_den != 0) ok = false;
                        else mz[static_cast<size_t>(i)] = static_cast<long>((diff / og_shift_den) % og_mod);
                    }
                    if (ok) acc += v_[iy] * o.v_[o.flat_index(mz)];
                }
                bump_generic(my, Pf);
            }
            r.v_[ix] = acc * w;
            bump_generic(mx, Pr);
        }
        return r;
    }

private:
    static size_t& budget_ref() {
        static size_t budget = size_t{1} << 24;
        return budget;
    }

    static long checked_axis_size(long p, int e) {
        long r = 1;
        for (int i = 0; i < e; ++i) {
            if (r > static_cast<long>(budget_ref()) / p)
                throw std::overflow_error("lattice: axis size exceeds cell budget");
            r *= p;
        }
        return r;
    }

    static long long ipow(long p, int e) {
        long long r = 1;
        for (int i = 0; i < e; ++i) r *= p;
        return r;
    }

    void bump(std::vector<long>& m) const { bump_generic(m, axis_); }
    static void bump_generic(std::vector<long>& m, long long mod) {
        for (int i = static_cast<int>(m.size()) - 1; i >= 0; --i) {
            if (++m[static_cast<size_t>(i)] < static_cast<long>(mod)) return;
            m[static_cast<size_t>(i)] = 0;
        }
    }

    static std::pair<LatticeFunction, LatticeFunction> unified(const LatticeFunction& f,
                                                               const LatticeFunction& g) {
        if (f.p_ != g.p_ || f.n_ != g.n_) throw std::invalid_argument("lattice: shape mismatch");
        int a = std::max(f.a_, g.a_), b = std::max(f.b_, g.b_);
        return {f.extended(a, b), g.extended(a, b)};
    }

    LatticeFunction dft(int sign) const {
        // per-axis O(P^2) transform; kernel chi(sign * x.xi) with weight p^{-nb}
        LatticeFunction out(p_, n_, b_, a_);
        long P = axis_;
        std::vector<Complex> roots(static_cast<size_t>(P));
        for (long j = 0; j < P; ++j) {
            long double ang = 2.0L * std::numbers::pi_v<long double> * sign *
                              static_cast<long double>(j) / static_cast<long double>(P);
            roots[static_cast<size_t>(j)] =
                Complex(static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang)));
        }
        std::vector<Complex> cur = v_;
        std::vector<Complex> next(cur.size());
        // process axes from 0 to n-1; each pass transforms one axis in place,
        // so the row-major strides stay valid.
        size_t block = cur.size();
        for (int axis = 0; axis < n_; ++axis) {
            block /= static_cast<size_t>(P);
            for (size_t base = 0; base < cur.size(); ++base) {
                size_t inner = base % block;
                size_t outer = base / (block * static_cast<size_t>(P));
                size_t k = (base / block) % static_cast<size_t>(P);
                Complex acc(0, 0);
                size_t start = outer * block * static_cast<size_t>(P) + inner;
                for (long m = 0; m < P; ++m) {
                    size_t idx = start + static_cast<size_t>(m) * block;
                    acc += cur[idx] * roots[static_cast<size_t>((m * static_cast<long>(k)) % P)];
                }
                next[base] = acc;
            }
            std::swap(cur, next);
        }
        double w = cell_measure();
        for (size_t i = 0; i < cur.size(); ++i) out.v_[i] = cur[i] * w;
        return out;
    }

    long p_;
    int n_;
    int a_, b_;
    long axis_;
    std::vector<Complex> v_;
};

// A frequency region: an exact membership predicate over lattice points,
// assumed constant on the cells of any grid it is applied to.
struct FrequencyRegion {
    std::function<bool(const std::vector<Rational>&)> contains;
    std::string name;

    static FrequencyRegion everything() {
        return FrequencyRegion{[](const std::vector<Rational>&) { return true; }, "all"};
    }
    FrequencyRegion complement() const {
        auto self = contains;
        return FrequencyRegion{[self](const std::vector<Rational>& x) { return !self(x); },
                               "not(" + name + ")"};
    }
};

// P_Omega f = (1_Omega fhat)^vee.  The region must be constant on the cells
// of fhat's grid; a probe at a second representative of each cell catches
// regions that cut through cells.
inline LatticeFunction freq_restrict(const LatticeFunction& f, const FrequencyRegion& omega,
                                     bool verify_cells = true) {
    LatticeFunction fh = f.transform();
    Rational shift(prime_power(f.prime(), static_cast<unsigned long>(fh.constancy_exp())), 1);
    for (size_t idx = 0; idx < fh.cell_count(); ++idx) {
        std::vector<Rational> xi = fh.cell_point(fh.multi_index(idx));
        bool keep = omega.contains(xi);
        if (verify_cells) {
            std::vector<Rational> probe = xi;
            for (auto& c : probe) c += shift;
            if (omega.contains(probe) != keep)
                throw std::invalid_argument(
                    "freq_restrict: region '" + omega.name +
                    "' is not constant on frequency cell " + std::to_string(idx));
        }
        if (!keep) fh[idx] = Complex(0, 0);
    }
    return fh.inverse_transform();
}

}  // namespace padiclab
