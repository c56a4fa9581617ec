#pragma once

// Exact arithmetic in Q_p at finite precision.
//
// A nonzero value is stored as p^v * u where v is the valuation and u is a
// unit known modulo p^N (N = number of significant p-adic digits).  Zero is
// a sentinel with valuation +infinity; it is never represented by a unit.
// All size statements (|x|_p = p^{-v}, ultrametric inequality, norm
// multiplicativity) are then exact integer statements about valuations.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace padiclab {

using BigInt = mpz_class;
using Rational = mpq_class;

inline BigInt pow_ui(const BigInt& base, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline BigInt prime_power(long p, unsigned long e) { return pow_ui(BigInt(p), e); }

class PadicScalar {
public:
    static constexpr long kZeroValuation = std::numeric_limits<long>::max();
    static constexpr int kDefaultPrecision = 32;

    // Zero at the given precision.
    PadicScalar(long p, int precision = kDefaultPrecision)
        : p_(p), n_(precision), v_(kZeroValuation), u_(0) {
        check_params();
    }

    static PadicScalar zero(long p, int precision = kDefaultPrecision) {
        return PadicScalar(p, precision);
    }

    static PadicScalar one(long p, int precision = kDefaultPrecision) {
        return from_integer(1, p, precision);
    }

    static PadicScalar from_integer(const BigInt& z, long p, int precision = kDefaultPrecision) {
        PadicScalar x(p, precision);
        if (z == 0) return x;
        BigInt a = z;
        long v = 0;
        while (mpz_divisible_ui_p(a.get_mpz_t(), p)) {
            mpz_divexact_ui(a.get_mpz_t(), a.get_mpz_t(), p);
            ++v;
        }
        x.v_ = v;
        x.u_ = mod_pn(a, p, precision);
        return x;
    }

    static PadicScalar from_integer(long z, long p, int precision = kDefaultPrecision) {
        return from_integer(BigInt(z), p, precision);
    }

    static PadicScalar from_rational(const Rational& q, long p, int precision = kDefaultPrecision) {
        Rational c = q;
        c.canonicalize();
        if (c == 0) return zero(p, precision);
        PadicScalar num = from_integer(BigInt(c.get_num()), p, precision);
        PadicScalar den = from_integer(BigInt(c.get_den()), p, precision);
        return num / den;
    }

    // p^v * u with u given modulo p^N; u must be a unit.
    static PadicScalar from_unit(long v, const BigInt& u, long p,
                                 int precision = kDefaultPrecision) {
        PadicScalar x(p, precision);
        BigInt uu = mod_pn(u, p, precision);
        if (mpz_divisible_ui_p(uu.get_mpz_t(), p) || uu == 0)
            throw std::invalid_argument("padic: unit part divisible by p");
        x.v_ = v;
        x.u_ = uu;
        return x;
    }

    long prime() const { return p_; }
    int precision() const { return n_; }
    bool is_zero() const { return v_ == kZeroValuation; }
    // True when the value collapsed to zero only because all significant
    // digits cancelled (precision underflow), not because it is exactly 0.
    bool underflow() const { return is_zero() && underflow_; }

    long valuation() const {
        if (is_zero()) throw std::domain_error("padic: valuation of zero");
        return v_;
    }
    long valuation_or(long if_zero) const { return is_zero() ? if_zero : v_; }

    const BigInt& unit() const {
        if (is_zero()) throw std::domain_error("padic: unit part of zero");
        return u_;
    }

    // |x|_p = p^{-v} as an exact rational; |0|_p = 0.
    Rational norm() const {
        if (is_zero()) return Rational(0);
        if (v_ >= 0) return Rational(1, prime_power(p_, static_cast<unsigned long>(v_)));
        return Rational(prime_power(p_, static_cast<unsigned long>(-v_)), 1);
    }

    double norm_double() const {
        if (is_zero()) return 0.0;
        return std::pow(static_cast<double>(p_), static_cast<double>(-v_));
    }

    bool is_unit() const { return !is_zero() && v_ == 0; }
    bool in_zp() const { return is_zero() || v_ >= 0; }

    PadicScalar operator-() const {
        if (is_zero()) return *this;
        PadicScalar r(*this);
        r.u_ = mod_pn(prime_power(p_, n_) - u_, p_, n_);
        return r;
    }

    PadicScalar operator+(const PadicScalar& o) const {
        require_same_prime(o);
        int n = std::min(n_, o.n_);
        if (is_zero()) return o.truncated(n);
        if (o.is_zero()) return truncated(n);
        long v = std::min(v_, o.v_);
        // Absolute precision of the sum: both operands known mod p^{v_i + N_i}.
        long abs_prec = std::min(v_ + n_, o.v_ + o.n_);
        long digits = abs_prec - v;
        BigInt m = prime_power(p_, static_cast<unsigned long>(digits));
        BigInt s = u_ * prime_power(p_, static_cast<unsigned long>(v_ - v)) +
                   o.u_ * prime_power(p_, static_cast<unsigned long>(o.v_ - v));
        mpz_mod(s.get_mpz_t(), s.get_mpz_t(), m.get_mpz_t());
        PadicScalar r(p_, n);
        if (s == 0) {
            r.underflow_ = true;  // indistinguishable from 0 at this precision
            return r;
        }
        long shift = 0;
        while (mpz_divisible_ui_p(s.get_mpz_t(), p_)) {
            mpz_divexact_ui(s.get_mpz_t(), s.get_mpz_t(), p_);
            ++shift;
        }
        r.v_ = v + shift;
        r.n_ = static_cast<int>(std::min<long>(n, digits - shift));
        r.u_ = mod_pn(s, p_, r.n_);
        return r;
    }

    PadicScalar operator-(const PadicScalar& o) const { return *this + (-o); }

    PadicScalar operator*(const PadicScalar& o) const {
        require_same_prime(o);
        int n = std::min(n_, o.n_);
        if (is_zero() || o.is_zero()) return zero(p_, n);
        PadicScalar r(p_, n);
        r.v_ = v_ + o.v_;
        r.u_ = mod_pn(u_ * o.u_, p_, n);
        return r;
    }

    PadicScalar inverse() const {
        if (is_zero()) throw std::domain_error("padic: division by zero");
        PadicScalar r(p_, n_);
        r.v_ = -v_;
        BigInt m = prime_power(p_, n_);
        BigInt inv;
        if (!mpz_invert(inv.get_mpz_t(), u_.get_mpz_t(), m.get_mpz_t()))
            throw std::domain_error("padic: unit not invertible (internal)");
        r.u_ = inv;
        return r;
    }

    PadicScalar operator/(const PadicScalar& o) const { return *this * o.inverse(); }

    PadicScalar pow(long e) const {
        if (is_zero()) {
            if (e <= 0) throw std::domain_error("padic: 0 to nonpositive power");
            return *this;
        }
        PadicScalar base = e < 0 ? inverse() : *this;
        unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
        PadicScalar r = one(p_, n_);
        while (k) {
            if (k & 1) r = r * base;
            base = base * base;
            k >>= 1;
        }
        return r;
    }

    // Equality of the representations at the shared precision.
    bool operator==(const PadicScalar& o) const {
        if (p_ != o.p_) return false;
        if (is_zero() || o.is_zero()) return is_zero() && o.is_zero();
        if (v_ != o.v_) return false;
        int n = std::min(n_, o.n_);
        return mod_pn(u_, p_, n) == mod_pn(o.u_, p_, n);
    }
    bool operator!=(const PadicScalar& o) const { return !(*this == o); }

    // {x}_p: the fractional part, an exact rational in [0,1) with
    // denominator p^{-v} when v < 0, else 0.
    Rational fractional_part() const {
        if (is_zero() || v_ >= 0) return Rational(0);
        unsigned long k = static_cast<unsigned long>(-v_);
        unsigned long digits = std::min<unsigned long>(k, static_cast<unsigned long>(n_));
        // u mod p^k gives the digits below the radix point (k <= N always
        // holds for values built from rationals with denominator p^k).
        if (digits < k)
            throw std::domain_error("padic: fractional part exceeds precision");
        BigInt den = prime_power(p_, k);
        BigInt num = mod_pn(u_, p_, static_cast<int>(k));
        Rational r(num, den);
        r.canonicalize();
        return r;
    }

    // Canonical rational representative u * p^v of the stored residue.
    Rational rational_repr() const {
        if (is_zero()) return Rational(0);
        Rational r(u_, 1);
        if (v_ >= 0)
            r *= Rational(prime_power(p_, static_cast<unsigned long>(v_)), 1);
        else
            r /= Rational(prime_power(p_, static_cast<unsigned long>(-v_)), 1);
        r.canonicalize();
        return r;
    }

    PadicScalar truncated(int precision) const {
        if (precision >= n_) {
            PadicScalar r(*this);
            r.n_ = std::min(r.n_, precision);
            return r;
        }
        PadicScalar r(p_, precision);
        if (is_zero()) { r.underflow_ = underflow_; return r; }
        r.v_ = v_;
        r.u_ = mod_pn(u_, p_, precision);
        return r;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        return u_.get_str() + "*" + std::to_string(p_) + "^" + std::to_string(v_);
    }

private:
    void check_params() const {
        if (p_ < 2) throw std::invalid_argument("padic: prime must be >= 2");
        if (n_ < 1) throw std::invalid_argument("padic: precision must be >= 1");
    }

    void require_same_prime(const PadicScalar& o) const {
        if (p_ != o.p_) throw std::invalid_argument("padic: mixed primes");
    }

    static BigInt mod_pn(const BigInt& z, long p, int n) {
        BigInt m = prime_power(p, static_cast<unsigned long>(n));
        BigInt r;
        mpz_mod(r.get_mpz_t(), z.get_mpz_t(), m.get_mpz_t());
        return r;
    }

    long p_;
    int n_;
    long v_;
    BigInt u_;
    bool underflow_ = false;
};

// max(|x|,|y|) etc. on exact rationals; tiny helpers used all over.
inline Rational rat_max(const Rational& a, const Rational& b) { return a >= b ? a : b; }
inline Rational rat_min(const Rational& a, const Rational& b) { return a <= b ? a : b; }

}  // namespace padiclab
