#pragma once

// Vectors and matrices over Q_p, the max-norm, exact Gaussian elimination
// (pivot = entry of minimal valuation), balls in Z_p^n and their partitions.

#include "padiclab/padic.hpp"

#include <optional>
#include <vector>

namespace padiclab {

class PadicVector {
public:
    PadicVector() = default;
    PadicVector(std::vector<PadicScalar> entries) : e_(std::move(entries)) {}
    static PadicVector zeros(int n, long p, int precision = PadicScalar::kDefaultPrecision) {
        return PadicVector(std::vector<PadicScalar>(static_cast<size_t>(n),
                                                    PadicScalar::zero(p, precision)));
    }

    int dim() const { return static_cast<int>(e_.size()); }
    const PadicScalar& operator[](int i) const { return e_[static_cast<size_t>(i)]; }
    PadicScalar& operator[](int i) { return e_[static_cast<size_t>(i)]; }

    // ||x|| = max_i |x_i|_p, exact.
    Rational norm() const {
        Rational m(0);
        for (const auto& x : e_) m = rat_max(m, x.norm());
        return m;
    }

    PadicVector operator+(const PadicVector& o) const {
        auto r = e_;
        for (size_t i = 0; i < r.size(); ++i) r[i] = r[i] + o.e_[i];
        return PadicVector(std::move(r));
    }
    PadicVector operator-(const PadicVector& o) const {
        auto r = e_;
        for (size_t i = 0; i < r.size(); ++i) r[i] = r[i] - o.e_[i];
        return PadicVector(std::move(r));
    }
    PadicVector operator*(const PadicScalar& c) const {
        auto r = e_;
        for (auto& x : r) x = x * c;
        return PadicVector(std::move(r));
    }
    bool operator==(const PadicVector& o) const { return e_ == o.e_; }

    PadicScalar dot(const PadicVector& o) const {
        PadicScalar s = PadicScalar::zero(e_.at(0).prime(), e_.at(0).precision());
        for (size_t i = 0; i < e_.size(); ++i) s = s + e_[i] * o.e_[i];
        return s;
    }

private:
    std::vector<PadicScalar> e_;
};

class PadicMatrix {
public:
    PadicMatrix(int rows, int cols, long p, int precision = PadicScalar::kDefaultPrecision)
        : rows_(rows), cols_(cols),
          a_(static_cast<size_t>(rows) * static_cast<size_t>(cols),
             PadicScalar::zero(p, precision)) {}

    static PadicMatrix identity(int n, long p, int precision = PadicScalar::kDefaultPrecision) {
        PadicMatrix m(n, n, p, precision);
        for (int i = 0; i < n; ++i) m.at(i, i) = PadicScalar::one(p, precision);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    long prime() const { return a_.at(0).prime(); }

    const PadicScalar& at(int i, int j) const {
        return a_[static_cast<size_t>(i) * static_cast<size_t>(cols_) + static_cast<size_t>(j)];
    }
    PadicScalar& at(int i, int j) {
        return a_[static_cast<size_t>(i) * static_cast<size_t>(cols_) + static_cast<size_t>(j)];
    }

    PadicMatrix operator*(const PadicMatrix& o) const {
        PadicMatrix r(rows_, o.cols_, prime(), a_.at(0).precision());
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < o.cols_; ++j) {
                PadicScalar s = PadicScalar::zero(prime(), a_.at(0).precision());
                for (int k = 0; k < cols_; ++k) s = s + at(i, k) * o.at(k, j);
                r.at(i, j) = s;
            }
        return r;
    }

    PadicVector operator*(const PadicVector& x) const {
        std::vector<PadicScalar> r;
        r.reserve(static_cast<size_t>(rows_));
        for (int i = 0; i < rows_; ++i) {
            PadicScalar s = PadicScalar::zero(prime(), a_.at(0).precision());
            for (int k = 0; k < cols_; ++k) s = s + at(i, k) * x[k];
            r.push_back(s);
        }
        return PadicVector(std::move(r));
    }

    PadicMatrix transpose() const {
        PadicMatrix r(cols_, rows_, prime(), a_.at(0).precision());
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    bool operator==(const PadicMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (size_t i = 0; i < a_.size(); ++i)
            if (a_[i] != o.a_[i]) return false;
        return true;
    }

    // Max-entry norm; equals the l^inf -> l^inf operator norm over Q_p.
    Rational operator_norm() const {
        Rational m(0);
        for (const auto& x : a_) m = rat_max(m, x.norm());
        return m;
    }

    PadicScalar det() const {
        if (rows_ != cols_) throw std::invalid_argument("det: not square");
        PadicMatrix u(*this);
        PadicScalar d = PadicScalar::one(prime(), a_.at(0).precision());
        int n = rows_;
        for (int c = 0; c < n; ++c) {
            int piv = u.pivot_row(c, c);
            if (piv < 0) return PadicScalar::zero(prime(), a_.at(0).precision());
            if (piv != c) {
                u.swap_rows(piv, c);
                d = -d;
            }
            d = d * u.at(c, c);
            PadicScalar inv = u.at(c, c).inverse();
            for (int r = c + 1; r < n; ++r) {
                if (u.at(r, c).is_zero()) continue;
                PadicScalar f = u.at(r, c) * inv;
                for (int j = c; j < n; ++j) u.at(r, j) = u.at(r, j) - f * u.at(c, j);
            }
        }
        return d;
    }

    PadicMatrix inverse() const {
        if (rows_ != cols_) throw std::invalid_argument("inverse: not square");
        int n = rows_;
        PadicMatrix u(*this);
        PadicMatrix inv = identity(n, prime(), a_.at(0).precision());
        for (int c = 0; c < n; ++c) {
            int piv = u.pivot_row(c, c);
            if (piv < 0)
                throw std::domain_error("inverse: singular at column " + std::to_string(c) +
                                        " (vanishing minor at working precision)");
            if (piv != c) {
                u.swap_rows(piv, c);
                inv.swap_rows(piv, c);
            }
            PadicScalar f = u.at(c, c).inverse();
            for (int j = 0; j < n; ++j) {
                u.at(c, j) = u.at(c, j) * f;
                inv.at(c, j) = inv.at(c, j) * f;
            }
            for (int r = 0; r < n; ++r) {
                if (r == c || u.at(r, c).is_zero()) continue;
                PadicScalar g = u.at(r, c);
                for (int j = 0; j < n; ++j) {
                    u.at(r, j) = u.at(r, j) - g * u.at(c, j);
                    inv.at(r, j) = inv.at(r, j) - g * inv.at(c, j);
                }
            }
        }
        return inv;
    }

    // Solve A x = b exactly.
    PadicVector solve(const PadicVector& b) const { return inverse() * b; }

private:
    int pivot_row(int from, int col) const {
        // Minimal valuation keeps elimination factors in Z_p: no precision loss
        // beyond genuine cancellation.
        int best = -1;
        long bestv = PadicScalar::kZeroValuation;
        for (int r = from; r < rows_; ++r) {
            long v = at(r, col).valuation_or(PadicScalar::kZeroValuation);
            if (v < bestv) {
                bestv = v;
                best = r;
            }
        }
        return best;
    }

    void swap_rows(int i, int j) {
        for (int c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
    }

    int rows_, cols_;
    std::vector<PadicScalar> a_;
};

// A ball c + p^k Z_p^n; the canonical center has digits only below depth k.
struct Ball {
    long p;
    int n;
    int radius_exp;                 // radius p^{-k}
    std::vector<BigInt> center;    // entries in [0, p^k)

    bool contains(const std::vector<BigInt>& x) const {
        BigInt m = prime_power(p, static_cast<unsigned long>(radius_exp));
        for (int i = 0; i < n; ++i) {
            BigInt d = x[static_cast<size_t>(i)] - center[static_cast<size_t>(i)];
            if (!mpz_divisible_p(d.get_mpz_t(), m.get_mpz_t())) return false;
        }
        return true;
    }

    bool contains(const PadicVector& x) const {
        for (int i = 0; i < n; ++i) {
            PadicScalar c = PadicScalar::from_integer(center[static_cast<size_t>(i)], p);
            PadicScalar d = x[i] - c;
            if (!d.is_zero() && d.valuation() < radius_exp) return false;
        }
        return true;
    }

    bool operator==(const Ball& o) const {
        if (p != o.p || n != o.n || radius_exp != o.radius_exp) return false;
        return contains(o.center);
    }

    PadicVector center_vector(int precision = PadicScalar::kDefaultPrecision) const {
        std::vector<PadicScalar> e;
        e.reserve(static_cast<size_t>(n));
        for (const auto& c : center) e.push_back(PadicScalar::from_integer(c, p, precision));
        return PadicVector(std::move(e));
    }
};

// The p^{kn} balls of radius p^{-k} covering Z_p^n, resolved at depth l >= k.
inline std::vector<Ball> ball_partition(long p, int n, int radius_exp, int depth) {
    if (radius_exp > depth)
        throw std::invalid_argument("ball_partition: radius exponent exceeds resolution depth");
    if (radius_exp < 0) throw std::invalid_argument("ball_partition: negative radius exponent");
    BigInt per_axis = prime_power(p, static_cast<unsigned long>(radius_exp));
    double total = std::pow(per_axis.get_d(), n);
    if (total > (1 << 26)) throw std::overflow_error("ball_partition: too many balls");
    std::vector<Ball> out;
    std::vector<BigInt> c(static_cast<size_t>(n), BigInt(0));
    while (true) {
        out.push_back(Ball{p, n, radius_exp, c});
        int i = 0;
        for (; i < n; ++i) {
            c[static_cast<size_t>(i)] += 1;
            if (c[static_cast<size_t>(i)] < per_axis) break;
            c[static_cast<size_t>(i)] = 0;
        }
        if (i == n) break;
    }
    return out;
}

}  // namespace padiclab
