#include "padiclab/fourier.hpp"

#include "padiclab/boxes.hpp"

#include "padiclab/io.hpp"

#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace padiclab;

namespace {
double cdist(Complex a, Complex b) { return std::abs(a - b); }

LatticeFunction random_lattice(std::mt19937_64& rng, long p, int n, int a, int b) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    LatticeFunction f(p, n, a, b);
    for (size_t i = 0; i < f.cell_count(); ++i) f[i] = Complex(gauss(rng), gauss(rng));
    return f;
}
}  // namespace

TEST_CASE("additive character") {
    REQUIRE(cdist(character(PadicScalar::from_integer(7, 5)), Complex(1, 0)) < 1e-15);
    REQUIRE(cdist(character(PadicScalar::zero(5)), Complex(1, 0)) < 1e-15);

    SECTION("chi(1/3) is a primitive cube root of unity") {
        Complex w = character(PadicScalar::from_rational(Rational(1, 3), 3));
        REQUIRE(cdist(w, std::polar(1.0, 2.0 * std::numbers::pi / 3.0)) < 1e-14);
    }

    SECTION("multiplicativity chi(x+y) = chi(x)chi(y)") {
        auto x = PadicScalar::from_rational(Rational(1, 5), 5, 12);
        auto y = PadicScalar::from_rational(Rational(2, 25), 5, 12);
        REQUIRE(cdist(character(x + y), character(x) * character(y)) < 1e-12);
    }

    SECTION("|chi| = 1 on random inputs") {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 200; ++i) {
            auto x = testing::random_scalar(rng, 7, 12, -4, 4);
            REQUIRE(std::abs(std::abs(character(x)) - 1.0) < 1e-13);
        }
    }
}

TEST_CASE("indicator of Z_p^n is transform-invariant") {
    for (long p : {2L, 3L, 5L}) {
        LatticeFunction f = LatticeFunction::indicator_zpn(p, 2, 1, 1);
        LatticeFunction fh = f.transform();
        for (size_t i = 0; i < fh.cell_count(); ++i) {
            std::vector<Rational> xi = fh.cell_point(fh.multi_index(i));
            bool integral = true;
            for (const auto& c : xi)
                if (c.get_den() != 1) integral = false;
            REQUIRE(cdist(fh[i], integral ? Complex(1, 0) : Complex(0, 0)) < 1e-12);
        }
    }
}

TEST_CASE("ball indicator transform pair") {
    // psi = 1_{B(0, p^{l-kappa})} = 1_{p^{kappa-l} Z_p^n} has inverse transform
    // p^{n(l-kappa)} 1_{p^{l-kappa} Z_p^n}: the pair (delta^{-1}p^{-kappa}, delta p^kappa)
    // with delta = p^{-l}.
    const long p = 3;
    const int n = 2, l = 2, kappa = 1;
    // grid holding both sides: support p^{-(l-kappa)}, cells p^{l-kappa}
    int a = l - kappa, b = l - kappa;
    LatticeFunction psi = LatticeFunction::from_points(p, n, a, b,
                                                       [&](const std::vector<Rational>& x) {
            for (const auto& xi : x) {
                Rational scaled = xi * Rational(prime_power(p, l - kappa), 1);
                scaled.canonicalize();
                if (scaled.get_den() != 1) return Complex(0, 0);  // |xi| > p^{l-kappa}
            }
            return Complex(1, 0);
        });
    // psi = 1 everywhere on this grid by construction of the support; inverse
    // transform concentrates on the dual ball with weight p^{n(l-kappa)}.
    LatticeFunction inv = psi.inverse_transform();
    double expected = std::pow(static_cast<double>(p), n * (l - kappa));
    for (size_t i = 0; i < inv.cell_count(); ++i) {
        std::vector<Rational> x = inv.cell_point(inv.multi_index(i));
        bool in_dual = true;
        for (const auto& xi : x) {
            Rational scaled = xi * Rational(BigInt(1), prime_power(p, l - kappa));
            scaled.canonicalize();
            if (scaled.get_den() != 1) in_dual = false;  // outside p^{l-kappa} Z_p
        }
        REQUIRE(cdist(inv[i], in_dual ? Complex(expected, 0) : Complex(0, 0)) < 1e-9);
    }
}

TEST_CASE("plancherel and round trip on random functions") {
    std::mt19937_64 rng(1234);
    int tried = 0;
    for (long p : {2L, 3L, 5L}) {
        for (int n = 1; n <= 2; ++n) {
            for (int a = 0; a <= 2; ++a) {
                for (int b = 0; a + b <= (n == 1 ? 4 : 2); ++b) {
                    for (int rep = 0; rep < 12; ++rep) {
                        LatticeFunction f = random_lattice(rng, p, n, a, b);
                        LatticeFunction fh = f.transform();
                        REQUIRE(std::abs(fh.l2_norm() - f.l2_norm()) <=
                                1e-9 * std::max(1.0, f.l2_norm()));
                        LatticeFunction back = fh.inverse_transform();
                        REQUIRE(back.support_exp() == f.support_exp());
                        for (size_t i = 0; i < f.cell_count(); ++i)
                            REQUIRE(cdist(back[i], f[i]) < 1e-9);
                        ++tried;
                    }
                }
            }
        }
    }
    REQUIRE(tried > 100);
}

TEST_CASE("double transform is parity") {
    std::mt19937_64 rng(777);
    LatticeFunction f = random_lattice(rng, 3, 2, 1, 1);
    LatticeFunction ff = f.transform().transform();
    // (fhat)hat(x) = f(-x)
    for (size_t i = 0; i < ff.cell_count(); ++i) {
        std::vector<Rational> x = ff.cell_point(ff.multi_index(i));
        for (auto& c : x) c = -c;
        REQUIRE(cdist(ff[i], f.value_at(x)) < 1e-9);
    }
}

TEST_CASE("lq norms") {
    const long p = 5;
    LatticeFunction one = LatticeFunction::indicator_zpn(p, 1, 0, 1);
    REQUIRE(std::abs(one.lq_norm(3.0) - 1.0) < 1e-12);
    REQUIRE(std::abs(one.linf_norm() - 1.0) < 1e-12);

    // 1_{pZ_p}: measure 1/p
    LatticeFunction small = LatticeFunction::from_cells(p, 1, 0, 1,
                                                        [&](const std::vector<long>& m) {
            return m[0] % 5 == 0 ? Complex(1, 0) : Complex(0, 0);
        });
    for (double q : {1.0, 2.0, 4.0})
        REQUIRE(std::abs(small.lq_norm(q) - std::pow(5.0, -1.0 / q)) < 1e-12);
    REQUIRE_THROWS_AS(small.lq_norm(0.5), std::invalid_argument);
}

TEST_CASE("convolution") {
    const long p = 3;

    SECTION("1_{Z_p^n} * 1_{Z_p^n} = 1_{Z_p^n}") {
        LatticeFunction f = LatticeFunction::indicator_zpn(p, 2, 1, 1);
        LatticeFunction conv = f.convolve(f);
        for (size_t i = 0; i < conv.cell_count(); ++i) {
            std::vector<Rational> x = conv.cell_point(conv.multi_index(i));
            REQUIRE(cdist(conv[i], f.value_at(x)) < 1e-12);
        }
    }

    SECTION("transform identity (f*g)^ = fhat ghat") {
        std::mt19937_64 rng(555);
        for (int rep = 0; rep < 40; ++rep) {
            LatticeFunction f = random_lattice(rng, p, 1, 2, 2);
            LatticeFunction g = random_lattice(rng, p, 1, 2, 2);
            LatticeFunction lhs = f.convolve(g).transform();
            LatticeFunction rhs = f.transform().pointwise_mul(g.transform());
            int a = std::max(lhs.support_exp(), rhs.support_exp());
            int b = std::max(lhs.constancy_exp(), rhs.constancy_exp());
            LatticeFunction l2 = lhs.extended(a, b), r2 = rhs.extended(a, b);
            for (size_t i = 0; i < l2.cell_count(); ++i) REQUIRE(cdist(l2[i], r2[i]) < 1e-9);
        }
    }

    SECTION("Young L1 with equality for nonnegative inputs") {
        std::mt19937_64 rng(777);
        LatticeFunction f = random_lattice(rng, p, 1, 1, 2);
        LatticeFunction g = random_lattice(rng, p, 1, 1, 2);
        for (size_t i = 0; i < f.cell_count(); ++i) f[i] = Complex(std::abs(f[i]), 0);
        for (size_t i = 0; i < g.cell_count(); ++i) g[i] = Complex(std::abs(g[i]), 0);
        double lhs = f.convolve(g).l1_norm();
        REQUIRE(lhs <= f.l1_norm() * g.l1_norm() * (1 + 1e-12));
        REQUIRE(std::abs(lhs - f.l1_norm() * g.l1_norm()) < 1e-9);
    }
}

TEST_CASE("frequency restriction") {
    const long p = 3;
    std::mt19937_64 rng(999);
    LatticeFunction f = random_lattice(rng, p, 1, 2, 2);

    SECTION("everything is the identity") {
        LatticeFunction g = freq_restrict(f, FrequencyRegion::everything());
        for (size_t i = 0; i < f.cell_count(); ++i) REQUIRE(cdist(g[i], f[i]) < 1e-9);
    }

    SECTION("disjoint region yields zero") {
        // fhat lives in p^{-2} Z_p; a region outside it
        FrequencyRegion omega{[](const std::vector<Rational>& xi) {
                                  Rational c = xi[0] * Rational(1, 81);
                                  c.canonicalize();
                                  return c.get_den() == 1 && xi[0] != 0;
                              },
                              "far"};
        LatticeFunction g = freq_restrict(f, omega);
        for (size_t i = 0; i < g.cell_count(); ++i) REQUIRE(std::abs(g[i]) < 1e-9);
    }

    SECTION("complementary regions sum to f; idempotent") {
        FrequencyRegion omega{[](const std::vector<Rational>& xi) {
                                  return xi[0].get_den() == 1;  // integral frequencies
                              },
                              "int"};
        LatticeFunction a = freq_restrict(f, omega);
        LatticeFunction b = freq_restrict(f, omega.complement());
        LatticeFunction sum = a + b;
        for (size_t i = 0; i < f.cell_count(); ++i) REQUIRE(cdist(sum[i], f[i]) < 1e-12);
        LatticeFunction aa = freq_restrict(a, omega);
        for (size_t i = 0; i < aa.cell_count(); ++i) REQUIRE(cdist(aa[i], a[i]) < 1e-9);
    }
}

TEST_CASE("json round trip") {
    std::mt19937_64 rng(808);
    LatticeFunction f = random_lattice(rng, 3, 2, 1, 1);
    nlohmann::json j = to_json(f);
    REQUIRE(j["p"] == 3);
    REQUIRE(j["n"] == 2);
    LatticeFunction g = lattice_from_json(j);
    REQUIRE(g.cell_count() == f.cell_count());
    for (size_t i = 0; i < f.cell_count(); ++i) REQUIRE(cdist(g[i], f[i]) == 0.0);
}

TEST_CASE("budget guard") {
    REQUIRE_THROWS_AS(LatticeFunction(3, 3, 8, 8), std::overflow_error);
}

TEST_CASE("tube wave packet smoothing") {
    // 1_T * psi_delta^vee = p^{-m kappa} 1_{T~}: smoothing a tube by the
    // inverse transform of the shrunk ball indicator thickens it to the
    // (delta p^kappa)^m x 1^{n-m} plate with the same center, at mass cost
    // p^{-m kappa}.
    const long p = 5;
    const int n = 3, m = 1, delta_exp = 2, kappa = 1;
    const int prec = 24;
    PolyCurve gamma = PolyCurve::moment(n, p, prec);
    PadicScalar theta = PadicScalar::from_integer(3, p, prec);
    std::vector<PadicScalar> ce{PadicScalar::from_integer(1, p, prec),
                                PadicScalar::from_integer(2, p, prec),
                                PadicScalar::from_integer(0, p, prec)};
    PadicVector center(ce);
    AffineBox T = tube(gamma, theta, delta_exp, m, center);
    AffineBox T_thick = tube(gamma, theta, delta_exp - kappa, m, center);

    LatticeFunction indT = LatticeFunction::from_cells(p, n, 0, delta_exp,
                                                       [&](const std::vector<long>& mm) {
            std::vector<PadicScalar> e;
            for (int i = 0; i < n; ++i)
                e.push_back(PadicScalar::from_integer(mm[static_cast<size_t>(i)], p, prec));
            return T.contains(PadicVector(std::move(e))) ? Complex(1, 0) : Complex(0, 0);
        });
    // psi_delta = indicator of B(0, delta^{-1} p^{-kappa}) = p^{kappa-delta_exp} Z_p^n
    LatticeFunction psi(p, n, delta_exp - kappa, 0);
    for (size_t i = 0; i < psi.cell_count(); ++i) psi[i] = Complex(1, 0);
    LatticeFunction psi_inv = psi.inverse_transform();
    LatticeFunction conv = indT.convolve(psi_inv);

    double scale = std::pow(static_cast<double>(p), -m * kappa);
    for (size_t i = 0; i < conv.cell_count(); ++i) {
        std::vector<long> mm = conv.multi_index(i);
        std::vector<PadicScalar> e;
        for (int d = 0; d < n; ++d)
            e.push_back(PadicScalar::from_rational(
                Rational(BigInt(mm[static_cast<size_t>(d)]),
                         prime_power(p, static_cast<unsigned long>(conv.support_exp()))),
                p, prec));
        bool inside = T_thick.contains(PadicVector(std::move(e)));
        REQUIRE(std::abs(conv[i] - (inside ? Complex(scale, 0) : Complex(0, 0))) < 1e-9);
    }
}

TEST_CASE("regions cutting through cells are rejected") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    LatticeFunction f(3, 1, 1, 1);
    for (size_t i = 0; i < f.cell_count(); ++i) f[i] = {gauss(rng), gauss(rng)};
    // fhat lives on a depth-1 grid; a region keyed to depth-2 digits is not
    // cell-constant there
    FrequencyRegion bad{[](const std::vector<Rational>& xi) {
                            Rational c = xi[0] * Rational(1, 9);
                            c.canonicalize();
                            return c.get_den() == 1;
                        },
                        "depth2"};
    REQUIRE_THROWS_WITH(freq_restrict(f, bad),
                        Catch::Matchers::ContainsSubstring("not constant"));
}

TEST_CASE("csv bodies are replay-deterministic") {
    auto emit = [] {
        std::ostringstream os;
        CsvWriter csv(os, {"a", "b", "c"}, "prov 123");
        csv.row(1, 0.1 + 0.2, Rational(2, 6));
        csv.row("x", -1.5e-77, Rational(-3, 9));
        return os.str();
    };
    std::string first = emit();
    REQUIRE(first == emit());
    REQUIRE(first.find("# prov 123\n") == 0);
    REQUIRE(first.find("1/3") != std::string::npos);
    REQUIRE(fnv1a("abc") == fnv1a("abc"));
    REQUIRE(fnv1a("abc") != fnv1a("abd"));
}
