#include "padiclab/vinogradov.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace padiclab;

TEST_CASE("closed forms") {
    SECTION("J_{1,n}(N) = N") {
        for (int n = 1; n <= 4; ++n)
            for (long N : {1L, 5L, 17L})
                REQUIRE(count_solutions({1, n, N}) == N);
    }

    SECTION("J_{2,1}(2) = 6") { REQUIRE(count_solutions({2, 1, 2}) == 6); }

    SECTION("J_{2,2}(N) = 2N^2 - N") {
        for (long N : {3L, 10L, 25L, 50L})
            REQUIRE(count_solutions({2, 2, N}) == BigInt(2 * N * N - N));
    }
}

TEST_CASE("meet-in-the-middle equals brute force") {
    for (long s = 1; s <= 3; ++s)
        for (int n = 1; n <= 3; ++n)
            for (long N : {2L, 5L, 8L}) {
                VinoInstance inst{s, n, N};
                INFO("s=" << s << " n=" << n << " N=" << N);
                REQUIRE(count_solutions(inst) == count_solutions_bruteforce(inst));
            }
}

TEST_CASE("structural monotonicity") {
    SECTION("diagonal lower bound J >= N^s") {
        for (long s = 1; s <= 3; ++s)
            for (int n = 1; n <= 3; ++n)
                for (long N = 1; N <= 15; ++N) {
                    BigInt ns(1);
                    for (long i = 0; i < s; ++i) ns *= N;
                    REQUIRE(count_solutions({s, n, N}) >= ns);
                }
    }

    SECTION("nonincreasing in n, nondecreasing in N and s") {
        for (long s = 1; s <= 3; ++s)
            for (int n = 1; n <= 3; ++n)
                for (long N = 1; N <= 30; ++N) {
                    BigInt j = count_solutions({s, n, N});
                    if (n < 3) REQUIRE(count_solutions({s, n + 1, N}) <= j);
                    REQUIRE(count_solutions({s, n, N + 1}) >= j);
                    if (s < 3) REQUIRE(count_solutions({s + 1, n, N}) >= j);
                }
    }
}

TEST_CASE("budget guard reports the estimate") {
    VinoInstance huge{3, 3, 100000};
    REQUIRE_THROWS_AS(count_solutions(huge, 1e6), std::overflow_error);
}

TEST_CASE("explicit bound evaluation") {
    SECTION("always below the validity threshold at desk scale") {
        auto rep = bound_value({2, 2, 1000000});
        REQUIRE(rep.below_threshold);
        REQUIRE(std::isfinite(static_cast<double>(rep.log_bound)));
        REQUIRE(rep.log_bound > 0);
    }

    SECTION("equal exponents at (s,n,N) = (3,2,100)") {
        // 2s - n(n+1)/2 = 3 = s, so the tail is log(2 * 100^3)
        auto rep = bound_value({3, 2, 100});
        long double head = 1e5L * 3 * std::exp(6.0L) *
                           std::pow(std::log(100.0L), 1.0L - 1.0L / (8.0L * std::log(2.0L) + 1.0L));
        long double tail = 3.0L * std::log(100.0L) + std::log(2.0L);
        REQUIRE(std::abs(static_cast<double>((rep.log_bound - head - tail) / rep.log_bound)) <
                1e-12);
    }

    SECTION("monotone in N") {
        long double prev = 0;
        for (long N : {10L, 100L, 1000L}) {
            auto rep = bound_value({2, 2, N});
            REQUIRE(rep.log_bound > prev);
            prev = rep.log_bound;
        }
    }

    SECTION("range errors") {
        REQUIRE_THROWS_AS(bound_value({1, 2, 10}), std::invalid_argument);
        REQUIRE_THROWS_AS(bound_value({2, 1, 10}), std::invalid_argument);
    }
}

TEST_CASE("fourier moment identity ties the lattice to the counter") {
    SECTION("p=3, l=1, n=2, s=2") {
        auto rep = moment_identity_check(3, 1, 2, 2);
        REQUIRE(rep.exact_count == 15);
        REQUIRE(rep.rel_error < 1e-6);
        REQUIRE(std::abs(rep.lattice_moment - 1215.0) < 1e-6 * 1215.0);
        // the source display's constant p^{ln} J undercounts the Haar mass
        REQUIRE(std::abs(rep.stated_side - 135.0) < 1e-9);
    }

    SECTION("p=5, l=1, n=2, s=2") {
        auto rep = moment_identity_check(5, 1, 2, 2);
        REQUIRE(rep.exact_count == 45);
        REQUIRE(rep.rel_error < 1e-6);
    }

    SECTION("s=1 degenerate: moment = p^{l n^2} p^l") {
        auto rep = moment_identity_check(3, 1, 1, 2);
        REQUIRE(rep.exact_count == 3);  // J_{1,n}(N) = N
        REQUIRE(rep.rel_error < 1e-6);
    }

    SECTION("p <= n rejected") {
        REQUIRE_THROWS_AS(moment_identity_check(2, 1, 2, 2), std::invalid_argument);
    }
}
