#include <gtest/gtest.h>

#include <cmath>

#include <gbs_page/entropy.hpp>

#include "generators.hpp"

using namespace gbs_page;

TEST(RenyiEntropy, PureStateIsZero) {
    const SymplecticSpectrum nu({1.0, 1.0, 1.0});
    for (int a : {2, 3, 7, 15}) {
        EXPECT_EQ(renyi_entropy(nu, a), 0.0);
        EXPECT_NEAR(renyi_entropy_factored(nu, a), 0.0, 1e-15);
    }
    EXPECT_EQ(von_neumann_entropy(nu), 0.0);
}

TEST(RenyiEntropy, AlphaTwoIsSumOfLogs) {
    gen::Source src(1);
    for (int c = 0; c < 20; ++c) {
        const SymplecticSpectrum nu(src.spectrum(6, 40.0));
        double expect = 0.0;
        for (double v : nu.values()) expect += std::log(v);
        EXPECT_NEAR(renyi_entropy(nu, 2), expect, 1e-12 * std::max(1.0, expect));
    }
}

TEST(RenyiEntropy, AlphaThreeAtTwo) {
    const SymplecticSpectrum nu({2.0});
    const double expect = 0.5 * std::log(26.0 / 8.0);
    EXPECT_NEAR(renyi_entropy(nu, 3), expect, 1e-15);
    EXPECT_NEAR(expect, 0.589327, 1e-6);
    EXPECT_NEAR(renyi_entropy_factored(nu, 3), expect, 1e-12);
}

TEST(RenyiEntropyFactored, AlphaTwoIsLogNu) {
    EXPECT_NEAR(renyi_entropy_factored(SymplecticSpectrum({3.0}), 2), std::log(3.0), 1e-15);
}

TEST(RenyiEntropyFactored, AgreesWithDirectForm) {
    gen::Source src(2);
    for (int a = 2; a <= 15; ++a) {
        for (int c = 0; c < 20; ++c) {
            const SymplecticSpectrum nu(src.reals(5, 1.0, 10.0));
            EXPECT_NEAR(renyi_entropy_factored(nu, a), renyi_entropy(nu, a), 1e-10) << "alpha = " << a;
        }
    }
    // large nu: the direct form must not overflow
    const SymplecticSpectrum big({1e6, 3e8});
    EXPECT_NEAR(renyi_entropy_factored(big, 15), renyi_entropy(big, 15), 1e-10);
    EXPECT_TRUE(std::isfinite(renyi_entropy(big, 15)));
}

TEST(RenyiEntropy, RejectsAlphaBelowTwo) {
    const SymplecticSpectrum nu({2.0});
    EXPECT_THROW(renyi_entropy(nu, 1), ValidationError);
    EXPECT_THROW(renyi_entropy_factored(nu, 0), ValidationError);
}

// Two-mode squeezed vacuum with s = 1/2: nu = cosh(1),
// S = cosh^2(1/2) ln cosh^2(1/2) - sinh^2(1/2) ln sinh^2(1/2).
TEST(VonNeumannEntropy, TwoModeSqueezedVacuum) {
    const double c2 = std::pow(std::cosh(0.5), 2);
    const double s2 = std::pow(std::sinh(0.5), 2);
    const double expect = c2 * std::log(c2) - s2 * std::log(s2);
    EXPECT_NEAR(von_neumann_entropy(SymplecticSpectrum({std::cosh(1.0)})), expect, 1e-14);
    EXPECT_NEAR(expect, 0.659453, 1e-6);
}

// g(nu) = 1/2 ln((nu^2-1)/4) + nu arcoth(nu), arcoth(nu) = 1/2 ln((nu+1)/(nu-1)).
TEST(VonNeumannEntropy, PerModeIdentity) {
    for (double nu = 1.001; nu <= 50.0; nu *= 1.01) {
        const double rhs = 0.5 * std::log((nu * nu - 1.0) / 4.0) + nu * 0.5 * std::log((nu + 1.0) / (nu - 1.0));
        EXPECT_NEAR(von_neumann_mode(nu), rhs, 1e-12) << "nu = " << nu;
    }
}

TEST(VonNeumannEntropy, NearOneExpansionMatchesExactForm) {
    for (double eps : {1e-12, 1e-9, 3e-7, 9.99e-7}) {
        const double nu = 1.0 + eps;
        const long double a = (nu - 1.0) / 2.0L;  // the representable offset
        const long double exact = (1.0L + a) * std::log1p(a) - a * std::log(a);
        EXPECT_NEAR(von_neumann_mode(nu), static_cast<double>(exact), 1e-12 * static_cast<double>(exact))
            << "eps = " << eps;
    }
    EXPECT_GT(von_neumann_mode(1.0 + 1e-14), 0.0);
    EXPECT_EQ(von_neumann_mode(1.0), 0.0);
}

TEST(EntropyProperties, MonotoneInAlphaAndAdditive) {
    gen::Source src(3);
    for (int c = 0; c < 50; ++c) {
        const SymplecticSpectrum a(src.spectrum(static_cast<std::size_t>(src.integer(1, 8)), 20.0));
        const SymplecticSpectrum b(src.spectrum(static_cast<std::size_t>(src.integer(1, 8)), 20.0));
        double prev = von_neumann_entropy(a);
        for (int al = 2; al <= 15; ++al) {
            const double cur = renyi_entropy(a, al);
            EXPECT_GE(prev + 1e-12, cur) << "alpha = " << al;
            EXPECT_GE(cur, 0.0);
            prev = cur;
        }
        const auto ab = concat(a, b);
        for (int al : {1, 2, 5}) EXPECT_NEAR(entropy(ab, al), entropy(a, al) + entropy(b, al), 1e-12);
    }
}
