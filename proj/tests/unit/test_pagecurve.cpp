#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <gbs_page/entropy.hpp>
#include <gbs_page/gaussian_state.hpp>
#include <gbs_page/pagecurve.hpp>
#include <gbs_page/symplectic.hpp>

#include "generators.hpp"

using namespace gbs_page;

TEST(ExpectedTrW, ClosedForms) {
    for (int i : {1, 3, 50}) EXPECT_EQ(expected_trW(i, 40, 0.0), 0.0);
    for (double r : {0.1, 0.5, 0.8}) {
        for (int n : {10, 100}) EXPECT_NEAR(expected_trW(1, n, r), n * r * r + r * (1 - r), 1e-12);
    }
}

// E Tr W = k(k+1)/(n+1) exactly for Haar U; the large-n formula differs by
// r(1-r)/(n+1).
TEST(ExpectedTrW, FirstMomentAgainstExactHaarValue) {
    for (int n : {10, 40, 400}) {
        const int k = n / 2;
        const double exact = static_cast<double>(k) * (k + 1) / (n + 1);
        EXPECT_NEAR(expected_trW(1, n, 0.5) - exact, 0.25 / (n + 1), 1e-12);
    }
}

TEST(ExpectedTrW, MatchesMonteCarloMoments) {
    const int n = 30, k = 15, samples = 20000;
    std::vector<double> sum(4, 0.0), sum2(4, 0.0);
    for (int t = 0; t < samples; ++t) {
        const auto m = trW_moments(haar_unitary(n, 555, t), k, 4);
        for (int i = 0; i < 4; ++i) {
            sum[i] += m[i];
            sum2[i] += m[i] * m[i];
        }
    }
    for (int i = 0; i < 4; ++i) {
        const double mean = sum[i] / samples;
        const double se = std::sqrt((sum2[i] - samples * mean * mean) / (samples - 1) / samples);
        EXPECT_NEAR(mean, expected_trW(i + 1, n, 0.5), 3 * se + 0.05) << "i = " << i + 1;
    }
}

TEST(Renyi2Average, TrivialCases) {
    EXPECT_EQ(renyi2_average(100, 0.0, 0.4).value, 0.0);
    EXPECT_EQ(renyi2_average(100, 0.7, 0.0).value, 0.0);
    EXPECT_EQ(renyi2_average(100, 0.7, 1.0).value, 0.0);
    EXPECT_EQ(renyi_average(3, 100, 0.0, 0.5).value, 0.0);
    EXPECT_EQ(renyi2_average(asymptotic, 0.0, 0.5).value, 0.0);
}

TEST(RenyiAverage, AlphaTwoIsTheRenyi2Series) {
    for (double s : {0.1, 0.5, 1.2}) {
        for (double r : {0.1, 0.5, 0.77}) {
            const auto a = renyi_average(2, 80, s, r);
            const auto b = renyi2_average(80, s, r);
            EXPECT_EQ(a.value, b.value);
            EXPECT_EQ(a.i_max_used, b.i_max_used);
        }
    }
    EXPECT_THROW(renyi_average(1, 80, 0.5, 0.5), ValidationError);
}

TEST(RenyiAverage, ReportedBoundIsRigorous) {
    for (int alpha : {2, 3, 4, 7, 15}) {
        for (double s : {0.2, 0.8, 1.5}) {
            const auto loose = renyi_average(alpha, 120, s, 0.4, {1e-5, std::nullopt});
            const auto tight = renyi_average(alpha, 120, s, 0.4, {1e-15, std::nullopt});
            EXPECT_LE(std::abs(tight.value - loose.value), loose.trunc_err * (1 + 1e-9) + 1e-13 * tight.value)
                << "alpha = " << alpha << ", s = " << s;
            EXPECT_GE(loose.value, -loose.trunc_err);
        }
    }
}

TEST(RenyiAverage, FixedTermCountIsHonoured) {
    const auto v = renyi_average(3, 50, 0.5, 0.5, {0.0, 7});
    EXPECT_EQ(v.i_max_used, 7);
    EXPECT_GT(v.trunc_err, 0.0);
    EXPECT_THROW(renyi_average(3, 50, 0.5, 0.5, {0.0, 0}), ValidationError);
    EXPECT_THROW(renyi_average(3, 50, 0.5, 0.5, {-1.0, std::nullopt}), ValidationError);
}

TEST(RenyiAverage, TruncationCapPointsToAlternatives) {
    try {
        renyi2_average(400, 3.0, 0.5);
        FAIL() << "expected the term cap to be hit";
    } catch (const TruncationError& e) {
        EXPECT_NE(std::string(e.what()).find("limits"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("simulate"), std::string::npos);
        EXPECT_EQ(e.terms_used(), kIMaxCap);
        EXPECT_GT(e.partial_value(), 0.0);
        EXPECT_GT(e.error_bound(), 0.0);
    }
}

// The series behind renyi_average holds sample by sample:
//   S_alpha = zeta/(alpha-1) S_2 + 1/(alpha-1) sum_l sum_m q_m^l / l (k - Tr W^l),
//   q_m = sinh^2(2s) / (cosh^2(2s) + cot^2(pi m / alpha)).
// This pins down the cotangent argument pi m / alpha exactly, with no
// statistics involved.
TEST(RenyiAverage, SeriesReproducesSpectralEntropyPerSample) {
    const int n = 12, k = 5, terms = 400;
    const double s = 0.45;
    for (int c = 0; c < 5; ++c) {
        const auto u = haar_unitary(n, 808, c);
        const auto tw = trW_moments(u, k, terms);
        const auto nu = symplectic_eigenvalues(reduced_covariance_equal(u, s, k));
        for (int alpha = 2; alpha <= 9; ++alpha) {
            double series = 0.0;
            for (const auto& f : renyi_families(alpha, s)) {
                double p = 1.0;
                for (int l = 1; l <= terms; ++l) {
                    p *= f.q;
                    series += f.weight * p / l * (k - tw[l - 1]);
                }
            }
            EXPECT_NEAR(series, renyi_entropy(nu, alpha), 1e-10) << "alpha = " << alpha << ", sample " << c;
        }
    }
}

TEST(VonNeumannAverage, TrivialCasesAndDomain) {
    EXPECT_EQ(von_neumann_average(100, 0.5, 0.0).value, 0.0);
    EXPECT_EQ(von_neumann_average(100, 0.5, 1.0).value, 0.0);
    EXPECT_EQ(von_neumann_average(100, 0.0, 0.5).value, 0.0);
    EXPECT_THROW(von_neumann_average(100, 0.01, 0.5), ValidationError);
    VonNeumannCoefficients other(0.3);
    EXPECT_THROW(von_neumann_average(100, 0.5, 0.5, other), ValidationError);
}

TEST(VonNeumannAverage, ExactlySymmetricInR) {
    VonNeumannCoefficients coef(0.5);
    for (int n : {7, 50, 400}) {
        for (int k = 0; k <= n; k += std::max(1, n / 9)) {
            const double r = static_cast<double>(k) / n;
            const double rc = static_cast<double>(n - k) / n;
            EXPECT_EQ(von_neumann_average(n, 0.5, r, coef).value, von_neumann_average(n, 0.5, rc, coef).value);
            EXPECT_EQ(renyi_average(5, n, 0.5, r).value, renyi_average(5, n, 0.5, rc).value);
        }
    }
    for (double r : {0.1, 0.3, 0.45}) {
        EXPECT_NEAR(von_neumann_average(asymptotic, 0.5, r, coef).value,
                    von_neumann_average(asymptotic, 0.5, 1.0 - r, coef).value, 1e-12);
    }
}

TEST(VonNeumannWeight, MatchesHypergeometricRoute) {
    for (double s : {0.05, 0.3, 0.5, 1.0, 2.0}) {
        const double x = 1.0 / std::pow(std::cosh(2 * s), 2);
        const double t = std::pow(std::tanh(2 * s), 2);
        for (int i : {1, 2, 5, 17, 60}) {
            const double via_f = x / 3.0 * std::pow(t, i) * hyp2f1_vn(i, x).value;
            EXPECT_NEAR(vn_weight(i, s) / via_f, 1.0, 1e-11) << "s = " << s << ", i = " << i;
        }
    }
}

TEST(VonNeumannCoefficients, GeneratingFunctionClosedForm) {
    for (double s : {0.1, 0.5, 1.0}) {
        for (double x : {0.2, 0.6, 0.9}) {
            double direct = 0.0, p = 1.0;
            for (int i = 1; i <= 3000; ++i) {
                p *= x;
                direct += vn_coefficient(i, s) * p;
            }
            EXPECT_NEAR(vn_generating(s, x), direct, 1e-12) << "s = " << s << ", x = " << x;
        }
        EXPECT_NEAR(vn_generating(s, 1.0), vn_constant(s), 1e-14);
    }
}

TEST(VonNeumannCoefficients, SumToTheConstantTerm) {
    for (double s : {0.3, 0.5, 1.0}) {
        const auto sum = vn_coefficient_sum(s);
        EXPECT_NEAR(sum.value / vn_constant(s), 1.0, 1e-6) << "s = " << s;
    }
}

// The rearranged evaluation and the defining series are the same sum; the
// defining one converges like 1/I, so compare after one Richardson step.
TEST(VonNeumannAverage, AgreesWithDefiningSeries) {
    for (double r : {0.2, 0.5}) {
        const double a = von_neumann_average_direct(60, 0.5, r, 1500);
        const double b = von_neumann_average_direct(60, 0.5, r, 3000);
        const double v = von_neumann_average(60, 0.5, r).value;
        EXPECT_NEAR(2 * b - a, v, 2e-5 * v) << "r = " << r;
        EXPECT_LT(b, v);  // every dropped term is positive
    }
}

TEST(PageCurves, OrderedInAlpha) {
    for (double s : {0.1, 0.5, 1.0}) {
        VonNeumannCoefficients coef(s);
        for (ModeCount n : {ModeCount{50}, ModeCount{asymptotic}}) {
            for (double r = 0.05; r < 1.0; r += 0.15) {
                double prev = von_neumann_average(n, s, r, coef).value;
                for (int alpha = 2; alpha <= 15; ++alpha) {
                    const double cur = renyi_average(alpha, n, s, r).value;
                    EXPECT_GE(prev, cur - 1e-9) << "s = " << s << ", r = " << r << ", alpha = " << alpha;
                    prev = cur;
                }
            }
        }
    }
}

// Per-mode values at n and 2n differ exactly by the H-correction over 2n.
TEST(PageCurves, FiniteNCorrectionScalesAsOneOverN) {
    for (double r : {0.1, 0.25, 0.5}) {
        const auto a = renyi_average(3, 400, 0.5, r);
        const auto b = renyi_average(3, 800, 0.5, r);
        const auto inf = renyi_average(3, asymptotic, 0.5, r);
        const double h400 = inf.value - a.per_mode_value;  // = (sum c_i H_i) / 400
        EXPECT_GT(h400, 0.0);
        EXPECT_NEAR(a.per_mode_value - b.per_mode_value, -h400 / 2, 1e-9);

        VonNeumannCoefficients coef(0.5);
        const auto va = von_neumann_average(400, 0.5, r, coef);
        const auto vb = von_neumann_average(800, 0.5, r, coef);
        const double hv = 0.25 * vn_generating(0.5, 4 * r * (1 - r));
        EXPECT_NEAR(va.per_mode_value - vb.per_mode_value, -hv / 800, 2e-6 * va.per_mode_value);
    }
}

TEST(Limits, ClosedForms) {
    EXPECT_EQ(vn_small_s_limit(0.5), 0.25);
    EXPECT_EQ(vn_large_s_limit(0.5), 1.0);
    EXPECT_EQ(vn_small_s_limit(0.0), 0.0);
    EXPECT_EQ(vn_large_s_limit(0.0), 0.0);
    EXPECT_EQ(renyi_small_s_limit(2, 0.5), 0.5);
    EXPECT_EQ(renyi_large_s_limit(2, 0.5), 1.0);
    EXPECT_EQ(renyi_large_s_limit(2, 0.25), 0.5);
    EXPECT_EQ(renyi_small_s_limit(3, 0.5), 0.375);
    double prev = INFINITY;
    for (int a = 2; a <= 40; ++a) {
        const double v = renyi_small_s_limit(a, 0.3);
        EXPECT_LT(v, prev);
        EXPECT_NEAR(v, 0.21 * (1.0 + 1.0 / (a - 1)), 1e-15);
        prev = v;
    }
    EXPECT_THROW(renyi_small_s_limit(1, 0.5), ValidationError);
    EXPECT_THROW(vn_small_s_limit(1.5), ValidationError);
}

TEST(Limits, UnequalReducesToEqual) {
    const std::vector<double> s(30, 0.04);
    EXPECT_NEAR(renyi_unequal_small(3, 0.4, s), 30 * 0.0016 * 1.5 * 0.24, 1e-15);
    EXPECT_EQ(renyi_unequal_small(2, 0.5, std::vector<double>(10, 0.0)), 0.0);
}

TEST(Limits, SmallSqueezingSeriesApproachesLimit) {
    for (int alpha : {2, 3, 5, 15}) {
        const double ratio = renyi_average(alpha, 400, 0.05, 0.5).value / (400 * 0.05 * 0.05);
        EXPECT_NEAR(ratio / renyi_small_s_limit(alpha, 0.5), 1.0, 0.05) << "alpha = " << alpha;
    }
}

TEST(Evaluate, DispatchesOnAlphaAndSqueezing) {
    PageCurveQuery q;
    q.alpha = 1;
    q.s = 0.5;
    q.r = 0.3;
    q.n = 100;
    EXPECT_EQ(evaluate(q).value, von_neumann_average(100, 0.5, 0.3).value);
    q.alpha = 4;
    EXPECT_EQ(evaluate(q).value, renyi_average(4, 100, 0.5, 0.3).value);
    q.s = std::vector<double>(100, 0.01);
    EXPECT_NEAR(evaluate(q).value, renyi_unequal_small(4, 0.3, std::vector<double>(100, 0.01)), 1e-15);
    q.alpha = 1;
    EXPECT_THROW(evaluate(q), ValidationError);
    q.alpha = 0;
    EXPECT_THROW(evaluate(q), ValidationError);
}

TEST(Partition, RoundsAndReportsRealizedRatio) {
    const auto p = make_partition(10, 0.33);
    EXPECT_EQ(p.k, 3);
    EXPECT_DOUBLE_EQ(p.r, 0.3);
    EXPECT_EQ(renyi2_average(10, 0.5, 0.33).realized_r, 0.3);
    EXPECT_THROW(make_partition(0, 0.5), ValidationError);
    EXPECT_THROW(make_partition(10, 1.01), ValidationError);
}
