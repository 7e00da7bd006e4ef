#include <gtest/gtest.h>

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>

#include <gbs_page/specfun.hpp>

using namespace gbs_page;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

cpp_int binomial(int n, int k) {
    // Pascal's triangle row by row.
    std::vector<cpp_int> row{1};
    for (int j = 1; j <= n; ++j) {
        std::vector<cpp_int> next(row.size() + 1, 0);
        next.front() = next.back() = 1;
        for (std::size_t t = 1; t < row.size(); ++t) next[t] = row[t - 1] + row[t];
        row = std::move(next);
    }
    return row[static_cast<std::size_t>(k)];
}

/// 2F1(1-i, i; 2+i; r) term by term from Pochhammer symbols, exactly.
cpp_rational hyp_exact(int i, const cpp_rational& r) {
    cpp_rational sum = 0;
    for (int m = 0; m <= i - 1; ++m) {
        cpp_rational t = 1;
        for (int j = 0; j < m; ++j) {
            t *= cpp_rational(1 - i + j) * cpp_rational(i + j) / (cpp_rational(2 + i + j) * cpp_rational(j + 1));
        }
        cpp_rational p = 1;
        for (int j = 0; j < m; ++j) p *= r;
        sum += t * p;
    }
    return sum;
}

cpp_rational G_exact(int i, const cpp_rational& r) {
    cpp_rational p = 1;
    for (int j = 0; j < i + 1; ++j) p *= r;
    const cpp_rational cat = cpp_rational(binomial(2 * i, i)) / (i + 1);
    return r - p * cat * hyp_exact(i, r);
}

double to_double(const cpp_rational& q) { return q.convert_to<double>(); }

/// 3 sum_m binom(m+i, m) x^m / (2m+3), long double, fixed number of terms.
long double hyp_vn_brute(int i, long double x, long terms) {
    long double sum = 0.0L;
    long double b = 1.0L;  // binom(m+i, m)
    long double p = 1.0L;
    for (long m = 0; m < terms; ++m) {
        sum += b * p / (2.0L * m + 3.0L);
        b *= static_cast<long double>(m + 1 + i) / static_cast<long double>(m + 1);
        p *= x;
        if (p * b == 0.0L) break;
    }
    return 3.0L * sum;
}

}  // namespace

TEST(Catalan, SmallValues) {
    const std::uint64_t expect[] = {1, 1, 2, 5, 14};
    for (int i = 0; i <= 4; ++i) {
        EXPECT_EQ(catalan_exact(i), expect[i]);
        EXPECT_EQ(catalan(i), static_cast<double>(expect[i]));
    }
}

TEST(Catalan, ThirtyAgainstBigIntegerBinomial) {
    const cpp_int expect = binomial(60, 30) / 31;
    EXPECT_EQ(cpp_int(catalan_exact(30)), expect);
    EXPECT_EQ(cpp_int(catalan_exact(kCatalanExactMax)), binomial(66, 33) / 34);
}

TEST(Catalan, LogGammaBranchContinuesExactOne) {
    for (int i = 34; i <= 60; ++i) {
        const double exact = to_double(cpp_rational(binomial(2 * i, i)) / (i + 1));
        EXPECT_NEAR(catalan(i) / exact, 1.0, 1e-12) << "i = " << i;
    }
    EXPECT_THROW(catalan_exact(34), ValidationError);
    EXPECT_THROW(catalan(-1), ValidationError);
}

TEST(Hyp2f1Terminating, LowOrders) {
    for (double r : {0.0, 0.2, 0.5, 1.0}) {
        EXPECT_EQ(hyp2f1_terminating(1, r), 1.0);
        EXPECT_NEAR(hyp2f1_terminating(2, r), 1.0 - r / 2.0, 1e-16);
    }
}

TEST(Hyp2f1Terminating, DegreeFourExactRational) {
    const double expect = to_double(hyp_exact(5, cpp_rational(3, 10)));
    EXPECT_NEAR(hyp2f1_terminating(5, 0.3), expect, 1e-15);
}

TEST(Hyp2f1Vn, ZeroArgument) {
    for (int i : {1, 4, 100}) {
        const auto r = hyp2f1_vn(i, 0.0);
        EXPECT_EQ(r.value, 1.0);
        EXPECT_EQ(r.tail_estimate, 0.0);
    }
}

TEST(Hyp2f1Vn, BruteForceOracles) {
    const auto a = hyp2f1_vn(1, 0.5);
    EXPECT_NEAR(a.value, static_cast<double>(hyp_vn_brute(1, 0.5L, 1'000'000)), 1e-14);
    const auto b = hyp2f1_vn(3, 0.9);
    const double ob = static_cast<double>(hyp_vn_brute(3, 0.9L, 1'000'000));
    EXPECT_NEAR(b.value, ob, 1e-9 * ob);
    EXPECT_LE(std::abs(b.value - ob), std::max(b.tail_estimate, 1e-12 * ob));
    const auto c = hyp2f1_vn(20, 0.99);
    const double oc = static_cast<double>(hyp_vn_brute(20, 0.99L, 1'000'000));
    EXPECT_NEAR(c.value / oc, 1.0, 1e-9);
}

TEST(Hyp2f1Vn, RejectsDivergentArguments) {
    EXPECT_THROW(hyp2f1_vn(2, 1.0), ValidationError);
    EXPECT_THROW(hyp2f1_vn(2, -0.1), ValidationError);
    EXPECT_THROW(hyp2f1_vn(0, 0.5), ValidationError);
    EXPECT_THROW(hyp2f1_vn(2, 0.999999, 1e-16, 1000), TruncationError);
}

TEST(Hyp2f1Vn, TailEstimateBoundsTheChangeWhenTightening) {
    for (int i : {1, 2, 5, 30}) {
        for (double x : {0.1, 0.5, 0.8, 0.95}) {
            double tol = 1e-4;
            auto prev = hyp2f1_vn(i, x, tol);
            for (int step = 0; step < 8; ++step) {
                tol /= 2;
                const auto next = hyp2f1_vn(i, x, tol);
                EXPECT_LE(std::abs(next.value - prev.value), prev.tail_estimate * (1 + 1e-12) + 1e-15 * next.value)
                    << "i = " << i << ", x = " << x;
                prev = next;
            }
        }
    }
}

TEST(G, FirstOrderAndExactValue) {
    for (double r = 0.0; r <= 1.0; r += 0.05) EXPECT_NEAR(G(1, r), r * (1 - r), 1e-15);
    EXPECT_NEAR(G(2, 0.5), 0.3125, 1e-15);
    EXPECT_NEAR(G_direct(2, 0.5), 0.3125, 1e-15);
}

TEST(G, SymmetricAboutOneHalf) {
    for (int i = 1; i <= 20; ++i) {
        EXPECT_NEAR(G(i, 0.3), G(i, 0.7), 1e-12) << "i = " << i;
        if (i <= 8) {
            EXPECT_NEAR(G_direct(i, 0.3), G_direct(i, 0.7), 1e-12) << "i = " << i;
        }
        for (double r : {0.05, 0.21, 0.44}) EXPECT_NEAR(G(i, r), G(i, 1.0 - r), 1e-12);
    }
}

TEST(G, BoundedByMinOfRAndOneMinusR) {
    for (int i = 1; i <= 200; i += (i < 20 ? 1 : 13)) {
        for (int j = 0; j <= 100; ++j) {
            const double r = j / 100.0;
            const double g = G(i, r);
            EXPECT_GE(g, -1e-12);
            EXPECT_LE(g, std::min(r, 1.0 - r) + 1e-12) << "i = " << i << ", r = " << r;
        }
    }
}

TEST(G, StableRouteAgreesWithExactRationals) {
    for (int i : {1, 2, 3, 7, 12, 25, 40, 60}) {
        for (auto [num, den] : {std::pair{1, 10}, std::pair{3, 10}, std::pair{1, 2}, std::pair{7, 10}}) {
            const double r = static_cast<double>(num) / den;
            const double exact = to_double(G_exact(i, cpp_rational(num, den)));
            EXPECT_NEAR(G(i, r), exact, 1e-14) << "i = " << i << ", r = " << r;
            if (i <= 8) {
                EXPECT_NEAR(G_direct(i, r), exact, 1e-12) << "i = " << i << ", r = " << r;
            }
        }
    }
}

TEST(MomentDeficit, LargeIndexAtHalfMatchesCentralBinomial) {
    // 1/2 - G_i(1/2) = binom(2i, i) / (2 * 4^i)
    for (int i : {1, 10, 100, 1000, 5000}) {
        const double expect = std::exp(std::lgamma(2.0 * i + 1) - 2 * std::lgamma(i + 1.0) - 2.0 * i * std::log(2.0)) / 2;
        EXPECT_NEAR(moment_deficit(i, 0.5) / expect, 1.0, 1e-11) << "i = " << i;
    }
}

TEST(H, ClosedForms) {
    for (double r = 0.0; r <= 1.0; r += 0.1) EXPECT_NEAR(H(1, r), r * (1 - r), 1e-15);
    for (int i = 1; i <= 5000; i += 499) {
        EXPECT_EQ(H(i, 0.0), 0.0);
        EXPECT_EQ(H(i, 1.0), 0.0);
        EXPECT_NEAR(H(i, 0.5), 0.25, 1e-13);
        EXPECT_NEAR(H(i, 0.3), H(i, 0.7), 1e-12);
    }
}
