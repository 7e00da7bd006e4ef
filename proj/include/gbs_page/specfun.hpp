#pragma once

// Special functions used by the closed-form page curves:
//   * Catalan numbers;
//   * 2F1(1-i, i; 2+i; r), a polynomial of degree i-1;
//   * 2F1(3/2, 1+i; 5/2; x) = 3 sum_m binom(m+i, m) x^m / (2m+3);
//   * the moment polynomials G_i(r) and H_i(r).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "errors.hpp"

namespace gbs_page {

/// Value of a truncated series plus an estimate of what was left out.
struct SeriesResult {
    double value = 0.0;
    long terms_used = 0;
    double tail_estimate = 0.0;
};

/// Largest i whose Catalan number the 64-bit recurrence produces exactly
/// (C_i * 2(2i+1) overflows beyond this).
inline constexpr int kCatalanExactMax = 33;

inline std::uint64_t catalan_exact(int i) {
    if (i < 0 || i > kCatalanExactMax) {
        throw ValidationError("catalan_exact: i must lie in [0, " +
                              std::to_string(kCatalanExactMax) + "]");
    }
    std::uint64_t c = 1;
    for (int j = 0; j < i; ++j) {
        const auto jj = static_cast<std::uint64_t>(j);
        c = c * 2 * (2 * jj + 1) / (jj + 2);
    }
    return c;
}

inline double log_catalan(int i) {
    if (i < 0) throw ValidationError("log_catalan: i must be >= 0");
    if (i <= kCatalanExactMax) return std::log(static_cast<double>(catalan_exact(i)));
    return std::lgamma(2.0 * i + 1.0) - 2.0 * std::lgamma(i + 1.0) - std::log(i + 1.0);
}

/// C_i; exact for i <= 33, log-gamma beyond.
inline double catalan(int i) {
    if (i < 0) throw ValidationError("catalan: i must be >= 0");
    if (i <= kCatalanExactMax) return static_cast<double>(catalan_exact(i));
    return std::exp(log_catalan(i));
}

/// 2F1(1-i, i; 2+i; r) as the finite sum over m = 0..i-1.
/// Terms alternate in sign; fine for small i, see moment_deficit() for the
/// cancellation-free route used at large i.
inline double hyp2f1_terminating(int i, double r) {
    if (i < 1) throw ValidationError("hyp2f1_terminating: i must be >= 1");
    double term = 1.0;
    double sum = 1.0;
    for (int m = 0; m < i - 1; ++m) {
        term *= static_cast<double>(1 - i + m) * static_cast<double>(i + m) /
                (static_cast<double>(2 + i + m) * static_cast<double>(m + 1)) * r;
        sum += term;
    }
    return sum;
}

/// 2F1(3/2, 1+i; 5/2; x) for 0 <= x < 1 by direct power series. Summation
/// stops once the geometric bound term * q / (1 - q) on the remainder drops
/// below tol * |sum|, q being the current term ratio; the ratio decreases
/// monotonically in m, which makes the bound rigorous.
inline SeriesResult hyp2f1_vn(int i, double x, double tol = 1e-16, long term_cap = 10'000'000) {
    if (i < 1) throw ValidationError("hyp2f1_vn: i must be >= 1");
    if (!(x >= 0.0) || x >= 1.0) {
        throw ValidationError("hyp2f1_vn: series diverges unless 0 <= x < 1");
    }
    if (x == 0.0) return {1.0, 1, 0.0};
    double term = 1.0;
    double sum = 1.0;
    for (long m = 0; m < term_cap; ++m) {
        const double md = static_cast<double>(m);
        const double q = x * (md + i + 1.0) / (md + 1.0) * (2.0 * md + 3.0) / (2.0 * md + 5.0);
        term *= q;
        sum += term;
        if (!std::isfinite(sum)) throw NumericalError("hyp2f1_vn: overflow");
        if (q < 1.0) {
            const double q_next = x * (md + i + 2.0) / (md + 2.0) * (2.0 * md + 5.0) / (2.0 * md + 7.0);
            const double tail = term * q_next / (1.0 - q_next);
            if (tail <= tol * sum) return {sum, m + 2, tail};
        }
    }
    throw TruncationError("hyp2f1_vn: term cap reached before tolerance", sum,
                          std::numeric_limits<double>::infinity(), static_cast<int>(term_cap));
}

/// r - G_i(r), the limiting value of E Tr(W^i) / n.
///
/// Computed as (r(1-r))^{i+1} C_i 2F1(2i+1, 2; i+2; r) after Euler's
/// transformation of r^{i+1} C_i 2F1(1-i, i; i+2; r); every term of the new
/// series is positive. Arguments above 1/2 are mapped through
/// r - G_i(r) = (2r - 1) + (1 - r) - G_i(1 - r), so the series always runs
/// with ratio at most 1/2 in the tail.
inline double moment_deficit(int i, double r) {
    if (i < 1) throw ValidationError("moment_deficit: i must be >= 1");
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("moment_deficit: r must lie in [0, 1]");
    if (r > 0.5) return (2.0 * r - 1.0) + moment_deficit(i, 1.0 - r);
    if (r == 0.0) return 0.0;

    const double di = static_cast<double>(i);
    double term = 1.0;
    double sum = 1.0;
    for (long m = 0;; ++m) {
        const double md = static_cast<double>(m);
        const double q = r * (2.0 * di + 1.0 + md) * (2.0 + md) / ((di + 2.0 + md) * (md + 1.0));
        term *= q;
        sum += term;
        if (q < 1.0 && term * q / (1.0 - q) <= 1e-17 * sum) break;
    }
    const double log_prefactor = (di + 1.0) * std::log(r * (1.0 - r)) + log_catalan(i);
    return std::exp(log_prefactor) * sum;
}

/// G_i(r) = r - r^{i+1} C_i 2F1(1-i, i; 2+i; r), stable for all i.
inline double G(int i, double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("G: r must lie in [0, 1]");
    const double rr = std::min(r, 1.0 - r);
    return rr - moment_deficit(i, rr);
}

/// G_i(r) straight from the defining formula. Loses accuracy roughly like
/// 3^i * eps near r = 1/2; kept as an independent route for small i.
inline double G_direct(int i, double r) {
    return r - std::pow(r, i + 1) * catalan(i) * hyp2f1_terminating(i, r);
}

/// H_i(r) = 4^{i-1} (r(1-r))^i = (4 r(1-r))^i / 4; the base is at most 1.
inline double H(int i, double r) {
    if (i < 1) throw ValidationError("H: i must be >= 1");
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("H: r must lie in [0, 1]");
    const double p = r * (1.0 - r);
    if (p == 0.0) return 0.0;
    return 0.25 * std::pow(4.0 * p, i);
}

}  // namespace gbs_page
