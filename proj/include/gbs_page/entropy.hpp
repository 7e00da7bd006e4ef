#pragma once

// Entropies of a Gaussian state as functions of its symplectic spectrum.
// All values are in nats.

#include <cmath>
#include <numbers>

#include "errors.hpp"
#include "symplectic.hpp"

namespace gbs_page {

namespace detail {

inline void check_alpha(int alpha, const char* who) {
    if (alpha < 2) {
        throw ValidationError(std::string(who) + ": integer alpha >= 2 required (got " +
                              std::to_string(alpha) + ")");
    }
}

}  // namespace detail

/// Single-mode von Neumann entropy
///   g(nu) = ((nu+1)/2) ln((nu+1)/2) - ((nu-1)/2) ln((nu-1)/2),  g(1) = 0.
inline double von_neumann_mode(double nu) {
    const double eps = nu - 1.0;
    if (eps <= 0.0) return 0.0;
    const double a = 0.5 * eps;
    if (eps < 1e-6) {
        // g(1 + 2a) = a (1 - ln a) + a^2/2 + O(a^3)
        return a * (1.0 - std::log(a)) + 0.5 * a * a;
    }
    return (1.0 + a) * std::log1p(a) - a * std::log(a);
}

/// Single-mode Renyi-alpha entropy
///   (1/(alpha-1)) ln(((nu+1)^alpha - (nu-1)^alpha) / 2^alpha),
/// evaluated in log space as alpha ln((nu+1)/2) + ln(1 - ((nu-1)/(nu+1))^alpha)
/// so that large alpha and large nu do not overflow.
inline double renyi_mode(double nu, int alpha) {
    // 1 - ((nu-1)/(nu+1))^alpha = -expm1(alpha * log1p(-2/(nu+1)))
    const double log_ratio = std::log1p(-2.0 / (nu + 1.0));
    const double log_bracket = alpha * std::log((nu + 1.0) / 2.0) +
                               std::log(-std::expm1(alpha * log_ratio));
    return log_bracket / (alpha - 1);
}

/// Same quantity through the factorization
///   (nu+1)^a - (nu-1)^a = 2 a nu^z prod_{m=1}^{floor((a-1)/2)} (nu^2 + cot^2(pi m / a)),
/// z = 1 - (a mod 2).
inline double renyi_mode_factored(double nu, int alpha) {
    const int zeta = 1 - (alpha % 2);
    const int a = (alpha - 1) / 2;
    double log_bracket = std::log(2.0 * alpha) + zeta * std::log(nu);
    for (int m = 1; m <= a; ++m) {
        const double cot = 1.0 / std::tan(std::numbers::pi * m / alpha);
        log_bracket += std::log(nu * nu + cot * cot);
    }
    return (log_bracket - alpha * std::numbers::ln2) / (alpha - 1);
}

inline double von_neumann_entropy(const SymplecticSpectrum& nu) {
    double acc = 0.0;
    for (double v : nu.values()) acc += von_neumann_mode(v);
    return acc;
}

inline double renyi_entropy(const SymplecticSpectrum& nu, int alpha) {
    detail::check_alpha(alpha, "renyi_entropy");
    double acc = 0.0;
    for (double v : nu.values()) acc += renyi_mode(v, alpha);
    return acc;
}

inline double renyi_entropy_factored(const SymplecticSpectrum& nu, int alpha) {
    detail::check_alpha(alpha, "renyi_entropy_factored");
    double acc = 0.0;
    for (double v : nu.values()) acc += renyi_mode_factored(v, alpha);
    return acc;
}

/// alpha = 1 selects the von Neumann entropy, alpha >= 2 the Renyi family.
inline double entropy(const SymplecticSpectrum& nu, int alpha) {
    if (alpha == 1) return von_neumann_entropy(nu);
    return renyi_entropy(nu, alpha);
}

}  // namespace gbs_page
