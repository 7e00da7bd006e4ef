#pragma once

// Closed-form Page curves of Gaussian boson sampling outputs: Haar averages
// of Renyi-alpha and von Neumann entropies of the first k = r n modes, their
// n -> infinity per-mode forms, and the small/large squeezing limits.
//
// Every average is a series over moments of W,
//   E S = sum_i c_i(s) E[k - Tr W^i],   E[k - Tr W^i] ~ n G_i(r) - H_i(r),
// with the o(1) remainder dropped.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "specfun.hpp"

namespace gbs_page {

/// Number of modes, or nullopt for the n -> infinity per-mode limit.
using ModeCount = std::optional<int>;
inline constexpr std::nullopt_t asymptotic = std::nullopt;

/// Hard cap on the outer series index.
inline constexpr int kIMaxCap = 5000;
/// Default relative tolerances. The Renyi series have a rigorous geometric
/// tail bound; the von Neumann series decays algebraically near r = 1/2 and
/// its tail is estimated, see von_neumann_average().
inline constexpr double kRenyiTol = 1e-10;
inline constexpr double kVonNeumannTol = 1e-6;
/// Below this squeezing the von Neumann series is slow and tiny; use the
/// small-squeezing limit instead.
inline constexpr double kVonNeumannMinS = 0.02;

struct SeriesOptions {
    double tol = 0.0;           ///< relative; 0 selects the per-entropy default
    std::optional<int> i_max;   ///< fixed number of terms (no tolerance check)
};

/// Resolved bipartition: k = round(r n) and the realized ratio k / n.
/// Every average is symmetric under r -> 1 - r and is evaluated at
/// `folded` = min(r, 1 - r); for finite n it is formed from min(k, n - k) so
/// that k and n - k give bit-identical results.
struct Partition {
    ModeCount n;
    int k = 0;
    double r = 0.0;
    double folded = 0.0;
};

inline Partition make_partition(ModeCount n, double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("r must lie in [0, 1]");
    if (!n) return {n, 0, r, std::min(r, 1.0 - r)};
    if (*n < 1) throw ValidationError("n must be >= 1");
    const int k = static_cast<int>(std::lround(r * *n));
    return {n, k, static_cast<double>(k) / *n, static_cast<double>(std::min(k, *n - k)) / *n};
}

struct PageCurveValue {
    double value = 0.0;           ///< total entropy in nats (per mode when asymptotic)
    double per_mode_value = 0.0;  ///< value / n
    int i_max_used = 0;
    double trunc_err = 0.0;       ///< bound (Renyi) or estimate (von Neumann) of the dropped tail
    double realized_r = 0.0;
};

/// nr - n G_i(r) + H_i(r).
inline double expected_trW(int i, int n, double r) {
    if (i < 1) throw ValidationError("expected_trW: i must be >= 1");
    if (n < 1) throw ValidationError("expected_trW: n must be >= 1");
    return n * r - n * G(i, r) + H(i, r);
}

namespace detail {

/// The moment factors of one partition.
struct Moments {
    Partition p;

    double scale() const { return p.n ? static_cast<double>(*p.n) : 1.0; }
    double folded_r() const { return p.folded; }

    /// n G_i - H_i, or G_i in the asymptotic case.
    double weight(int i) const {
        const double g = G(i, p.folded);
        return p.n ? *p.n * g - H(i, p.folded) : g;
    }
    /// n (r' - G_i(r')) at the folded ratio r' = min(r, 1-r); P_i alone in
    /// the asymptotic case.
    double deficit(int i) const { return scale() * moment_deficit(i, folded_r()); }
    bool trivial() const { return p.folded == 0.0; }
};

inline PageCurveValue finish(const Partition& p, double value, int terms, double err) {
    PageCurveValue out;
    out.value = value;
    out.per_mode_value = p.n ? value / *p.n : value;
    out.i_max_used = terms;
    out.trunc_err = err;
    out.realized_r = p.r;
    return out;
}

inline void check_options(const SeriesOptions& o) {
    if (!(o.tol >= 0.0) || !std::isfinite(o.tol)) throw ValidationError("tol must be a positive real");
    if (o.i_max && (*o.i_max < 1 || *o.i_max > kIMaxCap)) {
        throw ValidationError("i_max must lie in [1, " + std::to_string(kIMaxCap) + "]");
    }
}

/// A family of geometric coefficients  weight * q^i / i.
struct GeometricFamily {
    double q;
    double weight;
};

/// Sums  sum_i [sum_f w_f q_f^i / i] * moments.weight(i)  with the bound
///   sum_f w_f q_f^{I+1} / ((I+1)(1-q_f)) * n max(r, 1-r)
/// on everything beyond index I.
inline PageCurveValue geometric_series(const Partition& p, std::span<const GeometricFamily> fams,
                                       const SeriesOptions& opt, double default_tol,
                                       const char* who) {
    check_options(opt);
    const Moments mom{p};
    const double tol = opt.tol > 0.0 ? opt.tol : default_tol;
    const double bound_scale = mom.scale() * (1.0 - p.folded);
    double q_max = 0.0;
    for (const auto& f : fams) q_max = std::max(q_max, f.q);
    if (mom.trivial() || q_max == 0.0) return finish(p, 0.0, 0, 0.0);

    std::vector<double> pw(fams.size(), 1.0);
    double value = 0.0;
    double bound = std::numeric_limits<double>::infinity();
    const int cap = opt.i_max.value_or(kIMaxCap);
    int i = 0;
    while (i < cap) {
        ++i;
        double c = 0.0;
        for (std::size_t f = 0; f < fams.size(); ++f) {
            pw[f] *= fams[f].q;
            c += fams[f].weight * pw[f];
        }
        c /= i;
        value += c * mom.weight(i);
        bound = 0.0;
        for (std::size_t f = 0; f < fams.size(); ++f) {
            bound += fams[f].weight * pw[f] * fams[f].q / (1.0 - fams[f].q);
        }
        bound *= bound_scale / (i + 1);
        if (!opt.i_max && bound <= tol * std::abs(value)) return finish(p, value, i, bound);
    }
    if (opt.i_max) return finish(p, value, i, bound);
    throw TruncationError(std::string(who) + ": series did not reach tol = " + std::to_string(tol) +
                              " within " + std::to_string(kIMaxCap) +
                              " terms (squeezing too strong); use the large-squeezing limit "
                              "(`limits --regime large`) or Monte-Carlo (`simulate`) instead",
                          value, bound, i);
}

inline double cot_sq(int m, int alpha) {
    const double t = std::tan(std::numbers::pi * m / alpha);
    return 1.0 / (t * t);
}

}  // namespace detail

/// E S_2 = sum_i tanh^{2i}(2s) / (2i) (n G_i - H_i).
inline PageCurveValue renyi2_average(ModeCount n, double s, double r, SeriesOptions opt = {}) {
    if (!std::isfinite(s)) throw ValidationError("renyi2_average: non-finite s");
    const Partition p = make_partition(n, r);
    const double t = std::tanh(2.0 * s);
    const detail::GeometricFamily fam{t * t, 0.5};
    return detail::geometric_series(p, std::span(&fam, 1), opt, kRenyiTol, "renyi2_average");
}

/// Ratios of the Renyi-alpha series: q_0 = tanh^2(2s) with weight zeta/2 and
/// q_m = sinh^2(2s) / (cosh^2(2s) + cot^2(pi m / alpha)), m = 1..floor((alpha-1)/2),
/// with weight 1, all divided by alpha - 1.
inline std::vector<detail::GeometricFamily> renyi_families(int alpha, double s) {
    if (alpha < 2) throw ValidationError("renyi_average: integer alpha >= 2 required");
    const double sh = std::sinh(2.0 * s);
    const double ch = std::cosh(2.0 * s);
    const double t = std::tanh(2.0 * s);
    std::vector<detail::GeometricFamily> fams;
    const double norm = 1.0 / (alpha - 1);
    if (alpha % 2 == 0) fams.push_back({t * t, 0.5 * norm});
    for (int m = 1; m <= (alpha - 1) / 2; ++m) {
        fams.push_back({sh * sh / (ch * ch + detail::cot_sq(m, alpha)), norm});
    }
    return fams;
}

inline PageCurveValue renyi_average(int alpha, ModeCount n, double s, double r, SeriesOptions opt = {}) {
    if (!std::isfinite(s)) throw ValidationError("renyi_average: non-finite s");
    const auto fams = renyi_families(alpha, s);
    const Partition p = make_partition(n, r);
    return detail::geometric_series(p, fams, opt, kRenyiTol, "renyi_average");
}

// ---------------------------------------------------------------------------
// von Neumann

/// (1/3) sech^2(2s) tanh^{2i}(2s) 2F1(3/2, 1+i; 5/2; sech^2(2s))
///   = sum_m t^i x^{m+1} binom(m+i, m) / (2m+3),  x = sech^2, t = tanh^2.
/// The hypergeometric factor alone grows like t^{-i}, so the sum is taken
/// around its largest term with that term's logarithm factored out.
inline double vn_weight(int i, double s) {
    if (i < 1) throw ValidationError("vn_weight: i must be >= 1");
    const double a = std::abs(2.0 * s);
    if (a == 0.0) return 0.0;
    const double ch = std::cosh(a);
    const double x = 1.0 / (ch * ch);
    const double log_t = 2.0 * std::log(std::tanh(a));
    const double di = i;
    auto ratio = [&](double m) { return x * (m + di + 1.0) * (2.0 * m + 3.0) / ((m + 1.0) * (2.0 * m + 5.0)); };

    // Largest term: ratio(m) = 1 at the positive root of
    // 2(1-x) m^2 - (x(2i+5) - 7) m - (3x(i+1) - 5) = 0.
    long m0 = 0;
    if (ratio(0.0) >= 1.0) {
        const double qa = 2.0 * (1.0 - x);
        const double qb = -(x * (2.0 * di + 5.0) - 7.0);
        const double qc = -(3.0 * x * (di + 1.0) - 5.0);
        const double root = (-qb + std::sqrt(qb * qb - 4.0 * qa * qc)) / (2.0 * qa);
        m0 = std::max(0L, static_cast<long>(std::ceil(root)));
        while (m0 > 0 && ratio(static_cast<double>(m0 - 1)) < 1.0) --m0;
        while (ratio(static_cast<double>(m0)) >= 1.0) ++m0;
    }
    const double dm0 = static_cast<double>(m0);
    const double log_peak = di * log_t + (dm0 + 1.0) * std::log(x) + std::lgamma(dm0 + di + 1.0) -
                            std::lgamma(dm0 + 1.0) - std::lgamma(di + 1.0) - std::log(2.0 * dm0 + 3.0);

    double sum = 1.0;
    double v = 1.0;
    for (long m = m0;; ++m) {  // ratio(m) < 1 from here on and keeps falling
        const double q = ratio(static_cast<double>(m));
        v *= q;
        sum += v;
        const double qn = ratio(static_cast<double>(m + 1));
        if (v * qn / (1.0 - qn) <= 1e-17 * sum) break;
    }
    v = 1.0;
    for (long m = m0 - 1; m >= 0; --m) {  // 1/ratio(m) <= 1 and falling as m decreases
        v /= ratio(static_cast<double>(m));
        sum += v;
        if (m == 0) break;
        const double b = 1.0 / ratio(static_cast<double>(m - 1));
        if (b < 1.0 && v * b / (1.0 - b) <= 1e-17 * sum) break;
    }
    return std::exp(log_peak) * sum;
}

/// 1/(2i) - vn_weight(i, s): the coefficient of E[k - Tr W^i] in E S_1.
inline double vn_coefficient(int i, double s) { return 0.5 / i - vn_weight(i, s); }

/// sum_i vn_coefficient(i, s) = (1/2) ln(sinh^2(2s)/4) + cosh(2s) artanh(sech(2s)),
/// the von Neumann entropy per unit of k when W = 0.
inline double vn_constant(double s) {
    const double a = std::abs(2.0 * s);
    if (a == 0.0) return 0.0;
    // artanh(sech a) = -ln tanh(a/2)
    return std::log(std::sinh(a) / 2.0) - std::cosh(a) * std::log(std::tanh(0.5 * a));
}

/// Coefficients vn_coefficient(i, s), computed on demand and kept.
class VonNeumannCoefficients {
public:
    explicit VonNeumannCoefficients(double s) : s_(s), c0_(vn_constant(s)) {}

    double s() const noexcept { return s_; }
    double constant() const noexcept { return c0_; }

    double operator()(int i) {
        while (static_cast<int>(c_.size()) < i) {
            c_.push_back(vn_coefficient(static_cast<int>(c_.size()) + 1, s_));
        }
        return c_[static_cast<std::size_t>(i - 1)];
    }

private:
    double s_;
    double c0_;
    std::vector<double> c_;
};

/// sum_{i>=1} vn_coefficient(i, s) x^i for 0 <= x <= 1, in closed form:
///   -ln(1-x)/2 - f(X/(1-tx)) + f(X),  f(z) = artanh(sqrt z)/sqrt z - 1,
/// with X = sech^2(2s), t = tanh^2(2s). The logarithmic singularities at
/// x = 1 cancel analytically; the value there is vn_constant(s).
inline double vn_generating(double s, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("vn_generating: x must lie in [0, 1]");
    const double a = std::abs(2.0 * s);
    if (a == 0.0 || x == 0.0) return 0.0;
    const double ch = std::cosh(a);
    const double t = std::tanh(a) * std::tanh(a);
    const double sech = 1.0 / ch;
    const double one_tx = 1.0 - t * x;
    const double rz = sech / std::sqrt(one_tx);  // sqrt(X / (1 - t x))
    // -ln(1-x)/2 + ln(1-x)/(2 sqrt z) = ln(1-x)(1-x) t / (2 (1-tx)(1+sqrt z) sqrt z)
    const double y = 1.0 - x;
    const double singular = y > 0.0 ? 0.5 * y * std::log(y) * t / (one_tx * (1.0 + rz) * rz) : 0.0;
    // artanh(sqrt z) without the ln(1-x) piece: ln((1+sqrt z)^2 (1-tx) / t) / 2
    const double regular = std::log((1.0 + rz) * (1.0 + rz) * one_tx / t) / (2.0 * rz);
    // f(X) + 1 = artanh(sech)/sech = -ch ln tanh(a/2); the -1 of f(z) cancels it
    return singular - regular - ch * std::log(std::tanh(0.5 * a));
}

/// E S_1 evaluated as
///   n r' c0(s) - sum_i c_i(s) n P_i(r') - (1/4) Phi(4 r'(1-r')),   r' = min(r, 1-r),
/// which equals sum_i c_i (n G_i - H_i) term by term: sum_i c_i = c0 and
/// H_i = (4 r'(1-r'))^i / 4 has the generating function Phi = vn_generating.
///
/// The coefficients c_i only fall off like sinh^2(2s)/(4 i^2), so the direct
/// form converges like 1/I; here the terms T_i carry an extra factor
/// P_i ~ (4 r (1-r))^i, or ~ i^{-1/2} at r = 1/2, i.e. T_i ~ i^{-5/2}. The
/// remainder after I terms is modelled as a power law with the local
/// exponent p = ln(T_{I-1}/T_I) / ln(I/(I-1)) (Euler-Maclaurin):
///   tail ~ T_I (I/(p-1) - 1/2 + p/(12 I)),
/// and added to the partial sum. The reported error is the drift of the
/// corrected sum since I/2 and 3I/4 terms; summation stops once it falls below
/// tol |value|, and not before 8 cosh^2(2s) terms, the scale on which c_i
/// leaves its geometric regime.
inline PageCurveValue von_neumann_average(ModeCount n, double s, double r, VonNeumannCoefficients& coef,
                                          SeriesOptions opt = {}) {
    detail::check_options(opt);
    if (!std::isfinite(s)) throw ValidationError("von_neumann_average: non-finite s");
    if (s != coef.s()) throw ValidationError("von_neumann_average: coefficient cache built for another s");
    const Partition p = make_partition(n, r);
    const detail::Moments mom{p};
    if (s == 0.0 || mom.trivial()) return detail::finish(p, 0.0, 0, 0.0);
    if (std::abs(s) < kVonNeumannMinS) {
        throw ValidationError("von_neumann_average: |s| < " + std::to_string(kVonNeumannMinS) +
                              " is outside the series range; use vn_small_s_limit (r(1-r) per s^2 ln(1/s^2) n)");
    }
    const double tol = opt.tol > 0.0 ? opt.tol : kVonNeumannTol;
    const double rr = mom.folded_r();
    double lead = mom.scale() * rr * coef.constant();
    if (p.n) lead -= 0.25 * vn_generating(s, 4.0 * rr * (1.0 - rr));

    constexpr double inf = std::numeric_limits<double>::infinity();
    const int cap = opt.i_max.value_or(kIMaxCap);
    // c_i leaves its geometric regime on the scale 1/(1 - tanh^2(2s)) = cosh^2(2s).
    const double ch = std::cosh(2.0 * s);
    const int min_terms = static_cast<int>(std::min<double>(kIMaxCap, std::max(16.0, 8.0 * ch * ch)));
    std::vector<double> corrected{0.0};  // corrected[i] = partial sum of i terms + tail model
    double acc = 0.0;
    double prev = 0.0;
    double err = inf;
    int i = 0;
    while (i < cap) {
        ++i;
        const double term = coef(i) * mom.deficit(i);
        acc += term;
        double tail = inf;
        if (term == 0.0) {
            tail = 0.0;
        } else if (i >= 2 && prev > term && term > 0.0) {
            const double p_hat = std::log(prev / term) / std::log(static_cast<double>(i) / (i - 1));
            if (p_hat > 1.0) tail = std::max(0.0, term * (i / (p_hat - 1.0) - 0.5 + p_hat / (12.0 * i)));
        }
        prev = term;
        corrected.push_back(acc + tail);
        // Drift against two earlier checkpoints; a single one can agree by
        // accident while the local exponent is still moving.
        const double now = corrected[static_cast<std::size_t>(i)];
        err = std::max(std::abs(now - corrected[static_cast<std::size_t>(i - std::max(1, i / 2))]),
                       std::abs(now - corrected[static_cast<std::size_t>(i - std::max(1, i / 4))]));
        if (!std::isfinite(err)) err = inf;
        if (!opt.i_max && i >= min_terms && err <= tol * std::abs(lead - corrected.back())) {
            return detail::finish(p, lead - corrected.back(), i, err);
        }
    }
    if (opt.i_max) {
        const double v = std::isfinite(corrected.back()) ? corrected.back() : acc;
        return detail::finish(p, lead - v, i, std::isfinite(err) ? err : std::abs(prev) * i);
    }
    throw TruncationError("von_neumann_average: series did not reach tol = " + std::to_string(tol) + " within " +
                              std::to_string(kIMaxCap) +
                              " terms; use the large-squeezing limit (`limits --regime large`) or "
                              "Monte-Carlo (`simulate`) instead",
                          lead - (std::isfinite(corrected.back()) ? corrected.back() : acc), err, i);
}

inline PageCurveValue von_neumann_average(ModeCount n, double s, double r, SeriesOptions opt = {}) {
    VonNeumannCoefficients coef(s);
    return von_neumann_average(n, s, r, coef, opt);
}

/// The same average through the defining series sum_i c_i (n G_i - H_i)
/// with exactly `terms` terms. Converges like 1/terms; used as a cross-check.
inline double von_neumann_average_direct(ModeCount n, double s, double r, int terms) {
    const detail::Moments mom{make_partition(n, r)};
    double acc = 0.0;
    for (int i = 1; i <= terms; ++i) acc += vn_coefficient(i, s) * mom.weight(i);
    return acc;
}

/// sum_i vn_coefficient(i, s) by Richardson extrapolation of the partial
/// sums at I = base, 2 base, ..., 2^levels base. The partial sums approach
/// the limit like a power series in 1/I. tail_estimate is the change made by
/// the last extrapolation step.
inline SeriesResult vn_coefficient_sum(double s, int base = 250, int levels = 4) {
    if (base < 1 || levels < 1) throw ValidationError("vn_coefficient_sum: base and levels must be >= 1");
    std::vector<double> partial;
    double acc = 0.0;
    int i = 0;
    for (int j = 0; j <= levels; ++j) {
        const int upto = base << j;
        while (i < upto) acc += vn_coefficient(++i, s);
        partial.push_back(acc);
    }
    // Neville table: row j, column c eliminates 1/I, ..., 1/I^c.
    std::vector<double> row = partial;
    double prev_best = row.back();
    double best = row.back();
    for (int c = 1; c <= levels; ++c) {
        const double f = std::ldexp(1.0, c);
        std::vector<double> next;
        for (std::size_t j = 1; j < row.size(); ++j) next.push_back((f * row[j] - row[j - 1]) / (f - 1.0));
        row = std::move(next);
        prev_best = best;
        best = row.back();
    }
    return {best, i, std::abs(best - prev_best)};
}

// ---------------------------------------------------------------------------
// Limits. Each returns the coefficient of the stated normalization.

/// s -> 0: E S_1 / (s^2 ln(1/s^2) n) -> r (1 - r).
inline double vn_small_s_limit(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("r must lie in [0, 1]");
    return r * (1.0 - r);
}

/// s -> infinity: E S_1 / (s n) -> 2 min(r, 1 - r).
inline double vn_large_s_limit(double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("r must lie in [0, 1]");
    return 2.0 * std::min(r, 1.0 - r);
}

/// s -> 0: E S_alpha / (s^2 n) -> alpha/(alpha-1) r (1 - r).
inline double renyi_small_s_limit(int alpha, double r) {
    if (alpha < 2) throw ValidationError("renyi_small_s_limit: integer alpha >= 2 required");
    return static_cast<double>(alpha) / (alpha - 1) * vn_small_s_limit(r);
}

/// s -> infinity: E S_alpha / (s n) -> 2 min(r, 1 - r).
inline double renyi_large_s_limit(int alpha, double r) {
    if (alpha < 2) throw ValidationError("renyi_large_s_limit: integer alpha >= 2 required");
    return vn_large_s_limit(r);
}

/// Leading order for small unequal squeezing: alpha/(alpha-1) r (1-r) sum_i s_i^2.
inline double renyi_unequal_small(int alpha, double r, std::span<const double> s_vec) {
    double ss = 0.0;
    for (double v : s_vec) {
        if (!std::isfinite(v)) throw ValidationError("renyi_unequal_small: non-finite squeezing");
        ss += v * v;
    }
    return renyi_small_s_limit(alpha, r) * ss;
}

// ---------------------------------------------------------------------------
// Query front end

struct PageCurveQuery {
    int alpha = 1;                                    ///< 1 = von Neumann
    std::variant<double, std::vector<double>> s = 0.0; ///< equal s, or per-mode s_i (leading order only)
    double r = 0.5;
    ModeCount n;                                      ///< nullopt = per-mode n -> infinity value
    std::optional<int> i_max;
    double tol = 0.0;                                 ///< 0 = default for the entropy
};

inline PageCurveValue evaluate(const PageCurveQuery& q) {
    if (q.alpha < 1) throw ValidationError("alpha must be >= 1");
    const SeriesOptions opt{q.tol, q.i_max};
    if (const auto* sv = std::get_if<std::vector<double>>(&q.s)) {
        if (q.alpha < 2) {
            throw ValidationError("per-mode squeezing vectors are supported for alpha >= 2 only");
        }
        const int n = static_cast<int>(sv->size());
        if (q.n && *q.n != n) throw ValidationError("s-vector length differs from n");
        const Partition p = make_partition(n, q.r);
        return detail::finish(p, renyi_unequal_small(q.alpha, p.r, *sv), 0, 0.0);
    }
    const double s = std::get<double>(q.s);
    if (q.alpha == 1) return von_neumann_average(q.n, s, q.r, opt);
    return renyi_average(q.alpha, q.n, s, q.r, opt);
}

}  // namespace gbs_page
