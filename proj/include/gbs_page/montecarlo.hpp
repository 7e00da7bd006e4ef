#pragma once

// Monte-Carlo estimates over Haar-random interferometers: per-sample
// entropies, summary statistics, bootstrap intervals, and the moment
// covariances V_d that control the variance of the Renyi-2 entropy.
//
// Sample j of a run always uses the unitary haar_unitary(n, seed, j), so
// results do not depend on the number of worker threads or on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "entropy.hpp"
#include "errors.hpp"
#include "gaussian_state.hpp"
#include "rng_haar.hpp"
#include "symplectic.hpp"

namespace gbs_page {

using Squeezing = std::variant<double, std::vector<double>>;

struct ExperimentPlan {
    int n = 0;
    int k = 0;
    Squeezing squeezing = 0.0;
    std::vector<int> alphas{1};     ///< 1 = von Neumann
    int n_samples = 0;
    std::uint64_t master_seed = 0;
    bool emit_per_sample = true;    ///< keep SampleRecords in the result
    int moments = 0;                ///< also record Tr W^i for i <= moments (equal squeezing only)
    int threads = 1;

    double realized_r() const { return n > 0 ? static_cast<double>(k) / n : 0.0; }
};

/// k = round(r n).
inline int partition_size(int n, double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("r must lie in [0, 1]");
    return static_cast<int>(std::lround(r * n));
}

struct SampleRecord {
    std::uint64_t sample_index = 0;
    std::vector<double> entropies;  ///< aligned with plan.alphas
    std::vector<double> trW;        ///< Tr W^i, i = 1..plan.moments
};

struct AlphaSummary {
    int alpha = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< unbiased
    double std_error = 0.0;
};

struct Summary {
    std::vector<AlphaSummary> per_alpha;
    int n_samples = 0;
    int k = 0;
    double realized_r = 0.0;

    const AlphaSummary& at(int alpha) const {
        for (const auto& a : per_alpha) {
            if (a.alpha == alpha) return a;
        }
        throw ValidationError("Summary: alpha " + std::to_string(alpha) + " was not requested");
    }
};

struct ExperimentResult {
    std::vector<SampleRecord> samples;  ///< empty unless emit_per_sample
    Summary summary;
};

/// Mean and unbiased variance of a sample, folded in order.
struct Moments2 {
    double mean = 0.0;
    double variance = 0.0;
};

inline Moments2 mean_variance(std::span<const double> x) {
    Moments2 out;
    if (x.empty()) return out;
    double acc = 0.0;
    for (double v : x) acc += v;
    out.mean = acc / static_cast<double>(x.size());
    if (x.size() < 2) return out;
    double ss = 0.0;
    for (double v : x) ss += (v - out.mean) * (v - out.mean);
    out.variance = ss / static_cast<double>(x.size() - 1);
    return out;
}

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {

/// Runs fn(j) for j in [0, count) on `threads` workers and stores results by
/// index. The first failure (lowest index among those attempted) stops the
/// run and is rethrown as SampleError.
template <class T, class Fn>
std::vector<T> parallel_indexed(int count, int threads, Fn fn) {
    std::vector<T> out(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    int fail_index = std::numeric_limits<int>::max();
    std::string fail_what;

    auto worker = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            const int j = next.fetch_add(1);
            if (j >= count) return;
            try {
                out[static_cast<std::size_t>(j)] = fn(j);
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                if (j < fail_index) {
                    fail_index = j;
                    fail_what = e.what();
                }
                failed = true;
            }
        }
    };
    const int nt = std::max(1, std::min(resolve_threads(threads), count));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nt));
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed) throw SampleError(fail_what, static_cast<std::uint64_t>(fail_index));
    return out;
}

inline void validate_plan(const ExperimentPlan& plan) {
    if (plan.n < 1) throw ValidationError("ExperimentPlan: n must be >= 1");
    if (plan.k < 0 || plan.k > plan.n) throw ValidationError("ExperimentPlan: k must lie in [0, n]");
    if (plan.n_samples < 1) throw ValidationError("ExperimentPlan: n_samples must be >= 1");
    if (plan.alphas.empty()) throw ValidationError("ExperimentPlan: no alpha requested");
    for (int a : plan.alphas) {
        if (a < 1) throw ValidationError("ExperimentPlan: alpha must be >= 1");
    }
    if (plan.moments < 0) throw ValidationError("ExperimentPlan: moments must be >= 0");
    if (const auto* sv = std::get_if<std::vector<double>>(&plan.squeezing)) {
        if (static_cast<int>(sv->size()) != plan.n) {
            throw ValidationError("ExperimentPlan: squeezing vector has " + std::to_string(sv->size()) +
                                  " entries for n = " + std::to_string(plan.n));
        }
        if (plan.moments > 0) throw ValidationError("ExperimentPlan: W moments need equal squeezing");
    } else if (!std::isfinite(std::get<double>(plan.squeezing))) {
        throw ValidationError("ExperimentPlan: non-finite squeezing");
    }
}

inline CovarianceMatrix reduced_covariance(const UnitaryMatrix& u, const Squeezing& sq, int k) {
    if (k == 0) return CovarianceMatrix{};
    if (const auto* s = std::get_if<double>(&sq)) return reduced_covariance_equal(u, *s, k);
    return reduced_covariance_general(u, SqueezingConfig(std::get<std::vector<double>>(sq)), k);
}

}  // namespace detail

inline SampleRecord simulate_sample(const ExperimentPlan& plan, std::uint64_t index) {
    const UnitaryMatrix u = haar_unitary(plan.n, plan.master_seed, index);
    const SymplecticSpectrum nu = symplectic_eigenvalues(detail::reduced_covariance(u, plan.squeezing, plan.k));
    SampleRecord rec;
    rec.sample_index = index;
    rec.entropies.reserve(plan.alphas.size());
    for (int a : plan.alphas) rec.entropies.push_back(entropy(nu, a));
    if (plan.moments > 0) {
        rec.trW = plan.k > 0 ? trW_moments(u, plan.k, plan.moments)
                             : std::vector<double>(static_cast<std::size_t>(plan.moments), 0.0);
    }
    return rec;
}

inline Summary summarize(const ExperimentPlan& plan, std::span<const SampleRecord> recs) {
    Summary sm;
    sm.n_samples = static_cast<int>(recs.size());
    sm.k = plan.k;
    sm.realized_r = plan.realized_r();
    std::vector<double> col(recs.size());
    for (std::size_t a = 0; a < plan.alphas.size(); ++a) {
        for (std::size_t j = 0; j < recs.size(); ++j) col[j] = recs[j].entropies[a];
        const Moments2 mv = mean_variance(col);
        sm.per_alpha.push_back({plan.alphas[a], mv.mean, mv.variance,
                                std::sqrt(mv.variance / static_cast<double>(recs.size()))});
    }
    return sm;
}

inline ExperimentResult run_experiment(const ExperimentPlan& plan) {
    detail::validate_plan(plan);
    auto recs = detail::parallel_indexed<SampleRecord>(
        plan.n_samples, plan.threads, [&](int j) { return simulate_sample(plan, static_cast<std::uint64_t>(j)); });
    ExperimentResult out;
    out.summary = summarize(plan, recs);
    if (plan.emit_per_sample) out.samples = std::move(recs);
    return out;
}

/// Entropy of a column of per-sample values for one alpha.
inline std::vector<double> entropy_column(const ExperimentResult& res, std::span<const int> alphas, int alpha) {
    const auto it = std::find(alphas.begin(), alphas.end(), alpha);
    if (it == alphas.end()) throw ValidationError("alpha was not requested");
    const auto a = static_cast<std::size_t>(it - alphas.begin());
    std::vector<double> out;
    out.reserve(res.samples.size());
    for (const auto& r : res.samples) out.push_back(r.entropies[a]);
    return out;
}

/// Squeezing strengths s_i ~ U[lo, hi], drawn from the squeezing stream.
inline std::vector<double> draw_uniform_squeezing(int n, double lo, double hi, std::uint64_t master_seed) {
    if (n < 1) throw ValidationError("draw_uniform_squeezing: n must be >= 1");
    if (!(lo <= hi)) throw ValidationError("draw_uniform_squeezing: need lo <= hi");
    auto engine = make_engine(master_seed, Stream::squeezing, 0);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> s(static_cast<std::size_t>(n));
    for (double& v : s) v = dist(engine);
    return s;
}

// ---------------------------------------------------------------------------
// Purity

/// Largest |S_alpha(first k) - S_alpha(last n-k)| over the requested alphas,
/// both reductions taken from one global covariance matrix.
inline double purity_symmetry_defect(const UnitaryMatrix& u, const Squeezing& sq, int k,
                                     std::span<const int> alphas) {
    const int n = u.modes();
    if (k < 0 || k > n) throw ValidationError("purity_symmetry_check: k must lie in [0, n]");
    const SqueezingConfig cfg = std::holds_alternative<double>(sq)
                                    ? SqueezingConfig::equal(n, std::get<double>(sq))
                                    : SqueezingConfig(std::get<std::vector<double>>(sq));
    const CovarianceMatrix sigma = full_covariance_general(u, cfg);
    const auto a_modes = first_modes(k);
    const auto b_modes = last_modes(n, k);
    const SymplecticSpectrum nu_a = symplectic_eigenvalues(reduce_modes(sigma, a_modes));
    const SymplecticSpectrum nu_b = symplectic_eigenvalues(reduce_modes(sigma, b_modes));
    double worst = 0.0;
    for (int a : alphas) worst = std::max(worst, std::abs(entropy(nu_a, a) - entropy(nu_b, a)));
    return worst;
}

inline bool purity_symmetry_check(const UnitaryMatrix& u, const Squeezing& sq, int k,
                                  std::span<const int> alphas, double tol = 1e-8) {
    return purity_symmetry_defect(u, sq, k, alphas) <= tol;
}

// ---------------------------------------------------------------------------
// Bootstrap

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
    bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

inline constexpr int kBootstrapResamples = 2000;

/// Percentile bootstrap interval of stat(rows) at the given two-sided level.
/// Resample b draws its indices from the bootstrap stream at index
/// (stream_index << 32) + b.
template <class Row, class Stat>
Interval bootstrap_ci(std::span<const Row> rows, Stat stat, std::uint64_t master_seed, std::uint64_t stream_index = 0,
                      int resamples = kBootstrapResamples, double level = 0.95) {
    if (rows.empty()) throw ValidationError("bootstrap_ci: empty sample");
    if (resamples < 2) throw ValidationError("bootstrap_ci: need at least two resamples");
    const std::size_t m = rows.size();
    std::vector<double> stats(static_cast<std::size_t>(resamples));
    std::vector<Row> draw(m);
    for (int b = 0; b < resamples; ++b) {
        auto engine = make_engine(master_seed, Stream::bootstrap, (stream_index << 32) + static_cast<std::uint64_t>(b));
        std::uniform_int_distribution<std::size_t> pick(0, m - 1);
        for (std::size_t j = 0; j < m; ++j) draw[j] = rows[pick(engine)];
        stats[static_cast<std::size_t>(b)] = stat(std::span<const Row>(draw));
    }
    std::sort(stats.begin(), stats.end());
    const double tail = 0.5 * (1.0 - level);
    auto quantile = [&](double p) {
        const double pos = p * (resamples - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, stats.size() - 1);
        return stats[lo] + (pos - lo) * (stats[hi] - stats[lo]);
    };
    return {quantile(tail), quantile(1.0 - tail)};
}

inline double sample_variance(std::span<const double> x) { return mean_variance(x).variance; }

// ---------------------------------------------------------------------------
// Variance diagnostics

struct VarianceEstimate {
    int n = 0;
    double variance = 0.0;
    Interval ci;
    double mean = 0.0;
};

/// Unbiased variance of S_alpha at each n, with 95% bootstrap intervals.
inline std::vector<VarianceEstimate> variance_trend(std::span<const int> ns, double r, double s, int alpha,
                                                    int n_samples, std::uint64_t seed, int threads = 1) {
    if (alpha < 2) throw ValidationError("variance_trend: alpha >= 2 required");
    std::vector<VarianceEstimate> out;
    for (std::size_t j = 0; j < ns.size(); ++j) {
        ExperimentPlan plan;
        plan.n = ns[j];
        plan.k = partition_size(ns[j], r);
        plan.squeezing = s;
        plan.alphas = {alpha};
        plan.n_samples = n_samples;
        plan.master_seed = seed;
        plan.threads = threads;
        const auto res = run_experiment(plan);
        const auto col = entropy_column(res, plan.alphas, alpha);
        VarianceEstimate v;
        v.n = ns[j];
        v.mean = res.summary.per_alpha.front().mean;
        v.variance = res.summary.per_alpha.front().variance;
        v.ci = bootstrap_ci<double>(col, sample_variance, seed, j);
        out.push_back(v);
    }
    return out;
}

/// V_d = sum_{l=1}^{d-1} Cov(Tr W^l, Tr W^{d-l}) / (l (d-l)), d = 2..d_max, from
/// rows of moments (row j holds Tr W^1..Tr W^{d_max-1} of sample j).
/// Entry d-2 of the result is V_d.
inline std::vector<double> vd_from_moments(std::span<const std::vector<double>> rows, int d_max) {
    if (d_max < 2) throw ValidationError("estimate_Vd: d_max must be >= 2");
    const std::size_t m = rows.size();
    const int width = d_max - 1;
    std::vector<double> mean(static_cast<std::size_t>(width), 0.0);
    for (const auto& row : rows) {
        for (int l = 0; l < width; ++l) mean[static_cast<std::size_t>(l)] += row[static_cast<std::size_t>(l)];
    }
    for (double& v : mean) v /= static_cast<double>(m);
    std::vector<double> cov(static_cast<std::size_t>(width * width), 0.0);
    if (m >= 2) {
        for (const auto& row : rows) {
            for (int a = 0; a < width; ++a) {
                const double da = row[static_cast<std::size_t>(a)] - mean[static_cast<std::size_t>(a)];
                for (int b = 0; b < width; ++b) {
                    cov[static_cast<std::size_t>(a * width + b)] +=
                        da * (row[static_cast<std::size_t>(b)] - mean[static_cast<std::size_t>(b)]);
                }
            }
        }
        for (double& c : cov) c /= static_cast<double>(m - 1);
    }
    std::vector<double> vd;
    for (int d = 2; d <= d_max; ++d) {
        double acc = 0.0;
        for (int l = 1; l < d; ++l) {
            acc += cov[static_cast<std::size_t>((l - 1) * width + (d - l - 1))] / (static_cast<double>(l) * (d - l));
        }
        vd.push_back(acc);
    }
    return vd;
}

/// Per-sample Tr W^i, i = 1..i_max, at k = round(r n).
inline std::vector<std::vector<double>> sample_trW(int n, double r, int i_max, int n_samples, std::uint64_t seed,
                                                   int threads = 1) {
    if (n < 1 || n_samples < 1 || i_max < 1) throw ValidationError("sample_trW: n, n_samples, i_max must be >= 1");
    const int k = partition_size(n, r);
    return detail::parallel_indexed<std::vector<double>>(n_samples, threads, [&](int j) {
        if (k == 0) return std::vector<double>(static_cast<std::size_t>(i_max), 0.0);
        return trW_moments(haar_unitary(n, seed, static_cast<std::uint64_t>(j)), k, i_max);
    });
}

struct VdEstimate {
    std::vector<double> v;                     ///< V_2..V_{d_max}
    std::vector<std::vector<double>> moments;  ///< per-sample rows, for resampling
};

inline VdEstimate estimate_Vd(int d_max, int n, double r, int n_samples, std::uint64_t seed, int threads = 1) {
    if (d_max < 2) throw ValidationError("estimate_Vd: d_max must be >= 2");
    VdEstimate out;
    out.moments = sample_trW(n, r, d_max - 1, n_samples, seed, threads);
    out.v = vd_from_moments(out.moments, d_max);
    return out;
}

/// (1/4) sum_d tanh^{2d}(2s) V_d, the variance of S_2 implied by V_2..V_{d_max}.
inline double renyi2_variance_from_vd(std::span<const double> vd, double s) {
    const double t = std::tanh(2.0 * s);
    const double q = t * t;
    double acc = 0.0;
    double pw = q;
    for (std::size_t j = 0; j < vd.size(); ++j) {
        pw *= q;  // q^{d}, d = j + 2
        acc += pw * vd[j];
    }
    return 0.25 * acc;
}

/// Fraction of values within relative distance eps of their mean.
inline double typical_fraction(std::span<const double> x, double eps) {
    const double mean = mean_variance(x).mean;
    if (x.empty() || mean == 0.0) return 0.0;
    std::size_t inside = 0;
    for (double v : x) inside += std::abs(v / mean - 1.0) < eps ? 1 : 0;
    return static_cast<double>(inside) / static_cast<double>(x.size());
}

}  // namespace gbs_page
