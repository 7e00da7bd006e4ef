#pragma once

// Covariance matrices of squeezed-vacuum inputs after a passive linear-optical
// unitary. Conventions used throughout the library:
//   * xxpp ordering: row i is x_i, row m + i is p_i for an m-mode state;
//   * vacuum covariance is the identity (no factors of 1/2 or hbar);
//   * Omega = [[0, I], [-I, 0]].

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "rng_haar.hpp"

namespace gbs_page {

/// Per-mode squeezing strengths s_i of the input state.
class SqueezingConfig {
public:
    SqueezingConfig() = default;
    explicit SqueezingConfig(std::vector<double> s) : s_(std::move(s)) {
        if (s_.empty()) throw ValidationError("SqueezingConfig: need at least one mode");
        for (double v : s_) {
            if (!std::isfinite(v)) throw ValidationError("SqueezingConfig: non-finite squeezing");
        }
    }

    static SqueezingConfig equal(int n, double s) {
        if (n < 1) throw ValidationError("SqueezingConfig::equal: n must be >= 1");
        return SqueezingConfig(std::vector<double>(static_cast<std::size_t>(n), s));
    }

    int modes() const noexcept { return static_cast<int>(s_.size()); }
    std::span<const double> strengths() const noexcept { return s_; }

    bool is_equal() const noexcept {
        return std::all_of(s_.begin(), s_.end(), [&](double v) { return v == s_.front(); });
    }

    double sum_of_squares() const noexcept {
        double acc = 0.0;
        for (double v : s_) acc += v * v;
        return acc;
    }

private:
    std::vector<double> s_;
};

inline Eigen::MatrixXd symplectic_form(int modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
    omega.topRightCorner(modes, modes).setIdentity();
    omega.bottomLeftCorner(modes, modes) = -Eigen::MatrixXd::Identity(modes, modes);
    return omega;
}

/// 2m x 2m real symmetric covariance matrix in xxpp ordering. An empty
/// (m = 0) matrix is allowed and represents the trivial subsystem.
class CovarianceMatrix {
public:
    static constexpr double kSymmetryTol = 1e-10;

    CovarianceMatrix() = default;
    explicit CovarianceMatrix(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
        if (sigma_.rows() != sigma_.cols() || sigma_.rows() % 2 != 0) {
            throw ValidationError("CovarianceMatrix: expected an even-dimensional square matrix");
        }
        if (!sigma_.allFinite()) throw ValidationError("CovarianceMatrix: non-finite entry");
        if (sigma_.size() > 0) {
            const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
            const double asym = (sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff();
            if (asym > kSymmetryTol * scale) {
                throw ValidationError("CovarianceMatrix: matrix is not symmetric");
            }
        }
    }

    int modes() const noexcept { return static_cast<int>(sigma_.rows() / 2); }
    const Eigen::MatrixXd& matrix() const noexcept { return sigma_; }

private:
    Eigen::MatrixXd sigma_;
};

/// M = [[P Re(conj(U) U^dag) P^T,  P Im(conj(U) U^dag) P^T],
///      [P Im(conj(U) U^dag) P^T, -P Re(conj(U) U^dag) P^T]]
/// for the truncation P onto the first k modes. The reduced covariance of the
/// equally squeezed state is cosh(2s) I + sinh(2s) M.
class MMatrix {
public:
    explicit MMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {}

    int modes() const noexcept { return static_cast<int>(m_.rows() / 2); }
    const Eigen::MatrixXd& matrix() const noexcept { return m_; }

private:
    Eigen::MatrixXd m_;
};

namespace detail {

inline void check_partition(int n, int k, const char* who) {
    if (k < 1 || k > n) {
        throw ValidationError(std::string(who) + ": k must satisfy 1 <= k <= n (k = " +
                              std::to_string(k) + ", n = " + std::to_string(n) + ")");
    }
}

/// Top-left k x k block of U U^T. Only the first k rows of U contribute.
inline Eigen::MatrixXcd uut_block(const UnitaryMatrix& u, int k) {
    const auto rows = u.matrix().topRows(k);
    return rows * rows.transpose();
}

}  // namespace detail

inline MMatrix build_M(const UnitaryMatrix& u, int k) {
    detail::check_partition(u.modes(), k, "build_M");
    // conj(U) U^dag = conj(U U^T), so its real part is Re(U U^T) and its
    // imaginary part is -Im(U U^T).
    const Eigen::MatrixXcd c = detail::uut_block(u, k);
    const Eigen::MatrixXd re = c.real();
    const Eigen::MatrixXd im = -c.imag();

    Eigen::MatrixXd m(2 * k, 2 * k);
    m.topLeftCorner(k, k) = re;
    m.topRightCorner(k, k) = im;
    m.bottomLeftCorner(k, k) = im;
    m.bottomRightCorner(k, k) = -re;
    // U U^T is complex symmetric, so M is symmetric up to rounding; make it exact.
    return MMatrix(0.5 * (m + m.transpose()));
}

inline CovarianceMatrix reduced_covariance_equal(const UnitaryMatrix& u, double s, int k) {
    if (!std::isfinite(s)) throw ValidationError("reduced_covariance_equal: non-finite s");
    const MMatrix m = build_M(u, k);
    Eigen::MatrixXd sigma = std::sinh(2.0 * s) * m.matrix();
    sigma.diagonal().array() += std::cosh(2.0 * s);
    return CovarianceMatrix(std::move(sigma));
}

/// O(U) = [[Re U, -Im U], [Im U, Re U]], the orthogonal symplectic image of U.
inline Eigen::MatrixXd passive_symplectic(const UnitaryMatrix& u) {
    const int n = u.modes();
    const Eigen::MatrixXd re = u.matrix().real();
    const Eigen::MatrixXd im = u.matrix().imag();
    Eigen::MatrixXd o(2 * n, 2 * n);
    o.topLeftCorner(n, n) = re;
    o.topRightCorner(n, n) = -im;
    o.bottomLeftCorner(n, n) = im;
    o.bottomRightCorner(n, n) = re;
    return o;
}

namespace detail {

inline Eigen::VectorXd squeezed_diagonal(const SqueezingConfig& cfg) {
    const int n = cfg.modes();
    Eigen::VectorXd d(2 * n);
    for (int i = 0; i < n; ++i) {
        const double s = cfg.strengths()[static_cast<std::size_t>(i)];
        d(i) = std::exp(2.0 * s);
        d(n + i) = std::exp(-2.0 * s);
    }
    return d;
}

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

}  // namespace detail

/// sigma = O(U) D O(U)^T with D = diag(e^{2 s_i}) (+) diag(e^{-2 s_i}).
/// With equal squeezing its first-k reduction equals
/// reduced_covariance_equal(conj(U), s, k); Haar measure is invariant under
/// conjugation so both conventions describe the same ensemble.
inline CovarianceMatrix full_covariance_general(const UnitaryMatrix& u, const SqueezingConfig& cfg) {
    if (cfg.modes() != u.modes()) {
        throw ValidationError("full_covariance_general: squeezing config has " +
                              std::to_string(cfg.modes()) + " modes, unitary has " +
                              std::to_string(u.modes()));
    }
    const Eigen::MatrixXd o = passive_symplectic(u);
    const Eigen::VectorXd d = detail::squeezed_diagonal(cfg);
    return CovarianceMatrix(detail::symmetrize(o * d.asDiagonal() * o.transpose()));
}

inline CovarianceMatrix reduce_modes(const CovarianceMatrix& sigma, std::span<const int> mode_set) {
    const int m = sigma.modes();
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    for (int idx : mode_set) {
        if (idx < 0 || idx >= m) {
            throw ValidationError("reduce_modes: mode index " + std::to_string(idx) + " out of range");
        }
        if (seen[static_cast<std::size_t>(idx)]) {
            throw ValidationError("reduce_modes: duplicate mode index " + std::to_string(idx));
        }
        seen[static_cast<std::size_t>(idx)] = 1;
    }
    const int k = static_cast<int>(mode_set.size());
    std::vector<int> rows;
    rows.reserve(2 * static_cast<std::size_t>(k));
    for (int idx : mode_set) rows.push_back(idx);
    for (int idx : mode_set) rows.push_back(m + idx);
    return CovarianceMatrix(sigma.matrix()(rows, rows));
}

inline std::vector<int> first_modes(int k) {
    std::vector<int> out(static_cast<std::size_t>(std::max(k, 0)));
    for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = i;
    return out;
}

inline std::vector<int> last_modes(int n, int k) {
    std::vector<int> out;
    for (int i = k; i < n; ++i) out.push_back(i);
    return out;
}

/// First-k reduction of full_covariance_general without forming the full
/// 2n x 2n matrix.
inline CovarianceMatrix reduced_covariance_general(const UnitaryMatrix& u, const SqueezingConfig& cfg, int k) {
    detail::check_partition(u.modes(), k, "reduced_covariance_general");
    if (cfg.modes() != u.modes()) {
        throw ValidationError("reduced_covariance_general: dimension mismatch");
    }
    const int n = u.modes();
    const auto top = u.matrix().topRows(k);
    Eigen::MatrixXd ok(2 * k, 2 * n);
    ok.topLeftCorner(k, n) = top.real();
    ok.topRightCorner(k, n) = -top.imag();
    ok.bottomLeftCorner(k, n) = top.imag();
    ok.bottomRightCorner(k, n) = top.real();
    const Eigen::VectorXd d = detail::squeezed_diagonal(cfg);
    return CovarianceMatrix(detail::symmetrize(ok * d.asDiagonal() * ok.transpose()));
}

/// Dense n x n W = Pi U conj(U)^dag Pi conj(U) U^dag Pi. Reference
/// implementation; the pipeline works on the k x k block instead.
inline Eigen::MatrixXcd build_W(const UnitaryMatrix& u, int k) {
    detail::check_partition(u.modes(), k, "build_W");
    const int n = u.modes();
    Eigen::MatrixXcd pi = Eigen::MatrixXcd::Zero(n, n);
    pi.topLeftCorner(k, k).setIdentity();
    const Eigen::MatrixXcd& m = u.matrix();
    const Eigen::MatrixXcd ubar = m.conjugate();
    return pi * m * ubar.adjoint() * pi * ubar * m.adjoint() * pi;
}

/// Nonzero part of the spectrum of W, ascending, clamped into [0, 1].
/// W restricted to the first k modes is C C^dag with C the leading k x k block
/// of U U^T.
inline Eigen::VectorXd w_eigenvalues(const UnitaryMatrix& u, int k) {
    detail::check_partition(u.modes(), k, "w_eigenvalues");
    const Eigen::MatrixXcd c = detail::uut_block(u, k);
    const Eigen::MatrixXcd w = c * c.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("w_eigenvalues: eigensolver failed");
    return es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
}

/// Tr(W^i) for i = 1..i_max, from one Hermitian eigensolve.
inline std::vector<double> trW_moments(const UnitaryMatrix& u, int k, int i_max) {
    if (i_max < 1) throw ValidationError("trW_moments: i_max must be >= 1");
    const Eigen::VectorXd w = w_eigenvalues(u, k);
    std::vector<double> out(static_cast<std::size_t>(i_max), 0.0);
    Eigen::VectorXd p = w;
    for (int i = 0; i < i_max; ++i) {
        out[static_cast<std::size_t>(i)] = p.sum();
        p = p.cwiseProduct(w);
    }
    return out;
}

}  // namespace gbs_page
