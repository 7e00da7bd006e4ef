#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "gaussian_state.hpp"

namespace gbs_page {

/// Symplectic eigenvalues nu_1 >= nu_2 >= ... >= 1 of a covariance matrix.
class SymplecticSpectrum {
public:
    /// Values within this distance below one are rounded up to exactly one.
    static constexpr double kClampWindow = 1e-6;

    SymplecticSpectrum() = default;
    explicit SymplecticSpectrum(std::vector<double> nu) : nu_(std::move(nu)) {
        for (double& v : nu_) {
            if (!std::isfinite(v)) throw NumericalError("SymplecticSpectrum: non-finite value");
            if (v < 1.0 - kClampWindow) {
                throw NumericalError("SymplecticSpectrum: eigenvalue " + std::to_string(v) +
                                     " below 1 (unphysical covariance matrix)");
            }
            v = std::max(v, 1.0);
        }
        std::sort(nu_.begin(), nu_.end(), std::greater<>());
    }

    std::span<const double> values() const& noexcept { return nu_; }
    // On a temporary, hand the storage over so `for (v : f().values())` is safe.
    std::vector<double> values() && noexcept { return std::move(nu_); }
    std::size_t size() const noexcept { return nu_.size(); }
    double operator[](std::size_t j) const { return nu_[j]; }

    /// Spectrum of the union of two subsystems.
    friend SymplecticSpectrum concat(const SymplecticSpectrum& a, const SymplecticSpectrum& b) {
        std::vector<double> all(a.nu_);
        all.insert(all.end(), b.nu_.begin(), b.nu_.end());
        return SymplecticSpectrum(std::move(all));
    }

private:
    std::vector<double> nu_;
};

/// Symplectic eigenvalues of sigma, i.e. the positive half of the spectrum
/// of i Omega sigma.
///
/// Route: Cholesky sigma = L L^T, then A = L^T Omega L is real antisymmetric
/// and similar to Omega sigma, so its eigenvalues are +-i nu_j. A^T A is
/// symmetric positive semidefinite with eigenvalues nu_j^2, each twice.
/// One symmetric eigensolve; eigenvalue pairs are averaged before the
/// square root. A failed Cholesky means sigma is not positive definite,
/// which no physical covariance matrix can be.
inline SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& sigma) {
    const int m = sigma.modes();
    if (m == 0) return SymplecticSpectrum{};

    Eigen::LLT<Eigen::MatrixXd> llt(sigma.matrix());
    if (llt.info() != Eigen::Success) {
        throw NumericalError("symplectic_eigenvalues: covariance matrix is not positive definite");
    }
    const Eigen::MatrixXd l = llt.matrixL();
    // L^T Omega L without materializing Omega: Omega L = [L_p; -L_x].
    Eigen::MatrixXd omega_l(2 * m, 2 * m);
    omega_l.topRows(m) = l.bottomRows(m);
    omega_l.bottomRows(m) = -l.topRows(m);
    const Eigen::MatrixXd a = l.transpose() * omega_l;
    const Eigen::MatrixXd ata = a.transpose() * a;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ata, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("symplectic_eigenvalues: eigensolver failed");
    const Eigen::VectorXd& ev = es.eigenvalues();  // ascending

    std::vector<double> nu(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const double sq = 0.5 * (ev(2 * j) + ev(2 * j + 1));
        nu[static_cast<std::size_t>(j)] = std::sqrt(std::max(sq, 0.0));
    }
    return SymplecticSpectrum(std::move(nu));
}

}  // namespace gbs_page
