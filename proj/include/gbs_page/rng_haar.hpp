#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "errors.hpp"

namespace gbs_page {

/// splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Independent random streams are addressed by (master seed, stream, index).
/// Streams keep unrelated consumers (unitaries, bootstrap, squeezing draws)
/// from sharing bits even when they use the same master seed and index.
enum class Stream : std::uint64_t {
    unitary = 0x48414152ULL,    // "HAAR"
    bootstrap = 0x424f4f54ULL,  // "BOOT"
    squeezing = 0x53515a45ULL,  // "SQZE"
};

/// Derives the 64-bit engine seed for one (master seed, stream, index)
/// triple. A pure function of its arguments, so samples can be generated in
/// any order and on any number of workers.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, Stream stream,
                                    std::uint64_t index) noexcept {
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ static_cast<std::uint64_t>(stream));
    h = mix64(h ^ mix64(index));
    return h;
}

inline std::mt19937_64 make_engine(std::uint64_t master_seed, Stream stream,
                                   std::uint64_t index) {
    const std::uint64_t s = derive_seed(master_seed, stream, index);
    std::seed_seq seq{static_cast<std::uint32_t>(s),
                      static_cast<std::uint32_t>(s >> 32)};
    return std::mt19937_64(seq);
}

/// n x n unitary matrix. Constructed only by haar_unitary or from a matrix
/// the caller vouches for (tests use identity and hand-built beamsplitters).
class UnitaryMatrix {
public:
    UnitaryMatrix() = default;
    explicit UnitaryMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0) {
            throw ValidationError("UnitaryMatrix: expected a non-empty square matrix");
        }
    }

    static UnitaryMatrix identity(int n) {
        if (n < 1) throw ValidationError("UnitaryMatrix::identity: n must be >= 1");
        return UnitaryMatrix(Eigen::MatrixXcd::Identity(n, n));
    }

    int modes() const noexcept { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& matrix() const noexcept { return m_; }

    UnitaryMatrix conjugate() const { return UnitaryMatrix(m_.conjugate()); }

    /// max_ab |(U^dagger U - I)_ab|
    double unitarity_defect() const {
        const auto n = m_.rows();
        return (m_.adjoint() * m_ - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    }

private:
    Eigen::MatrixXcd m_;
};

/// Fills an n x n matrix with i.i.d. standard complex Gaussians
/// (E|z|^2 = 1), i.e. a Ginibre matrix.
inline Eigen::MatrixXcd ginibre(int n, std::mt19937_64& engine) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd z(n, n);
    // Column-major fill order is part of the reproducibility contract.
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double re = normal(engine);
            const double im = normal(engine);
            z(i, j) = std::complex<double>(re * scale, im * scale);
        }
    }
    return z;
}

/// Haar-distributed unitary for sample `sample_index` of a run seeded with
/// `master_seed`. Ginibre matrix, Householder QR, then each column of Q is
/// multiplied by the phase of the matching diagonal entry of R; without that
/// correction the QR output is not Haar distributed.
inline UnitaryMatrix haar_unitary(int n, std::uint64_t master_seed,
                                  std::uint64_t sample_index) {
    if (n < 1) throw ValidationError("haar_unitary: n must be >= 1");
    auto engine = make_engine(master_seed, Stream::unitary, sample_index);
    Eigen::MatrixXcd z = ginibre(n, engine);

    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd& r = qr.matrixQR();
    for (int j = 0; j < n; ++j) {
        const std::complex<double> d = r(j, j);
        const double mag = std::abs(d);
        // A zero pivot has probability zero; keep the column as is if it happens.
        if (mag > 0.0) q.col(j) *= d / mag;
    }
    return UnitaryMatrix(std::move(q));
}

}  // namespace gbs_page
