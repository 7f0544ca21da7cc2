#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace hsm {

using cx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Thin SVD, A = U * diag(sigma) * V^H, singular values descending.
struct SvdResult {
    CMatrix u;
    RVector sigma;
    CMatrix v;
};

SvdResult svd(const CMatrix& a);

/// Moore-Penrose pseudo-inverse. Singular values below 1e-12 * sigma_max
/// are treated as zero (numerical rank).
CMatrix pinv(const CMatrix& a);

/// B such that B * A * B^H = I for Hermitian positive definite A.
/// Throws std::domain_error if the smallest eigenvalue is <= 0.
CMatrix inv_sqrt_hermitian(const CMatrix& a);

/// Kronecker product, (m*p) x (n*q).
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Seeded random stream with reproducible substreams. Gaussian variates use
/// an explicit Box-Muller transform so that identical seeds give bit-identical
/// sequences on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent stream derived from (seed, index); order of derivation
    /// does not matter.
    Rng substream(std::uint64_t index) const;

    /// Uniform in [0, 1).
    double uniform();

    /// Standard normal.
    double normal();

    /// Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n);

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cx complex_normal(double variance = 1.0);

    /// Matrix of i.i.d. complex_normal(variance) entries.
    CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance);

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace hsm
