#include "hybridsm/linalg.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hsm {

SvdResult svd(const CMatrix& a) {
    if (a.size() == 0) {
        throw std::invalid_argument("svd: empty matrix");
    }
    Eigen::JacobiSVD<CMatrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) {
        throw std::runtime_error("svd: decomposition did not converge (Eigen info=" +
                                 std::to_string(static_cast<int>(dec.info())) + ")");
    }
    return SvdResult{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

CMatrix pinv(const CMatrix& a) {
    if (a.size() == 0) {
        throw std::invalid_argument("pinv: empty matrix");
    }
    SvdResult s = svd(a);
    const double cutoff = 1e-12 * (s.sigma.size() > 0 ? s.sigma(0) : 0.0);
    RVector inv_sigma = RVector::Zero(s.sigma.size());
    for (Eigen::Index i = 0; i < s.sigma.size(); ++i) {
        if (s.sigma(i) > cutoff && s.sigma(i) > 0.0) {
            inv_sigma(i) = 1.0 / s.sigma(i);
        }
    }
    return s.v * inv_sigma.asDiagonal() * s.u.adjoint();
}

CMatrix inv_sqrt_hermitian(const CMatrix& a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("inv_sqrt_hermitian: eigendecomposition failed");
    }
    const RVector& lam = es.eigenvalues();
    if (lam(0) <= 0.0) {
        throw std::domain_error("inv_sqrt_hermitian: matrix is not positive definite (min eigenvalue " +
                                std::to_string(lam(0)) + ")");
    }
    return es.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal() *
           es.eigenvectors().adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed), gen_(splitmix64(seed)) {}

Rng Rng::substream(std::uint64_t index) const {
    return Rng(splitmix64(seed_ ^ splitmix64(index + 1)));
}

double Rng::uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller on open-interval uniforms.
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("uniform_below: n must be positive");
    }
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = 0;
    do {
        x = gen_();
    } while (x >= limit);
    return x % n;
}

cx Rng::complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return cx(s * re, s * im);
}

CMatrix Rng::complex_gaussian(Eigen::Index rows, Eigen::Index cols, double variance) {
    if (variance <= 0.0) {
        throw std::invalid_argument("complex_gaussian: variance must be positive");
    }
    CMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            out(i, j) = complex_normal(variance);
        }
    }
    return out;
}

}  // namespace hsm
