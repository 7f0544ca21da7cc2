#pragma once

#include "hybridsm/model.hpp"

#include <utility>
#include <vector>

namespace hsm {

enum class Side { Bob, Eve };

/// Quadratic-form kernels of the pairwise-error exponents plus the candidate
/// structure needed to re-evaluate them at any composite precoder.
struct AsrContext {
    CMatrix a_h;   ///< H^H W_b Omega_B^-1 W_b^H H
    CMatrix a_g;   ///< G^H W_e Omega_E^-1 W_e^H G
    CMatrix m_b;   ///< Omega_B^-1/2 W_b^H H (whitened effective channel)
    CMatrix m_e;
    double scale = 0.0;  ///< beta * P / 4
    std::vector<int> active;  ///< selected subarray indices
    std::vector<cx> symbols;
    int n_aa = 0;
    CVector p;  ///< composite precoder the context was built at

    int candidate_count() const {
        return static_cast<int>(active.size() * symbols.size());
    }
};

AsrContext build_asr_context(const Instance& inst);

/// Sum of pairwise exponentials over all ordered candidate pairs, evaluated
/// at an arbitrary composite precoder.
double kappa_at(const AsrContext& ctx, const CVector& p, Side side);

/// kappa at the context's own precoder.
double kappa(const AsrContext& ctx, Side side);

/// 2*log2(N_t*M) - log2(kappa).
double cutoff_rate(const AsrContext& ctx, Side side);

/// Approximate secrecy rate log2(kappa_E) - log2(kappa_B); may be negative.
double asr(const AsrContext& ctx);
double asr_at(const AsrContext& ctx, const CVector& p);

/// Per-subarray-pair kernels of the factored kappa sums. Pair order is
/// (m outer, m' inner) over the selection; symbol kernels are indexed
/// k * M + k'.
struct PairKernels {
    struct Pair {
        int m = 0;
        int m_prime = 0;
        int dim = 0;  ///< N_AA when m == m', else 2*N_AA
        std::vector<CMatrix> b;
        std::vector<CMatrix> e;
    };
    std::vector<Pair> pairs;
    int m_order = 0;
};

PairKernels build_pair_kernels(const Instance& inst);

/// q_{m,m'}: block m of p for m == m', otherwise blocks m and m' stacked.
CVector stacked_pair_block(const CVector& p, int m, int m_prime, int n_aa);

/// ASR computed from the subarray-factored kappa sums; identical in value
/// to asr() on the same instance.
double asr_factored(const SystemConfig& cfg, const CVector& p, const PairKernels& kernels);

/// Jensen surrogate of the factored ASR (the consensus objective).
double asr_jensen_lower(const SystemConfig& cfg, const CVector& p, const PairKernels& kernels);

struct SrEstimate {
    double asr = 0.0;       ///< cut-off-rate approximation at the same instance
    double sr_exact = 0.0;  ///< [I(x;y_b) - I(x;y_e)]^+, Monte-Carlo estimate
    double std_err = 0.0;
    int n_noise_samples = 0;
};

/// Monte-Carlo mutual-information estimate of the exact secrecy rate using
/// whitened noise samples shared between the Bob and Eve estimators.
SrEstimate exact_sr_monte_carlo(const Instance& inst, int n_noise, Rng& rng);

/// SINR at Bob and the corresponding Eve-side ratio with subarray i active,
/// AN expectation replaced by its covariance trace.
std::pair<double, double> sinr_ansnr(const Instance& inst, int i);

/// Signal-to-leakage-and-noise ratio of subarray n.
double slnr(const Instance& inst, int n);

}  // namespace hsm
