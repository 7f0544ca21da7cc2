#pragma once

#include "hybridsm/model.hpp"
#include "hybridsm/sdp.hpp"
#include "hybridsm/secrecy.hpp"

#include <stdexcept>
#include <vector>

namespace hsm {

struct GaSettings {
    double step_init = 3.0;
    double step_min = 0.01;
    double step_shrink = 3.0;  ///< divisor applied when an inner loop stalls
    double improve_tol = 1e-4;
    int max_inner = 5000;  ///< hard cap per inner loop
};

struct AdmmSettings {
    double rho = 0.5;
    double consensus_tol = 0.01;  ///< stop when ||P_t - P_{t-1}||_2 drops below
    int max_outer = 500;
};

/// One record per iteration; meaning of step/residual depends on the scheme
/// (GA: step size / unused, ADMM: rho / max consensus residual,
/// SDR-AltMin: alternation half-step / digital power). The feas_* fields are
/// filled by ADMM with the worst block-constraint violation of the iteration.
struct IterationRecord {
    int iter = 0;
    double objective = 0.0;
    double step = 0.0;
    double residual = 0.0;
    double feas_trace = 0.0;  ///< max |Tr(Q) - target| over blocks
    double feas_eig = 0.0;    ///< min eigenvalue over blocks
};

struct PrecoderResult {
    HybridPrecoder precoder;
    CVector p_raw;  ///< final composite iterate before hybrid extraction
    std::vector<IterationRecord> log;
};

struct SolverError : std::runtime_error {
    SolverError(const std::string& what, std::vector<IterationRecord> history = {})
        : std::runtime_error(what), log(std::move(history)) {}
    std::vector<IterationRecord> log;
};

/// Per-block phase extraction: f_i = e^{j*angle(p_i)} / sqrt(N_AA), digital
/// gain ||p_i||; zero entries take phase 0.
HybridPrecoder extract_hybrid(const CVector& p_composite, const SystemConfig& cfg);

/// First right singular vector of H scaled to ||p||^2 = N_RF.
CVector svd_init_precoder(const ChannelPair& ch, const SystemConfig& cfg);

/// Instance assembled around the SVD-initialized precoder (the starting
/// point shared by all three schemes).
Instance build_svd_instance(const SystemConfig& cfg, const ChannelPair& ch,
                            const TassSelection& sel);

/// Ascent direction of the approximate secrecy rate at p, in the stacked
/// (Re, Im) convention: d/dt R(p + t*u) = Re(u^H g).
CVector max_asr_grad(const AsrContext& ctx, const CVector& p);

/// Projected gradient ascent with shrinking step (accept-if-improving).
PrecoderResult max_asr_ga(const Instance& inst, const GaSettings& settings = {});

/// General-form consensus ADMM on the lifted per-pair blocks.
PrecoderResult max_asr_admm(const Instance& inst, const AdmmSettings& settings = {});

/// Alternating closed-form analog step and semidefinite-relaxed digital step
/// against the fully-digital SVD precoder.
PrecoderResult sdr_altmin(const Instance& inst, int max_alt = 50);

}  // namespace hsm
