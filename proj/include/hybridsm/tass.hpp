#pragma once

#include "hybridsm/model.hpp"

#include <string>
#include <vector>

namespace hsm {

enum class TassMethod { MaxAsr, MaxEv, MaxPSinrAnsnr, Leakage, Random };

std::string to_string(TassMethod method);
TassMethod tass_from_string(const std::string& name);

struct TassScorecard {
    TassMethod method = TassMethod::MaxEv;
    std::vector<double> scores;  ///< per subarray; per subset for MaxAsr
    std::vector<std::vector<int>> subsets;  ///< MaxAsr only, aligned with scores
    TassSelection chosen;
    double flops_estimate = 0.0;  ///< NaN when no closed-form estimate exists
    std::vector<std::string> notes;  ///< skipped-subset diagnostics etc.
};

/// Scoring context shared by the per-subarray methods: every subarray active,
/// per-subarray SVD-matched analog weights with unit digital gains, AN
/// projected over the full array.
Instance build_scoring_instance(const SystemConfig& cfg, const ChannelPair& ch);

/// Rank subarrays by the largest singular value of their Bob channel block.
TassScorecard tass_max_ev(const ChannelPair& ch, const SystemConfig& cfg);

/// Rank subarrays by SINR_i * ANSNR_i in the scoring context.
TassScorecard tass_max_p_sinr_ansnr(const SystemConfig& cfg, const ChannelPair& ch);

/// Exhaustive search of all C(N_RF, N_t) subsets by approximate secrecy rate,
/// with per-subset AN projector and covariances at the SVD-initialized
/// precoder. Degenerate subsets are skipped with a note.
TassScorecard tass_max_asr(const SystemConfig& cfg, const ChannelPair& ch);

/// Rank subarrays by signal-to-leakage-and-noise ratio.
TassScorecard tass_leakage(const SystemConfig& cfg, const ChannelPair& ch);

/// Uniform random subset (baseline).
TassScorecard tass_random(const SystemConfig& cfg, Rng& rng);

/// Dispatcher; rng is only consumed by the random method.
TassScorecard run_tass(TassMethod method, const SystemConfig& cfg, const ChannelPair& ch,
                       Rng& rng);

/// Closed-form FLOP estimates for the three proposed methods; throws for
/// leakage/random, which have no published formula.
double flops_estimate(TassMethod method, const SystemConfig& cfg);

/// ASR of one subset under the shared SVD-initialized precoder (the quantity
/// tass_max_asr maximizes, exposed for cross-method comparisons).
double asr_of_subset(const SystemConfig& cfg, const ChannelPair& ch,
                     const std::vector<int>& subset);

/// k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> enumerate_subsets(int n, int k);

}  // namespace hsm
