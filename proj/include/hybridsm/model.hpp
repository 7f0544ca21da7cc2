#pragma once

#include "hybridsm/linalg.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace hsm {

/// Thrown when the legitimate effective channel has a trivial null space, so
/// no artificial-noise projector exists for the selected subarrays.
struct DegenerateProjectorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scalar parameters of the hybrid spatial-modulation link.
struct SystemConfig {
    int n_rf = 7;        ///< RF chains == transmit antenna subarrays
    int n_aa = 4;        ///< antennas per subarray
    int n_t = 4;         ///< selected subarrays, power of two
    int n_b = 2;         ///< Bob antennas
    int n_e = 2;         ///< Eve antennas
    int m = 4;           ///< constellation order
    double beta = 0.01;  ///< power split: beta to message, 1-beta to AN
    double p_total = 4.0;  ///< transmit power [W]
    double sigma2_b = 1.0;
    double sigma2_e = 1.0;

    int n_total() const { return n_aa * n_rf; }

    /// Largest power of two not exceeding n_rf.
    static int derive_n_t(int n_rf);

    /// SNR convention: p_total / sigma2_b in dB, with sigma2_b == sigma2_e.
    void set_snr_db(double snr_db);
    double snr_db() const;

    void validate() const;
};

/// Bob channel H (N_b x N_AA*N_RF) and Eve channel G (N_e x N_AA*N_RF),
/// column blocks per subarray.
struct ChannelPair {
    CMatrix h;
    CMatrix g;
    int n_aa = 0;

    CMatrix h_block(int i) const {
        return h.middleCols(static_cast<Eigen::Index>(i) * n_aa, n_aa);
    }
    CMatrix g_block(int i) const {
        return g.middleCols(static_cast<Eigen::Index>(i) * n_aa, n_aa);
    }
};

/// M-ary PSK constellation with unit average energy.
struct Constellation {
    std::vector<cx> symbols;
    int order() const { return static_cast<int>(symbols.size()); }
};

/// Ordered subarray subset with its block-diagonal mask T and the
/// N_t x N_RF row-selection matrix S.
struct TassSelection {
    std::vector<int> indices;  ///< 0-based, ascending
    CMatrix t_matrix;          ///< (N_AA*N_RF)^2, identity blocks on selected subarrays
    CMatrix s_matrix;          ///< row i has a 1 in column indices[i]

    int count() const { return static_cast<int>(indices.size()); }
};

/// Block-diagonal unit-modulus analog precoder, per-chain digital gains,
/// and their composite p = F_RF * F_BB.
struct HybridPrecoder {
    CMatrix f_rf;  ///< (N_AA*N_RF) x N_RF, entries of modulus 1/sqrt(N_AA)
    CVector f_bb;  ///< N_RF digital gains
    CVector p;     ///< composite, ||p||^2 = N_RF

    CVector p_block(int i, int n_aa) const {
        return p.segment(static_cast<Eigen::Index>(i) * n_aa, n_aa);
    }
};

/// Digital AN precoder T_BB with ||T_BB,T||_F = 1 and
/// W_b^H H T F_RF T_BB = 0.
struct AnProjector {
    CMatrix t_bb;      ///< N_RF x n_sel, zero rows outside the selection
    CMatrix t_bb_sel;  ///< T_BB,T, n_sel x n_sel
    CMatrix p_an;      ///< F_RF * T_BB
    double mu = 0.0;   ///< Frobenius normalizer of the projector
};

/// Per-subarray receive combiners; column i is the first left singular
/// vector of the corresponding channel block.
struct CombinerPair {
    CMatrix w_b;  ///< N_b x N_RF
    CMatrix w_e;  ///< N_e x N_RF
};

/// All N_t*M transmit candidates x_(i,j) = E_i * p * b_j, enumerated with
/// ascending subarray index outer and symbol index inner.
struct TransmitSet {
    std::vector<CVector> candidates;
    std::vector<std::pair<int, int>> labels;  ///< (subarray index, symbol index)
    int size() const { return static_cast<int>(candidates.size()); }
};

/// Interference-plus-noise covariances at Bob/Eve and their inverse
/// square roots.
struct NoiseWhitener {
    CMatrix omega_b;
    CMatrix omega_e;
    CMatrix omega_b_isqrt;
    CMatrix omega_e_isqrt;
};

/// One fully-built system realization: everything downstream metrics need.
struct Instance {
    SystemConfig cfg;
    ChannelPair ch;
    CombinerPair comb;
    TassSelection sel;
    Constellation cons;
    HybridPrecoder prec;
    AnProjector an;
    NoiseWhitener whit;
    TransmitSet tx;
};

/// i.i.d. unit-variance Rayleigh channels for Bob and Eve.
ChannelPair draw_channels(const SystemConfig& cfg, Rng& rng);

/// PSK points e^{j*2*pi*k/m} in Gray-label (angular) order.
Constellation build_constellation(int m);

/// Selection matrices for a distinct, in-range index subset of size n_t.
TassSelection build_selection(std::vector<int> indices, const SystemConfig& cfg);

/// Selection covering every subarray (used by pre-selection scoring).
TassSelection build_full_selection(const SystemConfig& cfg);

CombinerPair build_combiners(const ChannelPair& ch, const SystemConfig& cfg);

AnProjector build_an_projector(const ChannelPair& ch, const TassSelection& sel,
                               const HybridPrecoder& prec, const CombinerPair& comb);

TransmitSet build_transmit_set(const HybridPrecoder& prec, const TassSelection& sel,
                               const Constellation& cons, const SystemConfig& cfg);

NoiseWhitener build_whitener(const SystemConfig& cfg, const ChannelPair& ch,
                             const TassSelection& sel, const HybridPrecoder& prec,
                             const AnProjector& an, const CombinerPair& comb);

/// Assembles combiners, AN projector, whitener and candidate set around a
/// given precoder.
Instance build_instance(const SystemConfig& cfg, const ChannelPair& ch,
                        const TassSelection& sel, const HybridPrecoder& prec);

/// Maximum-likelihood detection of (subarray, symbol) from the combined
/// observation. Ties break toward the smaller (i, j).
std::pair<int, int> ml_detect(const CVector& y_b, const TransmitSet& tx,
                              const CombinerPair& comb, const ChannelPair& ch,
                              const SystemConfig& cfg);

}  // namespace hsm
