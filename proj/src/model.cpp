#include "hybridsm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace hsm {

namespace {

bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

}  // namespace

int SystemConfig::derive_n_t(int n_rf) {
    if (n_rf < 1) {
        throw std::invalid_argument("derive_n_t: n_rf must be >= 1");
    }
    int p = 1;
    while (2 * p <= n_rf) {
        p *= 2;
    }
    return p;
}

void SystemConfig::set_snr_db(double snr_db) {
    const double sigma2 = p_total / std::pow(10.0, snr_db / 10.0);
    sigma2_b = sigma2;
    sigma2_e = sigma2;
}

double SystemConfig::snr_db() const { return 10.0 * std::log10(p_total / sigma2_b); }

void SystemConfig::validate() const {
    if (n_rf < 1 || n_aa < 1 || n_b < 1 || n_e < 1) {
        throw std::invalid_argument("SystemConfig: antenna/chain counts must be >= 1");
    }
    if (!is_power_of_two(n_t)) {
        throw std::invalid_argument("SystemConfig: n_t must be a power of two, got " +
                                    std::to_string(n_t));
    }
    if (n_t > n_rf) {
        throw std::invalid_argument("SystemConfig: n_t exceeds n_rf");
    }
    if (!is_power_of_two(m) || m < 2) {
        throw std::invalid_argument("SystemConfig: constellation order must be a power of two >= 2");
    }
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("SystemConfig: beta must lie in [0, 1]");
    }
    if (!(p_total > 0.0) || !(sigma2_b > 0.0) || !(sigma2_e > 0.0)) {
        throw std::invalid_argument("SystemConfig: powers and noise variances must be positive");
    }
}

ChannelPair draw_channels(const SystemConfig& cfg, Rng& rng) {
    cfg.validate();
    ChannelPair ch;
    ch.n_aa = cfg.n_aa;
    ch.h = rng.complex_gaussian(cfg.n_b, cfg.n_total(), 1.0);
    ch.g = rng.complex_gaussian(cfg.n_e, cfg.n_total(), 1.0);
    return ch;
}

Constellation build_constellation(int m) {
    if (!is_power_of_two(m) || m < 2) {
        throw std::invalid_argument("build_constellation: unsupported order " + std::to_string(m));
    }
    Constellation c;
    c.symbols.resize(m);
    for (int k = 0; k < m; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / m;
        c.symbols[k] = cx(std::cos(phi), std::sin(phi));
    }
    return c;
}

TassSelection build_selection(std::vector<int> indices, const SystemConfig& cfg) {
    if (static_cast<int>(indices.size()) != cfg.n_t) {
        throw std::invalid_argument("build_selection: expected " + std::to_string(cfg.n_t) +
                                    " indices, got " + std::to_string(indices.size()));
    }
    std::sort(indices.begin(), indices.end());
    std::set<int> uniq(indices.begin(), indices.end());
    if (uniq.size() != indices.size()) {
        throw std::invalid_argument("build_selection: duplicate subarray index");
    }
    if (indices.front() < 0 || indices.back() >= cfg.n_rf) {
        throw std::invalid_argument("build_selection: subarray index out of range");
    }

    TassSelection sel;
    sel.indices = std::move(indices);
    const int n = cfg.n_total();
    sel.t_matrix = CMatrix::Zero(n, n);
    sel.s_matrix = CMatrix::Zero(sel.count(), cfg.n_rf);
    for (int a = 0; a < sel.count(); ++a) {
        const int i = sel.indices[a];
        sel.t_matrix.block(i * cfg.n_aa, i * cfg.n_aa, cfg.n_aa, cfg.n_aa) =
            CMatrix::Identity(cfg.n_aa, cfg.n_aa);
        sel.s_matrix(a, i) = 1.0;
    }
    return sel;
}

TassSelection build_full_selection(const SystemConfig& cfg) {
    // scoring context: every subarray selected, no power-of-two restriction
    TassSelection sel;
    sel.indices.resize(cfg.n_rf);
    for (int i = 0; i < cfg.n_rf; ++i) {
        sel.indices[i] = i;
    }
    const int n = cfg.n_total();
    sel.t_matrix = CMatrix::Identity(n, n);
    sel.s_matrix = CMatrix::Identity(cfg.n_rf, cfg.n_rf);
    return sel;
}

CombinerPair build_combiners(const ChannelPair& ch, const SystemConfig& cfg) {
    CombinerPair comb;
    comb.w_b = CMatrix(cfg.n_b, cfg.n_rf);
    comb.w_e = CMatrix(cfg.n_e, cfg.n_rf);
    for (int i = 0; i < cfg.n_rf; ++i) {
        comb.w_b.col(i) = svd(ch.h_block(i)).u.col(0);
        comb.w_e.col(i) = svd(ch.g_block(i)).u.col(0);
    }
    return comb;
}

AnProjector build_an_projector(const ChannelPair& ch, const TassSelection& sel,
                               const HybridPrecoder& prec, const CombinerPair& comb) {
    const int n_aa = ch.n_aa;
    const int n_sel = sel.count();
    const int n_rf = static_cast<int>(prec.f_rf.cols());

    // H_T and F_RF,T restricted to the selected subarrays.
    CMatrix h_t(ch.h.rows(), static_cast<Eigen::Index>(n_aa) * n_sel);
    CMatrix f_rf_t = CMatrix::Zero(static_cast<Eigen::Index>(n_aa) * n_sel, n_sel);
    for (int a = 0; a < n_sel; ++a) {
        const int i = sel.indices[a];
        h_t.middleCols(static_cast<Eigen::Index>(a) * n_aa, n_aa) = ch.h_block(i);
        f_rf_t.block(static_cast<Eigen::Index>(a) * n_aa, a, n_aa, 1) =
            prec.f_rf.block(static_cast<Eigen::Index>(i) * n_aa, i, n_aa, 1);
    }

    const CMatrix h_eff = comb.w_b.adjoint() * h_t * f_rf_t;
    const CMatrix projector =
        CMatrix::Identity(n_sel, n_sel) - h_eff.adjoint() * pinv(h_eff * h_eff.adjoint()) * h_eff;

    AnProjector an;
    an.mu = projector.norm();
    if (an.mu < 1e-7) {
        throw DegenerateProjectorError(
            "build_an_projector: effective channel has full column rank (mu = " +
            std::to_string(an.mu) + "), no null space left for AN");
    }
    an.t_bb_sel = projector / an.mu;
    an.t_bb = CMatrix::Zero(n_rf, n_sel);
    for (int a = 0; a < n_sel; ++a) {
        an.t_bb.row(sel.indices[a]) = an.t_bb_sel.row(a);
    }
    an.p_an = prec.f_rf * an.t_bb;
    return an;
}

TransmitSet build_transmit_set(const HybridPrecoder& prec, const TassSelection& sel,
                               const Constellation& cons, const SystemConfig& cfg) {
    TransmitSet tx;
    tx.candidates.reserve(static_cast<size_t>(sel.count()) * cons.order());
    tx.labels.reserve(tx.candidates.capacity());
    for (int a = 0; a < sel.count(); ++a) {
        const int i = sel.indices[a];
        for (int j = 0; j < cons.order(); ++j) {
            CVector x = CVector::Zero(cfg.n_total());
            x.segment(static_cast<Eigen::Index>(i) * cfg.n_aa, cfg.n_aa) =
                prec.p_block(i, cfg.n_aa) * cons.symbols[j];
            tx.candidates.push_back(std::move(x));
            tx.labels.emplace_back(i, j);
        }
    }
    return tx;
}

NoiseWhitener build_whitener(const SystemConfig& cfg, const ChannelPair& ch,
                             const TassSelection& sel, const HybridPrecoder& prec,
                             const AnProjector& an, const CombinerPair& comb) {
    const CMatrix an_path_b = comb.w_b.adjoint() * ch.h * sel.t_matrix * prec.f_rf * an.t_bb;
    const CMatrix an_path_e = comb.w_e.adjoint() * ch.g * sel.t_matrix * prec.f_rf * an.t_bb;
    const double an_power = (1.0 - cfg.beta) * cfg.p_total;

    NoiseWhitener w;
    const CMatrix eye = CMatrix::Identity(cfg.n_rf, cfg.n_rf);
    w.omega_b = an_power * (an_path_b * an_path_b.adjoint()) + cfg.sigma2_b * eye;
    w.omega_e = an_power * (an_path_e * an_path_e.adjoint()) + cfg.sigma2_e * eye;
    w.omega_b = 0.5 * (w.omega_b + w.omega_b.adjoint()).eval();
    w.omega_e = 0.5 * (w.omega_e + w.omega_e.adjoint()).eval();
    w.omega_b_isqrt = inv_sqrt_hermitian(w.omega_b);
    w.omega_e_isqrt = inv_sqrt_hermitian(w.omega_e);
    return w;
}

Instance build_instance(const SystemConfig& cfg, const ChannelPair& ch,
                        const TassSelection& sel, const HybridPrecoder& prec) {
    Instance inst;
    inst.cfg = cfg;
    inst.ch = ch;
    inst.sel = sel;
    inst.cons = build_constellation(cfg.m);
    inst.prec = prec;
    inst.comb = build_combiners(ch, cfg);
    inst.an = build_an_projector(ch, sel, prec, inst.comb);
    inst.whit = build_whitener(cfg, ch, sel, prec, inst.an, inst.comb);
    inst.tx = build_transmit_set(prec, sel, inst.cons, cfg);
    return inst;
}

std::pair<int, int> ml_detect(const CVector& y_b, const TransmitSet& tx,
                              const CombinerPair& comb, const ChannelPair& ch,
                              const SystemConfig& cfg) {
    const double amp = std::sqrt(cfg.beta * cfg.p_total);
    const CMatrix eff_ch = comb.w_b.adjoint() * ch.h;
    double best = std::numeric_limits<double>::infinity();
    std::pair<int, int> best_label{-1, -1};
    for (int k = 0; k < tx.size(); ++k) {
        const double d = (y_b - amp * (eff_ch * tx.candidates[k])).squaredNorm();
        if (d < best) {  // strict: first (lexicographically smallest) label wins ties
            best = d;
            best_label = tx.labels[k];
        }
    }
    return best_label;
}

}  // namespace hsm
