#include "hybridsm/tass.hpp"

#include "hybridsm/precoders.hpp"
#include "hybridsm/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hsm {

std::string to_string(TassMethod method) {
    switch (method) {
        case TassMethod::MaxAsr: return "max-asr";
        case TassMethod::MaxEv: return "max-ev";
        case TassMethod::MaxPSinrAnsnr: return "max-p-sinr-ansnr";
        case TassMethod::Leakage: return "leakage";
        case TassMethod::Random: return "random";
    }
    throw std::invalid_argument("unknown TassMethod");
}

TassMethod tass_from_string(const std::string& name) {
    if (name == "max-asr") return TassMethod::MaxAsr;
    if (name == "max-ev") return TassMethod::MaxEv;
    if (name == "max-p-sinr-ansnr") return TassMethod::MaxPSinrAnsnr;
    if (name == "leakage") return TassMethod::Leakage;
    if (name == "random") return TassMethod::Random;
    throw std::invalid_argument("unknown TASS method '" + name + "'");
}

namespace {

/// Indices of the n_t largest scores, ties to the smaller index, returned
/// ascending.
std::vector<int> top_indices(const std::vector<double>& scores, int n_t) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
    std::vector<int> chosen(order.begin(), order.begin() + n_t);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

double binomial(int n, int k) {
    double q = 1.0;
    for (int i = 1; i <= k; ++i) {
        q *= static_cast<double>(n - k + i) / i;
    }
    return std::round(q);
}

double flops_nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

Instance build_scoring_instance(const SystemConfig& cfg, const ChannelPair& ch) {
    const int n = cfg.n_total();
    const double amp = 1.0 / std::sqrt(static_cast<double>(cfg.n_aa));
    HybridPrecoder prec;
    prec.f_rf = CMatrix::Zero(n, cfg.n_rf);
    prec.f_bb = CVector::Ones(cfg.n_rf);
    for (int i = 0; i < cfg.n_rf; ++i) {
        const CVector v = svd(ch.h_block(i)).v.col(0);
        for (int a = 0; a < cfg.n_aa; ++a) {
            const cx ph = std::abs(v(a)) == 0.0 ? cx(1.0, 0.0) : v(a) / std::abs(v(a));
            prec.f_rf(static_cast<Eigen::Index>(i) * cfg.n_aa + a, i) = amp * ph;
        }
    }
    prec.p = prec.f_rf * prec.f_bb;
    return build_instance(cfg, ch, build_full_selection(cfg), prec);
}

TassScorecard tass_max_ev(const ChannelPair& ch, const SystemConfig& cfg) {
    TassScorecard card;
    card.method = TassMethod::MaxEv;
    card.scores.resize(cfg.n_rf);
    for (int i = 0; i < cfg.n_rf; ++i) {
        card.scores[i] = svd(ch.h_block(i)).sigma(0);
    }
    card.chosen = build_selection(top_indices(card.scores, cfg.n_t), cfg);
    card.flops_estimate = flops_estimate(TassMethod::MaxEv, cfg);
    return card;
}

TassScorecard tass_max_p_sinr_ansnr(const SystemConfig& cfg, const ChannelPair& ch) {
    const Instance scoring = build_scoring_instance(cfg, ch);
    TassScorecard card;
    card.method = TassMethod::MaxPSinrAnsnr;
    card.scores.resize(cfg.n_rf);
    for (int i = 0; i < cfg.n_rf; ++i) {
        const auto [sinr, ansnr] = sinr_ansnr(scoring, i);
        card.scores[i] = sinr * ansnr;
    }
    card.chosen = build_selection(top_indices(card.scores, cfg.n_t), cfg);
    card.flops_estimate = flops_estimate(TassMethod::MaxPSinrAnsnr, cfg);
    return card;
}

TassScorecard tass_leakage(const SystemConfig& cfg, const ChannelPair& ch) {
    const Instance scoring = build_scoring_instance(cfg, ch);
    TassScorecard card;
    card.method = TassMethod::Leakage;
    card.scores.resize(cfg.n_rf);
    for (int n = 0; n < cfg.n_rf; ++n) {
        card.scores[n] = slnr(scoring, n);
    }
    card.chosen = build_selection(top_indices(card.scores, cfg.n_t), cfg);
    card.flops_estimate = flops_nan();
    return card;
}

std::vector<std::vector<int>> enumerate_subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) {
        cur[i] = i;
    }
    while (true) {
        out.push_back(cur);
        int pos = k - 1;
        while (pos >= 0 && cur[pos] == n - k + pos) {
            --pos;
        }
        if (pos < 0) {
            break;
        }
        ++cur[pos];
        for (int i = pos + 1; i < k; ++i) {
            cur[i] = cur[i - 1] + 1;
        }
    }
    return out;
}

double asr_of_subset(const SystemConfig& cfg, const ChannelPair& ch,
                     const std::vector<int>& subset) {
    const HybridPrecoder prec = extract_hybrid(svd_init_precoder(ch, cfg), cfg);
    const Instance inst = build_instance(cfg, ch, build_selection(subset, cfg), prec);
    return asr(build_asr_context(inst));
}

TassScorecard tass_max_asr(const SystemConfig& cfg, const ChannelPair& ch) {
    const HybridPrecoder prec = extract_hybrid(svd_init_precoder(ch, cfg), cfg);

    TassScorecard card;
    card.method = TassMethod::MaxAsr;
    card.subsets = enumerate_subsets(cfg.n_rf, cfg.n_t);
    card.scores.assign(card.subsets.size(), -std::numeric_limits<double>::infinity());

    int best = -1;
    for (size_t s = 0; s < card.subsets.size(); ++s) {
        try {
            const Instance inst =
                build_instance(cfg, ch, build_selection(card.subsets[s], cfg), prec);
            card.scores[s] = asr(build_asr_context(inst));
        } catch (const DegenerateProjectorError& e) {
            card.notes.push_back("subset " + std::to_string(s) + " skipped: " + e.what());
            continue;
        }
        if (best < 0 || card.scores[s] > card.scores[best]) {
            best = static_cast<int>(s);  // lexicographic order breaks ties
        }
    }
    if (best < 0) {
        throw DegenerateProjectorError("tass_max_asr: every candidate subset is degenerate");
    }
    card.chosen = build_selection(card.subsets[best], cfg);
    card.flops_estimate = flops_estimate(TassMethod::MaxAsr, cfg);
    return card;
}

TassScorecard tass_random(const SystemConfig& cfg, Rng& rng) {
    std::vector<int> pool(cfg.n_rf);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < cfg.n_t; ++i) {
        const int j = i + static_cast<int>(rng.uniform_below(cfg.n_rf - i));
        std::swap(pool[i], pool[j]);
    }
    TassScorecard card;
    card.method = TassMethod::Random;
    card.chosen = build_selection({pool.begin(), pool.begin() + cfg.n_t}, cfg);
    card.flops_estimate = flops_nan();
    return card;
}

TassScorecard run_tass(TassMethod method, const SystemConfig& cfg, const ChannelPair& ch,
                       Rng& rng) {
    switch (method) {
        case TassMethod::MaxAsr: return tass_max_asr(cfg, ch);
        case TassMethod::MaxEv: return tass_max_ev(ch, cfg);
        case TassMethod::MaxPSinrAnsnr: return tass_max_p_sinr_ansnr(cfg, ch);
        case TassMethod::Leakage: return tass_leakage(cfg, ch);
        case TassMethod::Random: return tass_random(cfg, rng);
    }
    throw std::invalid_argument("unknown TassMethod");
}

double flops_estimate(TassMethod method, const SystemConfig& cfg) {
    const double n_rf = cfg.n_rf;
    const double n = cfg.n_total();
    const double n_aa = cfg.n_aa;
    const double n_b = cfg.n_b;
    const double n_t = cfg.n_t;
    const double m = cfg.m;
    switch (method) {
        case TassMethod::MaxPSinrAnsnr:
            return 2.0 * n_rf *
                   (8.0 * n_rf * n * n - 2.0 * n_rf * n + 8.0 * n_rf * n_rf * n -
                    2.0 * n_rf * n_rf);
        case TassMethod::MaxEv:
            return n_rf * (2.0 * n_b * n_aa * n_aa + 48.0 * n_b * n_b * n_aa +
                           54.0 * n_b * n_b * n_b);
        case TassMethod::MaxAsr: {
            const double c_x = m * n_t * (8.0 * n * n - 2.0 * n + 1.0);
            const double c_omega =
                4.0 * (4.0 * n_rf * n * n + n_rf * n_rf * n - n_rf * n + n_rf * n_rf +
                       2.0 * n_rf);
            const double c_kappa =
                2.0 * (m * n_t) * (m * n_t) * (8.0 * n_rf * n_rf + 2.0 * n_rf + 1.0);
            return binomial(cfg.n_rf, cfg.n_t) * (c_x + 2.0 * (c_omega + c_kappa));
        }
        case TassMethod::Leakage:
        case TassMethod::Random:
            throw std::invalid_argument("flops_estimate: no closed-form estimate for " +
                                        to_string(method));
    }
    throw std::invalid_argument("unknown TassMethod");
}

}  // namespace hsm
