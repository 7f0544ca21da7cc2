#include "hybridsm/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsm {

namespace {

constexpr double kLog2E = 1.4426950408889634074;

/// Whitened candidate images w_a * b_j for every candidate, where
/// w_a = M_block(active[a]) * p_block(active[a]).
std::vector<CVector> candidate_images(const AsrContext& ctx, const CVector& p, const CMatrix& m) {
    std::vector<CVector> images;
    images.reserve(ctx.active.size() * ctx.symbols.size());
    for (int idx : ctx.active) {
        const CVector w = m.middleCols(static_cast<Eigen::Index>(idx) * ctx.n_aa, ctx.n_aa) *
                          p.segment(static_cast<Eigen::Index>(idx) * ctx.n_aa, ctx.n_aa);
        for (const cx& b : ctx.symbols) {
            images.push_back(w * b);
        }
    }
    return images;
}

}  // namespace

AsrContext build_asr_context(const Instance& inst) {
    AsrContext ctx;
    ctx.m_b = inst.whit.omega_b_isqrt * (inst.comb.w_b.adjoint() * inst.ch.h);
    ctx.m_e = inst.whit.omega_e_isqrt * (inst.comb.w_e.adjoint() * inst.ch.g);
    ctx.a_h = (ctx.m_b.adjoint() * ctx.m_b).eval();
    ctx.a_g = (ctx.m_e.adjoint() * ctx.m_e).eval();
    ctx.a_h = 0.5 * (ctx.a_h + ctx.a_h.adjoint()).eval();
    ctx.a_g = 0.5 * (ctx.a_g + ctx.a_g.adjoint()).eval();
    ctx.scale = inst.cfg.beta * inst.cfg.p_total / 4.0;
    ctx.active = inst.sel.indices;
    ctx.symbols = inst.cons.symbols;
    ctx.n_aa = inst.cfg.n_aa;
    ctx.p = inst.prec.p;
    return ctx;
}

double kappa_at(const AsrContext& ctx, const CVector& p, Side side) {
    const std::vector<CVector> u = candidate_images(ctx, p, side == Side::Bob ? ctx.m_b : ctx.m_e);
    const int k = static_cast<int>(u.size());
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            sum += std::exp(-ctx.scale * (u[i] - u[j]).squaredNorm());
        }
    }
    return sum;
}

double kappa(const AsrContext& ctx, Side side) { return kappa_at(ctx, ctx.p, side); }

double cutoff_rate(const AsrContext& ctx, Side side) {
    return 2.0 * std::log2(static_cast<double>(ctx.candidate_count())) -
           std::log2(kappa(ctx, side));
}

double asr_at(const AsrContext& ctx, const CVector& p) {
    return std::log2(kappa_at(ctx, p, Side::Eve)) - std::log2(kappa_at(ctx, p, Side::Bob));
}

double asr(const AsrContext& ctx) { return asr_at(ctx, ctx.p); }

CVector stacked_pair_block(const CVector& p, int m, int m_prime, int n_aa) {
    if (m == m_prime) {
        return p.segment(static_cast<Eigen::Index>(m) * n_aa, n_aa);
    }
    CVector q(2 * n_aa);
    q.head(n_aa) = p.segment(static_cast<Eigen::Index>(m) * n_aa, n_aa);
    q.tail(n_aa) = p.segment(static_cast<Eigen::Index>(m_prime) * n_aa, n_aa);
    return q;
}

PairKernels build_pair_kernels(const Instance& inst) {
    const int n_aa = inst.cfg.n_aa;
    const int m_ord = inst.cons.order();
    const CMatrix inv_b = inst.whit.omega_b_isqrt * inst.whit.omega_b_isqrt;
    const CMatrix inv_e = inst.whit.omega_e_isqrt * inst.whit.omega_e_isqrt;
    const CMatrix wb_h = inst.comb.w_b.adjoint();
    const CMatrix we_h = inst.comb.w_e.adjoint();
    const CMatrix eye_aa = CMatrix::Identity(n_aa, n_aa);

    PairKernels out;
    out.m_order = m_ord;
    for (int m : inst.sel.indices) {
        for (int mp : inst.sel.indices) {
            PairKernels::Pair pair;
            pair.m = m;
            pair.m_prime = mp;
            pair.b.reserve(static_cast<size_t>(m_ord) * m_ord);
            pair.e.reserve(static_cast<size_t>(m_ord) * m_ord);
            if (m == mp) {
                pair.dim = n_aa;
                const CMatrix hb = wb_h * inst.ch.h_block(m);
                const CMatrix ge = we_h * inst.ch.g_block(m);
                const CMatrix core_b = hb.adjoint() * inv_b * hb;
                const CMatrix core_e = ge.adjoint() * inv_e * ge;
                for (int k = 0; k < m_ord; ++k) {
                    for (int kp = 0; kp < m_ord; ++kp) {
                        const double w = std::norm(inst.cons.symbols[k] - inst.cons.symbols[kp]);
                        pair.b.push_back(w * core_b);
                        pair.e.push_back(w * core_e);
                    }
                }
            } else {
                pair.dim = 2 * n_aa;
                CMatrix h_pair(inst.ch.h.rows(), 2 * n_aa);
                h_pair << inst.ch.h_block(m), inst.ch.h_block(mp);
                CMatrix g_pair(inst.ch.g.rows(), 2 * n_aa);
                g_pair << inst.ch.g_block(m), inst.ch.g_block(mp);
                const CMatrix hb = wb_h * h_pair;
                const CMatrix ge = we_h * g_pair;
                const CMatrix core_b = hb.adjoint() * inv_b * hb;
                const CMatrix core_e = ge.adjoint() * inv_e * ge;
                for (int k = 0; k < m_ord; ++k) {
                    for (int kp = 0; kp < m_ord; ++kp) {
                        CMatrix sym(2, 2);
                        sym << inst.cons.symbols[k], 0.0, 0.0, -inst.cons.symbols[kp];
                        const CMatrix j = kron(sym, eye_aa);
                        pair.b.push_back(j.adjoint() * core_b * j);
                        pair.e.push_back(j.adjoint() * core_e * j);
                    }
                }
            }
            out.pairs.push_back(std::move(pair));
        }
    }
    return out;
}

double asr_factored(const SystemConfig& cfg, const CVector& p, const PairKernels& kernels) {
    const double scale = cfg.beta * cfg.p_total / 4.0;
    double kappa_b = 0.0;
    double kappa_e = 0.0;
    for (const auto& pair : kernels.pairs) {
        const CVector q = stacked_pair_block(p, pair.m, pair.m_prime, cfg.n_aa);
        for (size_t t = 0; t < pair.b.size(); ++t) {
            kappa_b += std::exp(-scale * (q.dot(pair.b[t] * q)).real());
            kappa_e += std::exp(-scale * (q.dot(pair.e[t] * q)).real());
        }
    }
    return std::log2(kappa_e) - std::log2(kappa_b);
}

double asr_jensen_lower(const SystemConfig& cfg, const CVector& p, const PairKernels& kernels) {
    const double scale = cfg.beta * cfg.p_total / 4.0;
    double sum = 0.0;
    for (const auto& pair : kernels.pairs) {
        const CVector q = stacked_pair_block(p, pair.m, pair.m_prime, cfg.n_aa);
        for (size_t t = 0; t < pair.b.size(); ++t) {
            const double tr_b = (q.dot(pair.b[t] * q)).real();
            const double tr_e = (q.dot(pair.e[t] * q)).real();
            sum += -scale * (tr_e - tr_b);
        }
    }
    return kLog2E * sum;
}

SrEstimate exact_sr_monte_carlo(const Instance& inst, int n_noise, Rng& rng) {
    if (n_noise < 100) {
        throw std::invalid_argument("exact_sr_monte_carlo: n_noise must be >= 100");
    }
    const AsrContext ctx = build_asr_context(inst);
    const double amp = std::sqrt(inst.cfg.beta * inst.cfg.p_total);
    const int k = ctx.candidate_count();
    const int n_rf = inst.cfg.n_rf;

    std::vector<CVector> v_b = candidate_images(ctx, ctx.p, ctx.m_b);
    std::vector<CVector> v_e = candidate_images(ctx, ctx.p, ctx.m_e);
    for (auto& v : v_b) v *= amp;
    for (auto& v : v_e) v *= amp;

    // Pairwise squared distances, fixed per instance.
    RMatrix d2_b(k, k), d2_e(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            d2_b(i, j) = (v_b[i] - v_b[j]).squaredNorm();
            d2_e(i, j) = (v_e[i] - v_e[j]).squaredNorm();
        }
    }

    const double log2k = std::log2(static_cast<double>(k));
    double sum_d = 0.0;
    double sum_d2 = 0.0;
    CVector a_b(k), a_e(k);
    std::vector<double> terms(k);

    for (int s = 0; s < n_noise; ++s) {
        const CVector noise = rng.complex_gaussian(n_rf, 1, 1.0);
        for (int i = 0; i < k; ++i) {
            a_b(i) = v_b[i].dot(noise);  // v^H n
            a_e(i) = v_e[i].dot(noise);
        }
        auto avg_logsum = [&](const RMatrix& d2, const CVector& a) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) {
                double peak = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < k; ++j) {
                    terms[j] = -d2(i, j) - 2.0 * (a(i) - a(j)).real();
                    peak = std::max(peak, terms[j]);
                }
                double se = 0.0;
                for (int j = 0; j < k; ++j) {
                    se += std::exp(terms[j] - peak);
                }
                acc += (peak + std::log(se)) * kLog2E;
            }
            return acc / k;
        };
        // I_B - I_E == mean over samples of (g_e - g_b); same noise for both
        // receivers (common random numbers).
        const double d = avg_logsum(d2_e, a_e) - avg_logsum(d2_b, a_b);
        sum_d += d;
        sum_d2 += d * d;
    }

    const double mean = sum_d / n_noise;
    const double var = std::max(0.0, sum_d2 / n_noise - mean * mean);
    SrEstimate est;
    est.asr = asr(ctx);
    est.sr_exact = std::min(std::max(0.0, mean), log2k);
    est.std_err = std::sqrt(var / n_noise);
    est.n_noise_samples = n_noise;
    return est;
}

std::pair<double, double> sinr_ansnr(const Instance& inst, int i) {
    const auto& cfg = inst.cfg;
    if (i < 0 || i >= cfg.n_rf) {
        throw std::invalid_argument("sinr_ansnr: subarray index out of range");
    }
    const double cm_power = cfg.beta * cfg.p_total;
    const double an_power = (1.0 - cfg.beta) * cfg.p_total;

    // Numerators: confidential-message power through subarray i.
    const CVector sig_b = inst.comb.w_b.adjoint() * (inst.ch.h_block(i) * inst.prec.p_block(i, cfg.n_aa));
    const CVector sig_e = inst.comb.w_e.adjoint() * (inst.ch.g_block(i) * inst.prec.p_block(i, cfg.n_aa));

    // AN terms without the selection mask ("each TAS only send AN at the
    // beginning"); E||W^H M n||^2 replaced by ||W^H M||_F^2.
    const CMatrix an_b = inst.comb.w_b.adjoint() * inst.ch.h * inst.prec.f_rf * inst.an.t_bb;
    const CMatrix an_e = inst.comb.w_e.adjoint() * inst.ch.g * inst.prec.f_rf * inst.an.t_bb;

    const double sinr = cm_power * sig_b.squaredNorm() /
                        (an_power * an_b.squaredNorm() + cfg.n_rf * cfg.sigma2_b);
    const double ansnr = cm_power * sig_e.squaredNorm() /
                         (an_power * an_e.squaredNorm() + cfg.n_rf * cfg.sigma2_e);
    return {sinr, ansnr};
}

double slnr(const Instance& inst, int n) {
    const auto& cfg = inst.cfg;
    if (n < 0 || n >= cfg.n_rf) {
        throw std::invalid_argument("slnr: subarray index out of range");
    }
    const double cm_power = cfg.beta * cfg.p_total;
    const CVector to_bob = inst.comb.w_b.adjoint() * (inst.ch.h_block(n) * inst.prec.p_block(n, cfg.n_aa));
    const CVector to_eve = inst.comb.w_e.adjoint() * (inst.ch.g_block(n) * inst.prec.p_block(n, cfg.n_aa));
    return cm_power * to_bob.squaredNorm() /
           (cm_power * to_eve.squaredNorm() + cfg.n_rf * cfg.sigma2_b);
}

}  // namespace hsm
