#include "hybridsm/precoders.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hsm {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

cx unit_phase(const cx& v) {
    const double a = std::abs(v);
    return a == 0.0 ? cx(1.0, 0.0) : v / a;
}

}  // namespace

HybridPrecoder extract_hybrid(const CVector& p_composite, const SystemConfig& cfg) {
    const int n = cfg.n_total();
    if (p_composite.size() != n) {
        throw std::invalid_argument("extract_hybrid: composite must have N_AA*N_RF entries");
    }
    const double amp = 1.0 / std::sqrt(static_cast<double>(cfg.n_aa));
    HybridPrecoder out;
    out.f_rf = CMatrix::Zero(n, cfg.n_rf);
    out.f_bb = CVector(cfg.n_rf);
    for (int i = 0; i < cfg.n_rf; ++i) {
        const auto block = p_composite.segment(static_cast<Eigen::Index>(i) * cfg.n_aa, cfg.n_aa);
        out.f_bb(i) = block.norm();
        for (int a = 0; a < cfg.n_aa; ++a) {
            out.f_rf(static_cast<Eigen::Index>(i) * cfg.n_aa + a, i) = amp * unit_phase(block(a));
        }
    }
    out.p = out.f_rf * out.f_bb;
    return out;
}

CVector svd_init_precoder(const ChannelPair& ch, const SystemConfig& cfg) {
    const SvdResult dec = svd(ch.h);
    return dec.v.col(0) * std::sqrt(static_cast<double>(cfg.n_rf));
}

Instance build_svd_instance(const SystemConfig& cfg, const ChannelPair& ch,
                            const TassSelection& sel) {
    return build_instance(cfg, ch, sel, extract_hybrid(svd_init_precoder(ch, cfg), cfg));
}

CVector max_asr_grad(const AsrContext& ctx, const CVector& p) {
    const int n_aa = ctx.n_aa;
    const int m_ord = static_cast<int>(ctx.symbols.size());
    const int k = ctx.candidate_count();

    struct SideData {
        std::vector<CVector> images;  // whitened candidate images
        double kappa = 0.0;
        CVector acc;  // sum of exp-weighted D^H A d terms
    };

    auto accumulate = [&](const CMatrix& m) {
        SideData sd;
        sd.acc = CVector::Zero(p.size());
        sd.images.reserve(k);
        std::vector<CMatrix> blocks;  // M restricted to each active subarray
        blocks.reserve(ctx.active.size());
        for (int idx : ctx.active) {
            blocks.push_back(m.middleCols(static_cast<Eigen::Index>(idx) * n_aa, n_aa));
        }
        for (size_t a = 0; a < ctx.active.size(); ++a) {
            const CVector w =
                blocks[a] * p.segment(static_cast<Eigen::Index>(ctx.active[a]) * n_aa, n_aa);
            for (const cx& b : ctx.symbols) {
                sd.images.push_back(w * b);
            }
        }
        for (int i = 0; i < k; ++i) {
            const int ai = i / m_ord;
            const cx bi = ctx.symbols[i % m_ord];
            for (int j = 0; j < k; ++j) {
                if (i == j) {
                    sd.kappa += 1.0;
                    continue;
                }
                const int aj = j / m_ord;
                const cx bj = ctx.symbols[j % m_ord];
                const CVector r = sd.images[i] - sd.images[j];
                const double w = std::exp(-ctx.scale * r.squaredNorm());
                sd.kappa += w;
                // D_ij^H (A d_ij) with A = M^H M touches only blocks a_i, a_j.
                sd.acc.segment(static_cast<Eigen::Index>(ctx.active[ai]) * n_aa, n_aa) +=
                    w * std::conj(bi) * (blocks[ai].adjoint() * r);
                sd.acc.segment(static_cast<Eigen::Index>(ctx.active[aj]) * n_aa, n_aa) -=
                    w * std::conj(bj) * (blocks[aj].adjoint() * r);
            }
        }
        return sd;
    };

    const SideData bob = accumulate(ctx.m_b);
    const SideData eve = accumulate(ctx.m_e);
    return (2.0 * ctx.scale / kLn2) * (bob.acc / bob.kappa - eve.acc / eve.kappa);
}

PrecoderResult max_asr_ga(const Instance& inst, const GaSettings& settings) {
    const AsrContext ctx = build_asr_context(inst);
    const double radius = std::sqrt(static_cast<double>(inst.cfg.n_rf));

    CVector p = inst.prec.p;
    if (p.norm() > 0.0) {
        p *= radius / p.norm();
    }
    double value = asr_at(ctx, p);

    PrecoderResult out;
    int iter = 0;
    out.log.push_back({iter, value, settings.step_init, 0.0});

    for (double step = settings.step_init; step >= settings.step_min;
         step /= settings.step_shrink) {
        for (int inner = 0; inner < settings.max_inner; ++inner) {
            CVector cand = p + step * max_asr_grad(ctx, p);
            const double norm = cand.norm();
            if (norm == 0.0) {
                break;
            }
            cand *= radius / norm;
            const double cand_value = asr_at(ctx, cand);
            if (!std::isfinite(cand_value)) {
                throw SolverError("max_asr_ga: objective became non-finite at iteration " +
                                      std::to_string(iter) + " (last value " +
                                      std::to_string(value) + ")",
                                  out.log);
            }
            const double gain = cand_value - value;
            if (gain > 0.0) {
                p = std::move(cand);
                value = cand_value;
                out.log.push_back({++iter, value, step, 0.0});
            }
            if (gain <= settings.improve_tol) {
                break;
            }
        }
    }

    out.p_raw = p;
    out.precoder = extract_hybrid(p, inst.cfg);
    return out;
}

PrecoderResult max_asr_admm(const Instance& inst, const AdmmSettings& settings) {
    const auto& cfg = inst.cfg;
    const int n_aa = cfg.n_aa;
    const double scale = cfg.beta * cfg.p_total / 4.0;
    const double eval_radius = std::sqrt(static_cast<double>(cfg.n_rf));
    // Internal consensus radius: unit power per selected subarray, so that
    // the Tr(Q) = 1 / 2 block constraints are attainable at agreement.
    const double fuse_radius = std::sqrt(static_cast<double>(inst.sel.count()));

    const PairKernels kernels = build_pair_kernels(inst);
    const AsrContext ctx = build_asr_context(inst);

    struct Block {
        int m, m_prime, dim;
        double trace_target;
        CMatrix cost;  // exp-free linearized objective kernel
        CMatrix dual;
        CMatrix q_lift;
    };
    std::vector<Block> blocks;
    blocks.reserve(kernels.pairs.size());
    for (const auto& pair : kernels.pairs) {
        Block blk;
        blk.m = pair.m;
        blk.m_prime = pair.m_prime;
        blk.dim = pair.dim;
        blk.trace_target = pair.m == pair.m_prime ? 1.0 : 2.0;
        blk.cost = CMatrix::Zero(pair.dim, pair.dim);
        for (size_t t = 0; t < pair.b.size(); ++t) {
            blk.cost += pair.b[t] - pair.e[t];
        }
        blk.cost *= -scale / kLn2;  // f_{m,m'}(Q) = Tr(cost * Q)
        blk.dual = CMatrix::Zero(pair.dim, pair.dim);
        blk.q_lift = CMatrix::Zero(pair.dim, pair.dim);
        blocks.push_back(std::move(blk));
    }

    CVector p_global = inst.prec.p;
    PrecoderResult out;

    for (int t = 1; t <= settings.max_outer; ++t) {
        // Per-block penalized SDP, solved exactly.
        std::vector<CVector> q(blocks.size());
        double worst_trace = 0.0;
        double worst_eig = std::numeric_limits<double>::infinity();
        for (size_t bi = 0; bi < blocks.size(); ++bi) {
            Block& blk = blocks[bi];
            const CVector p_pair = stacked_pair_block(p_global, blk.m, blk.m_prime, n_aa);
            SdpProblem prob;
            prob.dim = blk.dim;
            prob.cost = blk.cost + blk.dual;
            prob.trace_constraints = {{CMatrix::Identity(blk.dim, blk.dim), blk.trace_target}};
            prob.prox_weight = settings.rho;
            prob.prox_center = p_pair * p_pair.adjoint();
            SdpSolution sol;
            try {
                sol = solve(prob);
            } catch (const SdpFailure& f) {
                throw SolverError("max_asr_admm: block (" + std::to_string(blk.m) + "," +
                                      std::to_string(blk.m_prime) + ") failed: " + f.what(),
                                  out.log);
            }
            blk.q_lift = sol.x;
            worst_trace = std::max(
                worst_trace, std::abs(sol.x.trace().real() - blk.trace_target));
            Eigen::SelfAdjointEigenSolver<CMatrix> es(sol.x, Eigen::EigenvaluesOnly);
            worst_eig = std::min(worst_eig, es.eigenvalues()(0));
            q[bi] = rank_one_extract(sol.x).q;
            // Q fixes q only up to a global phase; align with the current block.
            const cx ip = p_pair.dot(q[bi]);
            if (std::abs(ip) > 0.0) {
                q[bi] *= std::conj(ip) / std::abs(ip);
            }
        }

        // Fusion center: scatter-add the block estimates, renormalize.
        CVector fused = CVector::Zero(cfg.n_total());
        for (size_t bi = 0; bi < blocks.size(); ++bi) {
            const Block& blk = blocks[bi];
            if (blk.m == blk.m_prime) {
                fused.segment(static_cast<Eigen::Index>(blk.m) * n_aa, n_aa) += q[bi];
            } else {
                fused.segment(static_cast<Eigen::Index>(blk.m) * n_aa, n_aa) += q[bi].head(n_aa);
                fused.segment(static_cast<Eigen::Index>(blk.m_prime) * n_aa, n_aa) +=
                    q[bi].tail(n_aa);
            }
        }
        const double fused_norm = fused.norm();
        if (fused_norm == 0.0) {
            throw SolverError("max_asr_admm: fusion collapsed to zero", out.log);
        }
        fused *= fuse_radius / fused_norm;

        // Dual ascent against the new global blocks.
        double consensus = 0.0;
        for (auto& blk : blocks) {
            const CVector p_pair = stacked_pair_block(fused, blk.m, blk.m_prime, n_aa);
            const CMatrix gap = blk.q_lift - p_pair * p_pair.adjoint();
            blk.dual += settings.rho * gap;
            consensus = std::max(consensus, gap.norm());
        }

        const double shift = (fused - p_global).norm();
        p_global = std::move(fused);
        out.log.push_back({t, asr_at(ctx, p_global * (eval_radius / fuse_radius)),
                           settings.rho, consensus, worst_trace, worst_eig});

        if (t > 1 && shift < settings.consensus_tol) {
            CVector p_final = p_global * (eval_radius / p_global.norm());
            out.p_raw = p_final;
            out.precoder = extract_hybrid(p_final, cfg);
            return out;
        }
    }

    throw SolverError("max_asr_admm: no consensus after " + std::to_string(settings.max_outer) +
                          " outer iterations",
                      out.log);
}

PrecoderResult sdr_altmin(const Instance& inst, int max_alt) {
    const auto& cfg = inst.cfg;
    const int n = cfg.n_total();
    const int n_rf = cfg.n_rf;
    const double amp = 1.0 / std::sqrt(static_cast<double>(cfg.n_aa));

    const CVector f_opt = svd_init_precoder(inst.ch, cfg);
    CVector f_bb = CVector::Ones(n_rf);  // ||f_bb||^2 = N_RF already
    CMatrix f_rf = CMatrix::Zero(n, n_rf);

    auto analog_step = [&]() {
        for (int i = 0; i < n; ++i) {
            const int l = i / cfg.n_aa;
            f_rf(i, l) = amp * unit_phase(f_opt(i) * std::conj(f_bb(l)));
        }
    };
    auto objective = [&]() { return (f_opt - f_rf * f_bb).norm(); };

    PrecoderResult out;
    double value = std::numeric_limits<double>::infinity();
    for (int alt = 1; alt <= max_alt; ++alt) {
        analog_step();
        value = objective();
        out.log.push_back({alt, value, 0.0, f_bb.squaredNorm()});

        // Digital step: lift y = [f_bb; t] and relax to an SDP.
        SdpProblem prob;
        prob.dim = n_rf + 1;
        prob.cost = CMatrix::Zero(n_rf + 1, n_rf + 1);
        prob.cost.topLeftCorner(n_rf, n_rf) = f_rf.adjoint() * f_rf;
        prob.cost.topRightCorner(n_rf, 1) = -f_rf.adjoint() * f_opt;
        prob.cost.bottomLeftCorner(1, n_rf) = prob.cost.topRightCorner(n_rf, 1).adjoint();
        prob.cost(n_rf, n_rf) = f_opt.squaredNorm();
        CMatrix a1 = CMatrix::Zero(n_rf + 1, n_rf + 1);
        a1.topLeftCorner(n_rf, n_rf) = CMatrix::Identity(n_rf, n_rf);
        CMatrix a2 = CMatrix::Zero(n_rf + 1, n_rf + 1);
        a2(n_rf, n_rf) = 1.0;
        prob.trace_constraints = {{a1, static_cast<double>(n_rf)}, {a2, 1.0}};

        CVector y;
        try {
            y = rank_one_extract(solve(prob, 1e-9, 200).x).q;
        } catch (const SdpFailure& f) {
            throw SolverError("sdr_altmin: digital SDP failed at alternation " +
                                  std::to_string(alt) + ": " + f.what(),
                              out.log);
        }
        CVector cand = y.head(n_rf);
        const cx t_aux = y(n_rf);
        if (std::abs(t_aux) > 0.0) {
            cand *= std::conj(t_aux) / std::abs(t_aux);
        }
        if (cand.norm() == 0.0) {
            break;
        }
        cand *= std::sqrt(static_cast<double>(n_rf)) / cand.norm();

        const double cand_value = (f_opt - f_rf * cand).norm();
        if (cand_value > value) {
            // Relaxation round-off made things worse; keep the last iterate.
            break;
        }
        const double improvement = value - cand_value;
        f_bb = std::move(cand);
        value = cand_value;
        out.log.push_back({alt, value, 1.0, f_bb.squaredNorm()});
        if (improvement < 1e-6 * std::max(1.0, value)) {
            break;
        }
    }

    out.p_raw = f_rf * f_bb;
    out.precoder = extract_hybrid(out.p_raw, cfg);
    return out;
}

}  // namespace hsm
