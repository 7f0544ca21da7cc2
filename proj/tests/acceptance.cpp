// Acceptance suite: every release-gating property in one binary, one
// pass/fail line per criterion. Exit code is the number of failures.

#include "hybridsm/harness.hpp"
#include "hybridsm/precoders.hpp"
#include "hybridsm/secrecy.hpp"
#include "hybridsm/tass.hpp"

#include "sdp_reference.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace hsm;

namespace {

int failures = 0;

void report(int number, const std::string& label, bool pass, const std::string& detail,
            double seconds) {
    std::printf("%s criterion %2d: %-34s [%6.1fs] %s\n", pass ? "PASS" : "FAIL", number,
                label.c_str(), seconds, detail.c_str());
    std::fflush(stdout);
    if (!pass) {
        ++failures;
    }
}

void run(int number, const std::string& label,
         const std::function<std::pair<bool, std::string>()>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::pair<bool, std::string> result{false, "exception"};
    try {
        result = body();
    } catch (const std::exception& e) {
        result = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(number, label, result.first, result.second, seconds);
}

// one-sided paired t-test: mean(diff) > 0 at 95% (n = 200, t ~ 1.653)
bool paired_greater(const std::vector<double>& a, const std::vector<double>& b,
                    double* t_out) {
    const size_t n = a.size();
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mean += a[i] - b[i];
    }
    mean /= n;
    double var = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i] - mean;
        var += d * d;
    }
    var /= (n - 1);
    const double t = mean / std::sqrt(var / n + 1e-300);
    *t_out = t;
    return t > 1.653;
}

SystemConfig protocol_cfg(int n_rf) {
    SystemConfig cfg;
    cfg.n_rf = n_rf;
    cfg.n_aa = 4;
    cfg.n_t = SystemConfig::derive_n_t(n_rf);
    cfg.n_b = 2;
    cfg.n_e = 2;
    cfg.m = 4;
    cfg.beta = 0.01;
    cfg.p_total = cfg.n_t;
    cfg.set_snr_db(10.0);
    return cfg;
}

SystemConfig small_cfg() {
    SystemConfig cfg;
    cfg.n_rf = 3;
    cfg.n_aa = 4;
    cfg.n_t = 2;
    cfg.n_b = 1;
    cfg.n_e = 1;
    cfg.m = 2;
    cfg.beta = 0.01;
    cfg.p_total = 2.0;
    cfg.set_snr_db(10.0);
    return cfg;
}

std::vector<int> random_subset(Rng& rng, int n_rf, int n_t) {
    std::vector<int> pool(n_rf);
    for (int i = 0; i < n_rf; ++i) {
        pool[i] = i;
    }
    for (int i = 0; i < n_t; ++i) {
        std::swap(pool[i], pool[i + rng.uniform_below(n_rf - i)]);
    }
    std::vector<int> subset(pool.begin(), pool.begin() + n_t);
    std::sort(subset.begin(), subset.end());
    return subset;
}

std::pair<bool, std::string> criterion_null_space() {
    double worst = 0.0;
    // half the ensemble: N_RF = 7 with the canonical N_t = 4 selection;
    // other half: N_RF = 3 with AN over the full array (N_t = 2 leaves no
    // null space against N_b = 2 receive antennas)
    for (int trial = 0; trial < 200; ++trial) {
        const bool wide = trial % 2 == 0;
        SystemConfig cfg = protocol_cfg(wide ? 7 : 3);
        Rng rng(1000 + trial);
        const ChannelPair ch = draw_channels(cfg, rng);
        const TassSelection sel = wide
                                      ? build_selection(random_subset(rng, 7, 4), cfg)
                                      : build_full_selection(cfg);
        const HybridPrecoder prec = extract_hybrid(svd_init_precoder(ch, cfg), cfg);
        const CombinerPair comb = build_combiners(ch, cfg);
        const AnProjector an = build_an_projector(ch, sel, prec, comb);
        const double leak =
            (comb.w_b.adjoint() * ch.h * sel.t_matrix * prec.f_rf * an.t_bb).norm() /
            an.t_bb.norm();
        worst = std::max(worst, leak);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max leakage %.3e (limit 1e-9)", worst);
    return {worst <= 1e-9, buf};
}

std::pair<bool, std::string> criterion_gradient() {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        SystemConfig cfg = small_cfg();
        cfg.beta = 0.25;  // exercise a non-vanishing objective
        Rng rng(2000 + trial);
        const ChannelPair ch = draw_channels(cfg, rng);
        const Instance inst = build_svd_instance(cfg, ch, build_selection({0, 2}, cfg));
        const AsrContext ctx = build_asr_context(inst);
        const CVector g = max_asr_grad(ctx, inst.prec.p);
        Rng dir_rng(9000 + trial);
        for (int dir = 0; dir < 5; ++dir) {
            CVector u = dir_rng.complex_gaussian(inst.prec.p.size(), 1, 1.0);
            u /= u.norm();
            const double eps = 1e-6;
            const double fd = (asr_at(ctx, inst.prec.p + eps * u) -
                               asr_at(ctx, inst.prec.p - eps * u)) /
                              (2.0 * eps);
            const double an = (u.adjoint() * g)(0).real();
            worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(fd)));
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max rel err %.3e (limit 1e-5)", worst);
    return {worst <= 1e-5, buf};
}

std::pair<bool, std::string> criterion_factored() {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        SystemConfig cfg = small_cfg();
        cfg.n_rf = 3 + 2 * (trial % 3);  // 3, 5, 7
        cfg.n_t = trial % 3 == 0 ? 2 : 4;
        cfg.m = trial % 3 == 0 ? 4 : 2;
        cfg.beta = 0.2;
        Rng rng(3000 + trial);
        const ChannelPair ch = draw_channels(cfg, rng);
        const TassSelection sel =
            build_selection(random_subset(rng, cfg.n_rf, cfg.n_t), cfg);
        const Instance inst = build_svd_instance(cfg, ch, sel);
        const double direct = asr(build_asr_context(inst));
        const double factored =
            asr_factored(cfg, inst.prec.p, build_pair_kernels(inst));
        worst = std::max(worst,
                         std::abs(direct - factored) / std::max(1.0, std::abs(direct)));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max mismatch %.3e (limit 1e-10)", worst);
    return {worst <= 1e-10, buf};
}

std::pair<bool, std::string> criterion_sdp_cross_check() {
    double worst = 0.0;
    Rng rng(4000);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_below(15));
        const int m = 1 + static_cast<int>(rng.uniform_below(3));
        const SdpProblem p = testref::feasible_instance(rng, n, m);
        const SdpSolution sol = solve(p, 1e-9, 300);
        const double reference = testref::projected_splitting_objective(p);
        worst = std::max(
            worst, std::abs(sol.objective - reference) / std::max(1.0, std::abs(reference)));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max objective gap %.3e (limit 1e-5)", worst);
    return {worst <= 1e-5, buf};
}

std::pair<bool, std::string> criterion_admm() {
    int terminated = 0;
    double worst_trace = 0.0;
    double worst_eig = 0.0;
    const int trials = 50;
    for (int trial = 0; trial < trials; ++trial) {
        const SystemConfig cfg = small_cfg();
        Rng rng(5000 + trial);
        const ChannelPair ch = draw_channels(cfg, rng);
        const Instance inst = build_svd_instance(cfg, ch, build_selection({0, 2}, cfg));
        AdmmSettings settings;
        settings.max_outer = 200;
        try {
            const PrecoderResult res = max_asr_admm(inst, settings);
            ++terminated;
            for (const auto& rec : res.log) {
                worst_trace = std::max(worst_trace, rec.feas_trace);
                worst_eig = std::min(worst_eig, rec.feas_eig);
            }
        } catch (const SolverError&) {
            // counted as non-terminating
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "terminated %d/%d, worst trace %.2e, min eig %.2e",
                  terminated, trials, worst_trace, worst_eig);
    const bool pass = terminated >= static_cast<int>(0.95 * trials) &&
                      worst_trace <= 1e-6 && worst_eig >= -1e-8;
    return {pass, buf};
}

std::pair<bool, std::string> criterion_altmin_monotone() {
    double worst_rise = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        SystemConfig cfg = small_cfg();
        cfg.beta = 0.25;
        Rng rng(6000 + trial);
        const ChannelPair ch = draw_channels(cfg, rng);
        const Instance inst = build_svd_instance(cfg, ch, build_selection({0, 1}, cfg));
        const PrecoderResult res = sdr_altmin(inst);
        for (size_t i = 1; i < res.log.size(); ++i) {
            worst_rise =
                std::max(worst_rise, res.log[i].objective - res.log[i - 1].objective);
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max objective rise %.3e (slack 1e-9)", worst_rise);
    return {worst_rise <= 1e-9, buf};
}

std::pair<bool, std::string> criterion_tass_dominance() {
    for (int trial = 0; trial < 100; ++trial) {
        SystemConfig cfg = protocol_cfg(5);
        cfg.n_t = 4;
        cfg.p_total = 4.0;
        cfg.set_snr_db(10.0);
        Rng rng(7000 + trial);
        const ChannelPair ch = draw_channels(cfg, rng);
        const double best = asr_of_subset(cfg, ch, tass_max_asr(cfg, ch).chosen.indices);
        Rng pick(7500 + trial);
        const std::vector<std::vector<int>> rivals = {
            tass_max_ev(ch, cfg).chosen.indices,
            tass_max_p_sinr_ansnr(cfg, ch).chosen.indices,
            tass_leakage(cfg, ch).chosen.indices,
            tass_random(cfg, pick).chosen.indices,
        };
        for (const auto& subset : rivals) {
            if (best < asr_of_subset(cfg, ch, subset) - 1e-12) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "violated at trial %d", trial);
                return {false, buf};
            }
        }
    }
    return {true, "exhaustive choice dominated all rivals on 100 instances"};
}

struct DrawEval {
    double asr = 0.0;
    double sr = 0.0;
};

DrawEval evaluate_draw(const SystemConfig& cfg, const ChannelPair& ch, PrecoderKind kind,
                       TassMethod tass, Rng tass_rng, Rng noise_rng, int n_noise) {
    const TassScorecard card = run_tass(tass, cfg, ch, tass_rng);
    const Instance inst = build_svd_instance(cfg, ch, card.chosen);
    PrecoderResult res;
    switch (kind) {
        case PrecoderKind::MaxAsrGa: res = max_asr_ga(inst); break;
        case PrecoderKind::MaxAsrAdmm: res = max_asr_admm(inst); break;
        case PrecoderKind::SdrAltMin: res = sdr_altmin(inst); break;
    }
    const Instance eval = build_instance(cfg, ch, card.chosen, res.precoder);
    const SrEstimate est = exact_sr_monte_carlo(eval, n_noise, noise_rng);
    return {est.asr, est.sr_exact};
}

std::pair<bool, std::string> criterion_sr_saturation() {
    const int draws = 200;
    double lowest_mean = 1e9;
    for (double snr : {20.0, 25.0}) {
        SystemConfig cfg = protocol_cfg(7);
        cfg.set_snr_db(snr);
        double sum = 0.0;
        for (int d = 0; d < draws; ++d) {
            const Rng base = Rng(8000).substream(d);
            Rng ch_rng = base.substream(0);
            Rng tass_rng = base.substream(1);
            Rng noise_rng = base.substream(2);
            const ChannelPair ch = draw_channels(cfg, ch_rng);
            sum += evaluate_draw(cfg, ch, PrecoderKind::MaxAsrGa, TassMethod::MaxEv,
                                 tass_rng, noise_rng, 300)
                       .sr;
        }
        lowest_mean = std::min(lowest_mean, sum / draws);
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "mean SR %.3f vs bound 4.0 (gap limit 0.3)",
                  lowest_mean);
    return {4.0 - lowest_mean <= 0.3, buf};
}

std::pair<bool, std::string> criterion_precoder_ordering() {
    const int draws = 200;
    SystemConfig cfg = protocol_cfg(7);
    cfg.set_snr_db(10.0);
    std::vector<double> ga, admm, alt;
    for (int d = 0; d < draws; ++d) {
        const Rng base = Rng(8100).substream(d);
        Rng ch_rng = base.substream(0);
        const ChannelPair ch = draw_channels(cfg, ch_rng);
        // shared channels and shared noise substreams across the methods
        ga.push_back(evaluate_draw(cfg, ch, PrecoderKind::MaxAsrGa, TassMethod::MaxEv,
                                   base.substream(1), base.substream(2), 250)
                         .sr);
        admm.push_back(evaluate_draw(cfg, ch, PrecoderKind::MaxAsrAdmm, TassMethod::MaxEv,
                                     base.substream(1), base.substream(2), 250)
                           .sr);
        alt.push_back(evaluate_draw(cfg, ch, PrecoderKind::SdrAltMin, TassMethod::MaxEv,
                                    base.substream(1), base.substream(2), 250)
                          .sr);
    }
    double t_admm = 0.0, t_alt = 0.0;
    const bool ok1 = paired_greater(ga, admm, &t_admm);
    const bool ok2 = paired_greater(ga, alt, &t_alt);
    char buf[96];
    std::snprintf(buf, sizeof buf, "t(GA-ADMM) %.2f, t(GA-AltMin) %.2f (need > 1.653)",
                  t_admm, t_alt);
    return {ok1 && ok2, buf};
}

std::pair<bool, std::string> criterion_tass_ordering() {
    const int draws = 200;
    SystemConfig cfg = protocol_cfg(7);
    cfg.set_snr_db(10.0);
    std::vector<double> v_maxasr, v_sinr, v_ev, v_leak, v_rand;
    for (int d = 0; d < draws; ++d) {
        const Rng base = Rng(8200).substream(d);
        Rng ch_rng = base.substream(0);
        const ChannelPair ch = draw_channels(cfg, ch_rng);
        auto eval_tass = [&](TassMethod m) {
            Rng pick = base.substream(1);
            const TassScorecard card = run_tass(m, cfg, ch, pick);
            const Instance inst = build_svd_instance(cfg, ch, card.chosen);
            const PrecoderResult res = max_asr_ga(inst);
            const Instance eval = build_instance(cfg, ch, card.chosen, res.precoder);
            return asr(build_asr_context(eval));
        };
        v_maxasr.push_back(eval_tass(TassMethod::MaxAsr));
        v_sinr.push_back(eval_tass(TassMethod::MaxPSinrAnsnr));
        v_ev.push_back(eval_tass(TassMethod::MaxEv));
        v_leak.push_back(eval_tass(TassMethod::Leakage));
        v_rand.push_back(eval_tass(TassMethod::Random));
    }
    double t1 = 0.0, t2 = 0.0, t3 = 0.0;
    const bool ok1 = paired_greater(v_maxasr, v_sinr, &t1);
    const bool ok2 = paired_greater(v_ev, v_rand, &t2);
    const bool ok3 = paired_greater(v_leak, v_rand, &t3);
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "t(ASR-SINR) %.2f, t(EV-rand) %.2f, t(leak-rand) %.2f (need > 1.653)", t1,
                  t2, t3);
    return {ok1 && ok2 && ok3, buf};
}

std::pair<bool, std::string> criterion_eavesdropper_peak() {
    const int draws = 200;
    const std::vector<double> grid = {0, 2.5, 5, 7.5, 10, 12.5, 15, 17.5, 20, 22.5, 25};
    std::string detail;
    for (PrecoderKind kind :
         {PrecoderKind::MaxAsrGa, PrecoderKind::MaxAsrAdmm, PrecoderKind::SdrAltMin}) {
        std::vector<double> curve;
        for (double snr : grid) {
            SystemConfig cfg = protocol_cfg(7);
            cfg.n_e = 4;  // eavesdropper advantage
            cfg.set_snr_db(snr);
            double sum = 0.0;
            for (int d = 0; d < draws; ++d) {
                const Rng base = Rng(8300).substream(d);
                Rng ch_rng = base.substream(0);
                const ChannelPair ch = draw_channels(cfg, ch_rng);
                sum += evaluate_draw(cfg, ch, kind, TassMethod::MaxEv, base.substream(1),
                                     base.substream(2), 200)
                           .sr;
            }
            curve.push_back(sum / draws);
        }
        size_t peak = 0;
        for (size_t i = 1; i < curve.size(); ++i) {
            if (curve[i] > curve[peak]) {
                peak = i;
            }
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s peak %.2f@%.1fdB end %.2f; ",
                      to_string(kind).c_str(), curve[peak], grid[peak], curve.back());
        detail += buf;
        const bool interior = peak > 0 && peak + 1 < curve.size();
        const bool descends = curve.back() < curve[peak] - 0.1;
        if (!(interior && descends)) {
            return {false, detail};
        }
    }
    return {true, detail};
}

std::pair<bool, std::string> criterion_complexity() {
    SystemConfig cfg = protocol_cfg(7);
    const double ev = flops_estimate(TassMethod::MaxEv, cfg);
    const double sinr = flops_estimate(TassMethod::MaxPSinrAnsnr, cfg);
    const double asr_cost = flops_estimate(TassMethod::MaxAsr, cfg);
    bool pass = ev < sinr && sinr < asr_cost;

    // Max-ASR cost must scale at least with the subset count
    auto choose = [](int n, int k) {
        double q = 1.0;
        for (int i = 1; i <= k; ++i) {
            q *= static_cast<double>(n - k + i) / i;
        }
        return q;
    };
    double last = 0.0;
    for (int n_rf = 5; n_rf <= 9; ++n_rf) {
        SystemConfig c = protocol_cfg(7);
        c.n_rf = n_rf;
        c.n_t = 4;
        const double cost = flops_estimate(TassMethod::MaxAsr, c);
        if (n_rf > 5) {
            const double ratio = cost / last;
            const double q_ratio = choose(n_rf, 4) / choose(n_rf - 1, 4);
            pass = pass && ratio >= q_ratio;
        }
        last = cost;
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "EV %.3g < SINR %.3g < ASR %.3g, growth ok", ev, sinr,
                  asr_cost);
    return {pass, buf};
}

}  // namespace

int main() {
    run(1, "null-space artificial noise", criterion_null_space);
    run(2, "gradient vs finite differences", criterion_gradient);
    run(3, "factored ASR equivalence", criterion_factored);
    run(4, "SDP cross-check", criterion_sdp_cross_check);
    run(5, "ADMM feasibility and consensus", criterion_admm);
    run(6, "SDR-AltMin monotonicity", criterion_altmin_monotone);
    run(7, "Max-ASR TASS dominance", criterion_tass_dominance);
    run(8, "SR saturation at high SNR", criterion_sr_saturation);
    run(9, "precoder ordering (paired test)", criterion_precoder_ordering);
    run(10, "TASS ordering (paired test)", criterion_tass_ordering);
    run(11, "eavesdropper-advantage peak", criterion_eavesdropper_peak);
    run(12, "complexity table", criterion_complexity);
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
    } else {
        std::printf("all criteria passed\n");
    }
    return failures;
}
