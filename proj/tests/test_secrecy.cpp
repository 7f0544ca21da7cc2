#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hybridsm/precoders.hpp"
#include "hybridsm/secrecy.hpp"

#include <cmath>

using namespace hsm;

namespace {

SystemConfig tiny_cfg() {
    SystemConfig cfg;
    cfg.n_rf = 3;
    cfg.n_aa = 4;
    cfg.n_t = 2;
    cfg.n_b = 1;
    cfg.n_e = 1;
    cfg.m = 2;
    cfg.beta = 0.25;
    cfg.p_total = 2.0;
    cfg.sigma2_b = cfg.sigma2_e = 0.2;
    return cfg;
}

Instance tiny_instance(std::uint64_t seed, SystemConfig cfg = tiny_cfg(),
                       std::vector<int> subset = {0, 2}) {
    Rng rng(seed);
    const ChannelPair ch = draw_channels(cfg, rng);
    return build_svd_instance(cfg, ch, build_selection(std::move(subset), cfg));
}

/// Direct 16-term evaluation of the pairwise sum from the candidate list and
/// an independently assembled kernel.
double kappa_brute(const Instance& inst, Side side) {
    const auto& w = side == Side::Bob ? inst.comb.w_b : inst.comb.w_e;
    const auto& h = side == Side::Bob ? inst.ch.h : inst.ch.g;
    const auto& omega = side == Side::Bob ? inst.whit.omega_b : inst.whit.omega_e;
    const CMatrix a = h.adjoint() * w * omega.inverse() * w.adjoint() * h;
    const double scale = inst.cfg.beta * inst.cfg.p_total / 4.0;
    double sum = 0.0;
    for (const auto& xi : inst.tx.candidates) {
        for (const auto& xj : inst.tx.candidates) {
            const CVector d = xi - xj;
            sum += std::exp(-scale * (d.dot(a * d)).real());
        }
    }
    return sum;
}

}  // namespace

TEST_CASE("kappa with no message power counts all candidate pairs") {
    SystemConfig cfg = tiny_cfg();
    cfg.beta = 0.0;
    const Instance inst = tiny_instance(1, cfg);
    const AsrContext ctx = build_asr_context(inst);
    const double k = ctx.candidate_count();
    CHECK(kappa(ctx, Side::Bob) == doctest::Approx(k * k).epsilon(1e-14));
    CHECK(kappa(ctx, Side::Eve) == doctest::Approx(k * k).epsilon(1e-14));
}

TEST_CASE("kappa of a single candidate is one") {
    const Instance inst = tiny_instance(2);
    AsrContext ctx = build_asr_context(inst);
    ctx.active = {0};
    ctx.symbols = {cx(1.0, 0.0)};
    CHECK(kappa(ctx, Side::Bob) == doctest::Approx(1.0));
}

TEST_CASE("kappa equals the direct pairwise summation") {
    for (std::uint64_t seed = 3; seed < 8; ++seed) {
        const Instance inst = tiny_instance(seed);
        const AsrContext ctx = build_asr_context(inst);
        CHECK(kappa(ctx, Side::Bob) ==
              doctest::Approx(kappa_brute(inst, Side::Bob)).epsilon(1e-12));
        CHECK(kappa(ctx, Side::Eve) ==
              doctest::Approx(kappa_brute(inst, Side::Eve)).epsilon(1e-12));
    }
}

TEST_CASE("cut-off rate vanishes without message power") {
    SystemConfig cfg = tiny_cfg();
    cfg.beta = 0.0;
    const Instance inst = tiny_instance(4, cfg);
    const AsrContext ctx = build_asr_context(inst);
    CHECK(cutoff_rate(ctx, Side::Bob) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cut-off rate approaches log2(NtM) as noise vanishes") {
    SystemConfig cfg = tiny_cfg();
    cfg.sigma2_b = cfg.sigma2_e = 1e-8;
    const Instance inst = tiny_instance(5, cfg);
    const AsrContext ctx = build_asr_context(inst);
    const double limit = std::log2(static_cast<double>(ctx.candidate_count()));
    CHECK(cutoff_rate(ctx, Side::Bob) == doctest::Approx(limit).epsilon(1e-6));
}

TEST_CASE("cut-off rate stays within its analytic range") {
    SystemConfig cfg;
    cfg.n_rf = 5;
    cfg.n_t = 4;
    cfg.n_aa = 4;
    cfg.n_b = 2;
    cfg.n_e = 2;
    cfg.m = 4;
    cfg.beta = 0.01;
    cfg.p_total = 4.0;
    cfg.set_snr_db(10.0);
    Rng rng(6);
    const ChannelPair ch = draw_channels(cfg, rng);
    const Instance inst = build_svd_instance(cfg, ch, build_selection({0, 1, 2, 4}, cfg));
    const AsrContext ctx = build_asr_context(inst);
    const double upper = std::log2(16.0);  // 4 bits/s/Hz at N_t*M = 16
    for (Side side : {Side::Bob, Side::Eve}) {
        const double r = cutoff_rate(ctx, side);
        CHECK(r >= 0.0);
        CHECK(r <= upper + 1e-12);
    }
    CHECK(asr(ctx) <= upper + 1e-12);
}

TEST_CASE("a symmetric eavesdropper nullifies the ASR") {
    SystemConfig cfg = tiny_cfg();
    cfg.n_e = cfg.n_b;
    Rng rng(7);
    ChannelPair ch = draw_channels(cfg, rng);
    ch.g = ch.h;
    const Instance inst = build_svd_instance(cfg, ch, build_selection({0, 2}, cfg));
    const AsrContext ctx = build_asr_context(inst);
    CHECK(asr(ctx) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("asr equals the cut-off rate difference") {
    const Instance inst = tiny_instance(8);
    const AsrContext ctx = build_asr_context(inst);
    CHECK(asr(ctx) == doctest::Approx(cutoff_rate(ctx, Side::Bob) -
                                      cutoff_rate(ctx, Side::Eve))
                          .epsilon(1e-12));
}

TEST_CASE("factored ASR matches the direct form") {
    for (std::uint64_t seed = 10; seed < 30; ++seed) {
        const Instance inst = tiny_instance(seed);
        const AsrContext ctx = build_asr_context(inst);
        const PairKernels kernels = build_pair_kernels(inst);
        const double direct = asr(ctx);
        const double factored = asr_factored(inst.cfg, inst.prec.p, kernels);
        CHECK(factored == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("pair kernels vanish on the symbol diagonal of one subarray") {
    const Instance inst = tiny_instance(31);
    const PairKernels kernels = build_pair_kernels(inst);
    const int m = kernels.m_order;
    for (const auto& pair : kernels.pairs) {
        if (pair.m != pair.m_prime) {
            continue;
        }
        for (int k = 0; k < m; ++k) {
            CHECK(pair.b[k * m + k].norm() == 0.0);  // J = (b_k - b_k) I
            CHECK(pair.e[k * m + k].norm() == 0.0);
        }
    }
}

TEST_CASE("jensen surrogate is zero without message power") {
    SystemConfig cfg = tiny_cfg();
    cfg.beta = 0.0;
    const Instance inst = tiny_instance(32, cfg);
    const PairKernels kernels = build_pair_kernels(inst);
    CHECK(asr_jensen_lower(inst.cfg, inst.prec.p, kernels) == doctest::Approx(0.0));
}

TEST_CASE("jensen surrogate is tight for a single term") {
    Rng rng(33);
    SystemConfig cfg = tiny_cfg();
    const CMatrix mb = rng.complex_gaussian(8, 8, 1.0);
    const CMatrix me = rng.complex_gaussian(8, 8, 1.0);
    PairKernels kernels;
    kernels.m_order = 1;
    PairKernels::Pair pair;
    pair.m = 0;
    pair.m_prime = 2;
    pair.dim = 8;
    pair.b = {CMatrix(mb * mb.adjoint())};
    pair.e = {CMatrix(me * me.adjoint())};
    kernels.pairs.push_back(pair);

    const CVector p = rng.complex_gaussian(cfg.n_total(), 1, 1.0);
    const double factored = asr_factored(cfg, p, kernels);
    const double jensen = asr_jensen_lower(cfg, p, kernels);
    CHECK(jensen == doctest::Approx(factored).epsilon(1e-12));
}

TEST_CASE("jensen surrogate matches an independent term-by-term sum") {
    const Instance inst = tiny_instance(34);
    const PairKernels kernels = build_pair_kernels(inst);
    const double scale = inst.cfg.beta * inst.cfg.p_total / 4.0;
    double expected = 0.0;
    for (const auto& pair : kernels.pairs) {
        const CVector q = stacked_pair_block(inst.prec.p, pair.m, pair.m_prime, inst.cfg.n_aa);
        for (size_t t = 0; t < pair.b.size(); ++t) {
            const double tr_b = (q.adjoint() * pair.b[t] * q)(0).real();
            const double tr_e = (q.adjoint() * pair.e[t] * q)(0).real();
            expected += scale * (tr_b - tr_e);
        }
    }
    expected *= std::log2(std::exp(1.0));
    CHECK(asr_jensen_lower(inst.cfg, inst.prec.p, kernels) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("monte-carlo SR is exactly zero without message power") {
    SystemConfig cfg = tiny_cfg();
    cfg.beta = 0.0;
    const Instance inst = tiny_instance(35, cfg);
    Rng rng(99);
    const SrEstimate est = exact_sr_monte_carlo(inst, 200, rng);
    CHECK(est.sr_exact == 0.0);
    CHECK(est.std_err == 0.0);
    CHECK(est.n_noise_samples == 200);
}

TEST_CASE("monte-carlo mutual information saturates as noise vanishes") {
    SystemConfig cfg = tiny_cfg();
    cfg.beta = 0.9;
    cfg.sigma2_b = cfg.sigma2_e = 1e-9;
    Rng rng(36);
    ChannelPair ch = draw_channels(cfg, rng);
    ch.g.setZero();  // blind Eve, so SR == I(x; y_b) -> log2(NtM)
    const Instance inst = build_svd_instance(cfg, ch, build_selection({0, 2}, cfg));
    Rng noise(100);
    const SrEstimate est = exact_sr_monte_carlo(inst, 400, noise);
    CHECK(est.sr_exact == doctest::Approx(std::log2(4.0)).epsilon(0.02));
}

TEST_CASE("monte-carlo estimate is consistent with a long reference run") {
    const Instance inst = tiny_instance(37);
    Rng rng_small(101), rng_big(102);
    const SrEstimate small = exact_sr_monte_carlo(inst, 10000, rng_small);
    const SrEstimate big = exact_sr_monte_carlo(inst, 200000, rng_big);
    const double tol = 3.0 * (small.std_err + big.std_err);
    CHECK(std::abs(small.sr_exact - big.sr_exact) <= tol);
    CHECK(small.asr == doctest::Approx(big.asr));  // deterministic part
}

TEST_CASE("per-sample estimator is invariant under joint unitary rotation") {
    // the estimator only sees ||v_i - v_j + n||^2 and ||n||^2, both preserved
    // when images and noise rotate together
    Rng rng(103);
    const int dim = 3, k = 4;
    std::vector<CVector> v;
    for (int i = 0; i < k; ++i) {
        v.push_back(rng.complex_gaussian(dim, 1, 1.0));
    }
    const CVector noise = rng.complex_gaussian(dim, 1, 1.0);
    const CMatrix gauss = rng.complex_gaussian(dim, dim, 1.0);
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(gauss).householderQ();

    auto sample_value = [&](const std::vector<CVector>& img, const CVector& n) {
        double acc = 0.0;
        for (int i = 0; i < k; ++i) {
            double sum = 0.0;
            for (int j = 0; j < k; ++j) {
                sum += std::exp(-(img[i] - img[j] + n).squaredNorm() + n.squaredNorm());
            }
            acc += std::log2(sum);
        }
        return acc / k;
    };

    std::vector<CVector> v_rot;
    for (const auto& x : v) {
        v_rot.push_back(q * x);
    }
    CHECK(sample_value(v, noise) ==
          doctest::Approx(sample_value(v_rot, q * noise)).epsilon(1e-12));
}

TEST_CASE("asr is monotone in Eve's noise variance") {
    for (std::uint64_t seed = 40; seed < 90; ++seed) {
        SystemConfig cfg = tiny_cfg();
        double last = -1e9;
        for (double sigma2_e : {0.05, 0.2, 1.0, 5.0}) {
            cfg.sigma2_e = sigma2_e;
            const Instance inst = tiny_instance(seed, cfg);
            const double value = asr(build_asr_context(inst));
            CHECK(value >= last - 1e-12);
            last = value;
        }
    }
}

TEST_CASE("kappa shrinks as the exponent scale grows") {
    const Instance inst = tiny_instance(51);
    AsrContext ctx = build_asr_context(inst);
    double last = std::numeric_limits<double>::infinity();
    for (double scale : {0.0, 0.1, 0.5, 2.0, 10.0}) {
        ctx.scale = scale;
        const double k = kappa(ctx, Side::Bob);
        CHECK(k <= last + 1e-12);
        CHECK(k >= ctx.candidate_count() - 1e-9);  // diagonal floor
        last = k;
    }
}

TEST_CASE("SINR reduces to the AN-free quotient at beta = 1") {
    SystemConfig cfg = tiny_cfg();
    cfg.beta = 1.0;
    const Instance inst = tiny_instance(52, cfg);
    for (int i = 0; i < cfg.n_rf; ++i) {
        const auto [sinr, ansnr] = sinr_ansnr(inst, i);
        const double num = cfg.p_total *
                           (inst.comb.w_b.adjoint() * inst.ch.h_block(i) *
                            inst.prec.p_block(i, cfg.n_aa))
                               .squaredNorm();
        CHECK(sinr == doctest::Approx(num / (cfg.n_rf * cfg.sigma2_b)).epsilon(1e-12));
        CHECK(ansnr >= 0.0);
    }
}

TEST_CASE("SINR is zero when the subarray reaches nobody") {
    SystemConfig cfg = tiny_cfg();
    Rng rng(53);
    ChannelPair ch = draw_channels(cfg, rng);
    ch.h.middleCols(4, 4).setZero();  // subarray 1 invisible to Bob
    const Instance inst = build_svd_instance(cfg, ch, build_selection({0, 2}, cfg));
    const auto [sinr, ansnr] = sinr_ansnr(inst, 1);
    CHECK(sinr == 0.0);
    CHECK(ansnr >= 0.0);
    CHECK_THROWS_AS(sinr_ansnr(inst, 7), std::invalid_argument);
}

TEST_CASE("AN denominator trace equals the sampled expectation") {
    const Instance inst = tiny_instance(54);
    const auto& cfg = inst.cfg;
    const CMatrix path = inst.comb.w_e.adjoint() * inst.ch.g * inst.prec.f_rf * inst.an.t_bb;
    const double exact = path.squaredNorm();
    Rng rng(55);
    double acc = 0.0;
    const int samples = 100000;
    for (int s = 0; s < samples; ++s) {
        acc += (path * rng.complex_gaussian(path.cols(), 1, 1.0)).squaredNorm();
    }
    CHECK(acc / samples == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("SLNR edge cases and definition") {
    SystemConfig cfg = tiny_cfg();
    Rng rng(56);
    ChannelPair ch = draw_channels(cfg, rng);
    ch.g.setZero();  // no leakage anywhere
    const Instance no_leak = build_svd_instance(cfg, ch, build_selection({0, 1}, cfg));
    for (int n = 0; n < cfg.n_rf; ++n) {
        const double expected =
            cfg.beta * cfg.p_total *
            (no_leak.comb.w_b.adjoint() * no_leak.ch.h_block(n) *
             no_leak.prec.p_block(n, cfg.n_aa))
                .squaredNorm() /
            (cfg.n_rf * cfg.sigma2_b);
        CHECK(slnr(no_leak, n) == doctest::Approx(expected).epsilon(1e-12));
    }

    Rng rng2(57);
    ChannelPair ch2 = draw_channels(cfg, rng2);
    ch2.h.middleCols(0, 4).setZero();
    const Instance no_signal = build_svd_instance(cfg, ch2, build_selection({1, 2}, cfg));
    CHECK(slnr(no_signal, 0) == 0.0);

    // trace-expansion oracle on a generic instance
    const Instance inst = tiny_instance(58);
    for (int n = 0; n < cfg.n_rf; ++n) {
        const CVector sb = inst.comb.w_b.adjoint() *
                           (inst.ch.h_block(n) * inst.prec.p_block(n, cfg.n_aa));
        const CVector se = inst.comb.w_e.adjoint() *
                           (inst.ch.g_block(n) * inst.prec.p_block(n, cfg.n_aa));
        const double num = cfg.beta * cfg.p_total * (sb * sb.adjoint()).trace().real();
        const double den = cfg.beta * cfg.p_total * (se * se.adjoint()).trace().real() +
                           cfg.n_rf * cfg.sigma2_b;
        CHECK(slnr(inst, n) == doctest::Approx(num / den).epsilon(1e-12));
    }
}
