#include "hybridsm/harness.hpp"

#include "hybridsm/precoders.hpp"
#include "hybridsm/sdp.hpp"
#include "hybridsm/secrecy.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>

namespace hsm {

std::string to_string(PrecoderKind kind) {
    switch (kind) {
        case PrecoderKind::MaxAsrGa: return "max-asr-ga";
        case PrecoderKind::MaxAsrAdmm: return "max-asr-admm";
        case PrecoderKind::SdrAltMin: return "sdr-altmin";
    }
    throw std::invalid_argument("unknown PrecoderKind");
}

PrecoderKind precoder_from_string(const std::string& name) {
    if (name == "max-asr-ga") return PrecoderKind::MaxAsrGa;
    if (name == "max-asr-admm") return PrecoderKind::MaxAsrAdmm;
    if (name == "sdr-altmin") return PrecoderKind::SdrAltMin;
    throw std::invalid_argument("unknown precoder '" + name + "'");
}

void ExperimentSpec::validate() const {
    cfg.validate();
    if (snr_grid_db.empty()) {
        throw ConfigError("spec: SNR grid must be nonempty");
    }
    if (n_channel_draws < 1 || n_noise_samples < 100) {
        throw ConfigError("spec: need n_channel_draws >= 1 and n_noise_samples >= 100");
    }
}

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
    }
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                body(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

struct DrawOutcome {
    bool ok = false;
    double asr = 0.0;
    double sr = 0.0;
    std::string subset;
    std::string scores;
    double flops = 0.0;
    std::string error;
};

std::string joined(const std::vector<int>& v) {
    std::ostringstream ss;
    for (size_t i = 0; i < v.size(); ++i) {
        ss << (i ? "|" : "") << v[i];
    }
    return ss.str();
}

std::string joined(const std::vector<double>& v) {
    std::ostringstream ss;
    ss.precision(9);
    for (size_t i = 0; i < v.size(); ++i) {
        ss << (i ? "|" : "") << v[i];
    }
    return ss.str();
}

DrawOutcome run_one_draw(const SystemConfig& cfg, const ExperimentSpec& spec, int draw) {
    DrawOutcome out;
    try {
        const Rng base = Rng(spec.seed).substream(static_cast<std::uint64_t>(draw));
        Rng ch_rng = base.substream(0);
        Rng tass_rng = base.substream(1);
        Rng noise_rng = base.substream(2);

        const ChannelPair ch = draw_channels(cfg, ch_rng);
        const TassScorecard card = run_tass(spec.tass, cfg, ch, tass_rng);
        out.subset = joined(card.chosen.indices);
        out.scores = joined(card.scores);
        out.flops = card.flops_estimate;
        const Instance inst = build_svd_instance(cfg, ch, card.chosen);

        PrecoderResult result;
        switch (spec.precoder) {
            case PrecoderKind::MaxAsrGa: result = max_asr_ga(inst); break;
            case PrecoderKind::MaxAsrAdmm: result = max_asr_admm(inst); break;
            case PrecoderKind::SdrAltMin: result = sdr_altmin(inst); break;
        }

        const Instance eval = build_instance(cfg, ch, card.chosen, result.precoder);
        const SrEstimate est = exact_sr_monte_carlo(eval, spec.n_noise_samples, noise_rng);
        out.ok = true;
        out.asr = est.asr;
        out.sr = est.sr_exact;
    } catch (const DegenerateProjectorError& e) {
        out.error = e.what();
    } catch (const SolverError& e) {
        out.error = e.what();
    } catch (const SdpFailure& e) {
        out.error = e.what();
    }
    return out;
}

ResultRecord sweep_point(const ExperimentSpec& spec, double snr_db) {
    SystemConfig cfg = spec.cfg;
    cfg.set_snr_db(snr_db);
    const auto start = std::chrono::steady_clock::now();

    std::vector<DrawOutcome> outcomes(spec.n_channel_draws);
    parallel_for(spec.n_channel_draws, spec.threads,
                 [&](int draw) { outcomes[draw] = run_one_draw(cfg, spec, draw); });

    ResultRecord rec;
    rec.snr_db = snr_db;
    rec.precoder = to_string(spec.precoder);
    rec.tass = to_string(spec.tass);
    rec.n_draws = spec.n_channel_draws;
    double sum_asr = 0.0, sum_sr = 0.0, sum_sr2 = 0.0;
    for (const auto& o : outcomes) {
        if (!o.ok) {
            ++rec.n_failed;
            continue;
        }
        rec.draw_asr.push_back(o.asr);
        rec.draw_sr.push_back(o.sr);
        rec.draw_subset.push_back(o.subset);
        rec.draw_scores.push_back(o.scores);
        rec.tass_flops = o.flops;
        sum_asr += o.asr;
        sum_sr += o.sr;
        sum_sr2 += o.sr * o.sr;
    }
    const int n_ok = static_cast<int>(rec.draw_sr.size());
    if (rec.n_failed > 0.05 * spec.n_channel_draws) {
        throw RunFailure("run_sweep: " + std::to_string(rec.n_failed) + " of " +
                         std::to_string(spec.n_channel_draws) + " draws failed at " +
                         std::to_string(snr_db) + " dB (budget 5%)");
    }
    if (n_ok > 0) {
        rec.mean_asr = sum_asr / n_ok;
        rec.mean_sr_mc = sum_sr / n_ok;
        const double var = std::max(0.0, sum_sr2 / n_ok - rec.mean_sr_mc * rec.mean_sr_mc);
        rec.std_err = n_ok > 1 ? std::sqrt(var / n_ok) : 0.0;
    }
    rec.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

}  // namespace

std::vector<ResultRecord> run_sweep(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<ResultRecord> records;
    records.reserve(spec.snr_grid_db.size());
    for (double snr : spec.snr_grid_db) {
        records.push_back(sweep_point(spec, snr));
    }
    return records;
}

CdfResult run_cdf(const ExperimentSpec& spec, double snr_db) {
    ExperimentSpec point = spec;
    point.snr_grid_db = {snr_db};
    point.validate();
    CdfResult out;
    out.record = sweep_point(point, snr_db);
    out.sorted_sr = out.record.draw_sr;
    std::sort(out.sorted_sr.begin(), out.sorted_sr.end());

    const double upper = std::log2(static_cast<double>(spec.cfg.n_t) * spec.cfg.m);
    const int points = 101;
    out.grid.resize(points);
    out.cdf.resize(points);
    const double n = static_cast<double>(out.sorted_sr.size());
    for (int i = 0; i < points; ++i) {
        out.grid[i] = upper * i / (points - 1);
        const auto it =
            std::upper_bound(out.sorted_sr.begin(), out.sorted_sr.end(), out.grid[i]);
        out.cdf[i] = n > 0 ? static_cast<double>(it - out.sorted_sr.begin()) / n : 0.0;
    }
    return out;
}

std::vector<ResultRecord> run_compare(const ExperimentSpec& spec) {
    // Identical seeds mean identical channel draws per trial for every method.
    static constexpr TassMethod kAll[] = {TassMethod::MaxAsr, TassMethod::MaxPSinrAnsnr,
                                          TassMethod::MaxEv, TassMethod::Leakage,
                                          TassMethod::Random};
    std::vector<ResultRecord> records;
    for (TassMethod method : kAll) {
        ExperimentSpec per = spec;
        per.tass = method;
        auto part = run_sweep(per);
        records.insert(records.end(), part.begin(), part.end());
    }
    return records;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_snr_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        // min:max:step
        std::istringstream ss(text);
        std::string part;
        double v[3];
        for (int i = 0; i < 3; ++i) {
            if (!std::getline(ss, part, ':')) {
                throw ConfigError("snr grid must be 'min:max:step' or comma-separated");
            }
            v[i] = std::stod(part);
        }
        if (v[2] <= 0.0 || v[1] < v[0]) {
            throw ConfigError("snr grid: need max >= min and step > 0");
        }
        for (double x = v[0]; x <= v[1] + 1e-9; x += v[2]) {
            grid.push_back(x);
        }
    } else {
        std::istringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ',')) {
            grid.push_back(std::stod(trim(part)));
        }
    }
    if (grid.empty()) {
        throw ConfigError("snr grid is empty");
    }
    return grid;
}

std::string format_snr_grid(const std::vector<double>& grid) {
    std::ostringstream ss;
    for (size_t i = 0; i < grid.size(); ++i) {
        if (i) ss << ",";
        ss << grid[i];
    }
    return ss.str();
}

}  // namespace

ExperimentSpec parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentSpec spec;
    bool saw_n_rf = false, saw_n_t = false, saw_p_total = false;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const auto where = origin + ":" + std::to_string(line_no);
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(where + ": empty key or value");
        }
        try {
            if (key == "n_rf") { spec.cfg.n_rf = std::stoi(value); saw_n_rf = true; }
            else if (key == "n_aa") spec.cfg.n_aa = std::stoi(value);
            else if (key == "n_t") { spec.cfg.n_t = std::stoi(value); saw_n_t = true; }
            else if (key == "n_b") spec.cfg.n_b = std::stoi(value);
            else if (key == "n_e") spec.cfg.n_e = std::stoi(value);
            else if (key == "m") spec.cfg.m = std::stoi(value);
            else if (key == "beta") spec.cfg.beta = std::stod(value);
            else if (key == "p_total") { spec.cfg.p_total = std::stod(value); saw_p_total = true; }
            else if (key == "precoder") spec.precoder = precoder_from_string(value);
            else if (key == "tass") spec.tass = tass_from_string(value);
            else if (key == "snr_grid_db") spec.snr_grid_db = parse_snr_grid(value);
            else if (key == "n_channel_draws") spec.n_channel_draws = std::stoi(value);
            else if (key == "n_noise_samples") spec.n_noise_samples = std::stoi(value);
            else if (key == "seed") spec.seed = std::stoull(value);
            else if (key == "output_path") spec.output_path = value;
            else if (key == "threads") spec.threads = std::stoi(value);
            else throw ConfigError(where + ": unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(where + ": bad value '" + value + "' for '" + key + "' (" +
                              e.what() + ")");
        }
    }

    if (!saw_n_rf) {
        throw ConfigError(origin + ": required key 'n_rf' is missing");
    }
    if (!saw_n_t) {
        spec.cfg.n_t = SystemConfig::derive_n_t(spec.cfg.n_rf);
    }
    if (!saw_p_total) {
        spec.cfg.p_total = static_cast<double>(spec.cfg.n_t);
    }
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return spec;
}

ExperimentSpec parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::string serialize_config(const ExperimentSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    out << "n_rf = " << spec.cfg.n_rf << "\n"
        << "n_aa = " << spec.cfg.n_aa << "\n"
        << "n_t = " << spec.cfg.n_t << "\n"
        << "n_b = " << spec.cfg.n_b << "\n"
        << "n_e = " << spec.cfg.n_e << "\n"
        << "m = " << spec.cfg.m << "\n"
        << "beta = " << spec.cfg.beta << "\n"
        << "p_total = " << spec.cfg.p_total << "\n"
        << "precoder = " << to_string(spec.precoder) << "\n"
        << "tass = " << to_string(spec.tass) << "\n"
        << "snr_grid_db = " << format_snr_grid(spec.snr_grid_db) << "\n"
        << "n_channel_draws = " << spec.n_channel_draws << "\n"
        << "n_noise_samples = " << spec.n_noise_samples << "\n"
        << "seed = " << spec.seed << "\n"
        << "output_path = " << spec.output_path << "\n"
        << "threads = " << spec.threads << "\n";
    return out.str();
}

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

}  // namespace

void write_csv(const std::vector<ResultRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_csv: cannot open '" + path + "'");
    }
    out << "snr_db,precoder,tass,mean_asr,mean_sr_mc,std_err,n_draws,n_failed,"
           "wall_time_seconds\n";
    for (const auto& r : records) {
        out << fmt(r.snr_db) << ',' << r.precoder << ',' << r.tass << ',' << fmt(r.mean_asr)
            << ',' << fmt(r.mean_sr_mc) << ',' << fmt(r.std_err) << ',' << r.n_draws << ','
            << r.n_failed << ',' << fmt(r.wall_time_seconds) << '\n';
    }
}

void write_draws_csv(const std::vector<ResultRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_draws_csv: cannot open '" + path + "'");
    }
    out << "snr_db,precoder,tass,draw,chosen,scores,tass_flops,asr,sr\n";
    for (const auto& r : records) {
        for (size_t d = 0; d < r.draw_sr.size(); ++d) {
            out << fmt(r.snr_db) << ',' << r.precoder << ',' << r.tass << ',' << d << ','
                << r.draw_subset[d] << ',' << r.draw_scores[d] << ','
                << fmt(r.tass_flops) << ',' << fmt(r.draw_asr[d]) << ','
                << fmt(r.draw_sr[d]) << '\n';
        }
    }
}

void write_cdf_csv(const CdfResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_cdf_csv: cannot open '" + path + "'");
    }
    out << "sr,cdf\n";
    for (size_t i = 0; i < result.grid.size(); ++i) {
        out << fmt(result.grid[i]) << ',' << fmt(result.cdf[i]) << '\n';
    }
}

std::string flops_table(const SystemConfig& cfg) {
    std::ostringstream out;
    out << "method flops\n";
    for (TassMethod m :
         {TassMethod::MaxEv, TassMethod::MaxPSinrAnsnr, TassMethod::MaxAsr}) {
        out << to_string(m) << ' ' << fmt(flops_estimate(m, cfg)) << '\n';
    }
    return out.str();
}

}  // namespace hsm
