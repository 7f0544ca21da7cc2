// Command-line front end: SNR sweeps, fixed-SNR CDFs, TASS comparisons and
// the complexity table, all emitting CSV.

#include "hybridsm/harness.hpp"
#include "hybridsm/precoders.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<int> noise_samples;
    std::optional<std::string> snr;
    std::optional<std::string> precoder;
    std::optional<std::string> tass;
    std::optional<std::string> out;
    std::optional<int> ne;
    std::optional<int> threads;
    std::optional<int> n_rf;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "config file (key = value lines)");
    cmd->add_option("--seed", f.seed, "RNG seed");
    cmd->add_option("--trials", f.trials, "channel draws per SNR point");
    cmd->add_option("--noise-samples", f.noise_samples, "noise samples per draw");
    cmd->add_option("--snr", f.snr, "SNR grid 'min:max:step' in dB, or one value");
    cmd->add_option("--precoder", f.precoder, "max-asr-ga | max-asr-admm | sdr-altmin");
    cmd->add_option("--tass", f.tass,
                    "max-asr | max-ev | max-p-sinr-ansnr | leakage | random");
    cmd->add_option("--out", f.out, "output CSV path");
    cmd->add_option("--ne", f.ne, "override Eve antenna count");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
    cmd->add_option("--n-rf", f.n_rf, "RF chain count (when no config file is given)");
}

hsm::ExperimentSpec assemble(const CommonFlags& f) {
    hsm::ExperimentSpec spec;
    if (!f.config.empty()) {
        spec = hsm::parse_config(f.config);
    } else {
        int n_rf = f.n_rf.value_or(7);
        spec = hsm::parse_config_text("n_rf = " + std::to_string(n_rf) + "\n", "<cli>");
    }
    if (f.seed) spec.seed = *f.seed;
    if (f.trials) spec.n_channel_draws = *f.trials;
    if (f.noise_samples) spec.n_noise_samples = *f.noise_samples;
    if (f.precoder) spec.precoder = hsm::precoder_from_string(*f.precoder);
    if (f.tass) spec.tass = hsm::tass_from_string(*f.tass);
    if (f.out) spec.output_path = *f.out;
    if (f.ne) spec.cfg.n_e = *f.ne;
    if (f.threads) spec.threads = *f.threads;
    spec.validate();
    return spec;
}

std::vector<double> snr_points(const CommonFlags& f, const hsm::ExperimentSpec& spec) {
    if (!f.snr) {
        return spec.snr_grid_db;
    }
    if (f.snr->find(':') == std::string::npos) {
        return {std::stod(*f.snr)};
    }
    return hsm::parse_config_text("n_rf = " + std::to_string(spec.cfg.n_rf) +
                                      "\nsnr_grid_db = " + *f.snr + "\n",
                                  "<cli>")
        .snr_grid_db;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"secure hybrid spatial-modulation simulator"};
    app.require_subcommand(1);

    CommonFlags sweep_flags, cdf_flags, compare_flags, flops_flags;
    CLI::App* sweep = app.add_subcommand("sweep", "average ASR/SR over an SNR grid");
    add_common(sweep, sweep_flags);
    CLI::App* cdf = app.add_subcommand("cdf", "per-draw SR distribution at one SNR");
    add_common(cdf, cdf_flags);
    CLI::App* compare =
        app.add_subcommand("compare", "all TASS methods on shared channel draws");
    add_common(compare, compare_flags);
    CLI::App* flops = app.add_subcommand("flops", "TASS complexity estimates");
    add_common(flops, flops_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            hsm::ExperimentSpec spec = assemble(sweep_flags);
            spec.snr_grid_db = snr_points(sweep_flags, spec);
            const auto records = hsm::run_sweep(spec);
            hsm::write_csv(records, spec.output_path);
            hsm::write_draws_csv(records, spec.output_path + ".draws.csv");
            std::cout << "wrote " << records.size() << " records to " << spec.output_path
                      << "\n";
        } else if (cdf->parsed()) {
            hsm::ExperimentSpec spec = assemble(cdf_flags);
            const auto grid = snr_points(cdf_flags, spec);
            if (grid.size() != 1) {
                std::cerr << "cdf: --snr must be a single value\n";
                return 1;
            }
            const auto result = hsm::run_cdf(spec, grid.front());
            hsm::write_csv({result.record}, spec.output_path);
            hsm::write_draws_csv({result.record}, spec.output_path + ".draws.csv");
            hsm::write_cdf_csv(result, spec.output_path + ".cdf.csv");
            std::cout << "wrote CDF of " << result.sorted_sr.size() << " draws to "
                      << spec.output_path << "\n";
        } else if (compare->parsed()) {
            hsm::ExperimentSpec spec = assemble(compare_flags);
            spec.snr_grid_db = snr_points(compare_flags, spec);
            const auto records = hsm::run_compare(spec);
            hsm::write_csv(records, spec.output_path);
            hsm::write_draws_csv(records, spec.output_path + ".draws.csv");
            std::cout << "wrote " << records.size() << " records to " << spec.output_path
                      << "\n";
        } else if (flops->parsed()) {
            hsm::ExperimentSpec spec = assemble(flops_flags);
            std::cout << hsm::flops_table(spec.cfg);
        }
    } catch (const hsm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const hsm::RunFailure& e) {
        std::cerr << "numerical failure budget exceeded: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
