#pragma once

#include "hybridsm/model.hpp"
#include "hybridsm/tass.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsm {

enum class PrecoderKind { MaxAsrGa, MaxAsrAdmm, SdrAltMin };

std::string to_string(PrecoderKind kind);
PrecoderKind precoder_from_string(const std::string& name);

struct ExperimentSpec {
    SystemConfig cfg;
    PrecoderKind precoder = PrecoderKind::MaxAsrGa;
    TassMethod tass = TassMethod::MaxEv;
    std::vector<double> snr_grid_db = {0, 5, 10, 15, 20, 25};
    int n_channel_draws = 200;
    int n_noise_samples = 300;
    std::uint64_t seed = 1;
    std::string output_path = "results.csv";
    int threads = 0;  ///< 0 = hardware concurrency

    void validate() const;
};

struct ResultRecord {
    double snr_db = 0.0;
    std::string precoder;
    std::string tass;
    double mean_asr = 0.0;
    double mean_sr_mc = 0.0;
    double std_err = 0.0;
    int n_draws = 0;
    int n_failed = 0;
    double wall_time_seconds = 0.0;
    std::vector<double> draw_sr;   ///< per successful draw, by draw index
    std::vector<double> draw_asr;
    std::vector<std::string> draw_subset;  ///< chosen subarrays, "i|j|k"
    std::vector<std::string> draw_scores;  ///< selection scores, "a|b|c"
    double tass_flops = 0.0;  ///< NaN when no closed-form estimate exists
};

/// More than 5% of the channel draws failed (degenerate projector or solver
/// breakdown); partial results would be biased.
struct RunFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full SNR sweep: per point, TASS -> precoder -> Monte-Carlo secrecy rate,
/// averaged over seeded channel draws. Deterministic for a fixed (spec, seed).
std::vector<ResultRecord> run_sweep(const ExperimentSpec& spec);

struct CdfResult {
    ResultRecord record;
    std::vector<double> sorted_sr;
    std::vector<double> grid;  ///< [0, log2(N_t*M)], 101 points
    std::vector<double> cdf;
};

/// Fixed-SNR per-draw secrecy rates and their empirical CDF.
CdfResult run_cdf(const ExperimentSpec& spec, double snr_db);

/// Every TASS method on the same channel draws (common random numbers).
std::vector<ResultRecord> run_compare(const ExperimentSpec& spec);

/// Flat "key = value" config with '#' comments; unknown keys rejected with
/// their line number. Defaults follow the simulation protocol (n_aa = 4,
/// QPSK, beta = 0.01, p_total = n_t).
ExperimentSpec parse_config(const std::string& path);
ExperimentSpec parse_config_text(const std::string& text, const std::string& origin);
std::string serialize_config(const ExperimentSpec& spec);

void write_csv(const std::vector<ResultRecord>& records, const std::string& path);
void write_draws_csv(const std::vector<ResultRecord>& records, const std::string& path);
void write_cdf_csv(const CdfResult& result, const std::string& path);

std::string flops_table(const SystemConfig& cfg);

}  // namespace hsm
