#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rfdop/bounds.hpp"
#include "rfdop/csv.hpp"
#include "rfdop/estimator.hpp"
#include "rfdop/protocol.hpp"
#include "rfdop/signal.hpp"
#include "rfdop/stats.hpp"

// Monte Carlo harness and figure datasets.
namespace rfdop::experiments {

// Grid syntax: "a, b, c", "lin:start:stop:count" or "log:start:stop:count".
std::vector<double> parse_grid(std::string_view key, std::string_view text);

struct ExperimentConfig {
    // Reader mode: catalog label, optionally overridden field by field.
    std::string mode_label = "Mode 290";
    std::optional<std::int64_t> blf_hz;
    std::optional<protocol::Encoding> encoding;
    std::optional<bool> trext;
    std::optional<int> epc_bits;
    std::string catalog_path;

    double carrier_hz = 868e6;
    std::vector<double> p_err = {1e-3};

    // Link budget. ps_n0_dbhz wins; otherwise p_s_dbm - n0 with
    // n0 = n0_dbm_hz, or -174 + nf_db.
    std::vector<double> ps_n0_dbhz;
    std::vector<double> p_s_dbm = {-95.8};
    std::optional<double> nf_db;
    double n0_dbm_hz = -148.6;
    double ber = 1e-3;

    std::vector<double> v_grid = {1.0};
    std::optional<double> f_d_hz;  // simulation truth; default doppler_shift(v_grid[0])

    std::uint64_t trials = 2000;
    std::uint64_t seed = 1;
    signal::WaveformModel waveform_model = signal::WaveformModel::Gen2;
    signal::Modulation modulation = signal::Modulation::PSK;
    signal::ReplyParts parts = signal::ReplyParts::Both;
    bool zero_absorb = true;
    std::int64_t sample_rate_hz = 0;
    double search_halfwidth_hz = 200.0;

    // Detection experiment: "frames" simulates and estimates full replies,
    // "gaussian" draws f_hat = f_D + N(0, sigma^2) directly.
    std::string detect_source = "frames";
    std::optional<double> sigma_sq_hz2;
    estimator::Decision decision = estimator::Decision::Signed;

    // Figure datasets.
    int figure_id = 8;
    bool simulate = false;
    std::vector<double> t0_grid;
    std::vector<double> t_pause_grid;
    int rect_symbols = 64;

    unsigned threads = 0;  // 0: hardware concurrency

    // Keys set explicitly (file or override); figure datasets fall back to
    // their own defaults for everything else.
    std::set<std::string> explicit_keys;
    bool has(std::string_view key) const { return explicit_keys.count(std::string(key)) > 0; }

    // Applies one `key = value` pair; throws ConfigError naming the key.
    void set(std::string_view key, std::string_view value);
    void load_file(const std::filesystem::path& path);
    void load_text(std::string_view text);
    // Throws ConfigError naming the first invalid field.
    void validate() const;

    protocol::ReaderMode reader_mode() const;
    // P_S/N0 grid in dB-Hz resolved from the link-budget fields.
    std::vector<double> ps_n0_grid() const;
    double noise_density_dbm_hz() const;
};

struct EmpiricalStats {
    double mean_error_hz = 0.0;
    double variance_hz2 = 0.0;
    double mse_hz2 = 0.0;
    std::uint64_t trials = 0;
};

struct McrbRow {
    double ps_n0_dbhz = 0.0;
    double t1_s = 0.0;
    double t_pause_s = 0.0;
    double t2_s = 0.0;  // 0 for single-part runs
    double c_t_s3 = 0.0;
    double sigma_mcrb_sq = 0.0;
    double f_d_hz = 0.0;
    EmpiricalStats empirical;

    double variance_ratio() const { return empirical.variance_hz2 / sigma_mcrb_sq; }
};

// Timing of the configured parts: (t1, pause, t2) for both, (t0, 0, 0) otherwise.
struct PartTiming {
    double t1 = 0.0;
    double pause = 0.0;
    double t2 = 0.0;
    double c_t() const;
};
PartTiming part_timing(const protocol::ReplyTiming& timing, signal::ReplyParts parts);

std::vector<McrbRow> run_mcrb_experiment(const ExperimentConfig& config);
csv::Table mcrb_table(const std::vector<McrbRow>& rows, const ExperimentConfig& config);

struct DetectionRow {
    double speed_mps = 0.0;
    double f_d_hz = 0.0;
    double threshold_hz = 0.0;
    double sigma_sq_hz2 = 0.0;
    double predicted_p_err = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t false_static = 0;  // moving tag classified static
    std::uint64_t false_moving = 0;  // static tag classified moving
    stats::CountInterval ci99;       // for false_static + false_moving over 2 * trials

    double error_rate() const {
        return static_cast<double>(false_static + false_moving) / (2.0 * static_cast<double>(trials));
    }
    bool within_ci() const {
        const auto errors = false_static + false_moving;
        return errors >= ci99.lo && errors <= ci99.hi;
    }
};

std::vector<DetectionRow> run_detection_experiment(const ExperimentConfig& config);
csv::Table detection_table(const std::vector<DetectionRow>& rows, const ExperimentConfig& config);

// Closed-form curve data (plus optional empirical columns for 5 and 7).
// Throws ConfigError for an unknown figure id.
csv::Table figure_dataset(int figure_id, const ExperimentConfig& config);

csv::Table bounds_table(const ExperimentConfig& config);
csv::Table vmin_table(const ExperimentConfig& config);
csv::Table noise_figure_table(const ExperimentConfig& config);

// Acceptance windows used by `--check`.
inline constexpr double kTightLow = 0.9;
inline constexpr double kTightHigh = 1.15;
inline constexpr double kNoZeroingLow = 1.8;
inline constexpr double kNoZeroingHigh = 2.2;

bool check_mcrb(const std::vector<McrbRow>& rows, const ExperimentConfig& config, std::string* why = nullptr);
bool check_detection(const std::vector<DetectionRow>& rows, std::string* why = nullptr);

}  // namespace rfdop::experiments
