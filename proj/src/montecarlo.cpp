#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "rfdop/error.hpp"
#include "rfdop/estimator.hpp"
#include "rfdop/experiments.hpp"
#include "rfdop/random.hpp"
#include "rfdop/seeding.hpp"

namespace rfdop::experiments {

namespace {

using seeding::Stream;

// Runs fn(i) for i in [0, n). Each index writes only its own result slot, so
// the outcome does not depend on the thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

EmpiricalStats summarize(const std::vector<double>& errors) {
    const auto m = stats::moments(errors);
    return EmpiricalStats{m.mean, m.variance, m.mse, m.count};
}

struct ReplySetup {
    protocol::ReaderMode mode;
    protocol::ReplyTiming timing;
    signal::ReplyRequest request;
    estimator::WipeOptions wipe;
    estimator::EstimatorOptions estimate;
    std::int64_t sample_rate_hz = 0;
};

ReplySetup reply_setup(const ExperimentConfig& config) {
    ReplySetup s;
    s.mode = config.reader_mode();
    s.timing = protocol::reply_timing(s.mode);
    s.request.mode = s.mode;
    s.request.modulation = config.modulation;
    s.request.model = config.waveform_model;
    s.request.parts = config.parts;
    s.wipe.zero_absorb = config.zero_absorb;
    s.estimate.search_halfwidth_hz = config.search_halfwidth_hz;
    s.sample_rate_hz = config.sample_rate_hz ? config.sample_rate_hz : signal::default_sample_rate(s.mode.blf_hz);
    return s;
}

// One simulated reply, estimated; returns f_hat.
double simulate_reply(const ReplySetup& setup, double f_d_hz, double ps_n0_dbhz, std::uint64_t trial,
                      Stream noise_stream) {
    signal::ReplyRequest request = setup.request;
    const std::size_t epc_len = static_cast<std::size_t>(setup.mode.epc_bits + protocol::kCrcBits);
    auto bits = signal::random_bits(protocol::kRn16Bits + epc_len, seeding::stream_seed(trial, Stream::Bits));
    request.bits_rn16.assign(bits.begin(), bits.begin() + protocol::kRn16Bits);
    request.bits_epc.assign(bits.begin() + protocol::kRn16Bits, bits.end());

    signal::ChannelParams channel;
    channel.f_d_hz = f_d_hz;
    channel.ps_n0_dbhz = ps_n0_dbhz;
    channel.sample_rate_hz = setup.sample_rate_hz;
    channel.seed = seeding::stream_seed(trial, noise_stream);
    const auto frame = signal::synthesize_reply(setup.timing, request, channel);
    const auto wiped = estimator::wipe_modulation(frame, setup.wipe);
    return estimator::estimate_doppler(wiped, setup.estimate).f_hat_hz;
}

double truth_doppler(const ExperimentConfig& config) {
    return config.f_d_hz ? *config.f_d_hz : bounds::doppler_shift(config.v_grid.front(), config.carrier_hz);
}

}  // namespace

double PartTiming::c_t() const {
    return t2 > 0.0 ? bounds::c_t_dual(t1, t2, pause) : bounds::c_t_single(t1);
}

PartTiming part_timing(const protocol::ReplyTiming& timing, signal::ReplyParts parts) {
    switch (parts) {
        case signal::ReplyParts::Rn16: return PartTiming{timing.t_rn16(), 0.0, 0.0};
        case signal::ReplyParts::Epc: return PartTiming{timing.t_epc(), 0.0, 0.0};
        case signal::ReplyParts::Both: break;
    }
    return PartTiming{timing.t_rn16(), timing.t_pause(), timing.t_epc()};
}

std::vector<McrbRow> run_mcrb_experiment(const ExperimentConfig& config) {
    config.validate();
    const ReplySetup setup = reply_setup(config);
    const PartTiming pt = part_timing(setup.timing, config.parts);
    const double f_d = truth_doppler(config);
    if (std::fabs(f_d) >= config.search_halfwidth_hz) {
        throw ConfigError("f_d_hz", "true Doppler shift lies outside the search band");
    }

    auto grid = config.ps_n0_grid();
    std::sort(grid.begin(), grid.end());
    std::vector<McrbRow> rows;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        McrbRow row;
        row.ps_n0_dbhz = grid[g];
        row.t1_s = pt.t1;
        row.t_pause_s = pt.pause;
        row.t2_s = pt.t2;
        row.c_t_s3 = pt.c_t();
        row.sigma_mcrb_sq = bounds::mcrb_sigma_sq(row.c_t_s3, bounds::db_to_linear(grid[g]));
        row.f_d_hz = f_d;

        std::vector<double> errors(config.trials);
        parallel_for(errors.size(), config.threads, [&](std::size_t i) {
            const auto trial = seeding::trial_seed(config.seed, g, i);
            errors[i] = simulate_reply(setup, f_d, grid[g], trial, Stream::Noise) - f_d;
        });
        row.empirical = summarize(errors);
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::string parts_name(signal::ReplyParts p) {
    switch (p) {
        case signal::ReplyParts::Rn16: return "rn16";
        case signal::ReplyParts::Epc: return "epc";
        case signal::ReplyParts::Both: break;
    }
    return "both";
}

}  // namespace

csv::Table mcrb_table(const std::vector<McrbRow>& rows, const ExperimentConfig& config) {
    const auto mode = config.reader_mode();
    csv::Table t;
    t.comments.push_back("MCRB verification: mode=" + mode.label + " blf_hz=" + std::to_string(mode.blf_hz) +
                         " encoding=" + std::string(protocol::encoding_name(mode.encoding)) +
                         " parts=" + parts_name(config.parts) +
                         " modulation=" + (config.modulation == signal::Modulation::ASK ? "ask" : "psk") +
                         " model=" + (config.waveform_model == signal::WaveformModel::Gen2 ? "gen2" : "rect_appendix") +
                         " zero_absorb=" + (config.zero_absorb ? "1" : "0") + " seed=" + std::to_string(config.seed));
    t.columns = {"ps_n0_dbhz",        "t1_s",          "t_pause_s",       "t2_s",
                 "c_t_s3",            "f_d_hz",        "sigma_mcrb_sq_hz2", "empirical_mean_error_hz",
                 "empirical_variance_hz2", "empirical_mse_hz2", "variance_ratio", "trials"};
    for (const auto& r : rows) {
        t.add_row({r.ps_n0_dbhz, r.t1_s, r.t_pause_s, r.t2_s, r.c_t_s3, r.f_d_hz, r.sigma_mcrb_sq,
                   r.empirical.mean_error_hz, r.empirical.variance_hz2, r.empirical.mse_hz2, r.variance_ratio(),
                   static_cast<long long>(r.empirical.trials)});
    }
    return t;
}

std::vector<DetectionRow> run_detection_experiment(const ExperimentConfig& config) {
    config.validate();
    const bool gaussian = config.detect_source == "gaussian";
    const double p_target = config.p_err.front();
    std::optional<ReplySetup> setup;
    double ps_n0 = 0.0;
    double mcrb = 0.0;
    if (!gaussian) {
        setup = reply_setup(config);
        ps_n0 = config.ps_n0_grid().front();
        mcrb = bounds::mcrb_sigma_sq(part_timing(setup->timing, config.parts).c_t(), bounds::db_to_linear(ps_n0));
    }

    std::vector<DetectionRow> rows;
    for (std::size_t g = 0; g < config.v_grid.size(); ++g) {
        const double v = config.v_grid[g];
        if (!(v > 0.0)) throw ConfigError("v_grid", "detection needs positive speeds");
        DetectionRow row;
        row.speed_mps = v;
        row.f_d_hz = bounds::doppler_shift(v, config.carrier_hz);
        row.threshold_hz = row.f_d_hz / 2.0;
        row.trials = config.trials;
        if (gaussian) {
            row.sigma_sq_hz2 = config.sigma_sq_hz2 ? *config.sigma_sq_hz2
                                                   : bounds::sigma_max_sq({v, config.carrier_hz, p_target});
        } else {
            row.sigma_sq_hz2 = mcrb;
            if (std::fabs(row.f_d_hz) >= config.search_halfwidth_hz) {
                throw ConfigError("v_grid", "Doppler shift lies outside the search band");
            }
        }
        row.predicted_p_err = estimator::predicted_error_rate(row.sigma_sq_hz2, v, config.carrier_hz, config.decision);

        // Per trial: bit 0 set = moving tag misread as static, bit 1 = static tag misread as moving.
        std::vector<std::uint8_t> outcome(config.trials, 0);
        parallel_for(outcome.size(), config.threads, [&](std::size_t i) {
            const auto trial = seeding::trial_seed(config.seed, g, i);
            double f_moving;
            double f_static;
            if (gaussian) {
                GaussianSource gauss(seeding::stream_seed(trial, Stream::Gaussian));
                const auto [z1, z2] = gauss.pair();
                const double sigma = std::sqrt(row.sigma_sq_hz2);
                f_moving = row.f_d_hz + sigma * z1;
                f_static = sigma * z2;
            } else {
                f_moving = simulate_reply(*setup, row.f_d_hz, ps_n0, trial, Stream::MovingNoise);
                f_static = simulate_reply(*setup, 0.0, ps_n0, trial, Stream::StaticNoise);
            }
            std::uint8_t o = 0;
            if (estimator::classify_motion(f_moving, v, config.carrier_hz, config.decision) == estimator::Motion::Static) o |= 1;
            if (estimator::classify_motion(f_static, v, config.carrier_hz, config.decision) == estimator::Motion::Moving) o |= 2;
            outcome[i] = o;
        });
        for (auto o : outcome) {
            row.false_static += o & 1u;
            row.false_moving += (o >> 1) & 1u;
        }
        row.ci99 = stats::binomial_interval(2 * row.trials, row.predicted_p_err, 0.99);
        rows.push_back(row);
    }
    return rows;
}

csv::Table detection_table(const std::vector<DetectionRow>& rows, const ExperimentConfig& config) {
    csv::Table t;
    t.comments.push_back("motion detection: source=" + config.detect_source + " decision=" +
                         (config.decision == estimator::Decision::Signed ? "signed" : "magnitude") + " f_c_hz=" +
                         csv::format_double(config.carrier_hz) + " seed=" + std::to_string(config.seed));
    t.columns = {"v_m_per_s",       "f_d_hz",           "threshold_hz",  "sigma_sq_hz2",
                 "predicted_p_err", "false_static_rate", "false_moving_rate", "error_rate",
                 "ci99_low_rate",   "ci99_high_rate",   "trials"};
    for (const auto& r : rows) {
        const double n = static_cast<double>(r.trials);
        t.add_row({r.speed_mps, r.f_d_hz, r.threshold_hz, r.sigma_sq_hz2, r.predicted_p_err,
                   static_cast<double>(r.false_static) / n, static_cast<double>(r.false_moving) / n, r.error_rate(),
                   static_cast<double>(r.ci99.lo) / (2.0 * n), static_cast<double>(r.ci99.hi) / (2.0 * n),
                   static_cast<long long>(r.trials)});
    }
    return t;
}

bool check_mcrb(const std::vector<McrbRow>& rows, const ExperimentConfig& config, std::string* why) {
    const bool penalised = config.modulation == signal::Modulation::ASK && !config.zero_absorb;
    const double lo = penalised ? kNoZeroingLow : kTightLow;
    const double hi = penalised ? kNoZeroingHigh : kTightHigh;
    for (const auto& r : rows) {
        const double ratio = r.variance_ratio();
        if (!(ratio >= lo && ratio <= hi)) {
            if (why) {
                *why = "variance ratio " + csv::format_double(ratio) + " at " + csv::format_double(r.ps_n0_dbhz) +
                       " dB-Hz outside [" + csv::format_double(lo) + ", " + csv::format_double(hi) + "]";
            }
            return false;
        }
    }
    return true;
}

bool check_detection(const std::vector<DetectionRow>& rows, std::string* why) {
    for (const auto& r : rows) {
        if (!r.within_ci()) {
            if (why) {
                *why = "error rate " + csv::format_double(r.error_rate()) + " at v=" + csv::format_double(r.speed_mps) +
                       " outside the 99% binomial interval of " + csv::format_double(r.predicted_p_err);
            }
            return false;
        }
    }
    return true;
}

}  // namespace rfdop::experiments
