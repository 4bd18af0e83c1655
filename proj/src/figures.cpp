#include <algorithm>
#include <cmath>

#include "rfdop/error.hpp"
#include "rfdop/estimator.hpp"
#include "rfdop/experiments.hpp"
#include "rfdop/seeding.hpp"

namespace rfdop::experiments {

namespace {

using protocol::Encoding;
using protocol::ReaderMode;
using signal::ReplyParts;

std::string unit_of(const std::string& column) {
    auto ends = [&](std::string_view suffix) {
        return column.size() >= suffix.size() && column.compare(column.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends("_m_per_s")) return "m/s";
    if (ends("_dbm_hz")) return "dBm-Hz";
    if (ends("_dbhz")) return "dB-Hz";
    if (ends("_dbm")) return "dBm";
    if (ends("_db")) return "dB";
    if (ends("_hz2")) return "Hz^2";
    if (ends("_hz")) return "Hz";
    if (ends("_s3")) return "s^3";
    if (ends("_s")) return "s";
    return "-";
}

void add_unit_comment(csv::Table& t) {
    std::string line;
    for (const auto& c : t.columns) {
        if (!line.empty()) line += ", ";
        line += c + " [" + unit_of(c) + "]";
    }
    t.comments.push_back("units: " + line);
}

ReaderMode blf_mode(std::int64_t blf, Encoding enc, int epc_bits = 96) {
    return ReaderMode{"BLF" + std::to_string(blf / 1000) + " " + std::string(protocol::encoding_name(enc)), blf, enc,
                      true, epc_bits, std::nullopt};
}

double c_t_for(const ReaderMode& mode, ReplyParts parts) {
    return part_timing(protocol::reply_timing(mode), parts).c_t();
}

const char* parts_label(ReplyParts p) {
    switch (p) {
        case ReplyParts::Rn16: return "rn16";
        case ReplyParts::Epc: return "epc";
        case ReplyParts::Both: break;
    }
    return "both";
}

std::vector<double> grid_or(const ExperimentConfig& c, const char* key, const std::vector<double>& value,
                            std::string_view fallback) {
    return c.has(key) ? value : parse_grid(key, fallback);
}

std::vector<double> p_err_or(const ExperimentConfig& c, std::vector<double> fallback) {
    return c.has("p_err") ? c.p_err : std::move(fallback);
}

double carrier(const ExperimentConfig& c) { return c.carrier_hz; }

// Empirical variance of the estimator on rect-model parts laid out by `plan`.
EmpiricalStats simulate_plan(const ExperimentConfig& config, std::uint64_t grid_index,
                             const std::vector<signal::PartPlan>& plan, std::int64_t fs, double ps_n0_dbhz,
                             double bound_sigma_sq) {
    const double f_d = config.f_d_hz ? *config.f_d_hz
                                     : bounds::doppler_shift(config.v_grid.front(), config.carrier_hz);
    estimator::EstimatorOptions opts;
    const double nyquist = 0.45 * static_cast<double>(fs);
    opts.search_halfwidth_hz =
        std::min(nyquist, std::max(config.search_halfwidth_hz, std::fabs(f_d) + 10.0 * std::sqrt(bound_sigma_sq)));
    estimator::WipeOptions wipe;
    wipe.zero_absorb = config.zero_absorb;

    std::vector<double> errors(config.trials);
    for (std::size_t i = 0; i < errors.size(); ++i) {
        const auto trial = seeding::trial_seed(config.seed, grid_index, i);
        signal::ChannelParams ch;
        ch.f_d_hz = f_d;
        ch.ps_n0_dbhz = ps_n0_dbhz;
        ch.sample_rate_hz = fs;
        ch.seed = seeding::stream_seed(trial, seeding::Stream::Noise);
        signal::FrameTruth truth;
        truth.model = signal::WaveformModel::RectAppendix;
        const auto frame = signal::render_frame(plan, config.modulation, ch, truth);
        errors[i] = estimator::estimate_doppler(estimator::wipe_modulation(frame, wipe), opts).f_hat_hz - f_d;
    }
    const auto m = stats::moments(errors);
    return EmpiricalStats{m.mean, m.variance, m.mse, m.count};
}

Rational to_rational_ns(double seconds) { return Rational(std::llround(seconds * 1e9), 1'000'000'000); }

csv::Table figure4(const ExperimentConfig& c) {
    csv::Table t;
    t.comments.push_back("figure 4: maximum tolerable Doppler estimation variance vs tag speed");
    t.columns = {"p_err", "f_c_hz", "v_m_per_s", "sigma_max_sq_hz2"};
    const auto v_grid = grid_or(c, "v_grid", c.v_grid, "lin:0.05:3:60");
    for (double p : p_err_or(c, {1e-3, 1e-2, 5e-2})) {
        for (double v : v_grid) {
            if (v <= 0.0) continue;
            t.add_row({p, carrier(c), v, bounds::sigma_max_sq({v, carrier(c), p})});
        }
    }
    return t;
}

csv::Table figure5(const ExperimentConfig& c) {
    csv::Table t;
    t.comments.push_back("figure 5: MCRB for a single signal part vs its duration T0");
    t.columns = {"ps_n0_dbhz", "t0_s", "c_t_s3", "sigma_mcrb_sq_hz2"};
    if (c.simulate) {
        for (const char* col : {"t0_sim_s", "sigma_mcrb_sq_sim_hz2", "empirical_mean_error_hz", "empirical_variance_hz2",
                                "variance_ratio", "trials"}) {
            t.columns.emplace_back(col);
        }
        t.comments.push_back("empirical columns: rect model, L=" + std::to_string(c.rect_symbols) +
                             " symbols, seed=" + std::to_string(c.seed));
    }
    const auto ratios = c.has("ps_n0_dbhz") ? c.ps_n0_dbhz : std::vector<double>{30.0, 52.8, 80.0};
    const auto t0s = c.t0_grid.empty() ? parse_grid("t0_grid", "log:1e-4:1e-1:31") : c.t0_grid;
    std::uint64_t grid_index = 0;
    for (double r : ratios) {
        for (double t0 : t0s) {
            const double ct = bounds::c_t_single(t0);
            const double bound = bounds::mcrb_sigma_sq(ct, bounds::db_to_linear(r));
            std::vector<csv::Cell> row{r, t0, ct, bound};
            if (c.simulate) {
                // 16 samples per half symbol; the simulated T0 is the nearest representable length.
                const std::int64_t chips = 2LL * c.rect_symbols;
                const auto fs = static_cast<std::int64_t>(std::ceil(16.0 * static_cast<double>(chips) / t0));
                signal::PartPlan part{Rational(0), Rational(16, fs), signal::rect_chips(c.rect_symbols)};
                const double t0_sim = part.end().to_double();
                const double bound_sim = bounds::mcrb_sigma_sq(bounds::c_t_single(t0_sim), bounds::db_to_linear(r));
                const auto e = simulate_plan(c, grid_index, {part}, fs, r, bound_sim);
                row.insert(row.end(), {t0_sim, bound_sim, e.mean_error_hz, e.variance_hz2,
                                       e.variance_hz2 / bound_sim, static_cast<long long>(e.trials)});
            }
            t.add_row(std::move(row));
            ++grid_index;
        }
    }
    return t;
}

csv::Table figure7(const ExperimentConfig& c) {
    csv::Table t;
    t.comments.push_back("figure 7: MCRB for two signal parts vs pause length (marker=1: RN16+EPC at 40 kHz Miller-8)");
    t.columns = {"curve", "t1_s", "t2_s", "t_pause_s", "c_t_s3", "ps_n0_dbhz", "sigma_mcrb_sq_hz2", "marker"};
    if (c.simulate) {
        for (const char* col : {"empirical_mean_error_hz", "empirical_variance_hz2", "variance_ratio", "trials"}) {
            t.columns.emplace_back(col);
        }
        t.comments.push_back("empirical columns: rect model with 200 us symbols, seed=" + std::to_string(c.seed));
    }
    const auto mode = blf_mode(40'000, Encoding::Miller8);
    const auto timing = protocol::reply_timing(mode);
    const double ratio = c.has("ps_n0_dbhz") ? c.ps_n0_dbhz.front() : 52.8;
    auto pauses = c.t_pause_grid.empty() ? parse_grid("t_pause_grid", "lin:0:0.05:51") : c.t_pause_grid;
    const double marker_pause = timing.t_pause();
    if (std::find(pauses.begin(), pauses.end(), marker_pause) == pauses.end()) pauses.push_back(marker_pause);
    std::sort(pauses.begin(), pauses.end());

    const Rational symbol = protocol::symbol_period(mode.blf_hz, mode.encoding);
    const Rational chip = symbol / Rational(2);
    const std::int64_t fs = 16 * chip.den() / chip.num();
    const int l_rn16 = protocol::reply_symbol_counts(mode.encoding, protocol::kRn16Bits, true, false);
    const int l_epc = protocol::reply_symbol_counts(mode.encoding, mode.epc_bits, true, true);

    struct Curve {
        const char* name;
        Rational t1;
        int l1;
    };
    const Curve curves[] = {{"rn16_epc", timing.rn16, l_rn16}, {"epc_epc", timing.epc, l_epc}};
    std::uint64_t grid_index = 0;
    for (const auto& curve : curves) {
        for (double p : pauses) {
            const double t1 = curve.t1.to_double();
            const double t2 = timing.t_epc();
            const double ct = bounds::c_t_dual(t1, t2, p);
            const double bound = bounds::mcrb_sigma_sq(ct, bounds::db_to_linear(ratio));
            const bool marker = std::string_view(curve.name) == "rn16_epc" && p == marker_pause;
            std::vector<csv::Cell> row{std::string(curve.name), t1, t2, p, ct, ratio, bound, marker ? 1LL : 0LL};
            if (c.simulate) {
                const Rational pause = marker ? timing.pause : to_rational_ns(p);
                signal::PartPlan first{Rational(0), chip, signal::rect_chips(curve.l1)};
                signal::PartPlan second{first.end() + pause, chip, signal::rect_chips(l_epc)};
                const auto e = simulate_plan(c, grid_index, {first, second}, fs, ratio, bound);
                row.insert(row.end(), {e.mean_error_hz, e.variance_hz2, e.variance_hz2 / bound,
                                       static_cast<long long>(e.trials)});
            }
            t.add_row(std::move(row));
            ++grid_index;
        }
    }
    return t;
}

csv::Table figure8(const ExperimentConfig& c) {
    csv::Table t;
    t.comments.push_back("figure 8: required P_S/N0 vs tag speed, Miller-8 at BLF 40 kHz");
    t.columns = {"parts", "p_err", "v_m_per_s", "c_t_s3", "required_ps_n0_dbhz"};
    const auto mode = blf_mode(40'000, Encoding::Miller8);
    const auto v_grid = grid_or(c, "v_grid", c.v_grid, "log:0.01:10:61");
    for (auto parts : {ReplyParts::Rn16, ReplyParts::Epc, ReplyParts::Both}) {
        const double ct = c_t_for(mode, parts);
        for (double p : p_err_or(c, {1e-3, 1e-2, 5e-2})) {
            for (double v : v_grid) {
                if (v <= 0.0) continue;
                t.add_row({std::string(parts_label(parts)), p, v, ct,
                           bounds::required_ps_n0_dbhz({v, carrier(c), p}, ct)});
            }
        }
    }
    return t;
}

csv::Table figure9(const ExperimentConfig& c) {
    csv::Table t;
    t.comments.push_back("figure 9: required P_S/N0 vs tag speed for encodings and BLFs, RN16+EPC");
    t.columns = {"encoding", "blf_hz", "p_err", "v_m_per_s", "c_t_s3", "required_ps_n0_dbhz"};
    const auto v_grid = grid_or(c, "v_grid", c.v_grid, "log:0.01:10:61");
    const double p = p_err_or(c, {1e-3}).front();
    for (std::int64_t blf : {std::int64_t{40'000}, std::int64_t{640'000}}) {
        for (auto enc : {Encoding::FM0, Encoding::Miller2, Encoding::Miller4, Encoding::Miller8}) {
            const double ct = c_t_for(blf_mode(blf, enc), ReplyParts::Both);
            for (double v : v_grid) {
                if (v <= 0.0) continue;
                t.add_row({std::string(protocol::encoding_name(enc)), static_cast<long long>(blf), p, v, ct,
                           bounds::required_ps_n0_dbhz({v, carrier(c), p}, ct)});
            }
        }
    }
    return t;
}

csv::Table figure10(const ExperimentConfig& c) {
    csv::Table t;
    t.comments.push_back("figure 10: required tag power vs speed; noise-figure sweep at 40 kHz Miller-8 and reader "
                         "modes at the estimated reader noise figure");
    t.columns = {"series", "mode", "blf_hz", "encoding", "nf_db", "p_err", "v_m_per_s", "c_t_s3", "required_ps_dbm"};
    const auto v_grid = grid_or(c, "v_grid", c.v_grid, "log:0.01:10:61");
    const double p = p_err_or(c, {1e-3}).front();
    const double reader_nf = c.noise_density_dbm_hz() - bounds::kThermalNoiseDbmHz;

    auto emit = [&](const std::string& series, const ReaderMode& mode, double nf) {
        const double ct = c_t_for(mode, ReplyParts::Both);
        for (double v : v_grid) {
            if (v <= 0.0) continue;
            t.add_row({series, mode.label, static_cast<long long>(mode.blf_hz),
                       std::string(protocol::encoding_name(mode.encoding)), nf, p, v, ct,
                       bounds::required_ps_dbm({v, carrier(c), p}, ct, nf)});
        }
    };
    const auto optimal = blf_mode(40'000, Encoding::Miller8);
    for (double nf : {0.0, 10.0, 20.0, reader_nf}) emit("noise_figure", optimal, nf);
    const auto& catalog = protocol::reader_mode_catalog();
    for (const char* label : {"Mode 290", "Mode 204"}) emit("reader_mode", catalog.find(label), reader_nf);
    return t;
}

csv::Table figure11(const ExperimentConfig& c) {
    csv::Table t;
    const auto& base = protocol::reader_mode_catalog().find("Mode 290");
    t.comments.push_back("figure 11: required tag power vs speed for Mode 290 with 96/128/256-bit EPC; "
                         "Mode 290 sensitivity " + csv::format_double(*base.sensitivity_dbm) + " dBm");
    t.columns = {"epc_bits", "t_epc_s", "nf_db", "p_err", "v_m_per_s", "c_t_s3", "required_ps_dbm"};
    const auto v_grid = grid_or(c, "v_grid", c.v_grid, "log:0.01:10:61");
    const double p = p_err_or(c, {1e-3}).front();
    const double nf = c.noise_density_dbm_hz() - bounds::kThermalNoiseDbmHz;
    for (int bits : {96, 128, 256}) {
        ReaderMode mode = base;
        mode.epc_bits = bits;
        const auto timing = protocol::reply_timing(mode);
        const double ct = c_t_for(mode, ReplyParts::Both);
        for (double v : v_grid) {
            if (v <= 0.0) continue;
            t.add_row({static_cast<long long>(bits), timing.t_epc(), nf, p, v, ct,
                       bounds::required_ps_dbm({v, carrier(c), p}, ct, nf)});
        }
    }
    return t;
}

void add_mode_columns(csv::Table& t) {
    for (const char* col : {"mode", "blf_hz", "encoding", "epc_bits", "parts", "t_rn16_s", "t_pause_s", "t_epc_s",
                            "c_t_s3"}) {
        t.columns.emplace_back(col);
    }
}

std::vector<csv::Cell> mode_cells(const ReaderMode& mode, ReplyParts parts) {
    const auto timing = protocol::reply_timing(mode);
    return {mode.label,
            static_cast<long long>(mode.blf_hz),
            std::string(protocol::encoding_name(mode.encoding)),
            static_cast<long long>(mode.epc_bits),
            std::string(parts_label(parts)),
            timing.t_rn16(),
            timing.t_pause(),
            timing.t_epc(),
            part_timing(timing, parts).c_t()};
}

}  // namespace

csv::Table figure_dataset(int figure_id, const ExperimentConfig& config) {
    config.validate();
    csv::Table t;
    switch (figure_id) {
        case 4: t = figure4(config); break;
        case 5: t = figure5(config); break;
        case 7: t = figure7(config); break;
        case 8: t = figure8(config); break;
        case 9: t = figure9(config); break;
        case 10: t = figure10(config); break;
        case 11: t = figure11(config); break;
        default:
            throw ConfigError("figure", "unknown figure id " + std::to_string(figure_id) +
                                            " (expected 4, 5, 7, 8, 9, 10 or 11)");
    }
    add_unit_comment(t);
    return t;
}

csv::Table bounds_table(const ExperimentConfig& config) {
    config.validate();
    const auto mode = config.reader_mode();
    csv::Table t;
    t.comments.push_back("detection bounds");
    add_mode_columns(t);
    for (const char* col : {"f_c_hz", "p_err", "ps_n0_dbhz", "v_m_per_s", "f_d_hz", "sigma_max_sq_hz2",
                            "sigma_mcrb_sq_hz2", "v_min_m_per_s", "detectable"}) {
        t.columns.emplace_back(col);
    }
    const auto base = mode_cells(mode, config.parts);
    const double ct = part_timing(protocol::reply_timing(mode), config.parts).c_t();
    for (double ratio : config.ps_n0_grid()) {
        for (double p : config.p_err) {
            for (double v : config.v_grid) {
                const auto r = bounds::evaluate({v, config.carrier_hz, p}, ct, ratio);
                auto row = base;
                row.insert(row.end(), {config.carrier_hz, p, ratio, v, bounds::doppler_shift(v, config.carrier_hz),
                                       r.sigma_max_sq, r.sigma_mcrb_sq, r.v_min,
                                       (v > 0.0 && r.sigma_mcrb_sq <= r.sigma_max_sq) ? 1LL : 0LL});
                t.add_row(std::move(row));
            }
        }
    }
    add_unit_comment(t);
    return t;
}

csv::Table vmin_table(const ExperimentConfig& config) {
    config.validate();
    const auto mode = config.reader_mode();
    csv::Table t;
    t.comments.push_back("minimum detectable tag speed");
    add_mode_columns(t);
    for (const char* col : {"f_c_hz", "p_err", "n0_dbm_hz", "p_s_dbm", "ps_n0_dbhz", "v_min_m_per_s"}) {
        t.columns.emplace_back(col);
    }
    const auto base = mode_cells(mode, config.parts);
    const double ct = part_timing(protocol::reply_timing(mode), config.parts).c_t();
    const double n0 = config.noise_density_dbm_hz();
    for (double ratio : config.ps_n0_grid()) {
        for (double p : config.p_err) {
            auto row = base;
            row.insert(row.end(), {config.carrier_hz, p, n0, ratio + n0, ratio,
                                   bounds::v_min({0.0, config.carrier_hz, p}, ct, bounds::db_to_linear(ratio))});
            t.add_row(std::move(row));
        }
    }
    add_unit_comment(t);
    return t;
}

csv::Table noise_figure_table(const ExperimentConfig& config) {
    config.validate();
    const auto mode = config.reader_mode();
    std::vector<double> powers = config.p_s_dbm;
    if (!config.has("p_s_dbm") && mode.sensitivity_dbm) powers = {*mode.sensitivity_dbm};
    csv::Table t;
    t.comments.push_back("receiver noise density back-solved from sensitivity at the given BER");
    t.columns = {"mode", "blf_hz", "spread_factor", "ber", "p_s_dbm", "ps_n0_dbhz", "n0_dbm_hz", "nf_db"};
    for (double ps : powers) {
        const auto est = bounds::noise_density_from_sensitivity(ps, config.ber, static_cast<double>(mode.blf_hz),
                                                                mode.spread());
        t.add_row({mode.label, static_cast<long long>(mode.blf_hz), static_cast<long long>(mode.spread()), config.ber,
                   ps, est.ps_n0_dbhz, est.n0_dbm_hz, est.nf_db});
    }
    add_unit_comment(t);
    return t;
}

}  // namespace rfdop::experiments
