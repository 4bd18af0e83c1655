#include <algorithm>
#include <cmath>

#include "rfdop/error.hpp"
#include "rfdop/experiments.hpp"
#include "rfdop/keyvalue.hpp"

namespace rfdop::experiments {

namespace {

// Canonical key for each accepted spelling.
std::string canonical(std::string_view key) {
    const std::string k = kv::lower(kv::trim(key));
    if (k == "carrier_hz" || k == "fc" || k == "f_c") return "f_c_hz";
    if (k == "v" || k == "v_m_per_s" || k == "speed") return "v_grid";
    if (k == "ps_n0") return "ps_n0_dbhz";
    if (k == "p_s") return "p_s_dbm";
    if (k == "nf") return "nf_db";
    if (k == "n0") return "n0_dbm_hz";
    if (k == "figure_id") return "figure";
    if (k == "model") return "waveform_model";
    if (k == "catalog_path") return "catalog";
    return k;
}

void require_increasing(const char* key, const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigError(key, "grid must not be empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ConfigError(key, "grid must be strictly increasing");
    }
}

}  // namespace

std::vector<double> parse_grid(std::string_view key, std::string_view text) {
    const std::string s = kv::lower(kv::trim(text));
    const bool lin = s.rfind("lin:", 0) == 0;
    const bool log = s.rfind("log:", 0) == 0;
    if (!lin && !log) return kv::to_double_list(key, text);

    std::vector<std::string> parts;
    std::size_t pos = 4;
    while (pos <= s.size()) {
        const auto next = s.find(':', pos);
        parts.push_back(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (parts.size() != 3) throw ConfigError(std::string(key), "expected lin:start:stop:count or log:start:stop:count");
    const double a = kv::to_double(key, parts[0]);
    const double b = kv::to_double(key, parts[1]);
    const auto n = kv::to_int(key, parts[2]);
    if (n < 1) throw ConfigError(std::string(key), "grid count must be >= 1");
    if (log && !(a > 0.0 && b > 0.0)) throw ConfigError(std::string(key), "log grid bounds must be positive");
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const double u = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        grid[static_cast<std::size_t>(i)] =
            lin ? a + (b - a) * u : std::pow(10.0, std::log10(a) + (std::log10(b) - std::log10(a)) * u);
    }
    return grid;
}

void ExperimentConfig::set(std::string_view raw_key, std::string_view raw_value) {
    const std::string key = canonical(raw_key);
    const std::string value(kv::trim(raw_value));
    const std::string lv = kv::lower(value);
    try {
        if (key == "mode") {
            mode_label = value;
        } else if (key == "blf_hz") {
            blf_hz = kv::to_int(key, value);
        } else if (key == "encoding") {
            encoding = protocol::parse_encoding(value);
        } else if (key == "trext") {
            trext = kv::to_bool(key, value);
        } else if (key == "epc_bits") {
            epc_bits = static_cast<int>(kv::to_int(key, value));
        } else if (key == "catalog") {
            catalog_path = value;
        } else if (key == "f_c_hz") {
            carrier_hz = kv::to_double(key, value);
        } else if (key == "p_err") {
            p_err = kv::to_double_list(key, value);
        } else if (key == "ps_n0_dbhz") {
            ps_n0_dbhz = parse_grid(key, value);
        } else if (key == "p_s_dbm") {
            p_s_dbm = parse_grid(key, value);
        } else if (key == "nf_db") {
            nf_db = kv::to_double(key, value);
        } else if (key == "n0_dbm_hz") {
            n0_dbm_hz = kv::to_double(key, value);
        } else if (key == "ber") {
            ber = kv::to_double(key, value);
        } else if (key == "v_grid") {
            v_grid = parse_grid(key, value);
        } else if (key == "f_d_hz") {
            f_d_hz = kv::to_double(key, value);
        } else if (key == "trials") {
            const auto t = kv::to_int(key, value);
            if (t < 1) throw ConfigError(key, "must be >= 1");
            trials = static_cast<std::uint64_t>(t);
        } else if (key == "seed") {
            seed = kv::to_uint64(key, value);
        } else if (key == "waveform_model") {
            if (lv == "gen2") {
                waveform_model = signal::WaveformModel::Gen2;
            } else if (lv == "rect" || lv == "rect_appendix") {
                waveform_model = signal::WaveformModel::RectAppendix;
            } else {
                throw ConfigError(key, "expected gen2 or rect_appendix");
            }
        } else if (key == "modulation") {
            if (lv == "ask") {
                modulation = signal::Modulation::ASK;
            } else if (lv == "psk") {
                modulation = signal::Modulation::PSK;
            } else {
                throw ConfigError(key, "expected ask or psk");
            }
        } else if (key == "parts") {
            if (lv == "rn16") {
                parts = signal::ReplyParts::Rn16;
            } else if (lv == "epc") {
                parts = signal::ReplyParts::Epc;
            } else if (lv == "both") {
                parts = signal::ReplyParts::Both;
            } else {
                throw ConfigError(key, "expected rn16, epc or both");
            }
        } else if (key == "zero_absorb") {
            zero_absorb = kv::to_bool(key, value);
        } else if (key == "sample_rate_hz") {
            sample_rate_hz = kv::to_int(key, value);
        } else if (key == "search_halfwidth_hz") {
            search_halfwidth_hz = kv::to_double(key, value);
        } else if (key == "detect_source") {
            if (lv != "frames" && lv != "gaussian") throw ConfigError(key, "expected frames or gaussian");
            detect_source = lv;
        } else if (key == "decision") {
            if (lv == "signed") decision = estimator::Decision::Signed;
            else if (lv == "magnitude") decision = estimator::Decision::Magnitude;
            else throw ConfigError(key, "expected signed or magnitude");
        } else if (key == "sigma_sq_hz2") {
            sigma_sq_hz2 = kv::to_double(key, value);
        } else if (key == "figure") {
            figure_id = static_cast<int>(kv::to_int(key, value));
        } else if (key == "simulate") {
            simulate = kv::to_bool(key, value);
        } else if (key == "t0_grid") {
            t0_grid = parse_grid(key, value);
        } else if (key == "t_pause_grid") {
            t_pause_grid = parse_grid(key, value);
        } else if (key == "rect_symbols") {
            rect_symbols = static_cast<int>(kv::to_int(key, value));
        } else if (key == "threads") {
            threads = static_cast<unsigned>(kv::to_int(key, value));
        } else {
            throw ConfigError(key, "unknown configuration key");
        }
    } catch (const RangeError& e) {
        throw ConfigError(key, e.what());
    }
    explicit_keys.insert(key);
}

void ExperimentConfig::load_text(std::string_view text) {
    for (const auto& e : kv::parse(text)) set(e.key, e.value);
}

void ExperimentConfig::load_file(const std::filesystem::path& path) { load_text(kv::read_file(path)); }

void ExperimentConfig::validate() const {
    if (!(carrier_hz > 0.0)) throw ConfigError("f_c_hz", "must be positive");
    if (p_err.empty()) throw ConfigError("p_err", "must not be empty");
    for (double p : p_err) {
        if (!(p > 0.0 && p < 0.5)) throw ConfigError("p_err", "each value must lie in (0, 0.5)");
    }
    if (!ps_n0_dbhz.empty()) require_increasing("ps_n0_dbhz", ps_n0_dbhz);
    require_increasing("p_s_dbm", p_s_dbm);
    require_increasing("v_grid", v_grid);
    if (v_grid.front() < 0.0) throw ConfigError("v_grid", "speeds must be >= 0");
    if (!t0_grid.empty()) {
        require_increasing("t0_grid", t0_grid);
        if (!(t0_grid.front() > 0.0)) throw ConfigError("t0_grid", "durations must be positive");
    }
    if (!t_pause_grid.empty()) {
        require_increasing("t_pause_grid", t_pause_grid);
        if (t_pause_grid.front() < 0.0) throw ConfigError("t_pause_grid", "pauses must be >= 0");
    }
    if (trials < 1) throw ConfigError("trials", "must be >= 1");
    if (!(ber > 0.0 && ber < 0.5)) throw ConfigError("ber", "must lie in (0, 0.5)");
    if (!(search_halfwidth_hz > 0.0)) throw ConfigError("search_halfwidth_hz", "must be positive");
    if (sample_rate_hz < 0) throw ConfigError("sample_rate_hz", "must be >= 0");
    if (rect_symbols < 1) throw ConfigError("rect_symbols", "must be >= 1");
    if (sigma_sq_hz2 && !(*sigma_sq_hz2 > 0.0)) throw ConfigError("sigma_sq_hz2", "must be positive");
    try {
        protocol::validate(reader_mode());
    } catch (const RangeError& e) {
        throw ConfigError("mode", e.what());
    } catch (const NotFoundError& e) {
        throw ConfigError("mode", e.what());
    }
    if (sample_rate_hz > 0 && sample_rate_hz < 4 * 2 * reader_mode().blf_hz) {
        throw ConfigError("sample_rate_hz", "must be at least 4 samples per minimal transition interval");
    }
}

protocol::ReaderMode ExperimentConfig::reader_mode() const {
    protocol::ModeCatalog catalog;
    if (!catalog_path.empty()) {
        try {
            catalog.load_file(catalog_path);
        } catch (const ConfigError& e) {
            throw ConfigError("catalog", e.what());
        }
    }
    protocol::ReaderMode mode;
    if (mode_label.empty() || kv::lower(mode_label) == "custom") {
        mode.label = "custom";
        mode.sensitivity_dbm.reset();
    } else {
        try {
            mode = catalog.find(mode_label);
        } catch (const NotFoundError& e) {
            throw ConfigError("mode", e.what());
        }
    }
    if (blf_hz) mode.blf_hz = *blf_hz;
    if (encoding) mode.encoding = *encoding;
    if (trext) mode.trext = *trext;
    if (epc_bits) mode.epc_bits = *epc_bits;
    return mode;
}

double ExperimentConfig::noise_density_dbm_hz() const {
    return nf_db ? bounds::kThermalNoiseDbmHz + *nf_db : n0_dbm_hz;
}

std::vector<double> ExperimentConfig::ps_n0_grid() const {
    if (!ps_n0_dbhz.empty()) return ps_n0_dbhz;
    std::vector<double> out;
    const double n0 = noise_density_dbm_hz();
    for (double ps : p_s_dbm) out.push_back(ps - n0);
    return out;
}

}  // namespace rfdop::experiments
