#include "rfdop/rfdop.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include "rfdop/bounds.hpp"
#include "rfdop/error.hpp"
#include "rfdop/estimator.hpp"
#include "rfdop/experiments.hpp"
#include "rfdop/protocol.hpp"
#include "rfdop/seeding.hpp"
#include "rfdop/signal.hpp"
#include "rfdop/special.hpp"

struct rfdop_config {
    rfdop::experiments::ExperimentConfig value;
};

struct rfdop_frame {
    rfdop::signal::BasebandFrame value;
};

namespace {

using namespace rfdop;

thread_local std::string g_error;
thread_local std::string g_field;

rfdop_status fail(rfdop_status status, const std::string& message, const std::string& field = {}) {
    g_error = message;
    g_field = field;
    return status;
}

template <class F>
rfdop_status guarded(F&& body) {
    g_error.clear();
    g_field.clear();
    try {
        return body();
    } catch (const ConfigError& e) {
        return fail(RFDOP_ERR_CONFIG, e.what(), e.field());
    } catch (const DomainError& e) {
        return fail(RFDOP_ERR_DOMAIN, e.what());
    } catch (const RangeError& e) {
        return fail(RFDOP_ERR_RANGE, e.what());
    } catch (const NotFoundError& e) {
        return fail(RFDOP_ERR_NOT_FOUND, e.what());
    } catch (const IoError& e) {
        return fail(RFDOP_ERR_IO, e.what());
    } catch (const ContractError& e) {
        return fail(RFDOP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RFDOP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RFDOP_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(RFDOP_ERR_INTERNAL, "unknown error");
    }
}

#define RFDOP_REQUIRE(ptr)                                                               \
    do {                                                                                 \
        if ((ptr) == nullptr) return fail(RFDOP_ERR_INVALID_ARGUMENT, #ptr " is null"); \
    } while (0)

char* copy_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* rfdop_last_error(void) { return g_error.c_str(); }

const char* rfdop_last_error_field(void) { return g_field.c_str(); }

const char* rfdop_status_name(rfdop_status status) {
    switch (status) {
        case RFDOP_OK: return "ok";
        case RFDOP_ERR_INVALID_ARGUMENT: return "invalid argument";
        case RFDOP_ERR_CONFIG: return "config error";
        case RFDOP_ERR_DOMAIN: return "domain error";
        case RFDOP_ERR_RANGE: return "range error";
        case RFDOP_ERR_NOT_FOUND: return "not found";
        case RFDOP_ERR_IO: return "i/o error";
        case RFDOP_ERR_CHECK_FAILED: return "check failed";
        case RFDOP_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* rfdop_version(void) { return "1.0.0"; }

rfdop_status rfdop_config_create(rfdop_config** out) {
    RFDOP_REQUIRE(out);
    return guarded([&] {
        *out = new rfdop_config();
        return RFDOP_OK;
    });
}

void rfdop_config_destroy(rfdop_config* config) { delete config; }

rfdop_status rfdop_config_set(rfdop_config* config, const char* key, const char* value) {
    RFDOP_REQUIRE(config);
    RFDOP_REQUIRE(key);
    RFDOP_REQUIRE(value);
    return guarded([&] {
        config->value.set(key, value);
        return RFDOP_OK;
    });
}

rfdop_status rfdop_config_load_file(rfdop_config* config, const char* path) {
    RFDOP_REQUIRE(config);
    RFDOP_REQUIRE(path);
    return guarded([&] {
        config->value.load_file(path);
        return RFDOP_OK;
    });
}

rfdop_status rfdop_config_load_text(rfdop_config* config, const char* text) {
    RFDOP_REQUIRE(config);
    RFDOP_REQUIRE(text);
    return guarded([&] {
        config->value.load_text(text);
        return RFDOP_OK;
    });
}

rfdop_status rfdop_config_validate(const rfdop_config* config) {
    RFDOP_REQUIRE(config);
    return guarded([&] {
        config->value.validate();
        return RFDOP_OK;
    });
}

rfdop_status rfdop_command_from_name(const char* name, rfdop_command* out) {
    RFDOP_REQUIRE(name);
    RFDOP_REQUIRE(out);
    const std::string n(name);
    if (n == "bounds") *out = RFDOP_CMD_BOUNDS;
    else if (n == "vmin") *out = RFDOP_CMD_VMIN;
    else if (n == "figure") *out = RFDOP_CMD_FIGURE;
    else if (n == "simulate-mcrb") *out = RFDOP_CMD_SIMULATE_MCRB;
    else if (n == "simulate-detect") *out = RFDOP_CMD_SIMULATE_DETECT;
    else if (n == "noise-figure") *out = RFDOP_CMD_NOISE_FIGURE;
    else return fail(RFDOP_ERR_NOT_FOUND, "unknown command '" + n + "'");
    return RFDOP_OK;
}

rfdop_status rfdop_run(const rfdop_config* config, rfdop_command command, int check, char** csv_out) {
    RFDOP_REQUIRE(config);
    RFDOP_REQUIRE(csv_out);
    *csv_out = nullptr;
    return guarded([&] {
        namespace ex = rfdop::experiments;
        const auto& c = config->value;
        c.validate();
        csv::Table table;
        bool passed = true;
        std::string why;
        switch (command) {
            case RFDOP_CMD_BOUNDS: table = ex::bounds_table(c); break;
            case RFDOP_CMD_VMIN: table = ex::vmin_table(c); break;
            case RFDOP_CMD_FIGURE: table = ex::figure_dataset(c.figure_id, c); break;
            case RFDOP_CMD_NOISE_FIGURE: table = ex::noise_figure_table(c); break;
            case RFDOP_CMD_SIMULATE_MCRB: {
                const auto rows = ex::run_mcrb_experiment(c);
                table = ex::mcrb_table(rows, c);
                if (check) passed = ex::check_mcrb(rows, c, &why);
                break;
            }
            case RFDOP_CMD_SIMULATE_DETECT: {
                const auto rows = ex::run_detection_experiment(c);
                table = ex::detection_table(rows, c);
                if (check) passed = ex::check_detection(rows, &why);
                break;
            }
            default: return fail(RFDOP_ERR_INVALID_ARGUMENT, "unknown command");
        }
        *csv_out = copy_string(table.to_string());
        return passed ? RFDOP_OK : fail(RFDOP_ERR_CHECK_FAILED, why);
    });
}

void rfdop_string_free(char* text) { std::free(text); }

rfdop_status rfdop_reply_timing(const char* mode_label, double* t_rn16, double* t_pause, double* t_epc) {
    RFDOP_REQUIRE(mode_label);
    return guarded([&] {
        const auto t = protocol::reply_timing(protocol::reader_mode_catalog().find(mode_label));
        if (t_rn16) *t_rn16 = t.t_rn16();
        if (t_pause) *t_pause = t.t_pause();
        if (t_epc) *t_epc = t.t_epc();
        return RFDOP_OK;
    });
}

rfdop_status rfdop_reply_timing_exact(const char* mode_label, int64_t num[3], int64_t den[3]) {
    RFDOP_REQUIRE(mode_label);
    RFDOP_REQUIRE(num);
    RFDOP_REQUIRE(den);
    return guarded([&] {
        const auto t = protocol::reply_timing(protocol::reader_mode_catalog().find(mode_label));
        const Rational* parts[3] = {&t.rn16, &t.pause, &t.epc};
        for (int i = 0; i < 3; ++i) {
            num[i] = parts[i]->num();
            den[i] = parts[i]->den();
        }
        return RFDOP_OK;
    });
}

rfdop_status rfdop_erf_inv(double y, double* out) {
    RFDOP_REQUIRE(out);
    return guarded([&] {
        *out = erf_inv(y);
        return RFDOP_OK;
    });
}

rfdop_status rfdop_sigma_max_sq(double speed_mps, double carrier_hz, double p_err, double* out) {
    RFDOP_REQUIRE(out);
    return guarded([&] {
        *out = bounds::sigma_max_sq({speed_mps, carrier_hz, p_err});
        return RFDOP_OK;
    });
}

rfdop_status rfdop_c_t_single(double t0_s, double* out) {
    RFDOP_REQUIRE(out);
    return guarded([&] {
        *out = bounds::c_t_single(t0_s);
        return RFDOP_OK;
    });
}

rfdop_status rfdop_c_t_dual(double t1_s, double t2_s, double t_pause_s, double* out) {
    RFDOP_REQUIRE(out);
    return guarded([&] {
        *out = bounds::c_t_dual(t1_s, t2_s, t_pause_s);
        return RFDOP_OK;
    });
}

rfdop_status rfdop_mcrb_sigma_sq(double c_t_s3, double ps_n0_dbhz, double* out) {
    RFDOP_REQUIRE(out);
    return guarded([&] {
        *out = bounds::mcrb_sigma_sq(c_t_s3, bounds::db_to_linear(ps_n0_dbhz));
        return RFDOP_OK;
    });
}

rfdop_status rfdop_v_min(double carrier_hz, double p_err, double c_t_s3, double ps_n0_dbhz, double* out) {
    RFDOP_REQUIRE(out);
    return guarded([&] {
        *out = bounds::v_min({1.0, carrier_hz, p_err}, c_t_s3, bounds::db_to_linear(ps_n0_dbhz));
        return RFDOP_OK;
    });
}

rfdop_status rfdop_noise_density_from_sensitivity(double p_s_dbm, double ber, double blf_hz, int spread,
                                                  double* n0_dbm_hz, double* nf_db, double* ps_n0_dbhz) {
    return guarded([&] {
        const auto e = bounds::noise_density_from_sensitivity(p_s_dbm, ber, blf_hz, spread);
        if (n0_dbm_hz) *n0_dbm_hz = e.n0_dbm_hz;
        if (nf_db) *nf_db = e.nf_db;
        if (ps_n0_dbhz) *ps_n0_dbhz = e.ps_n0_dbhz;
        return RFDOP_OK;
    });
}

rfdop_status rfdop_p_err_from_sigma(double sigma_sq_hz2, double speed_mps, double carrier_hz, double* out) {
    RFDOP_REQUIRE(out);
    return guarded([&] {
        *out = bounds::p_err_from_sigma(sigma_sq_hz2, speed_mps, carrier_hz);
        return RFDOP_OK;
    });
}

rfdop_status rfdop_frame_synthesize(const rfdop_config* config, double f_d_hz, double ps_n0_dbhz, uint64_t seed,
                                    rfdop_frame** out) {
    RFDOP_REQUIRE(config);
    RFDOP_REQUIRE(out);
    *out = nullptr;
    return guarded([&] {
        const auto& c = config->value;
        c.validate();
        signal::ReplyRequest request;
        request.mode = c.reader_mode();
        request.modulation = c.modulation;
        request.model = c.waveform_model;
        request.parts = c.parts;
        const auto epc_len = static_cast<std::size_t>(request.mode.epc_bits + protocol::kCrcBits);
        const auto bits = signal::random_bits(protocol::kRn16Bits + epc_len,
                                              seeding::stream_seed(seed, seeding::Stream::Bits));
        request.bits_rn16.assign(bits.begin(), bits.begin() + protocol::kRn16Bits);
        request.bits_epc.assign(bits.begin() + protocol::kRn16Bits, bits.end());

        signal::ChannelParams channel;
        channel.f_d_hz = f_d_hz;
        channel.ps_n0_dbhz = ps_n0_dbhz;
        channel.sample_rate_hz = c.sample_rate_hz;
        channel.seed = seeding::stream_seed(seed, seeding::Stream::Noise);
        auto frame = std::make_unique<rfdop_frame>();
        frame->value = signal::synthesize_reply(protocol::reply_timing(request.mode), request, channel);
        *out = frame.release();
        return RFDOP_OK;
    });
}

void rfdop_frame_destroy(rfdop_frame* frame) { delete frame; }

size_t rfdop_frame_sample_count(const rfdop_frame* frame) { return frame ? frame->value.samples.size() : 0; }

double rfdop_frame_sample_rate(const rfdop_frame* frame) { return frame ? frame->value.sample_rate() : 0.0; }

rfdop_status rfdop_frame_samples(const rfdop_frame* frame, double* iq, size_t capacity) {
    RFDOP_REQUIRE(frame);
    if (capacity > 0) RFDOP_REQUIRE(iq);
    const auto& s = frame->value.samples;
    const size_t n = std::min(capacity, s.size());
    for (size_t i = 0; i < n; ++i) {
        iq[2 * i] = s[i].real();
        iq[2 * i + 1] = s[i].imag();
    }
    return RFDOP_OK;
}

rfdop_status rfdop_frame_write(const rfdop_frame* frame, const char* path) {
    RFDOP_REQUIRE(frame);
    RFDOP_REQUIRE(path);
    return guarded([&] {
        signal::write_frame(path, frame->value);
        return RFDOP_OK;
    });
}

rfdop_status rfdop_frame_estimate(const rfdop_frame* frame, double search_halfwidth_hz, int zero_absorb,
                                  double* f_hat_hz) {
    RFDOP_REQUIRE(frame);
    RFDOP_REQUIRE(f_hat_hz);
    return guarded([&] {
        estimator::WipeOptions wipe;
        wipe.zero_absorb = zero_absorb != 0;
        estimator::EstimatorOptions opts;
        opts.search_halfwidth_hz = search_halfwidth_hz;
        *f_hat_hz = estimator::estimate_doppler(estimator::wipe_modulation(frame->value, wipe), opts).f_hat_hz;
        return RFDOP_OK;
    });
}

}  // extern "C"
