#include "rfdop/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rfdop/error.hpp"
#include "rfdop/special.hpp"

namespace rfdop::bounds {

namespace {

using std::numbers::pi;

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

// c * erf_inv(1 - 2 p_err) / (pi * f_c), the speed scale shared by v_min and its inverse.
double speed_scale(const MotionScenario& s) {
    return kSpeedOfLight * erf_inv(1.0 - 2.0 * s.p_err) / (pi * s.carrier_hz);
}

}  // namespace

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

void validate(const MotionScenario& s) {
    require_positive(s.carrier_hz, "carrier frequency");
    if (!(s.speed_mps >= 0.0) || !std::isfinite(s.speed_mps)) throw DomainError("speed must be >= 0");
    if (!(s.p_err > 0.0 && s.p_err < 0.5)) throw DomainError("p_err must lie in (0, 0.5)");
}

LinkBudget LinkBudget::completed() const {
    LinkBudget out = *this;
    auto agree = [](double a, double b, const char* what) {
        if (std::fabs(a - b) > 1e-9) throw DomainError(std::string("inconsistent link budget: ") + what);
    };
    if (out.nf_db && out.n0_dbm_hz) agree(*out.n0_dbm_hz, kThermalNoiseDbmHz + *out.nf_db, "n0 != -174 + nf");
    if (out.nf_db && !out.n0_dbm_hz) out.n0_dbm_hz = kThermalNoiseDbmHz + *out.nf_db;
    if (out.n0_dbm_hz && !out.nf_db) out.nf_db = *out.n0_dbm_hz - kThermalNoiseDbmHz;

    if (out.p_s_dbm && out.n0_dbm_hz) {
        const double ratio = *out.p_s_dbm - *out.n0_dbm_hz;
        if (out.ps_n0_dbhz) agree(*out.ps_n0_dbhz, ratio, "ps_n0 != p_s - n0");
        out.ps_n0_dbhz = ratio;
    } else if (out.ps_n0_dbhz && out.n0_dbm_hz && !out.p_s_dbm) {
        out.p_s_dbm = *out.ps_n0_dbhz + *out.n0_dbm_hz;
    } else if (out.ps_n0_dbhz && out.p_s_dbm && !out.n0_dbm_hz) {
        out.n0_dbm_hz = *out.p_s_dbm - *out.ps_n0_dbhz;
        out.nf_db = *out.n0_dbm_hz - kThermalNoiseDbmHz;
    }
    return out;
}

double LinkBudget::ps_n0_linear() const {
    const LinkBudget full = completed();
    if (!full.ps_n0_dbhz) throw DomainError("link budget does not determine P_S/N0");
    return db_to_linear(*full.ps_n0_dbhz);
}

double doppler_shift(double speed_mps, double carrier_hz) {
    require_positive(carrier_hz, "carrier frequency");
    return 2.0 * speed_mps * carrier_hz / kSpeedOfLight;
}

double sigma_max_sq(const MotionScenario& s) {
    validate(s);
    if (s.speed_mps == 0.0) throw DomainError("sigma_max_sq: no threshold exists for a static tag");
    const double e = erf_inv(1.0 - 2.0 * s.p_err);
    const double ratio = s.speed_mps * s.carrier_hz / kSpeedOfLight;
    return ratio * ratio / (2.0 * e * e);
}

double c_t_single(double t0_s) {
    require_positive(t0_s, "signal duration");
    return t0_s * t0_s * t0_s;
}

double c_t_dual(double t1_s, double t2_s, double t_pause_s) {
    require_positive(t1_s, "first signal duration");
    require_positive(t2_s, "second signal duration");
    if (!(t_pause_s >= 0.0) || !std::isfinite(t_pause_s)) throw DomainError("pause must be >= 0");
    const double sum = t1_s + t2_s;
    return sum * sum * sum + 12.0 * t1_s * t2_s * t_pause_s * (sum + t_pause_s) / sum;
}

double mcrb_sigma_sq(double c_t_s3, double ps_n0_linear) {
    require_positive(c_t_s3, "C_T");
    require_positive(ps_n0_linear, "P_S/N0");
    return 3.0 / (2.0 * pi * pi * c_t_s3) / ps_n0_linear;
}

double ask_finite_l_factor(long long l_symbols) {
    if (l_symbols < 1) throw DomainError("symbol count L must be >= 1");
    const double l = static_cast<double>(l_symbols);
    return 1.0 / (1.0 - 3.0 / (4.0 * l * l));
}

double mcrb_ask_finite_l(double base_mcrb, long long l_symbols) {
    return base_mcrb * ask_finite_l_factor(l_symbols);
}

double v_min(const MotionScenario& s, double c_t_s3, double ps_n0_linear) {
    MotionScenario check = s;
    check.speed_mps = 0.0;
    validate(check);
    require_positive(c_t_s3, "C_T");
    require_positive(ps_n0_linear, "P_S/N0");
    return speed_scale(s) * std::sqrt(3.0 / c_t_s3 / ps_n0_linear);
}

double required_ps_n0_dbhz(const MotionScenario& s, double c_t_s3) {
    validate(s);
    require_positive(s.speed_mps, "speed");
    require_positive(c_t_s3, "C_T");
    const double k = speed_scale(s);
    return linear_to_db(3.0 * k * k / (c_t_s3 * s.speed_mps * s.speed_mps));
}

double required_ps_dbm(const MotionScenario& s, double c_t_s3, double nf_db) {
    return required_ps_n0_dbhz(s, c_t_s3) + kThermalNoiseDbmHz + nf_db;
}

double ps_n0_from_ber(double blf_hz, int spread, double ber) {
    require_positive(blf_hz, "BLF");
    if (spread < 1) throw DomainError("spread factor must be >= 1");
    if (!(ber > 0.0 && ber <= 0.5)) throw DomainError("BER must lie in (0, 0.5]");
    if (ber == 0.5) return -std::numeric_limits<double>::infinity();
    const double e = erf_inv(1.0 - 2.0 * ber);
    return linear_to_db(2.0 * blf_hz * e * e / spread);
}

NoiseEstimate noise_density_from_sensitivity(double p_s_dbm, double ber, double blf_hz, int spread) {
    NoiseEstimate out{};
    out.ps_n0_dbhz = ps_n0_from_ber(blf_hz, spread, ber);
    out.n0_dbm_hz = p_s_dbm - out.ps_n0_dbhz;
    out.nf_db = out.n0_dbm_hz - kThermalNoiseDbmHz;
    return out;
}

double p_err_from_sigma(double sigma_sq, double speed_mps, double carrier_hz) {
    require_positive(sigma_sq, "variance");
    const double mean = std::fabs(doppler_shift(speed_mps, carrier_hz));
    const double threshold = mean / 2.0;
    // 0.5 * (1 + erf((x - mu) / sqrt(2 sigma^2))) written with erfc for small tails.
    return 0.5 * std::erfc((mean - threshold) / std::sqrt(2.0 * sigma_sq));
}

BoundResult evaluate(const MotionScenario& s, double c_t_s3, double ps_n0_dbhz) {
    BoundResult r;
    r.scenario = s;
    r.ps_n0_dbhz = ps_n0_dbhz;
    r.c_t = c_t_s3;
    const double ratio = db_to_linear(ps_n0_dbhz);
    r.sigma_mcrb_sq = mcrb_sigma_sq(c_t_s3, ratio);
    r.v_min = v_min(s, c_t_s3, ratio);
    r.sigma_max_sq = s.speed_mps > 0.0 ? sigma_max_sq(s) : 0.0;
    return r;
}

}  // namespace rfdop::bounds
