#pragma once

#include <optional>

// Closed-form detection and estimation bounds for Doppler-based motion
// detection. Everything here works in linear units: Hz, s, m/s, and the
// signal-to-noise-density ratio P_S/N0 in Hz. Decibel conversion belongs to
// the callers (see the *_db helpers below).
namespace rfdop::bounds {

inline constexpr double kSpeedOfLight = 299'792'458.0;   // m/s
inline constexpr double kThermalNoiseDbmHz = -174.0;     // dBm-Hz at 290 K

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

struct MotionScenario {
    double speed_mps = 1.0;
    double carrier_hz = 868e6;
    double p_err = 1e-3;
};

// Throws DomainError unless carrier_hz > 0, speed >= 0 and 0 < p_err < 0.5.
void validate(const MotionScenario& s);

// Received signal power, noise density and noise figure. Any two of
// p_s_dbm / n0_dbm_hz / nf_db determine the rest (n0 = -174 dBm-Hz + nf).
struct LinkBudget {
    std::optional<double> p_s_dbm;
    std::optional<double> n0_dbm_hz;
    std::optional<double> nf_db;
    std::optional<double> ps_n0_dbhz;

    // Fills in whatever follows from the values present; throws DomainError if
    // the present values contradict each other by more than 1e-9 dB.
    LinkBudget completed() const;
    // P_S/N0 in Hz; throws DomainError when it cannot be derived.
    double ps_n0_linear() const;
};

// Two-way Doppler shift 2 v f_c / c, positive for a tag approaching the antenna.
double doppler_shift(double speed_mps, double carrier_hz);

// Largest estimator variance (Hz^2) that still separates a tag moving at
// speed v from a static one with error probability p_err, using a threshold
// at half the expected shift.
double sigma_max_sq(const MotionScenario& s);

// Timing factor for a single contiguous signal of length t0: t0^3.
double c_t_single(double t0_s);
// Timing factor for two signal parts t1, t2 separated by t_pause (phase
// coherent across the gap). Reduces to (t1 + t2)^3 for t_pause == 0.
double c_t_dual(double t1_s, double t2_s, double t_pause_s);

// Modified Cramer-Rao bound on Doppler estimation variance (Hz^2):
// 3 / (2 pi^2 C_T) * N0 / P_S.
double mcrb_sigma_sq(double c_t_s3, double ps_n0_linear);

// ASK rect-model correction for L symbols: base / (1 - 3 / (4 L^2)).
double mcrb_ask_finite_l(double base_mcrb, long long l_symbols);
double ask_finite_l_factor(long long l_symbols);

// Smallest speed whose Doppler shift is detectable at p_err given C_T and
// P_S/N0 (speed_mps of the scenario is ignored).
double v_min(const MotionScenario& s, double c_t_s3, double ps_n0_linear);

// P_S/N0 (dB-Hz) at which v_min equals speed_mps.
double required_ps_n0_dbhz(const MotionScenario& s, double c_t_s3);
// Tag power (dBm) at which v_min equals speed_mps for the given noise figure.
double required_ps_dbm(const MotionScenario& s, double c_t_s3, double nf_db);

// Decoding-limited P_S/N0 (dB-Hz) for binary orthogonal signalling at the
// given BER with bit period M / BLF. Returns -inf for ber == 0.5.
double ps_n0_from_ber(double blf_hz, int spread, double ber);

struct NoiseEstimate {
    double n0_dbm_hz;
    double nf_db;
    double ps_n0_dbhz;
};

// Back-solves the receiver noise density from a datasheet sensitivity.
NoiseEstimate noise_density_from_sensitivity(double p_s_dbm, double ber, double blf_hz, int spread);

// Probability that a Gaussian estimate with mean f_D(v) and variance
// sigma_sq falls below the threshold f_D / 2.
double p_err_from_sigma(double sigma_sq, double speed_mps, double carrier_hz);

struct BoundResult {
    double sigma_max_sq = 0.0;   // Hz^2
    double c_t = 0.0;            // s^3
    double sigma_mcrb_sq = 0.0;  // Hz^2
    double v_min = 0.0;          // m/s
    MotionScenario scenario;
    double ps_n0_dbhz = 0.0;
};

// Evaluates every bound for one scenario. sigma_max_sq is 0 when speed is 0.
BoundResult evaluate(const MotionScenario& s, double c_t_s3, double ps_n0_dbhz);

}  // namespace rfdop::bounds
