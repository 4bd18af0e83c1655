#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "rfdop/signal.hpp"

// Known-symbol Doppler estimation and the static/moving decision.
namespace rfdop::estimator {

using signal::Sample;

struct WipedSignal {
    std::vector<Sample> samples;
    std::vector<std::uint8_t> mask;  // 1 where the sample carries tag signal
    double sample_rate = 0.0;
    double t_origin = 0.0;  // time of sample 0

    std::size_t masked_count() const noexcept;
};

struct WipeOptions {
    // ASK only: zero the absorb intervals and drop them from the support.
    // Disabling keeps their noise in the periodogram (about 3 dB worse).
    bool zero_absorb = true;
};

// Removes the known data modulation: ASK keeps the reflect intervals, PSK
// derotates the one-state by pi. The pause is always masked out.
WipedSignal wipe_modulation(const signal::BasebandFrame& frame, const WipeOptions& options = {});

struct EstimatorOptions {
    double search_halfwidth_hz = 200.0;
    int padding = 8;
    double tolerance_hz = 1e-4;
};

struct EstimateReport {
    double f_hat_hz = 0.0;
    // |sum|^2 / (N * sum |s|^2) at f_hat: 1 for a noiseless pure tone.
    double peak_value = 0.0;
    int refinement_iterations = 0;
};

// |sum over masked n of s[n] exp(+j 2 pi f t_n)|^2.
double periodogram(const WipedSignal& w, double f_hz);

// Maximum-likelihood tone frequency over [-halfwidth, +halfwidth]: a
// zero-padded grid search over the full observation span, refined on the
// exact masked periodogram. Throws ContractError for an empty mask or a
// halfwidth beyond fs / 2.
EstimateReport estimate_doppler(const WipedSignal& w, const EstimatorOptions& options = {});

enum class Motion { Static, Moving };

// Magnitude: moving iff |f_hat| >= f_D / 2, whatever the direction of motion.
// Signed: moving iff f_hat >= f_D / 2, the one-sided threshold of the error
// model behind p_err_from_sigma. Ties count as moving in both.
enum class Decision { Magnitude, Signed };

Motion classify_motion(double f_hat_hz, double v_ref_mps, double carrier_hz,
                       Decision decision = Decision::Magnitude);

// Expected error rate of a classifier fed f_hat ~ N(mu, sigma^2), averaged over
// one static (mu = 0) and one moving (mu = f_D) tag.
double predicted_error_rate(double sigma_sq_hz2, double v_ref_mps, double carrier_hz, Decision decision);

}  // namespace rfdop::estimator
