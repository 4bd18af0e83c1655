#include "rfdop/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rfdop/bounds.hpp"
#include "rfdop/error.hpp"
#include "rfdop/special.hpp"

namespace rfdop::estimator {

namespace {

using std::numbers::pi;

struct Run {
    std::size_t first;
    std::size_t count;
};

// Masked samples grouped into contiguous runs, with times centred on the
// middle of the observation span.
struct Support {
    std::vector<Run> runs;
    double dt = 0.0;
    double t_center = 0.0;     // absolute time of tau = 0
    double observation = 0.0;  // first to last masked sample, inclusive
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t count = 0;
};

Support make_support(const WipedSignal& w) {
    if (!(w.sample_rate > 0.0)) throw ContractError("sample rate must be positive");
    if (w.mask.size() != w.samples.size()) throw ContractError("mask and samples differ in length");
    Support s;
    s.dt = 1.0 / w.sample_rate;
    std::size_t n = 0;
    while (n < w.mask.size()) {
        if (!w.mask[n]) {
            ++n;
            continue;
        }
        std::size_t m = n;
        while (m < w.mask.size() && w.mask[m]) ++m;
        s.runs.push_back(Run{n, m - n});
        s.count += m - n;
        n = m;
    }
    if (s.runs.empty()) throw ContractError("support mask is empty");
    s.first = s.runs.front().first;
    s.last = s.runs.back().first + s.runs.back().count - 1;
    s.observation = static_cast<double>(s.last - s.first + 1) * s.dt;
    s.t_center = w.t_origin + 0.5 * static_cast<double>(s.first + s.last) * s.dt;
    return s;
}

struct Sums {
    Sample s0, s1, s2;  // sum s e^{j w tau} * {1, tau, tau^2}
};

Sums evaluate(const WipedSignal& w, const Support& sup, double f_hz, bool derivatives) {
    Sums out{};
    const double omega = 2.0 * pi * f_hz;
    const Sample step = std::polar(1.0, omega * sup.dt);
    const double tau_offset = w.t_origin - sup.t_center;
    for (const auto& run : sup.runs) {
        double tau = tau_offset + static_cast<double>(run.first) * sup.dt;
        Sample phasor = std::polar(1.0, omega * tau);
        const Sample* s = w.samples.data() + run.first;
        if (!derivatives) {
            Sample acc{};
            for (std::size_t k = 0; k < run.count; ++k) {
                acc += s[k] * phasor;
                phasor *= step;
            }
            out.s0 += acc;
            continue;
        }
        for (std::size_t k = 0; k < run.count; ++k) {
            const Sample v = s[k] * phasor;
            out.s0 += v;
            out.s1 += tau * v;
            out.s2 += tau * tau * v;
            phasor *= step;
            tau += sup.dt;
        }
    }
    return out;
}

}  // namespace

std::size_t WipedSignal::masked_count() const noexcept {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

WipedSignal wipe_modulation(const signal::BasebandFrame& frame, const WipeOptions& options) {
    WipedSignal w;
    w.sample_rate = frame.sample_rate();
    w.t_origin = 0.0;
    w.samples.assign(frame.samples.size(), Sample{});
    w.mask.assign(frame.samples.size(), 0);
    if (frame.sample_states.size() != frame.samples.size()) {
        throw ContractError("frame lacks per-sample state ground truth");
    }
    const bool ask = frame.truth.modulation == signal::Modulation::ASK;
    constexpr auto one = static_cast<std::int8_t>(signal::State::One);
    for (std::size_t n = 0; n < frame.samples.size(); ++n) {
        const auto st = frame.sample_states[n];
        if (st == signal::kNoSignal) continue;
        if (ask) {
            if (st == one || !options.zero_absorb) {
                w.samples[n] = frame.samples[n];
                w.mask[n] = 1;
            }
        } else {
            w.samples[n] = st == one ? -frame.samples[n] : frame.samples[n];
            w.mask[n] = 1;
        }
    }
    return w;
}

double periodogram(const WipedSignal& w, double f_hz) {
    const Support sup = make_support(w);
    return std::norm(evaluate(w, sup, f_hz, false).s0);
}

EstimateReport estimate_doppler(const WipedSignal& w, const EstimatorOptions& options) {
    const Support sup = make_support(w);
    const double hw = options.search_halfwidth_hz;
    if (!(hw > 0.0) || hw > w.sample_rate / 2.0) throw ContractError("search halfwidth must lie in (0, fs/2]");
    if (options.padding < 1) throw ContractError("padding factor must be >= 1");

    // Coarse stage: block-integrate the support to a rate that still resolves
    // the search band, then evaluate the zero-padded grid 1 / (P * T_obs).
    const double df = 1.0 / (options.padding * sup.observation);
    const auto block = std::max<std::size_t>(1, static_cast<std::size_t>(w.sample_rate / (16.0 * hw)));
    struct Block {
        Sample sum;
        double tau;
    };
    std::vector<Block> blocks;
    {
        const double tau_offset = w.t_origin - sup.t_center;
        std::size_t current = SIZE_MAX;
        double tau_acc = 0.0;
        std::size_t members = 0;
        auto flush = [&] {
            if (members > 0) blocks.back().tau = tau_acc / static_cast<double>(members);
        };
        for (const auto& run : sup.runs) {
            for (std::size_t n = run.first; n < run.first + run.count; ++n) {
                const std::size_t id = (n - sup.first) / block;
                if (id != current) {
                    flush();
                    blocks.push_back(Block{Sample{}, 0.0});
                    current = id;
                    tau_acc = 0.0;
                    members = 0;
                }
                blocks.back().sum += w.samples[n];
                tau_acc += tau_offset + static_cast<double>(n) * sup.dt;
                ++members;
            }
        }
        flush();
    }

    const auto k_max = static_cast<long long>(std::floor(hw / df));
    const std::size_t bins = static_cast<std::size_t>(2 * k_max + 1);
    std::vector<Sample> spectrum(bins);
    for (const auto& b : blocks) {
        Sample phasor = b.sum * std::polar(1.0, -2.0 * pi * static_cast<double>(k_max) * df * b.tau);
        const Sample step = std::polar(1.0, 2.0 * pi * df * b.tau);
        for (std::size_t k = 0; k < bins; ++k) {
            spectrum[k] += phasor;
            phasor *= step;
        }
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < bins; ++k) {
        if (std::norm(spectrum[k]) > std::norm(spectrum[best])) best = k;
    }
    const double coarse = (static_cast<double>(best) - static_cast<double>(k_max)) * df;

    // Fine stage: safeguarded Newton on d/df |S0|^2 inside +-2 grid steps.
    double lo = std::max(-hw, coarse - 2.0 * df);
    double hi = std::min(hw, coarse + 2.0 * df);
    double f = coarse;
    int iterations = 0;
    constexpr double two_pi = 2.0 * pi;
    for (; iterations < 100; ++iterations) {
        const Sums s = evaluate(w, sup, f, true);
        const Sample d1 = Sample(0.0, two_pi) * s.s1;
        const Sample d2 = -two_pi * two_pi * s.s2;
        const double grad = 2.0 * std::real(std::conj(s.s0) * d1);
        const double curv = 2.0 * (std::norm(d1) + std::real(std::conj(s.s0) * d2));
        if (grad > 0.0) {
            lo = f;
        } else {
            hi = f;
        }
        double next = curv < 0.0 ? f - grad / curv : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::fabs(next - f);
        f = next;
        if (step < options.tolerance_hz || hi - lo < options.tolerance_hz) {
            ++iterations;
            break;
        }
    }

    EstimateReport report;
    report.f_hat_hz = f;
    report.refinement_iterations = iterations;
    double energy = 0.0;
    for (const auto& run : sup.runs) {
        for (std::size_t n = run.first; n < run.first + run.count; ++n) energy += std::norm(w.samples[n]);
    }
    const double peak = std::norm(evaluate(w, sup, f, false).s0);
    report.peak_value = energy > 0.0 ? peak / (static_cast<double>(sup.count) * energy) : 0.0;
    return report;
}

Motion classify_motion(double f_hat_hz, double v_ref_mps, double carrier_hz, Decision decision) {
    if (!(v_ref_mps > 0.0)) throw DomainError("reference speed must be positive");
    const double threshold = std::fabs(bounds::doppler_shift(v_ref_mps, carrier_hz)) / 2.0;
    const double statistic = decision == Decision::Magnitude ? std::fabs(f_hat_hz) : f_hat_hz;
    return statistic >= threshold ? Motion::Moving : Motion::Static;
}

double predicted_error_rate(double sigma_sq_hz2, double v_ref_mps, double carrier_hz, Decision decision) {
    const double one_sided = bounds::p_err_from_sigma(sigma_sq_hz2, v_ref_mps, carrier_hz);
    if (decision == Decision::Signed) return one_sided;
    // Static tag: both tails beyond +-f_D/2. Moving tag: the band (-f_D/2, f_D/2).
    const double x = std::fabs(bounds::doppler_shift(v_ref_mps, carrier_hz)) / 2.0;
    const double far = q_function(3.0 * x / std::sqrt(sigma_sq_hz2));
    return 0.5 * (2.0 * one_sided + (one_sided - far));
}

}  // namespace rfdop::estimator
