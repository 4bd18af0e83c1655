#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "rfdop/bounds.hpp"
#include "rfdop/error.hpp"
#include "rfdop/protocol.hpp"
#include "rfdop/special.hpp"

using namespace rfdop;
using namespace rfdop::bounds;

namespace {

constexpr double kC = 299'792'458.0;

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// Oracle form of sigma_max^2 with the bisection erf_inv.
double sigma_max_oracle(double v, double fc, double p) {
    const double e = oracle::erf_inv(1.0 - 2.0 * p);
    return v * v * fc * fc / (2.0 * kC * kC * e * e);
}

double c_t_mode(const protocol::ReaderMode& m) {
    const auto t = protocol::reply_timing(m);
    return c_t_dual(t.t_rn16(), t.t_epc(), t.t_pause());
}

protocol::ReaderMode miller8_40k() {
    protocol::ReaderMode m;
    m.label = "slow";
    m.blf_hz = 40'000;
    m.encoding = protocol::Encoding::Miller8;
    return m;
}

}  // namespace

TEST(ErfInv, MatchesOracle) {
    EXPECT_EQ(erf_inv(0.0), 0.0);
    EXPECT_NEAR(erf_inv(0.998), 2.185124, 5e-7);
    EXPECT_LE(rel(erf_inv(0.998), oracle::erf_inv(0.998)), 1e-12);
    EXPECT_EQ(erf_inv(-0.5), -erf_inv(0.5));
    for (double y : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.9, 0.98, 0.999, 0.999999, 1.0 - 1e-12}) {
        EXPECT_LE(rel(erf_inv(y), oracle::erf_inv(y)), 1e-12) << "y=" << y;
    }
}

TEST(ErfInv, RoundTripsThroughErf) {
    for (double y = -0.9999; y < 1.0; y += 0.0137) {
        const long double back = oracle::erf(erf_inv(y));
        EXPECT_LE(std::fabs(static_cast<double>(back) - y), 1e-12 * std::max(std::fabs(y), 1e-3)) << "y=" << y;
    }
}

TEST(ErfInv, DomainErrors) {
    EXPECT_THROW(erf_inv(1.0), DomainError);
    EXPECT_THROW(erf_inv(-1.0), DomainError);
    EXPECT_THROW(erf_inv(std::nan("")), DomainError);
}

TEST(Bounds, DecibelRoundTrip) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> db(-200.0, 200.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = db(rng);
        EXPECT_LE(std::fabs(linear_to_db(db_to_linear(x)) - x), 1e-12 * std::max(1.0, std::fabs(x)));
        const double lin = db_to_linear(x);
        EXPECT_LE(rel(db_to_linear(linear_to_db(lin)), lin), 1e-12);
    }
}

TEST(Bounds, DopplerShift) {
    EXPECT_NEAR(doppler_shift(1.0, 900e6), 6.0, 6.0 * 0.002);
    EXPECT_NEAR(doppler_shift(1.0, 900e6), 6.004, 5e-4);
    EXPECT_EQ(doppler_shift(0.0, 868e6), 0.0);
    EXPECT_NEAR(doppler_shift(1.0, 868e6), 5.791, 5e-4);
    EXPECT_LT(doppler_shift(-1.0, 868e6), 0.0);
    EXPECT_THROW(doppler_shift(1.0, 0.0), DomainError);
}

TEST(Bounds, SigmaMaxSq) {
    const double s = sigma_max_sq({1.0, 868e6, 1e-3});
    EXPECT_LE(rel(s, sigma_max_oracle(1.0, 868e6, 1e-3)), 1e-12);
    EXPECT_NEAR(s, 0.878, 5e-4);
    EXPECT_LE(rel(sigma_max_sq({2.0, 868e6, 1e-3}), 4.0 * s), 1e-14);
    EXPECT_NEAR(sigma_max_sq({1.0, 868e6, 0.25}), 18.43, 0.005);
    EXPECT_LE(rel(sigma_max_sq({1.0, 868e6, 0.25}), sigma_max_oracle(1.0, 868e6, 0.25)), 1e-12);
    EXPECT_THROW(sigma_max_sq({0.0, 868e6, 1e-3}), DomainError);
    EXPECT_THROW(sigma_max_sq({1.0, 868e6, 0.5}), DomainError);
    EXPECT_THROW(sigma_max_sq({1.0, 868e6, 0.0}), DomainError);
}

TEST(Bounds, CtSingle) {
    EXPECT_NEAR(c_t_single(27e-3), 1.9683e-5, 1e-17);
    EXPECT_EQ(c_t_single(1.0), 1.0);
    EXPECT_EQ(c_t_single(protocol::reply_timing(miller8_40k()).t_epc()), c_t_single(27e-3));
    EXPECT_THROW(c_t_single(0.0), DomainError);
    EXPECT_THROW(c_t_single(-1.0), DomainError);
}

TEST(Bounds, CtDual) {
    EXPECT_LE(rel(c_t_dual(7.8e-3, 27e-3, 0.0), c_t_single(34.8e-3)), 1e-15);
    const double ct = c_t_dual(7.8e-3, 27e-3, 1.4e-3);
    EXPECT_NEAR(ct, 4.582e-5, 5e-9);
    EXPECT_LE(rel(ct, oracle::c_t_dual_numeric(7.8e-3, 27e-3, 1.4e-3)), 1e-6);
    EXPECT_LE(rel(c_t_dual(1e-3, 2e-3, 3e-3), c_t_dual(2e-3, 1e-3, 3e-3)), 1e-15);
    EXPECT_THROW(c_t_dual(0.0, 1e-3, 1e-3), DomainError);
    EXPECT_THROW(c_t_dual(1e-3, 1e-3, -1e-3), DomainError);
}

TEST(Bounds, CtDualAgainstNumericMinimisation) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dur(1e-4, 3e-2);
    std::uniform_real_distribution<double> gap(0.0, 2e-2);
    for (int i = 0; i < 100; ++i) {
        const double t1 = dur(rng), t2 = dur(rng), tp = gap(rng);
        EXPECT_LE(rel(c_t_dual(t1, t2, tp), oracle::c_t_dual_numeric(t1, t2, tp)), 1e-6)
            << t1 << " " << t2 << " " << tp;
    }
}

TEST(Bounds, CtDualMonotoneInPause) {
    const double base = c_t_single(7.8e-3 + 27e-3);
    double previous = base;
    for (double tp = 1e-4; tp < 0.05; tp += 1e-3) {
        const double ct = c_t_dual(7.8e-3, 27e-3, tp);
        EXPECT_GT(ct, previous);
        previous = ct;
    }
}

TEST(Bounds, Mcrb) {
    EXPECT_LE(rel(mcrb_sigma_sq(2e-5, 5e4), 2.0 * mcrb_sigma_sq(2e-5, 1e5)), 1e-14);
    const double ct = c_t_mode(protocol::reader_mode_catalog().find("Mode 290"));
    EXPECT_NEAR(mcrb_sigma_sq(ct, db_to_linear(52.8)), 1.09, 0.005);
    EXPECT_LE(rel(mcrb_sigma_sq(1.0, 1.0), 3.0 / (2.0 * std::numbers::pi * std::numbers::pi)), 1e-15);
    EXPECT_NEAR(mcrb_sigma_sq(1.0, 1.0), 0.15198, 5e-6);
    EXPECT_THROW(mcrb_sigma_sq(0.0, 1.0), DomainError);
    EXPECT_THROW(mcrb_sigma_sq(1.0, 0.0), DomainError);
}

TEST(Bounds, FiniteLFactor) {
    EXPECT_NEAR(ask_finite_l_factor(23), 1.0 / 0.9986, 1e-4);
    EXPECT_LE(rel(ask_finite_l_factor(23), 1.0 / (1.0 - 3.0 / (4.0 * 529.0))), 1e-15);
    EXPECT_NEAR(ask_finite_l_factor(1'000'000), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(ask_finite_l_factor(1), 4.0);
    EXPECT_DOUBLE_EQ(mcrb_ask_finite_l(2.0, 1), 8.0);
    EXPECT_THROW(ask_finite_l_factor(0), DomainError);
    double previous = ask_finite_l_factor(1);
    for (long long l = 2; l < 200; ++l) {
        EXPECT_LT(ask_finite_l_factor(l), previous);
        previous = ask_finite_l_factor(l);
    }
}

TEST(Bounds, VMinHeadlineNumbers) {
    const double n0 = -148.6;
    const double ct290 = c_t_mode(protocol::reader_mode_catalog().find("Mode 290"));
    EXPECT_NEAR(v_min({0.0, 868e6, 1e-3}, ct290, db_to_linear(-95.8 - n0)), 1.1, 0.05);
    const double fast = v_min({0.0, 868e6, 1e-3}, ct290, db_to_linear(-60.0 - n0));
    EXPECT_GE(fast, 0.018);
    EXPECT_LE(fast, 0.021);
    EXPECT_NEAR(v_min({0.0, 868e6, 1e-3}, c_t_mode(miller8_40k()), db_to_linear(-95.8 - n0)), 0.14, 0.01);
}

TEST(Bounds, TheoremConsistency) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double fc = 300e6 + 2.7e9 * u(rng);
        const double p = 1e-6 + 0.4 * u(rng);
        const double ct = std::pow(10.0, -9.0 + 7.0 * u(rng));
        const double ratio = db_to_linear(20.0 + 80.0 * u(rng));
        const double v = v_min({0.0, fc, p}, ct, ratio);
        EXPECT_LE(rel(sigma_max_sq({v, fc, p}), mcrb_sigma_sq(ct, ratio)), 1e-9);
        EXPECT_LE(std::fabs(required_ps_n0_dbhz({v, fc, p}, ct) - linear_to_db(ratio)),
                  1e-9 * std::fabs(linear_to_db(ratio)));
    }
}

TEST(Bounds, ScalingLaws) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        const double v = u(rng), fc = 1e8 * u(rng), k = u(rng), ct = 1e-6 * u(rng), r = 1e5 * u(rng);
        EXPECT_LE(rel(sigma_max_sq({k * v, fc, 1e-3}), k * k * sigma_max_sq({v, fc, 1e-3})), 1e-12);
        EXPECT_LE(rel(sigma_max_sq({v, k * fc, 1e-3}), k * k * sigma_max_sq({v, fc, 1e-3})), 1e-12);
        EXPECT_LE(rel(mcrb_sigma_sq(k * ct, r), mcrb_sigma_sq(ct, r) / k), 1e-12);
        EXPECT_LE(rel(mcrb_sigma_sq(ct, r / k), k * mcrb_sigma_sq(ct, r)), 1e-12);
        EXPECT_LE(rel(v_min({0, k * fc, 1e-3}, ct, r), v_min({0, fc, 1e-3}, ct, r) / k), 1e-12);
        EXPECT_LE(rel(v_min({0, fc, 1e-3}, ct, r / k), std::sqrt(k) * v_min({0, fc, 1e-3}, ct, r)), 1e-12);
    }
}

TEST(Bounds, CarrierBandRatio) {
    const double ct = c_t_mode(miller8_40k());
    const double r = db_to_linear(52.8);
    const double ratio = v_min({0, 915e6, 1e-3}, ct, r) / v_min({0, 868e6, 1e-3}, ct, r);
    EXPECT_NEAR(ratio, 0.9486, 5e-4);
    EXPECT_LE(rel(ratio, 868.0 / 915.0), 1e-14);
}

TEST(Bounds, RequiredRatioGains) {
    const auto t = protocol::reply_timing(miller8_40k());
    const MotionScenario s{0.5, 868e6, 1e-3};
    const double rn16 = required_ps_n0_dbhz(s, c_t_single(t.t_rn16()));
    const double epc = required_ps_n0_dbhz(s, c_t_single(t.t_epc()));
    const double both = required_ps_n0_dbhz(s, c_t_dual(t.t_rn16(), t.t_epc(), t.t_pause()));
    EXPECT_NEAR(rn16 - epc, 16.2, 0.2);
    EXPECT_NEAR(rn16 - epc, 30.0 * std::log10(27.0 / 7.8), 1e-9);
    EXPECT_NEAR(epc - both, 3.6, 0.1);
    EXPECT_NEAR(epc - both, 10.0 * std::log10(c_t_dual(7.8e-3, 27e-3, 1.4e-3) / c_t_single(27e-3)), 1e-9);

    const double r = db_to_linear(52.8);
    EXPECT_NEAR(v_min(s, c_t_single(7.8e-3), r) / v_min(s, c_t_single(27e-3), r), 6.4, 0.1);
    EXPECT_NEAR(v_min(s, c_t_single(27e-3), r) / v_min(s, c_t_dual(7.8e-3, 27e-3, 1.4e-3), r), 1.5, 0.05);
}

TEST(Bounds, RequiredPower) {
    const double ct290 = c_t_mode(protocol::reader_mode_catalog().find("Mode 290"));
    for (double v : {0.05, 0.3, 1.1, 4.0}) {
        EXPECT_NEAR(required_ps_dbm({v, 868e6, 1e-3}, ct290, 25.4) - required_ps_dbm({v, 868e6, 1e-3}, ct290, 0.0),
                    25.4, 1e-9);
    }
    // Power window equivalent to the 1.10 +- 0.05 m/s speed window (v_min scales as 1/sqrt(P_S)).
    EXPECT_NEAR(required_ps_dbm({1.1, 868e6, 1e-3}, ct290, 25.4), -95.8, 20.0 * std::log10(1.15 / 1.10));

    // At fixed P_S, +3 dB noise figure raises the reachable speed by about sqrt(2).
    const double ps = -95.8;
    const double v25 = v_min({0, 868e6, 1e-3}, ct290, db_to_linear(ps - (-174.0 + 25.4)));
    const double v28 = v_min({0, 868e6, 1e-3}, ct290, db_to_linear(ps - (-174.0 + 28.4)));
    EXPECT_NEAR(v28 / v25, std::sqrt(2.0), 0.01);
}

TEST(Bounds, RatioFromBer) {
    EXPECT_NEAR(ps_n0_from_ber(160e3, 8, 1e-3), 52.8, 0.05);
    const double e = oracle::erf_inv(1.0 - 2e-3);
    EXPECT_NEAR(ps_n0_from_ber(160e3, 8, 1e-3), 10.0 * std::log10(2.0 * 160e3 * e * e / 8.0), 1e-10);
    EXPECT_EQ(ps_n0_from_ber(160e3, 8, 0.5), -std::numeric_limits<double>::infinity());
    EXPECT_NEAR(ps_n0_from_ber(320e3, 8, 1e-3) - ps_n0_from_ber(160e3, 8, 1e-3), 3.0103, 1e-4);
    EXPECT_THROW(ps_n0_from_ber(160e3, 8, 0.0), DomainError);
    EXPECT_THROW(ps_n0_from_ber(160e3, 8, 0.6), DomainError);
}

TEST(Bounds, NoiseDensityFromSensitivity) {
    const auto paper = noise_density_from_sensitivity(-95.8, 1e-3, 160e3, 8);
    EXPECT_NEAR(paper.n0_dbm_hz, -148.6, 0.05);
    EXPECT_NEAR(paper.nf_db, 25.4, 0.05);
    EXPECT_NEAR(paper.ps_n0_dbhz, 52.8, 0.05);

    const auto shifted = noise_density_from_sensitivity(-90.0, 1e-3, 160e3, 8);
    EXPECT_NEAR(shifted.n0_dbm_hz, -142.8, 0.05);
    EXPECT_NEAR(shifted.nf_db, 31.2, 0.05);
    EXPECT_NEAR(shifted.n0_dbm_hz - paper.n0_dbm_hz, 5.8, 1e-12);

    const auto ideal = noise_density_from_sensitivity(-174.0 + paper.ps_n0_dbhz, 1e-3, 160e3, 8);
    EXPECT_NEAR(ideal.n0_dbm_hz, -174.0, 1e-12);
    EXPECT_NEAR(ideal.nf_db, 0.0, 1e-12);

    const double e = oracle::erf_inv(1.0 - 2e-2);
    const double oracle_n0 = -95.8 - 10.0 * std::log10(2.0 * 160e3 * e * e / 8.0);
    EXPECT_NEAR(oracle_n0, -146.144, 5e-4);
    EXPECT_NEAR(noise_density_from_sensitivity(-95.8, 1e-2, 160e3, 8).n0_dbm_hz, oracle_n0, 1e-9);
}

TEST(Bounds, ErrorProbability) {
    for (double p : {1e-4, 1e-3, 1e-2, 5e-2, 0.3}) {
        EXPECT_LE(rel(p_err_from_sigma(sigma_max_sq({1.0, 868e6, p}), 1.0, 868e6), p), 1e-9);
    }
    EXPECT_DOUBLE_EQ(p_err_from_sigma(1.0, 0.0, 868e6), 0.5);
    EXPECT_NEAR(p_err_from_sigma(0.878, 1.0, 868e6), 1e-3, 2e-6);
    EXPECT_THROW(p_err_from_sigma(0.0, 1.0, 868e6), DomainError);
}

TEST(Bounds, LinkBudget) {
    LinkBudget b;
    b.p_s_dbm = -95.8;
    b.nf_db = 25.4;
    const auto full = b.completed();
    EXPECT_NEAR(*full.n0_dbm_hz, -148.6, 1e-12);
    EXPECT_NEAR(*full.ps_n0_dbhz, 52.8, 1e-12);
    EXPECT_LE(rel(b.ps_n0_linear(), db_to_linear(52.8)), 1e-12);

    LinkBudget bad;
    bad.n0_dbm_hz = -150.0;
    bad.nf_db = 25.4;
    EXPECT_THROW(bad.completed(), DomainError);
    EXPECT_THROW(LinkBudget{}.ps_n0_linear(), DomainError);
}

TEST(Bounds, Evaluate) {
    const double ct = c_t_dual(7.8e-3, 27e-3, 1.4e-3);
    const auto r = evaluate({1.0, 868e6, 1e-3}, ct, 52.8);
    EXPECT_DOUBLE_EQ(r.sigma_max_sq, sigma_max_sq({1.0, 868e6, 1e-3}));
    EXPECT_DOUBLE_EQ(r.sigma_mcrb_sq, mcrb_sigma_sq(ct, db_to_linear(52.8)));
    EXPECT_DOUBLE_EQ(r.v_min, v_min({1.0, 868e6, 1e-3}, ct, db_to_linear(52.8)));
    EXPECT_EQ(evaluate({0.0, 868e6, 1e-3}, ct, 52.8).sigma_max_sq, 0.0);
}
