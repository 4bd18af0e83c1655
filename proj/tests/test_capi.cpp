#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "rfdop/rfdop.h"

namespace {

struct ConfigDeleter {
    void operator()(rfdop_config* c) const { rfdop_config_destroy(c); }
};
struct FrameDeleter {
    void operator()(rfdop_frame* f) const { rfdop_frame_destroy(f); }
};
using Config = std::unique_ptr<rfdop_config, ConfigDeleter>;
using Frame = std::unique_ptr<rfdop_frame, FrameDeleter>;

Config make_config() {
    rfdop_config* raw = nullptr;
    EXPECT_EQ(rfdop_config_create(&raw), RFDOP_OK);
    return Config(raw);
}

std::string run(const rfdop_config* c, rfdop_command cmd, rfdop_status expect = RFDOP_OK) {
    char* out = nullptr;
    EXPECT_EQ(rfdop_run(c, cmd, 1, &out), expect) << rfdop_last_error();
    std::string s = out ? out : "";
    rfdop_string_free(out);
    return s;
}

}  // namespace

TEST(CApi, StatusNamesAndVersion) {
    EXPECT_STREQ(rfdop_status_name(RFDOP_OK), "ok");
    EXPECT_STRNE(rfdop_status_name(RFDOP_ERR_CONFIG), rfdop_status_name(RFDOP_ERR_DOMAIN));
    EXPECT_GT(std::strlen(rfdop_version()), 0u);
}

TEST(CApi, NullArgumentsAreRejected) {
    EXPECT_EQ(rfdop_config_create(nullptr), RFDOP_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(rfdop_config_set(nullptr, "seed", "1"), RFDOP_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(rfdop_erf_inv(0.5, nullptr), RFDOP_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(rfdop_run(nullptr, RFDOP_CMD_BOUNDS, 0, nullptr), RFDOP_ERR_INVALID_ARGUMENT);
    rfdop_config_destroy(nullptr);
    rfdop_frame_destroy(nullptr);
    rfdop_string_free(nullptr);
}

TEST(CApi, ConfigErrorsCarryTheField) {
    auto c = make_config();
    EXPECT_EQ(rfdop_config_set(c.get(), "trials", "-3"), RFDOP_ERR_CONFIG);
    EXPECT_STREQ(rfdop_last_error_field(), "trials");
    EXPECT_EQ(rfdop_config_set(c.get(), "bogus", "1"), RFDOP_ERR_CONFIG);
    EXPECT_STREQ(rfdop_last_error_field(), "bogus");
    EXPECT_EQ(rfdop_config_load_text(c.get(), "v_grid = 2, 1\n"), RFDOP_OK);
    EXPECT_EQ(rfdop_config_validate(c.get()), RFDOP_ERR_CONFIG);
    EXPECT_STREQ(rfdop_last_error_field(), "v_grid");
    EXPECT_EQ(rfdop_config_load_file(c.get(), "/nonexistent/x.cfg"), RFDOP_ERR_CONFIG);
}

TEST(CApi, CommandNames) {
    rfdop_command cmd{};
    EXPECT_EQ(rfdop_command_from_name("simulate-detect", &cmd), RFDOP_OK);
    EXPECT_EQ(cmd, RFDOP_CMD_SIMULATE_DETECT);
    EXPECT_EQ(rfdop_command_from_name("vmin", &cmd), RFDOP_OK);
    EXPECT_EQ(cmd, RFDOP_CMD_VMIN);
    EXPECT_EQ(rfdop_command_from_name("launch", &cmd), RFDOP_ERR_NOT_FOUND);
}

TEST(CApi, RunProducesCsv) {
    auto c = make_config();
    const auto csv = run(c.get(), RFDOP_CMD_VMIN);
    EXPECT_NE(csv.find("v_min_m_per_s"), std::string::npos);
    EXPECT_NE(csv.find("Mode 290"), std::string::npos);

    ASSERT_EQ(rfdop_config_set(c.get(), "figure", "3"), RFDOP_OK);
    run(c.get(), RFDOP_CMD_FIGURE, RFDOP_ERR_CONFIG);
    EXPECT_STREQ(rfdop_last_error_field(), "figure");
}

TEST(CApi, FailedCheckStillReturnsCsv) {
    auto c = make_config();
    // sigma^2 far above the target turns the 1e-3 prediction into a miss.
    ASSERT_EQ(rfdop_config_load_text(c.get(), "detect_source = gaussian\ntrials = 200\n"), RFDOP_OK);
    EXPECT_NE(run(c.get(), RFDOP_CMD_SIMULATE_DETECT).find("error_rate"), std::string::npos);

    auto mcrb = make_config();
    ASSERT_EQ(rfdop_config_load_text(mcrb.get(),
                                     "mode = custom\nblf_hz = 40000\nencoding = m8\nparts = epc\n"
                                     "ps_n0_dbhz = 52.8\ntrials = 2\nmodulation = ask\nzero_absorb = 0\n"),
              RFDOP_OK);
    char* out = nullptr;
    const auto st = rfdop_run(mcrb.get(), RFDOP_CMD_SIMULATE_MCRB, 1, &out);
    ASSERT_NE(out, nullptr);
    EXPECT_NE(std::string(out).find("variance_ratio"), std::string::npos);
    rfdop_string_free(out);
    // Two trials cannot pin the ratio; only the status set is checked.
    EXPECT_TRUE(st == RFDOP_OK || st == RFDOP_ERR_CHECK_FAILED);
}

TEST(CApi, ReplyTiming) {
    int64_t num[3];
    int64_t den[3];
    ASSERT_EQ(rfdop_reply_timing_exact("Mode 290", num, den), RFDOP_OK);
    double t[3];
    ASSERT_EQ(rfdop_reply_timing("Mode 290", &t[0], &t[1], &t[2]), RFDOP_OK);
    for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(t[i], static_cast<double>(num[i]) / static_cast<double>(den[i]));
    EXPECT_EQ(rfdop_reply_timing("Mode 1", &t[0], &t[1], &t[2]), RFDOP_ERR_NOT_FOUND);
}

TEST(CApi, BoundsWrappers) {
    double x = 0.0;
    ASSERT_EQ(rfdop_erf_inv(0.5, &x), RFDOP_OK);
    EXPECT_NEAR(std::erf(x), 0.5, 1e-14);
    EXPECT_EQ(rfdop_erf_inv(1.5, &x), RFDOP_ERR_DOMAIN);
    double ct = 0.0;
    ASSERT_EQ(rfdop_c_t_dual(1e-3, 2e-3, 0.0, &ct), RFDOP_OK);
    double single = 0.0;
    ASSERT_EQ(rfdop_c_t_single(3e-3, &single), RFDOP_OK);
    EXPECT_NEAR(ct / single, 1.0, 1e-12);
    double v = 0.0;
    ASSERT_EQ(rfdop_v_min(868e6, 1e-3, single, 52.8, &v), RFDOP_OK);
    double smax = 0.0;
    double mcrb = 0.0;
    ASSERT_EQ(rfdop_sigma_max_sq(v, 868e6, 1e-3, &smax), RFDOP_OK);
    ASSERT_EQ(rfdop_mcrb_sigma_sq(single, 52.8, &mcrb), RFDOP_OK);
    EXPECT_NEAR(smax / mcrb, 1.0, 1e-9);
    double p = 0.0;
    ASSERT_EQ(rfdop_p_err_from_sigma(mcrb, v, 868e6, &p), RFDOP_OK);
    EXPECT_NEAR(p, 1e-3, 1e-9);
    double n0 = 0.0;
    double nf = 0.0;
    double ratio = 0.0;
    ASSERT_EQ(rfdop_noise_density_from_sensitivity(-95.8, 1e-3, 640e3, 2, &n0, &nf, &ratio), RFDOP_OK);
    EXPECT_NEAR(nf - n0, 174.0, 1e-9);
    EXPECT_EQ(rfdop_sigma_max_sq(1.0, 868e6, 0.7, &smax), RFDOP_ERR_DOMAIN);
}

TEST(CApi, FrameRoundTrip) {
    auto c = make_config();
    ASSERT_EQ(rfdop_config_load_text(c.get(), "mode = custom\nblf_hz = 40000\nencoding = m8\nparts = epc\n"),
              RFDOP_OK);
    rfdop_frame* raw = nullptr;
    ASSERT_EQ(rfdop_frame_synthesize(c.get(), 25.0, 1000.0, 3, &raw), RFDOP_OK) << rfdop_last_error();
    Frame f(raw);
    const auto n = rfdop_frame_sample_count(f.get());
    ASSERT_GT(n, 0u);
    EXPECT_EQ(rfdop_frame_sample_rate(f.get()), 32.0 * 40000.0);
    std::vector<double> iq(2 * n);
    ASSERT_EQ(rfdop_frame_samples(f.get(), iq.data(), n), RFDOP_OK);
    double energy = 0.0;
    for (double s : iq) energy += s * s;
    EXPECT_GT(energy, 0.0);
    double f_hat = 0.0;
    ASSERT_EQ(rfdop_frame_estimate(f.get(), 200.0, 1, &f_hat), RFDOP_OK);
    EXPECT_NEAR(f_hat, 25.0, 1e-2);
    EXPECT_EQ(rfdop_frame_estimate(f.get(), -1.0, 1, &f_hat), RFDOP_ERR_INVALID_ARGUMENT);

    const auto path = std::filesystem::temp_directory_path() / "rfdop_capi_frame.txt";
    ASSERT_EQ(rfdop_frame_write(f.get(), path.c_str()), RFDOP_OK);
    EXPECT_GT(std::filesystem::file_size(path), 0u);
    std::filesystem::remove(path);
    EXPECT_EQ(rfdop_frame_write(f.get(), "/nonexistent/dir/frame.txt"), RFDOP_ERR_IO);
}
