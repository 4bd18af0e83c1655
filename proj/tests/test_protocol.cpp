#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "rfdop/error.hpp"
#include "rfdop/protocol.hpp"

using namespace rfdop;
using namespace rfdop::protocol;

namespace {

ReaderMode mode(std::int64_t blf, Encoding enc, int epc_bits = 96) {
    ReaderMode m;
    m.label = "test";
    m.blf_hz = blf;
    m.encoding = enc;
    m.epc_bits = epc_bits;
    return m;
}

}  // namespace

TEST(Protocol, SpreadFactorsAndNames) {
    EXPECT_EQ(spread_factor(Encoding::FM0), 1);
    EXPECT_EQ(spread_factor(Encoding::Miller2), 2);
    EXPECT_EQ(spread_factor(Encoding::Miller4), 4);
    EXPECT_EQ(spread_factor(Encoding::Miller8), 8);
    EXPECT_EQ(parse_encoding("Miller-8"), Encoding::Miller8);
    EXPECT_EQ(parse_encoding("m4"), Encoding::Miller4);
    EXPECT_EQ(parse_encoding("fm0"), Encoding::FM0);
    EXPECT_EQ(encoding_from_spread(2), Encoding::Miller2);
    EXPECT_THROW(parse_encoding("Miller-3"), RangeError);
    EXPECT_THROW(encoding_from_spread(3), DomainError);
}

TEST(Protocol, SymbolPeriod) {
    EXPECT_EQ(symbol_period(40'000, Encoding::Miller8), Rational(1, 5000));
    EXPECT_EQ(symbol_period(640'000, Encoding::FM0), Rational(1, 640'000));
    EXPECT_DOUBLE_EQ(symbol_period(640'000, Encoding::FM0).to_double() * 1e6, 1.5625);
    EXPECT_EQ(symbol_period(160'000, Encoding::Miller8), Rational(1, 20'000));
    EXPECT_THROW(symbol_period(39'999, Encoding::FM0), RangeError);
    EXPECT_THROW(symbol_period(640'001, Encoding::FM0), RangeError);
}

TEST(Protocol, SymbolCounts) {
    EXPECT_EQ(reply_symbol_counts(Encoding::FM0, 16, true, false), 35);
    EXPECT_EQ(reply_symbol_counts(Encoding::Miller8, 96, true, true), 135);
    EXPECT_EQ(reply_symbol_counts(Encoding::FM0, 16, false, false), 23);
    EXPECT_EQ(reply_symbol_counts(Encoding::Miller2, 16, false, false), 27);
    EXPECT_EQ(preamble_symbols(Encoding::FM0, true), 18);
    EXPECT_EQ(preamble_symbols(Encoding::Miller4, true), 22);
    EXPECT_EQ(preamble_symbols(Encoding::FM0, false), 6);
    EXPECT_EQ(preamble_symbols(Encoding::Miller4, false), 10);
    EXPECT_THROW(reply_symbol_counts(Encoding::FM0, 0, true, false), DomainError);
}

TEST(Protocol, EpcMinusRn16IsNinetySix) {
    for (auto enc : {Encoding::FM0, Encoding::Miller2, Encoding::Miller4, Encoding::Miller8}) {
        EXPECT_EQ(reply_symbol_counts(enc, 96, true, true) - reply_symbol_counts(enc, 16, true, false), 96);
    }
}

TEST(Protocol, SignalDurations) {
    EXPECT_EQ(signal_duration(mode(40'000, Encoding::FM0), ReplyKind::Rn16), Rational(7, 8000));
    EXPECT_EQ(signal_duration(mode(640'000, Encoding::Miller2), ReplyKind::Epc), Rational(135, 320'000));
    EXPECT_DOUBLE_EQ(signal_duration(mode(640'000, Encoding::Miller2), ReplyKind::Epc).to_double(), 0.421875e-3);
    EXPECT_EQ(signal_duration(mode(40'000, Encoding::Miller8), ReplyKind::Epc), Rational(27, 1000));
}

TEST(Protocol, DurationScalesWithSpreadAndBlf) {
    for (auto kind : {ReplyKind::Rn16, ReplyKind::Epc}) {
        for (std::int64_t blf : {40'000, 160'000, 640'000}) {
            const auto m2 = signal_duration(mode(blf, Encoding::Miller2), kind);
            EXPECT_EQ(signal_duration(mode(blf, Encoding::Miller4), kind) / m2, Rational(2));
            EXPECT_EQ(signal_duration(mode(blf, Encoding::Miller8), kind) / m2, Rational(4));
        }
        EXPECT_EQ(signal_duration(mode(40'000, Encoding::Miller4), kind) /
                      signal_duration(mode(80'000, Encoding::Miller4), kind),
                  Rational(2));
    }
}

TEST(Protocol, PauseDuration) {
    EXPECT_EQ(pause_duration(40'000), Rational(7, 5000));
    EXPECT_EQ(pause_duration(640'000), Rational(1, 5000));
    EXPECT_EQ(pause_duration(160'000), Rational(11, 25'000));
    Rational previous = pause_duration(40'000);
    for (std::int64_t blf = 50'000; blf <= 640'000; blf += 10'000) {
        const auto p = pause_duration(blf);
        EXPECT_LT(p, previous);
        previous = p;
    }
    EXPECT_THROW(pause_duration(20'000), RangeError);
}

TEST(Protocol, ReplyTiming) {
    const auto m290 = reply_timing(reader_mode_catalog().find("Mode 290"));
    EXPECT_EQ(m290.rn16, Rational(39, 20'000));
    EXPECT_EQ(m290.pause, Rational(11, 25'000));
    EXPECT_EQ(m290.epc, Rational(135, 20'000));
    EXPECT_DOUBLE_EQ(m290.t_rn16(), 1.95e-3);
    EXPECT_DOUBLE_EQ(m290.t_epc(), 6.75e-3);

    const auto slow = reply_timing(mode(40'000, Encoding::Miller8));
    EXPECT_EQ(slow.rn16, Rational(39, 5000));
    EXPECT_EQ(slow.pause, Rational(7, 5000));
    EXPECT_EQ(slow.epc, Rational(27, 1000));

    const auto long_epc = reply_timing(mode(160'000, Encoding::Miller8, 256));
    EXPECT_EQ(long_epc.epc, Rational(295, 20'000));
    EXPECT_DOUBLE_EQ(long_epc.t_epc(), 14.75e-3);
}

TEST(Protocol, TimingIsPositiveAndOrdered) {
    for (auto enc : {Encoding::FM0, Encoding::Miller2, Encoding::Miller4, Encoding::Miller8}) {
        for (std::int64_t blf : {40'000, 256'000, 640'000}) {
            const auto t = reply_timing(mode(blf, enc));
            EXPECT_GT(t.rn16, Rational(0));
            EXPECT_GT(t.pause, Rational(0));
            EXPECT_LT(t.rn16, t.epc);
        }
    }
}

TEST(Protocol, ModeValidation) {
    EXPECT_THROW(validate(mode(30'000, Encoding::FM0)), RangeError);
    EXPECT_THROW(validate(mode(40'000, Encoding::FM0, 100)), RangeError);
    EXPECT_NO_THROW(validate(mode(40'000, Encoding::FM0, 128)));
}

TEST(Protocol, Catalog) {
    const auto& catalog = reader_mode_catalog();
    const auto& m290 = catalog.find("Mode 290");
    EXPECT_EQ(m290.blf_hz, 160'000);
    EXPECT_EQ(m290.encoding, Encoding::Miller8);
    ASSERT_TRUE(m290.sensitivity_dbm.has_value());
    EXPECT_DOUBLE_EQ(*m290.sensitivity_dbm, -95.8);
    EXPECT_EQ(m290.epc_bits, 96);

    const auto& m204 = catalog.find("mode 204");
    EXPECT_EQ(m204.blf_hz, 320'000);
    EXPECT_EQ(m204.encoding, Encoding::FM0);
    EXPECT_FALSE(m204.sensitivity_dbm.has_value());

    EXPECT_THROW(catalog.find("Mode 999"), NotFoundError);
}

TEST(Protocol, CatalogExtensionFromText) {
    ModeCatalog catalog;
    catalog.load_text(R"(
        # two custom modes
        label = Fast FM0
        blf_hz = 640000
        encoding = FM0
        sensitivity_dbm = -80
        label = Mode 290
        blf_hz = 160000
        encoding = Miller-4
        epc_bits = 128
        sensitivity_dbm = none
    )");
    const auto& fast = catalog.find("Fast FM0");
    EXPECT_EQ(fast.blf_hz, 640'000);
    EXPECT_DOUBLE_EQ(*fast.sensitivity_dbm, -80.0);
    const auto& replaced = catalog.find("Mode 290");
    EXPECT_EQ(replaced.encoding, Encoding::Miller4);
    EXPECT_EQ(replaced.epc_bits, 128);
    EXPECT_FALSE(replaced.sensitivity_dbm.has_value());
    EXPECT_NO_THROW(catalog.find("Mode 204"));
}

TEST(Protocol, CatalogFileErrors) {
    ModeCatalog catalog;
    EXPECT_THROW(catalog.load_text("blf_hz = 40000\n"), ConfigError);
    EXPECT_THROW(catalog.load_text("label = x\nblf_hz = 1000\n"), ConfigError);
    EXPECT_THROW(catalog.load_file("/nonexistent/modes.cfg"), ConfigError);
}
