#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfdop/rational.hpp"

// Gen2 uplink (tag-to-reader) timing model.
namespace rfdop::protocol {

inline constexpr std::int64_t kMinBlfHz = 40'000;
inline constexpr std::int64_t kMaxBlfHz = 640'000;
inline constexpr int kRn16Bits = 16;
inline constexpr int kCrcBits = 16;

enum class Encoding { FM0, Miller2, Miller4, Miller8 };

// Spreading factor M: 1 for FM0, otherwise the Miller subcarrier cycles per bit.
int spread_factor(Encoding encoding) noexcept;
std::string_view encoding_name(Encoding encoding) noexcept;
// Accepts "FM0", "Miller2", "Miller-2", "M2" (case-insensitive). Throws RangeError.
Encoding parse_encoding(std::string_view text);
Encoding encoding_from_spread(int m);

enum class ReplyKind { Rn16, Epc };

struct ReaderMode {
    std::string label;
    std::int64_t blf_hz = 160'000;
    Encoding encoding = Encoding::Miller8;
    bool trext = true;
    int epc_bits = 96;
    std::optional<double> sensitivity_dbm;

    int spread() const noexcept { return spread_factor(encoding); }
};

// Throws RangeError when blf_hz or epc_bits violate the protocol limits.
void validate(const ReaderMode& mode);

struct ReplyTiming {
    Rational rn16;   // first part (T1)
    Rational pause;  // gap between parts
    Rational epc;    // second part (T2)

    double t_rn16() const noexcept { return rn16.to_double(); }
    double t_pause() const noexcept { return pause.to_double(); }
    double t_epc() const noexcept { return epc.to_double(); }
};

// Bit period M / BLF. Throws RangeError if blf_hz is outside [40 kHz, 640 kHz].
Rational symbol_period(std::int64_t blf_hz, Encoding encoding);

// Preamble (6/18 for FM0, 10/22 for Miller, without/with pilot) + payload
// + optional CRC16 + one end-of-signaling symbol.
int preamble_symbols(Encoding encoding, bool trext) noexcept;
int reply_symbol_counts(Encoding encoding, int payload_bits, bool trext, bool with_crc);

Rational signal_duration(const ReaderMode& mode, ReplyKind kind);

// 0.12 ms + 51.2 / BLF: affine in 1/BLF through 1.4 ms @ 40 kHz and 0.2 ms @ 640 kHz.
Rational pause_duration(std::int64_t blf_hz);

ReplyTiming reply_timing(const ReaderMode& mode);

class ModeCatalog {
public:
    // Built-in modes: "Mode 290", "Mode 204", "BLF40 Miller-8".
    ModeCatalog();

    const ReaderMode& find(std::string_view label) const;  // throws NotFoundError
    const std::vector<ReaderMode>& modes() const noexcept { return modes_; }

    // Adds or replaces (by label).
    void upsert(ReaderMode mode);

    // Flat key-value file: each `label = ...` line starts a new mode and the
    // following blf_hz / encoding / trext / epc_bits / sensitivity_dbm keys
    // apply to it. `#` starts a comment.
    void load_file(const std::filesystem::path& path);
    void load_text(std::string_view text);

private:
    std::vector<ReaderMode> modes_;
};

const ModeCatalog& reader_mode_catalog();

}  // namespace rfdop::protocol
