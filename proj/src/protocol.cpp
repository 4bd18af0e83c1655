#include "rfdop/protocol.hpp"

#include <algorithm>

#include "rfdop/error.hpp"
#include "rfdop/keyvalue.hpp"

namespace rfdop::protocol {

namespace {

void check_blf(std::int64_t blf_hz) {
    if (blf_hz < kMinBlfHz || blf_hz > kMaxBlfHz) {
        throw RangeError("BLF " + std::to_string(blf_hz) + " Hz outside [40 kHz, 640 kHz]");
    }
}

}  // namespace

int spread_factor(Encoding encoding) noexcept {
    switch (encoding) {
        case Encoding::FM0: return 1;
        case Encoding::Miller2: return 2;
        case Encoding::Miller4: return 4;
        case Encoding::Miller8: return 8;
    }
    return 1;
}

std::string_view encoding_name(Encoding encoding) noexcept {
    switch (encoding) {
        case Encoding::FM0: return "FM0";
        case Encoding::Miller2: return "Miller2";
        case Encoding::Miller4: return "Miller4";
        case Encoding::Miller8: return "Miller8";
    }
    return "?";
}

Encoding encoding_from_spread(int m) {
    switch (m) {
        case 1: return Encoding::FM0;
        case 2: return Encoding::Miller2;
        case 4: return Encoding::Miller4;
        case 8: return Encoding::Miller8;
        default: throw DomainError("spread factor must be 1, 2, 4 or 8, got " + std::to_string(m));
    }
}

Encoding parse_encoding(std::string_view text) {
    std::string s = kv::lower(kv::trim(text));
    s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
    if (s == "fm0") return Encoding::FM0;
    if (s == "miller2" || s == "m2") return Encoding::Miller2;
    if (s == "miller4" || s == "m4") return Encoding::Miller4;
    if (s == "miller8" || s == "m8") return Encoding::Miller8;
    throw RangeError("unknown encoding '" + std::string(text) + "'");
}

void validate(const ReaderMode& mode) {
    check_blf(mode.blf_hz);
    if (mode.epc_bits != 96 && mode.epc_bits != 128 && mode.epc_bits != 256) {
        throw RangeError("epc_bits must be 96, 128 or 256, got " + std::to_string(mode.epc_bits));
    }
}

Rational symbol_period(std::int64_t blf_hz, Encoding encoding) {
    check_blf(blf_hz);
    return Rational(spread_factor(encoding), blf_hz);
}

int preamble_symbols(Encoding encoding, bool trext) noexcept {
    if (encoding == Encoding::FM0) return trext ? 18 : 6;
    return trext ? 22 : 10;
}

int reply_symbol_counts(Encoding encoding, int payload_bits, bool trext, bool with_crc) {
    if (payload_bits <= 0) throw DomainError("payload_bits must be positive");
    return preamble_symbols(encoding, trext) + payload_bits + (with_crc ? kCrcBits : 0) + 1;
}

Rational signal_duration(const ReaderMode& mode, ReplyKind kind) {
    const Rational period = symbol_period(mode.blf_hz, mode.encoding);
    const int symbols = kind == ReplyKind::Rn16
                            ? reply_symbol_counts(mode.encoding, kRn16Bits, mode.trext, false)
                            : reply_symbol_counts(mode.encoding, mode.epc_bits, mode.trext, true);
    return period * Rational(symbols);
}

Rational pause_duration(std::int64_t blf_hz) {
    check_blf(blf_hz);
    // 0.12 ms + 51.2 s*Hz / BLF
    return Rational(3, 25'000) + Rational(256, 5 * blf_hz);
}

ReplyTiming reply_timing(const ReaderMode& mode) {
    validate(mode);
    return ReplyTiming{signal_duration(mode, ReplyKind::Rn16), pause_duration(mode.blf_hz),
                       signal_duration(mode, ReplyKind::Epc)};
}

ModeCatalog::ModeCatalog() {
    modes_.push_back(ReaderMode{"Mode 290", 160'000, Encoding::Miller8, true, 96, -95.8});
    modes_.push_back(ReaderMode{"Mode 204", 320'000, Encoding::FM0, true, 96, std::nullopt});
    modes_.push_back(ReaderMode{"BLF40 Miller-8", 40'000, Encoding::Miller8, true, 96, std::nullopt});
}

const ReaderMode& ModeCatalog::find(std::string_view label) const {
    const auto it = std::find_if(modes_.begin(), modes_.end(),
                                 [&](const ReaderMode& m) { return kv::lower(m.label) == kv::lower(label); });
    if (it == modes_.end()) throw NotFoundError("unknown reader mode '" + std::string(label) + "'");
    return *it;
}

void ModeCatalog::upsert(ReaderMode mode) {
    validate(mode);
    const auto it = std::find_if(modes_.begin(), modes_.end(),
                                 [&](const ReaderMode& m) { return kv::lower(m.label) == kv::lower(mode.label); });
    if (it != modes_.end()) {
        *it = std::move(mode);
    } else {
        modes_.push_back(std::move(mode));
    }
}

void ModeCatalog::load_file(const std::filesystem::path& path) {
    load_text(kv::read_file(path));
}

void ModeCatalog::load_text(std::string_view text) {
    std::vector<ReaderMode> pending;
    for (const auto& e : kv::parse(text)) {
        if (e.key == "label") {
            ReaderMode mode;
            mode.label = e.value;
            pending.push_back(std::move(mode));
            continue;
        }
        if (pending.empty()) throw ConfigError(e.key, "appears before any `label` line");
        ReaderMode& m = pending.back();
        try {
            if (e.key == "blf_hz") {
                m.blf_hz = kv::to_int(e.key, e.value);
            } else if (e.key == "encoding") {
                m.encoding = parse_encoding(e.value);
            } else if (e.key == "trext") {
                m.trext = kv::to_bool(e.key, e.value);
            } else if (e.key == "epc_bits") {
                m.epc_bits = static_cast<int>(kv::to_int(e.key, e.value));
            } else if (e.key == "sensitivity_dbm") {
                if (kv::lower(e.value) == "none" || e.value.empty()) {
                    m.sensitivity_dbm.reset();
                } else {
                    m.sensitivity_dbm = kv::to_double(e.key, e.value);
                }
            } else {
                throw ConfigError(e.key, "unknown reader-mode key");
            }
        } catch (const RangeError& err) {
            throw ConfigError(e.key, err.what());
        }
    }
    for (auto& m : pending) {
        try {
            validate(m);
        } catch (const RangeError& err) {
            throw ConfigError(m.label, err.what());
        }
        upsert(std::move(m));
    }
}

const ModeCatalog& reader_mode_catalog() {
    static const ModeCatalog catalog;
    return catalog;
}

}  // namespace rfdop::protocol
