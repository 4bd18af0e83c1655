#include "rfdop/signal.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

#include "rfdop/error.hpp"
#include "rfdop/random.hpp"

namespace rfdop::signal {

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'F', 'I', 'D', 'B', 'B', '0', '1'};
constexpr std::size_t kHeaderBytes = 64;

std::vector<std::uint8_t> zeros(std::size_t n) { return std::vector<std::uint8_t>(n, 0); }

void append(Chips& dst, const Chips& src) { dst.insert(dst.end(), src.begin(), src.end()); }

void check_bits(std::span<const std::uint8_t> bits) {
    if (bits.empty()) throw ContractError("bit sequence must not be empty");
    for (auto b : bits) {
        if (b > 1) throw ContractError("bits must be 0 or 1");
    }
}

void put_u64(char* dst, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) dst[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
}

std::uint64_t get_u64(const char* src) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(src[i])) << (8 * i);
    return v;
}

}  // namespace

Chips fm0_data_chips(std::span<const std::uint8_t> bits, State first) {
    check_bits(bits);
    Chips chips;
    chips.reserve(bits.size() * 2);
    State level = first;
    for (auto b : bits) {
        chips.push_back(level);
        chips.push_back(b ? level : flip(level));
        level = flip(chips.back());
    }
    return chips;
}

Chips fm0_reply_chips(std::span<const std::uint8_t> bits, bool trext) {
    check_bits(bits);
    Chips chips;
    if (trext) append(chips, fm0_data_chips(zeros(12), State::One));
    // Preamble 1 0 1 0 v 1; the violation symbol repeats the previous level
    // for a full bit instead of inverting at its leading boundary.
    const Chips head = fm0_data_chips(std::array<std::uint8_t, 4>{1, 0, 1, 0}, State::One);
    append(chips, head);
    const State v = head.back();
    chips.push_back(v);
    chips.push_back(v);
    const State after_v = flip(v);
    chips.push_back(after_v);
    chips.push_back(after_v);

    const Chips data = fm0_data_chips(bits, flip(after_v));
    append(chips, data);
    const State dummy = flip(data.back());
    chips.push_back(dummy);
    chips.push_back(dummy);
    return chips;
}

Chips miller_data_chips(std::span<const std::uint8_t> bits, int m, MillerState& state) {
    if (m != 2 && m != 4 && m != 8) throw DomainError("Miller spread factor must be 2, 4 or 8");
    check_bits(bits);
    Chips chips;
    chips.reserve(bits.size() * 2 * static_cast<std::size_t>(m));
    for (auto b : bits) {
        if (b == 0 && state.previous_was_zero) state.level = !state.level;
        for (int k = 0; k < 2 * m; ++k) {
            const bool level = (b == 1 && k >= m) ? !state.level : state.level;
            const bool subcarrier_high = (k % 2) == 0;
            chips.push_back(level == subcarrier_high ? State::One : State::Zero);
        }
        if (b == 1) state.level = !state.level;
        state.previous_was_zero = b == 0;
    }
    return chips;
}

Chips miller_reply_chips(std::span<const std::uint8_t> bits, int m, bool trext) {
    check_bits(bits);
    MillerState state;
    Chips chips = miller_data_chips(zeros(trext ? 16 : 4), m, state);
    append(chips, miller_data_chips(std::array<std::uint8_t, 6>{0, 1, 0, 1, 1, 1}, m, state));
    append(chips, miller_data_chips(bits, m, state));
    append(chips, miller_data_chips(std::array<std::uint8_t, 1>{1}, m, state));
    return chips;
}

Chips rect_chips(int l_symbols) {
    if (l_symbols < 1) throw DomainError("rect model needs at least one symbol");
    Chips chips;
    chips.reserve(2 * static_cast<std::size_t>(l_symbols));
    for (int l = 0; l < l_symbols; ++l) {
        chips.push_back(State::One);
        chips.push_back(State::Zero);
    }
    return chips;
}

std::vector<StateSegment> to_segments(const Chips& chips, const Rational& chip_duration, const Rational& start) {
    std::vector<StateSegment> out;
    std::size_t i = 0;
    while (i < chips.size()) {
        std::size_t j = i + 1;
        while (j < chips.size() && chips[j] == chips[i]) ++j;
        out.push_back(StateSegment{start + chip_duration * Rational(static_cast<std::int64_t>(i)),
                                   chip_duration * Rational(static_cast<std::int64_t>(j - i)), chips[i]});
        i = j;
    }
    return out;
}

std::vector<StateSegment> encode_fm0(std::span<const std::uint8_t> bits, bool trext, std::int64_t blf_hz) {
    return to_segments(fm0_reply_chips(bits, trext), Rational(1, 2 * blf_hz));
}

std::vector<StateSegment> encode_miller(std::span<const std::uint8_t> bits, int m, bool trext,
                                        std::int64_t blf_hz) {
    return to_segments(miller_reply_chips(bits, m, trext), Rational(1, 2 * blf_hz));
}

std::int64_t default_sample_rate(std::int64_t blf_hz) noexcept { return 16 * 2 * blf_hz; }

Rational BasebandFrame::total_span() const {
    return parts.empty() ? Rational(0) : parts.back().end;
}

std::size_t snap_to_sample(const Rational& t, std::int64_t sample_rate_hz) {
    if (t < Rational(0)) throw ContractError("negative time");
    // round(t * fs) with ties up, exactly
    const int128 scaled = static_cast<int128>(t.num()) * sample_rate_hz;
    const int128 den = t.den();
    return static_cast<std::size_t>((2 * scaled + den) / (2 * den));
}

BasebandFrame render_frame(const std::vector<PartPlan>& plan, Modulation modulation, const ChannelParams& channel,
                           FrameTruth truth) {
    if (plan.empty()) throw ContractError("frame needs at least one part");
    if (channel.sample_rate_hz <= 0) throw ContractError("sample rate must be positive");
    const std::int64_t fs = channel.sample_rate_hz;

    BasebandFrame frame;
    frame.sample_rate_hz = fs;
    Rational cursor(0);
    for (const auto& part : plan) {
        if (part.start < cursor) throw ContractError("signal parts overlap or are out of order");
        if (part.chips.empty()) throw ContractError("signal part has no chips");
        auto segs = to_segments(part.chips, part.chip_duration, part.start);
        frame.segments.insert(frame.segments.end(), segs.begin(), segs.end());
        PartSpan span{part.start, part.end(), snap_to_sample(part.start, fs), snap_to_sample(part.end(), fs)};
        frame.parts.push_back(span);
        cursor = span.end;
    }

    const Rational span = frame.total_span();
    // ceil(span * fs)
    const int128 scaled = static_cast<int128>(span.num()) * fs;
    const auto n_samples = static_cast<std::size_t>((scaled + span.den() - 1) / span.den());
    frame.samples.assign(n_samples, Sample{});
    frame.sample_states.assign(n_samples, kNoSignal);

    for (const auto& seg : frame.segments) {
        const std::size_t a = snap_to_sample(seg.start, fs);
        const std::size_t b = std::min(snap_to_sample(seg.start + seg.duration, fs), n_samples);
        for (std::size_t n = a; n < b; ++n) frame.sample_states[n] = static_cast<std::int8_t>(seg.state);
    }

    const double reflect = std::sqrt(2.0);
    const double w = -2.0 * std::numbers::pi * channel.f_d_hz / static_cast<double>(fs);
    for (std::size_t n = 0; n < n_samples; ++n) {
        const auto st = frame.sample_states[n];
        if (st == kNoSignal) continue;
        double amplitude;
        if (modulation == Modulation::ASK) {
            amplitude = st == static_cast<std::int8_t>(State::One) ? reflect : 0.0;
        } else {
            amplitude = st == static_cast<std::int8_t>(State::One) ? -1.0 : 1.0;
        }
        if (amplitude != 0.0) frame.samples[n] = std::polar(amplitude, w * static_cast<double>(n));
    }

    if (std::isfinite(channel.ps_n0_dbhz)) {
        add_awgn(frame.samples, channel.ps_n0_dbhz, static_cast<double>(fs), channel.seed);
    }

    truth.f_d_hz = channel.f_d_hz;
    truth.ps_n0_dbhz = channel.ps_n0_dbhz;
    truth.modulation = modulation;
    truth.seed = channel.seed;
    frame.truth = std::move(truth);
    return frame;
}

BasebandFrame synthesize_reply(const protocol::ReplyTiming& timing, const ReplyRequest& request,
                               const ChannelParams& channel) {
    const auto& mode = request.mode;
    protocol::validate(mode);
    const bool want_rn16 = request.parts != ReplyParts::Epc;
    const bool want_epc = request.parts != ReplyParts::Rn16;
    if (want_rn16 && request.bits_rn16.size() != static_cast<std::size_t>(protocol::kRn16Bits)) {
        throw ContractError("RN16 part needs exactly 16 bits");
    }
    if (want_epc && request.bits_epc.size() != static_cast<std::size_t>(mode.epc_bits + protocol::kCrcBits)) {
        throw ContractError("EPC part needs epc_bits + 16 CRC bits");
    }

    const int m = mode.spread();
    const Rational gen2_chip(1, 2 * mode.blf_hz);
    const Rational symbol = protocol::symbol_period(mode.blf_hz, mode.encoding);

    auto make_part = [&](const std::vector<std::uint8_t>& bits, bool with_crc, const Rational& expected) {
        PartPlan part;
        if (request.model == WaveformModel::RectAppendix) {
            const int payload = with_crc ? mode.epc_bits : protocol::kRn16Bits;
            part.chips = rect_chips(protocol::reply_symbol_counts(mode.encoding, payload, mode.trext, with_crc));
            part.chip_duration = symbol / Rational(2);
        } else {
            part.chips = m == 1 ? fm0_reply_chips(bits, mode.trext) : miller_reply_chips(bits, m, mode.trext);
            part.chip_duration = gen2_chip;
        }
        if (part.chip_duration * Rational(static_cast<std::int64_t>(part.chips.size())) != expected) {
            throw ContractError("reply timing does not match the reader mode");
        }
        return part;
    };

    std::vector<PartPlan> plan;
    Rational cursor(0);
    if (want_rn16) {
        plan.push_back(make_part(request.bits_rn16, false, timing.rn16));
        cursor = timing.rn16 + timing.pause;
    }
    if (want_epc) {
        PartPlan epc = make_part(request.bits_epc, true, timing.epc);
        epc.start = cursor;
        plan.push_back(std::move(epc));
    }

    ChannelParams ch = channel;
    if (ch.sample_rate_hz == 0) ch.sample_rate_hz = default_sample_rate(mode.blf_hz);

    FrameTruth truth;
    truth.model = request.model;
    if (want_rn16) truth.bits_rn16 = request.bits_rn16;
    if (want_epc) truth.bits_epc = request.bits_epc;
    return render_frame(plan, request.modulation, ch, std::move(truth));
}

std::vector<std::uint8_t> random_bits(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::vector<std::uint8_t> bits(count);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (i % 64 == 0) word = engine();
        bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
    return bits;
}

void add_awgn(std::span<Sample> samples, double ps_n0_dbhz, double sample_rate_hz, std::uint64_t seed) {
    if (!(sample_rate_hz > 0.0)) throw ContractError("sample rate must be positive");
    if (std::isinf(ps_n0_dbhz) && ps_n0_dbhz > 0) return;
    const double n0 = std::pow(10.0, -ps_n0_dbhz / 10.0);
    const double sigma = std::sqrt(n0 * sample_rate_hz / 2.0);  // per real component
    GaussianSource gauss(seed);
    for (auto& s : samples) {
        const auto [i, q] = gauss.pair();
        s += Sample(sigma * i, sigma * q);
    }
}

void write_frame(std::ostream& out, double sample_rate_hz, std::span<const Sample> samples) {
    std::array<char, kHeaderBytes> header{};
    std::memcpy(header.data(), kMagic.data(), kMagic.size());
    put_u64(header.data() + 8, std::bit_cast<std::uint64_t>(sample_rate_hz));
    put_u64(header.data() + 16, samples.size());
    out.write(header.data(), header.size());
    std::array<char, 16> buf{};
    for (const auto& s : samples) {
        put_u64(buf.data(), std::bit_cast<std::uint64_t>(s.real()));
        put_u64(buf.data() + 8, std::bit_cast<std::uint64_t>(s.imag()));
        out.write(buf.data(), buf.size());
    }
    if (!out) throw IoError("failed to write frame dump");
}

void write_frame(const std::filesystem::path& path, const BasebandFrame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string());
    write_frame(out, frame.sample_rate(), frame.samples);
}

FrameDump read_frame(std::istream& in) {
    std::array<char, kHeaderBytes> header{};
    if (!in.read(header.data(), header.size())) throw IoError("truncated frame header");
    if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) throw IoError("bad frame magic");
    FrameDump dump;
    dump.sample_rate_hz = std::bit_cast<double>(get_u64(header.data() + 8));
    const std::uint64_t count = get_u64(header.data() + 16);
    dump.samples.reserve(count);
    std::array<char, 16> buf{};
    for (std::uint64_t i = 0; i < count; ++i) {
        if (!in.read(buf.data(), buf.size())) throw IoError("truncated frame payload");
        dump.samples.emplace_back(std::bit_cast<double>(get_u64(buf.data())),
                                  std::bit_cast<double>(get_u64(buf.data() + 8)));
    }
    return dump;
}

}  // namespace rfdop::signal
