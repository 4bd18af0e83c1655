#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "rfdop/protocol.hpp"
#include "rfdop/rational.hpp"

// Complex-baseband synthesis of backscattered tag replies.
namespace rfdop::signal {

using Sample = std::complex<double>;

enum class Modulation { ASK, PSK };
enum class WaveformModel { Gen2, RectAppendix };
enum class ReplyParts { Rn16, Epc, Both };

// Tag backscatter state. ASK: Zero absorbs, One reflects.
// PSK: Zero is +sqrt(P_S), One is -sqrt(P_S).
enum class State : std::uint8_t { Zero = 0, One = 1 };

constexpr State flip(State s) noexcept { return s == State::Zero ? State::One : State::Zero; }

struct StateSegment {
    Rational start;
    Rational duration;
    State state;
};

// A chip is one minimal transition interval: half an FM0 bit, or half a
// Miller subcarrier cycle. Both are 1 / (2 BLF) long.
using Chips = std::vector<State>;

// FM0 data only: level inverts at every bit boundary, data-0 adds a mid-bit
// inversion. `first` is the level of the first half of the first bit.
Chips fm0_data_chips(std::span<const std::uint8_t> bits, State first);
// Full FM0 reply: optional 12-zero pilot, "1010v1" preamble, data, dummy 1.
Chips fm0_reply_chips(std::span<const std::uint8_t> bits, bool trext);

// Running baseband state of a Miller encoder.
struct MillerState {
    bool level = true;
    bool previous_was_zero = false;
};

// Miller-M data only: baseband inverts between consecutive data-0s and at the
// middle of every data-1; multiplied by a square subcarrier of M cycles per bit.
// Throws DomainError unless m is 2, 4 or 8.
Chips miller_data_chips(std::span<const std::uint8_t> bits, int m, MillerState& state);
// Full Miller reply: 4 (16 with pilot) zeros, "010111" preamble, data, dummy 1.
Chips miller_reply_chips(std::span<const std::uint8_t> bits, int m, bool trext);

// Per-symbol [One for T/2, Zero for T/2] pattern, independent of data.
Chips rect_chips(int l_symbols);

// Merges equal neighbouring chips into segments starting at `start`.
std::vector<StateSegment> to_segments(const Chips& chips, const Rational& chip_duration,
                                      const Rational& start = Rational(0));

// Segment view of a complete reply, starting at t = 0.
std::vector<StateSegment> encode_fm0(std::span<const std::uint8_t> bits, bool trext, std::int64_t blf_hz);
std::vector<StateSegment> encode_miller(std::span<const std::uint8_t> bits, int m, bool trext,
                                        std::int64_t blf_hz);

// 16 samples per minimal transition interval.
std::int64_t default_sample_rate(std::int64_t blf_hz) noexcept;

struct ChannelParams {
    double f_d_hz = 0.0;
    // +infinity disables noise.
    double ps_n0_dbhz = std::numeric_limits<double>::infinity();
    // 0 selects default_sample_rate(BLF).
    std::int64_t sample_rate_hz = 0;
    std::uint64_t seed = 0;
};

struct FrameTruth {
    double f_d_hz = 0.0;
    double ps_n0_dbhz = 0.0;
    Modulation modulation = Modulation::PSK;
    WaveformModel model = WaveformModel::Gen2;
    std::vector<std::uint8_t> bits_rn16;
    std::vector<std::uint8_t> bits_epc;
    std::uint64_t seed = 0;
};

struct PartSpan {
    Rational start;
    Rational end;
    std::size_t first_sample = 0;
    std::size_t end_sample = 0;  // one past the last sample

    Rational duration() const { return end - start; }
};

// One contiguous signal part laid out on the chip grid.
struct PartPlan {
    Rational start;
    Rational chip_duration;
    Chips chips;

    Rational end() const { return start + chip_duration * Rational(static_cast<std::int64_t>(chips.size())); }
};

inline constexpr std::int8_t kNoSignal = -1;

struct BasebandFrame {
    std::vector<StateSegment> segments;
    std::vector<PartSpan> parts;
    std::int64_t sample_rate_hz = 0;
    std::vector<Sample> samples;
    // Per-sample backscatter state (0/1), kNoSignal outside the parts.
    std::vector<std::int8_t> sample_states;
    FrameTruth truth;

    double sample_rate() const noexcept { return static_cast<double>(sample_rate_hz); }
    Rational total_span() const;
};

// Index of the sample nearest to time t on the grid n / fs.
std::size_t snap_to_sample(const Rational& t, std::int64_t sample_rate_hz);

// Renders parts with unit average power (P_S = 1), applies the Doppler
// rotation exp(-j 2 pi f_d t) with t = 0 at the frame start, then adds noise.
BasebandFrame render_frame(const std::vector<PartPlan>& plan, Modulation modulation, const ChannelParams& channel,
                           FrameTruth truth);

struct ReplyRequest {
    protocol::ReaderMode mode;
    Modulation modulation = Modulation::PSK;
    WaveformModel model = WaveformModel::Gen2;
    ReplyParts parts = ReplyParts::Both;
    std::vector<std::uint8_t> bits_rn16;  // 16 bits
    std::vector<std::uint8_t> bits_epc;   // epc_bits + 16 (CRC) bits
};

// Throws ContractError on bit-length mismatch or timing that disagrees with the mode.
BasebandFrame synthesize_reply(const protocol::ReplyTiming& timing, const ReplyRequest& request,
                               const ChannelParams& channel);

// Uniformly random bits from a seeded mt19937_64 stream.
std::vector<std::uint8_t> random_bits(std::size_t count, std::uint64_t seed);

// Adds complex white Gaussian noise with per-sample variance N0 * fs where
// N0 = 1 / ratio (signal normalized to P_S = 1). Deterministic per seed.
void add_awgn(std::span<Sample> samples, double ps_n0_dbhz, double sample_rate_hz, std::uint64_t seed);

// Frame dump: 64-byte header ("RFIDBB01", f64 sample rate, u64 count, zero
// padding) followed by interleaved little-endian f64 I/Q pairs.
void write_frame(std::ostream& out, double sample_rate_hz, std::span<const Sample> samples);
void write_frame(const std::filesystem::path& path, const BasebandFrame& frame);

struct FrameDump {
    double sample_rate_hz = 0.0;
    std::vector<Sample> samples;
};
FrameDump read_frame(std::istream& in);

}  // namespace rfdop::signal
