#pragma once

// Binary sequence formats.
//
// Raw ("SFQ1"), little-endian:
//   magic "SFQ1" | version u16 | clock_freq mHz u64 | duration ps u64 |
//   kick_angle urad u32 | flux_off uPhi0 u32 | flux_on uPhi0 u32 |
//   n_ramp u16 | excursion count u16 | (start tick u32, end tick u32) per excursion |
//   qubit-1 bits | qubit-2 bits
// Each bit vector holds floor(duration * clock_freq) bits, tick 0 in the least
// significant bit of its first byte, trailing pad bits zero.
//
// Compressed ("SFQZ"): the same header, then slots-per-period u16, then per
// qubit a u32 payload bit count and the payload. The bit vector is split into
// one stream per clock slot of the qubit period; each stream stores its first
// bit and its run lengths as Elias-gamma codes.

#include <cstdint>
#include <vector>

#include "sfqgate/schedule.hpp"

namespace sfq {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint16_t kSequenceVersion = 1;

/// Requires a discrete schedule with on-grid corners.
Bytes write_sequence(const ControlSchedule& schedule);
ControlSchedule read_sequence(const Bytes& bytes);

/// The schedule as it reads back from the raw format (fixed-point header fields).
ControlSchedule canonical_schedule(const ControlSchedule& schedule);

/// Number of clock slots per qubit period; throws UnsupportedRatio unless
/// clock_freq / qubit_freq is an integer.
int slots_per_period(double clock_freq, double qubit_freq);

Bytes compress_sequence(const ControlSchedule& schedule, double qubit_freq);
ControlSchedule decompress_sequence(const Bytes& bytes);

/// Payload bits of each qubit in a compressed sequence.
std::array<std::uint32_t, 2> compressed_payload_bits(const Bytes& bytes);

bool is_compressed(const Bytes& bytes);
/// Reads either format.
ControlSchedule read_any_sequence(const Bytes& bytes);

}  // namespace sfq
