#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ultrafsk/bits.hpp"

namespace ultrafsk {

// Frame layout: 6-bit preamble 101010, 16-bit payload, 8-bit CRC = 30 bits.
inline constexpr size_t kPreambleBits = 6;
inline constexpr size_t kPayloadBits  = 16;
inline constexpr size_t kCrcBits      = 8;
inline constexpr size_t kFrameBits    = kPreambleBits + kPayloadBits + kCrcBits;
inline constexpr std::array<uint8_t, kPreambleBits> kPreamble = {1, 0, 1, 0, 1, 0};

// CRC-8 over the two payload bytes, MSB first. Polynomial x^8+x^2+x+1 (0x07),
// initial value 0x00, no reflection, no final xor.
uint8_t crc8(uint16_t payload);
uint8_t crc8(const std::vector<uint8_t>& bytes);

// preamble || payload || crc8(payload), 30 bits.
BitVec build_frame(uint16_t payload);

enum class FrameError : uint8_t {
    None,
    BadPreamble, // first six bits are not 101010
    BadCrc,      // checksum mismatch over the payload
};

struct FrameParse {
    FrameError error = FrameError::None;
    uint16_t payload = 0;
    bool ok() const { return error == FrameError::None; }
};

// Validate exactly 30 bits. Preamble is checked before the CRC, so a frame
// with both problems reports BadPreamble. Throws DomainError if the input is
// not 30 bits of 0/1.
FrameParse parse_frame(const BitVec& bits);

// Split a byte message into 16-bit payloads (big-endian pairs, last payload
// zero-padded) and reassemble. `bytes_from_payloads` returns 2 bytes per
// payload; trailing-pad removal is the caller's business.
std::vector<uint16_t> payloads_from_bytes(const std::vector<uint8_t>& message);
std::vector<uint8_t> bytes_from_payloads(const std::vector<uint16_t>& payloads);

} // namespace ultrafsk
