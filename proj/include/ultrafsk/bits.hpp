#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ultrafsk {

// One bit per element, value 0 or 1, most significant bit first.
using BitVec = std::vector<uint8_t>;

// 16-bit value -> 16 bits, MSB first.
BitVec bits_from_u16(uint16_t value);

// Read 16 bits (MSB first) starting at `offset`. Throws DomainError if the
// vector is too short or holds values other than 0/1.
uint16_t u16_from_bits(const BitVec& bits, size_t offset = 0);

// "10110..." <-> BitVec. Parsing rejects anything but '0'/'1'.
std::string bits_to_string(const BitVec& bits);
BitVec bits_from_string(const std::string& text);

// Pack MSB-first into bytes (last byte zero-padded) and back.
std::vector<uint8_t> bytes_from_bits(const BitVec& bits);
BitVec bits_from_bytes(const std::vector<uint8_t>& bytes);

} // namespace ultrafsk
