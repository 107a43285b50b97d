#include "ultrafsk/frame.hpp"

#include <algorithm>

#include "ultrafsk/errors.hpp"

namespace ultrafsk {

uint8_t crc8(const std::vector<uint8_t>& bytes) {
    uint8_t crc = 0x00;
    for (uint8_t byte : bytes) {
        crc ^= byte;
        for (int bit = 0; bit < 8; ++bit)
            crc = (crc & 0x80u) ? static_cast<uint8_t>((crc << 1) ^ 0x07u)
                                : static_cast<uint8_t>(crc << 1);
    }
    return crc;
}

uint8_t crc8(uint16_t payload) {
    return crc8({static_cast<uint8_t>(payload >> 8), static_cast<uint8_t>(payload & 0xFFu)});
}

BitVec build_frame(uint16_t payload) {
    BitVec bits;
    bits.reserve(kFrameBits);
    bits.insert(bits.end(), kPreamble.begin(), kPreamble.end());
    BitVec data = bits_from_u16(payload);
    bits.insert(bits.end(), data.begin(), data.end());
    uint8_t crc = crc8(payload);
    for (int i = 7; i >= 0; --i)
        bits.push_back(static_cast<uint8_t>((crc >> i) & 1u));
    return bits;
}

FrameParse parse_frame(const BitVec& bits) {
    if (bits.size() != kFrameBits)
        throw DomainError("parse_frame: expected " + std::to_string(kFrameBits) +
                          " bits, got " + std::to_string(bits.size()));
    for (uint8_t b : bits)
        if (b > 1)
            throw DomainError("parse_frame: element is not a bit");

    FrameParse result;
    if (!std::equal(kPreamble.begin(), kPreamble.end(), bits.begin())) {
        result.error = FrameError::BadPreamble;
        return result;
    }
    uint16_t payload = u16_from_bits(bits, kPreambleBits);
    uint8_t crc = 0;
    for (size_t i = 0; i < kCrcBits; ++i)
        crc = static_cast<uint8_t>((crc << 1) | bits[kPreambleBits + kPayloadBits + i]);
    if (crc != crc8(payload)) {
        result.error = FrameError::BadCrc;
        return result;
    }
    result.payload = payload;
    return result;
}

std::vector<uint16_t> payloads_from_bytes(const std::vector<uint8_t>& message) {
    std::vector<uint16_t> payloads;
    payloads.reserve((message.size() + 1) / 2);
    for (size_t i = 0; i < message.size(); i += 2) {
        uint16_t hi = message[i];
        uint16_t lo = (i + 1 < message.size()) ? message[i + 1] : 0;
        payloads.push_back(static_cast<uint16_t>((hi << 8) | lo));
    }
    return payloads;
}

std::vector<uint8_t> bytes_from_payloads(const std::vector<uint16_t>& payloads) {
    std::vector<uint8_t> bytes;
    bytes.reserve(payloads.size() * 2);
    for (uint16_t p : payloads) {
        bytes.push_back(static_cast<uint8_t>(p >> 8));
        bytes.push_back(static_cast<uint8_t>(p & 0xFFu));
    }
    return bytes;
}

} // namespace ultrafsk
