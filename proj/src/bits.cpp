#include "ultrafsk/bits.hpp"

#include "ultrafsk/errors.hpp"

namespace ultrafsk {

BitVec bits_from_u16(uint16_t value) {
    BitVec bits(16);
    for (int i = 0; i < 16; ++i)
        bits[i] = static_cast<uint8_t>((value >> (15 - i)) & 1u);
    return bits;
}

uint16_t u16_from_bits(const BitVec& bits, size_t offset) {
    if (offset + 16 > bits.size())
        throw DomainError("u16_from_bits: need 16 bits at offset " + std::to_string(offset) +
                          ", have " + std::to_string(bits.size()));
    uint16_t v = 0;
    for (size_t i = 0; i < 16; ++i) {
        uint8_t b = bits[offset + i];
        if (b > 1)
            throw DomainError("u16_from_bits: element is not a bit");
        v = static_cast<uint16_t>((v << 1) | b);
    }
    return v;
}

std::string bits_to_string(const BitVec& bits) {
    std::string s;
    s.reserve(bits.size());
    for (uint8_t b : bits)
        s.push_back(b ? '1' : '0');
    return s;
}

BitVec bits_from_string(const std::string& text) {
    BitVec bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1')
            throw DomainError(std::string("bits_from_string: invalid character '") + c + "'");
        bits.push_back(static_cast<uint8_t>(c - '0'));
    }
    return bits;
}

std::vector<uint8_t> bytes_from_bits(const BitVec& bits) {
    std::vector<uint8_t> out((bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] > 1)
            throw DomainError("bytes_from_bits: element is not a bit");
        if (bits[i])
            out[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
    }
    return out;
}

BitVec bits_from_bytes(const std::vector<uint8_t>& bytes) {
    BitVec bits(bytes.size() * 8);
    for (size_t i = 0; i < bytes.size(); ++i)
        for (int j = 0; j < 8; ++j)
            bits[i * 8 + j] = static_cast<uint8_t>((bytes[i] >> (7 - j)) & 1u);
    return bits;
}

} // namespace ultrafsk
