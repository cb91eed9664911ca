#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qkd {

// Packed sifted-key dump: a 16-byte header (8 bytes of magic+version, then
// the bit count as a little-endian u64) followed by the bits packed
// MSB-first.
inline constexpr std::array<char, 8> kBitFileMagic = {'Q', 'K', 'D', 'S',
                                                      'F', 'T', '0', '1'};

void write_packed_bits(const std::string& path,
                       std::span<const std::uint8_t> bits);

std::vector<std::uint8_t> read_packed_bits(const std::string& path);

}  // namespace qkd
