#include "qkd/bitfile.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qkd {

void write_packed_bits(const std::string& path,
                       std::span<const std::uint8_t> bits) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);

    char header[16];
    std::memcpy(header, kBitFileMagic.data(), 8);
    const std::uint64_t count = bits.size();
    for (int i = 0; i < 8; ++i) {
        header[8 + i] = static_cast<char>((count >> (8 * i)) & 0xFF);
    }
    out.write(header, sizeof(header));

    std::vector<char> packed((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] & 1) {
            packed[i / 8] |= static_cast<char>(0x80u >> (i % 8));
        }
    }
    out.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::uint8_t> read_packed_bits(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);

    char header[16];
    in.read(header, sizeof(header));
    if (!in || std::memcmp(header, kBitFileMagic.data(), 8) != 0) {
        throw std::runtime_error("bad bit-file header: " + path);
    }
    std::uint64_t count = 0;
    for (int i = 7; i >= 0; --i) {
        count = (count << 8) | static_cast<std::uint8_t>(header[8 + i]);
    }

    std::vector<char> packed((count + 7) / 8);
    in.read(packed.data(), static_cast<std::streamsize>(packed.size()));
    if (!in) throw std::runtime_error("truncated bit file: " + path);

    std::vector<std::uint8_t> bits(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        bits[i] = (static_cast<std::uint8_t>(packed[i / 8]) >> (7 - i % 8)) & 1u;
    }
    return bits;
}

}  // namespace qkd
