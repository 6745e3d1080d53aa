#pragma once

#include "raypatch/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace raypatch::io {

/// Little-endian primitives over iostreams. File formats here are all
/// little-endian on disk regardless of the host.

inline void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
    write_u32(os, static_cast<std::uint32_t>(v));
    write_u32(os, static_cast<std::uint32_t>(v >> 32));
}

inline void write_f32(std::ostream& os, float f) {
    write_u32(os, std::bit_cast<std::uint32_t>(f));
}

inline std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw IoError("unexpected end of file");
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::uint64_t read_u64(std::istream& is) {
    const std::uint64_t lo = read_u32(is);
    const std::uint64_t hi = read_u32(is);
    return lo | (hi << 32);
}

inline float read_f32(std::istream& is) {
    return std::bit_cast<float>(read_u32(is));
}

inline std::ifstream open_input(const std::string& path,
                                std::ios::openmode mode = std::ios::binary) {
    std::ifstream is(path, mode);
    if (!is) throw IoError("cannot open " + path);
    return is;
}

inline std::ofstream open_output(const std::string& path,
                                 std::ios::openmode mode = std::ios::binary) {
    std::ofstream os(path, mode);
    if (!os) throw IoError("cannot write " + path);
    return os;
}

}  // namespace raypatch::io
