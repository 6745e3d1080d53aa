#pragma once

#include "raypatch/errors.hpp"
#include "raypatch/io/binary.hpp"
#include "raypatch/lidar.hpp"

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

namespace raypatch::io {

/// Binary ray-scan container ".lray":
///   bytes 0..7   magic "LRAYSCAN"
///   bytes 8..11  u32 version (1), little-endian
///   bytes 12..15 reserved, zero
///   bytes 16..23 u64 ray count, little-endian
///   then per ray 7 x f32 little-endian:
///   origin xyz (m), direction xyz (unit), range (m; +inf = no return).
inline constexpr std::array<char, 8> kLrayMagic = {'L', 'R', 'A', 'Y',
                                                   'S', 'C', 'A', 'N'};
inline constexpr std::uint32_t kLrayVersion = 1;

inline void write_lray(std::ostream& os, const LidarScan& scan) {
    os.write(kLrayMagic.data(), kLrayMagic.size());
    write_u32(os, kLrayVersion);
    write_u32(os, 0);
    write_u64(os, scan.rays.size());
    for (const LidarRay& r : scan.rays) {
        for (int k = 0; k < 3; ++k)
            write_f32(os, static_cast<float>(r.origin[k]));
        for (int k = 0; k < 3; ++k)
            write_f32(os, static_cast<float>(r.direction[k]));
        write_f32(os, r.range);
    }
}

inline LidarScan read_lray(std::istream& is) {
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kLrayMagic) throw IoError("lray: bad magic");
    const std::uint32_t version = read_u32(is);
    if (version != kLrayVersion)
        throw IoError("lray: unsupported version " + std::to_string(version));
    read_u32(is);  // reserved
    const std::uint64_t count = read_u64(is);
    LidarScan scan;
    scan.rays.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        LidarRay r;
        for (int k = 0; k < 3; ++k) r.origin[k] = read_f32(is);
        for (int k = 0; k < 3; ++k) r.direction[k] = read_f32(is);
        r.range = read_f32(is);
        scan.rays.push_back(r);
    }
    // Directions are stored as f32, so unit length only holds to f32
    // precision here.
    scan.validate(1e-6);
    return scan;
}

inline void save_lray(const std::string& path, const LidarScan& scan) {
    auto os = open_output(path);
    write_lray(os, scan);
    if (!os) throw IoError("lray: write failed for " + path);
}

inline LidarScan load_lray(const std::string& path) {
    auto is = open_input(path);
    return read_lray(is);
}

}  // namespace raypatch::io
