#pragma once

#include "raypatch/depth.hpp"
#include "raypatch/errors.hpp"
#include "raypatch/io/binary.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

namespace raypatch::io {

namespace detail {

inline std::uint32_t byteswap32(std::uint32_t v) {
    return (v << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

inline std::string pfm_token(std::istream& is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF && std::isspace(c)) {
    }
    if (c == EOF) throw IoError("pfm: truncated header");
    do {
        tok.push_back(static_cast<char>(c));
    } while ((c = is.get()) != EOF && !std::isspace(c));
    return tok;
}

}  // namespace detail

/// Greyscale PFM ("Pf"). Rows are stored bottom-up; a negative scale marks
/// little-endian data, per the format's scale-sign convention.
inline void write_pfm(std::ostream& os, const DepthMap& d) {
    os << "Pf\n" << d.width << " " << d.height << "\n-1.0\n";
    for (int y = d.height - 1; y >= 0; --y)
        for (int x = 0; x < d.width; ++x) write_f32(os, d.at(x, y));
}

inline DepthMap read_pfm(std::istream& is) {
    const std::string magic = detail::pfm_token(is);
    if (magic != "Pf")
        throw IoError("pfm: expected greyscale magic 'Pf', got '" + magic +
                      "'");
    int w = 0, h = 0;
    double scale = 0;
    try {
        w = std::stoi(detail::pfm_token(is));
        h = std::stoi(detail::pfm_token(is));
        scale = std::stod(detail::pfm_token(is));
    } catch (const std::exception&) {
        throw IoError("pfm: malformed header");
    }
    if (w <= 0 || h <= 0) throw IoError("pfm: bad dimensions");
    if (scale == 0) throw IoError("pfm: zero scale");
    const bool file_big_endian = scale > 0;
    DepthMap d(w, h);
    for (int y = h - 1; y >= 0; --y)
        for (int x = 0; x < w; ++x) {
            std::uint32_t u = read_u32(is);
            if (file_big_endian) u = detail::byteswap32(u);
            d.at(x, y) = std::bit_cast<float>(u);
        }
    const float mag = static_cast<float>(std::abs(scale));
    if (mag != 1.0f)
        for (auto& v : d.values) v *= mag;
    return d;
}

inline void save_pfm(const std::string& path, const DepthMap& d) {
    auto os = open_output(path);
    write_pfm(os, d);
    if (!os) throw IoError("pfm: write failed for " + path);
}

inline DepthMap load_pfm(const std::string& path) {
    auto is = open_input(path);
    return read_pfm(is);
}

}  // namespace raypatch::io
