#pragma once

#include "raypatch/errors.hpp"
#include "raypatch/io/binary.hpp"
#include "raypatch/math.hpp"

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace raypatch::io {

enum class PlyFormat { kAscii, kBinaryLittleEndian };

namespace detail {

inline void append_float(std::string& line, float v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    line.append(buf, res.ptr);
}

}  // namespace detail

/// Point-cloud PLY: one vertex element with float x/y/z, meters.
inline void write_ply(std::ostream& os, const std::vector<Vec3>& points,
                      PlyFormat format = PlyFormat::kBinaryLittleEndian) {
    os << "ply\nformat "
       << (format == PlyFormat::kAscii ? "ascii" : "binary_little_endian")
       << " 1.0\nelement vertex " << points.size()
       << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
    if (format == PlyFormat::kAscii) {
        std::string line;
        for (const Vec3& p : points) {
            line.clear();
            detail::append_float(line, static_cast<float>(p.x()));
            line.push_back(' ');
            detail::append_float(line, static_cast<float>(p.y()));
            line.push_back(' ');
            detail::append_float(line, static_cast<float>(p.z()));
            line.push_back('\n');
            os << line;
        }
    } else {
        for (const Vec3& p : points) {
            write_f32(os, static_cast<float>(p.x()));
            write_f32(os, static_cast<float>(p.y()));
            write_f32(os, static_cast<float>(p.z()));
        }
    }
}

inline std::vector<Vec3> read_ply(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || (line != "ply" && line != "ply\r"))
        throw IoError("ply: missing magic");
    PlyFormat format = PlyFormat::kAscii;
    std::size_t vertex_count = 0;
    bool in_vertex = false;
    std::vector<std::string> vertex_props;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "comment" || word.empty()) continue;
        if (word == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii")
                format = PlyFormat::kAscii;
            else if (fmt == "binary_little_endian")
                format = PlyFormat::kBinaryLittleEndian;
            else
                throw IoError("ply: unsupported format " + fmt);
        } else if (word == "element") {
            std::string name;
            std::size_t count = 0;
            ls >> name >> count;
            if (name != "vertex")
                throw IoError("ply: only vertex elements supported");
            vertex_count = count;
            in_vertex = true;
        } else if (word == "property") {
            if (!in_vertex) throw IoError("ply: property outside element");
            std::string type, name;
            ls >> type >> name;
            if (type != "float" && type != "float32")
                throw IoError("ply: only float properties supported");
            vertex_props.push_back(name);
        } else if (word == "end_header") {
            break;
        } else {
            throw IoError("ply: unexpected header line '" + line + "'");
        }
    }
    if (vertex_props != std::vector<std::string>{"x", "y", "z"})
        throw IoError("ply: expected exactly float x, y, z properties");
    std::vector<Vec3> points;
    points.reserve(vertex_count);
    if (format == PlyFormat::kAscii) {
        for (std::size_t i = 0; i < vertex_count; ++i) {
            if (!std::getline(is, line))
                throw IoError("ply: truncated vertex data");
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const char* p = line.data();
            const char* end = line.data() + line.size();
            float coords[3];
            for (float& c : coords) {
                while (p < end && *p == ' ') ++p;
                const auto res = std::from_chars(p, end, c);
                if (res.ec != std::errc())
                    throw IoError("ply: bad vertex line '" + line + "'");
                p = res.ptr;
            }
            points.emplace_back(coords[0], coords[1], coords[2]);
        }
    } else {
        for (std::size_t i = 0; i < vertex_count; ++i) {
            const float x = read_f32(is);
            const float y = read_f32(is);
            const float z = read_f32(is);
            points.emplace_back(x, y, z);
        }
    }
    return points;
}

inline void save_ply(const std::string& path, const std::vector<Vec3>& points,
                     PlyFormat format = PlyFormat::kBinaryLittleEndian) {
    auto os = open_output(path);
    write_ply(os, points, format);
    if (!os) throw IoError("ply: write failed for " + path);
}

inline std::vector<Vec3> read_ply_file(const std::string& path) {
    auto is = open_input(path);
    return read_ply(is);
}

}  // namespace raypatch::io
