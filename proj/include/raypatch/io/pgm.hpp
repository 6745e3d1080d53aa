#pragma once

#include "raypatch/errors.hpp"
#include "raypatch/io/binary.hpp"
#include "raypatch/raster.hpp"

#include <cctype>
#include <istream>
#include <ostream>
#include <string>

namespace raypatch::io {

namespace detail {

/// PGM header token: whitespace separated, '#' starts a comment line.
inline std::string pgm_token(std::istream& is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) break;
    }
    if (c == EOF) throw IoError("pgm: truncated header");
    do {
        tok.push_back(static_cast<char>(c));
    } while ((c = is.get()) != EOF && !std::isspace(c));
    return tok;
}

}  // namespace detail

/// Binary PGM (P5) masks: 255 = object, 0 = background.
inline void write_pgm(std::ostream& os, const ObjectMask& m) {
    os << "P5\n" << m.width << " " << m.height << "\n255\n";
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            os.put(m.at(x, y) ? '\xff' : '\0');
}

inline ObjectMask read_pgm(std::istream& is) {
    if (detail::pgm_token(is) != "P5")
        throw IoError("pgm: expected binary greymap magic 'P5'");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(detail::pgm_token(is));
        h = std::stoi(detail::pgm_token(is));
        maxval = std::stoi(detail::pgm_token(is));
    } catch (const std::exception&) {
        throw IoError("pgm: malformed header");
    }
    if (w <= 0 || h <= 0) throw IoError("pgm: bad dimensions");
    if (maxval <= 0 || maxval > 255)
        throw IoError("pgm: only single-byte maxval supported");
    ObjectMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int c = is.get();
            if (c == EOF) throw IoError("pgm: truncated pixel data");
            m.set(x, y, c != 0);
        }
    return m;
}

inline void save_pgm(const std::string& path, const ObjectMask& m) {
    auto os = open_output(path);
    write_pgm(os, m);
    if (!os) throw IoError("pgm: write failed for " + path);
}

inline ObjectMask load_pgm(const std::string& path) {
    auto is = open_input(path);
    return read_pgm(is);
}

}  // namespace raypatch::io
