#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "wgf/grid.hpp"

// Binary field snapshots and a small csv writer.
//
// Snapshot layout (all little endian):
//   bytes 0..3   magic "WGF1"
//   u32 nx, u32 ny
//   f64 x0, x1, y0, y1, time
//   f64 interior values, row major, y outer: u(1,1), u(2,1), ..., u(nx,ny)
// Boundary and ghost values are not stored; they are reproducible from the
// boundary data of the scenario that wrote the file.

namespace wgf {

namespace detail {

inline void put_u32(std::string& s, uint32_t v) {
    for (int k = 0; k < 4; ++k) s.push_back(char((v >> (8 * k)) & 0xff));
}

inline void put_f64(std::string& s, double x) {
    uint64_t v;
    std::memcpy(&v, &x, 8);
    for (int k = 0; k < 8; ++k) s.push_back(char((v >> (8 * k)) & 0xff));
}

struct ByteReader {
    const unsigned char* p;
    size_t n, pos = 0;
    bool take(void* dst, size_t k) {
        if (pos + k > n) return false;
        std::memcpy(dst, p + pos, k);
        pos += k;
        return true;
    }
    bool u32(uint32_t& v) {
        unsigned char b[4];
        if (!take(b, 4)) return false;
        v = uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
        return true;
    }
    bool f64(double& x) {
        unsigned char b[8];
        if (!take(b, 8)) return false;
        uint64_t v = 0;
        for (int k = 7; k >= 0; --k) v = (v << 8) | b[k];
        std::memcpy(&x, &v, 8);
        return true;
    }
};

} // namespace detail

inline void save_field(const std::string& path, const ScalarField& u) {
    const GridDomain& d = u.dom;
    std::string buf;
    buf.reserve(48 + size_t(d.nx) * d.ny * 8);
    buf += "WGF1";
    detail::put_u32(buf, uint32_t(d.nx));
    detail::put_u32(buf, uint32_t(d.ny));
    detail::put_f64(buf, d.x0);
    detail::put_f64(buf, d.x1);
    detail::put_f64(buf, d.y0);
    detail::put_f64(buf, d.y1);
    detail::put_f64(buf, u.time);
    for (int j = 1; j <= d.ny; ++j)
        for (int i = 1; i <= d.nx; ++i)
            detail::put_f64(buf, u.at(i, j));
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("save_field: cannot open " + path);
    f.write(buf.data(), std::streamsize(buf.size()));
    if (!f) throw IoError("save_field: short write to " + path);
}

// Returns a field with interior values and time set; boundary and ghost nodes
// are left unset (NaN) for the caller's apply_clamped_ghosts.
inline ScalarField load_field(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("load_field: cannot open " + path);
    std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(f),
                                     std::istreambuf_iterator<char>()};
    detail::ByteReader r{bytes.data(), bytes.size()};
    char magic[4];
    if (!r.take(magic, 4) || std::memcmp(magic, "WGF1", 4) != 0)
        throw IoError("load_field: " + path + " is not a WGF1 snapshot");
    uint32_t nx, ny;
    double x0, x1, y0, y1, time;
    if (!r.u32(nx) || !r.u32(ny) || !r.f64(x0) || !r.f64(x1) || !r.f64(y0) ||
        !r.f64(y1) || !r.f64(time))
        throw IoError("load_field: truncated header in " + path);
    if (nx > 100000 || ny > 100000)
        throw IoError("load_field: implausible grid size in " + path);
    GridDomain d;
    try {
        d = make_grid(x0, x1, y0, y1, int(nx), int(ny));
    } catch (const ConfigError& e) {
        throw IoError("load_field: bad header in " + path + ": " + e.what());
    }
    ScalarField u = ScalarField::undefined(d);
    u.time = time;
    for (int j = 1; j <= int(ny); ++j)
        for (int i = 1; i <= int(nx); ++i)
            if (!r.f64(u.at(i, j)))
                throw IoError("load_field: truncated payload in " + path);
    if (r.pos != r.n) throw IoError("load_field: trailing bytes in " + path);
    return u;
}

// ---------------------------------------------------------------------------

inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv(const std::string& path, const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("write_csv: cannot open " + path);
    f << header << "\n";
    for (const auto& row : rows) {
        for (size_t k = 0; k < row.size(); ++k) {
            if (k) f << ",";
            f << format_g17(row[k]);
        }
        f << "\n";
    }
    if (!f) throw IoError("write_csv: short write to " + path);
}

} // namespace wgf
