#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "errors.hpp"
#include "field.hpp"

namespace pks {

// Shortest decimal that parses back to the same double.
inline std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_number(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
    if (b < e && *b == '+') ++b;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) throw ConfigError("not a number: '" + s + "'");
    return v;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw IoError("cannot open " + path + " for writing");
        row_strings(header);
    }
    void row(const std::vector<double>& values) {
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (k) out_ << ',';
            out_ << format_number(values[k]);
        }
        out_ << '\n';
    }
    void row_strings(const std::vector<std::string>& values) {
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (k) out_ << ',';
            out_ << values[k];
        }
        out_ << '\n';
    }
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

namespace detail {

template <class T>
void put_le(std::vector<unsigned char>& buf, T v) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t k = 0; k < sizeof(T) / 2; ++k) std::swap(bytes[k], bytes[sizeof(T) - 1 - k]);
    buf.insert(buf.end(), bytes, bytes + sizeof(T));
}

template <class T>
T get_le(const unsigned char* p) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t k = 0; k < sizeof(T) / 2; ++k) std::swap(bytes[k], bytes[sizeof(T) - 1 - k]);
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

} // namespace detail

struct Snapshot {
    ScalarField field;
    double t = 0.0;
};

constexpr std::uint32_t kSnapshotVersion = 1;

inline std::vector<unsigned char> encode_snapshot(const ScalarField& f, double t) {
    std::vector<unsigned char> buf;
    buf.reserve(36 + 8 * f.size());
    for (char ch : {'P', 'K', 'S', 'F'}) buf.push_back(static_cast<unsigned char>(ch));
    detail::put_le<std::uint32_t>(buf, kSnapshotVersion);
    detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(f.grid.nx));
    detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(f.grid.ny));
    detail::put_le<double>(buf, f.grid.hx());
    detail::put_le<double>(buf, f.grid.hy());
    detail::put_le<double>(buf, t);
    for (double v : f.values) detail::put_le<double>(buf, v);
    return buf;
}

inline Snapshot decode_snapshot(const std::vector<unsigned char>& buf) {
    if (buf.size() < 40 || std::memcmp(buf.data(), "PKSF", 4) != 0) throw IoError("not a PKSF snapshot");
    const unsigned char* p = buf.data() + 4;
    auto version = detail::get_le<std::uint32_t>(p);
    if (version != kSnapshotVersion) throw IoError("unsupported PKSF version " + std::to_string(version));
    auto nx = detail::get_le<std::uint32_t>(p + 4);
    auto ny = detail::get_le<std::uint32_t>(p + 8);
    double hx = detail::get_le<double>(p + 12);
    double hy = detail::get_le<double>(p + 20);
    double t = detail::get_le<double>(p + 28);
    std::size_t n = static_cast<std::size_t>(nx) * ny;
    if (buf.size() != 40 + 8 * n) throw IoError("PKSF payload size mismatch");
    Grid g = ny == 1 ? Grid::line(static_cast<int>(nx), nx * hx)
                     : Grid::rect(static_cast<int>(nx), static_cast<int>(ny), nx * hx, ny * hy);
    Snapshot s{ScalarField(g), t};
    for (std::size_t k = 0; k < n; ++k) s.field[k] = detail::get_le<double>(p + 36 + 8 * k);
    return s;
}

inline void write_snapshot(const std::string& path, const ScalarField& f, double t) {
    auto buf = encode_snapshot(f, t);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("short write to " + path);
}

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_snapshot(buf);
}

} // namespace pks
