#pragma once

// Shared binary table format and provenance stamps.
//
// Binary layout (little-endian):
//   char[4] magic | u32 version | u64 dim | u64 rows | u32 len + provenance bytes
//   rows x (u32 len + key bytes, u64 count)
//   u32 matrix count, then each matrix as rows*dim float32, row-major

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "weaknet/common.hpp"

namespace weaknet {

struct Provenance {
    std::string tool = "weaknet";
    std::string version = std::string(kVersion);
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string detail;

    [[nodiscard]] std::string line() const {
        char hash[24];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
        std::string s = "# " + tool + " " + version + " config=" + hash + " seed=" + std::to_string(seed);
        if (!detail.empty()) s += " " + detail;
        return s;
    }
};

struct BinaryTable {
    std::string provenance;
    std::uint64_t dim = 0;
    std::vector<std::string> keys;
    std::vector<std::uint64_t> counts;
    std::vector<std::vector<float>> matrices;
};

namespace detail {

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw Error("truncated binary file");
    return v;
}

inline void put_string(std::ostream& out, std::string_view s) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in) {
    const auto len = get<std::uint32_t>(in);
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (!in) throw Error("truncated binary file");
    return s;
}

}  // namespace detail

inline constexpr std::uint32_t kBinaryVersion = 1;

inline void write_binary_table(std::ostream& out, std::string_view magic, const BinaryTable& t) {
    if (magic.size() != 4) throw Error("binary magic must be 4 bytes");
    out.write(magic.data(), 4);
    detail::put<std::uint32_t>(out, kBinaryVersion);
    detail::put<std::uint64_t>(out, t.dim);
    detail::put<std::uint64_t>(out, t.keys.size());
    detail::put_string(out, t.provenance);
    for (std::size_t i = 0; i < t.keys.size(); ++i) {
        detail::put_string(out, t.keys[i]);
        detail::put<std::uint64_t>(out, i < t.counts.size() ? t.counts[i] : 0);
    }
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(t.matrices.size()));
    for (const auto& m : t.matrices) {
        if (m.size() != t.keys.size() * t.dim) throw Error("binary table matrix has wrong size");
        out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
    }
}

inline BinaryTable read_binary_table(std::istream& in, std::string_view magic) {
    char m[4];
    in.read(m, 4);
    if (!in || std::string_view(m, 4) != magic) {
        throw Error("bad magic: expected " + std::string(magic));
    }
    if (const auto v = detail::get<std::uint32_t>(in); v != kBinaryVersion) {
        throw Error("unsupported binary version " + std::to_string(v));
    }
    BinaryTable t;
    t.dim = detail::get<std::uint64_t>(in);
    const auto rows = detail::get<std::uint64_t>(in);
    t.provenance = detail::get_string(in);
    t.keys.reserve(rows);
    t.counts.reserve(rows);
    for (std::uint64_t i = 0; i < rows; ++i) {
        t.keys.push_back(detail::get_string(in));
        t.counts.push_back(detail::get<std::uint64_t>(in));
    }
    const auto nmat = detail::get<std::uint32_t>(in);
    for (std::uint32_t k = 0; k < nmat; ++k) {
        std::vector<float> mat(rows * t.dim);
        in.read(reinterpret_cast<char*>(mat.data()), static_cast<std::streamsize>(mat.size() * sizeof(float)));
        if (!in) throw Error("truncated binary file");
        t.matrices.push_back(std::move(mat));
    }
    return t;
}

inline std::ofstream open_output(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot write " + path);
    return out;
}

inline std::ifstream open_input(const std::string& path, bool binary = false) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw Error("cannot open " + path);
    return in;
}

// Nine significant digits round-trip any float.
inline std::string format_float(float v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
    return buf;
}

inline std::string format_double(double v, int digits = 17) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace weaknet
