#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace qap::detail {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

inline std::ofstream open_out(const std::string& path, const char magic[4])
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(magic, 4);
    return f;
}

inline std::ifstream open_in(const std::string& path, const char magic[4])
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    char m[4];
    f.read(m, 4);
    if (!f || std::memcmp(m, magic, 4) != 0) throw std::runtime_error(path + ": bad magic");
    return f;
}

inline void put_u64(std::ostream& f, std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); }

inline std::uint64_t get_u64(std::istream& f)
{
    std::uint64_t v = 0;
    f.read(reinterpret_cast<char*>(&v), 8);
    if (!f) throw std::runtime_error("truncated file");
    return v;
}

inline void put_f64(std::ostream& f, const double* p, std::size_t n)
{
    f.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(8 * n));
}

inline void get_f64(std::istream& f, double* p, std::size_t n)
{
    f.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(8 * n));
    if (!f) throw std::runtime_error("truncated file");
}

}  // namespace qap::detail
