#include "hebbnet/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace hebbnet::io {

namespace {

template <typename T>
void write_raw(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
    if (!out) throw std::runtime_error("write failed");
}

template <typename T>
T read_raw(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (in.gcount() != sizeof(T)) throw std::runtime_error("truncated record");
    return v;
}

}  // namespace

void write_u32(std::ostream& out, std::uint32_t v) { write_raw(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { write_raw(out, v); }
void write_i32(std::ostream& out, std::int32_t v) { write_raw(out, v); }
void write_f64(std::ostream& out, double v) { write_raw(out, v); }

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) throw std::runtime_error("write failed");
}

void write_f64_array(std::ostream& out, const Eigen::Ref<const Eigen::VectorXd>& v) {
    write_u64(out, static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) write_f64(out, v[i]);
}

std::uint32_t read_u32(std::istream& in) { return read_raw<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return read_raw<std::uint64_t>(in); }
std::int32_t read_i32(std::istream& in) { return read_raw<std::int32_t>(in); }
double read_f64(std::istream& in) { return read_raw<double>(in); }

std::string read_string(std::istream& in) {
    const std::uint32_t len = read_u32(in);
    if (len > (1u << 20)) throw std::runtime_error("string record implausibly long");
    std::string s(len, '\0');
    in.read(s.data(), len);
    if (in.gcount() != static_cast<std::streamsize>(len)) {
        throw std::runtime_error("truncated string record");
    }
    return s;
}

Eigen::VectorXd read_f64_array(std::istream& in) {
    const std::uint64_t n = read_u64(in);
    if (n > (1ull << 28)) throw std::runtime_error("array record implausibly long");
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = read_f64(in);
    return v;
}

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) throw std::runtime_error("double formatting failed");
    return std::string(buf, res.ptr);
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) row += ',';
        row += fields[i];
    }
    row += '\n';
    return row;
}

void atomic_write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("write to " + tmp + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("atomic rename to " + path + " failed: " + ec.message());
}

}  // namespace hebbnet::io
