#pragma once

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hebbnet::io {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

// Fixed-width little-endian record primitives. Readers throw
// std::runtime_error on truncated or malformed input.
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_i32(std::ostream& out, std::int32_t v);
void write_f64(std::ostream& out, double v);
void write_string(std::ostream& out, const std::string& s);
void write_f64_array(std::ostream& out, const Eigen::Ref<const Eigen::VectorXd>& v);

std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
std::int32_t read_i32(std::istream& in);
double read_f64(std::istream& in);
std::string read_string(std::istream& in);
Eigen::VectorXd read_f64_array(std::istream& in);

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ULL);

// Shortest round-trip decimal rendering (via std::to_chars), used for all
// CSV output so files are byte-stable across runs and worker counts.
std::string format_double(double v);

// One CSV row; fields are joined with commas, no quoting (writers must not
// emit fields containing commas).
std::string csv_row(const std::vector<std::string>& fields);

// Atomically replace `path` with `content` (write temp + rename) so a
// crash mid-write never leaves a torn checkpoint behind.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace hebbnet::io
