#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>

namespace tnn {

// Malformed or unreadable input data (IDX files, checkpoints, snapshots).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration (bad fields, unrepresentable fractions, mismatches).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad command-line usage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

uint32_t crc32(std::span<const uint8_t> data, uint32_t seed = 0);

// Little-endian fixed-width binary IO.
void write_u32(std::ostream& os, uint32_t v);
void write_u64(std::ostream& os, uint64_t v);
void write_i32(std::ostream& os, int32_t v);
uint32_t read_u32(std::istream& is, const char* what);
uint64_t read_u64(std::istream& is, const char* what);
int32_t read_i32(std::istream& is, const char* what);

void write_bytes(std::ostream& os, std::span<const uint8_t> bytes);
void read_bytes(std::istream& is, std::span<uint8_t> out, const char* what);

// Renders num/den as a decimal with 6 fractional digits, round half up.
// den must be positive.
std::string format_rational(int64_t num, int64_t den);

std::string int128_to_string(__int128 v);

}  // namespace tnn
