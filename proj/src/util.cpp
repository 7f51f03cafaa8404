#include "tnn/util.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <istream>
#include <ostream>

namespace tnn {

namespace {

std::array<uint32_t, 256> make_crc_table() {
  std::array<uint32_t, 256> table{};
  for (uint32_t i = 0; i < 256; ++i) {
    uint32_t c = i;
    for (int k = 0; k < 8; ++k) {
      c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
    }
    table[i] = c;
  }
  return table;
}

}  // namespace

uint32_t crc32(std::span<const uint8_t> data, uint32_t seed) {
  static const std::array<uint32_t, 256> table = make_crc_table();
  uint32_t c = seed ^ 0xffffffffu;
  for (uint8_t b : data) {
    c = table[(c ^ b) & 0xffu] ^ (c >> 8);
  }
  return c ^ 0xffffffffu;
}

void write_u32(std::ostream& os, uint32_t v) {
  std::array<char, 4> b = {static_cast<char>(v & 0xff),
                           static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff),
                           static_cast<char>((v >> 24) & 0xff)};
  os.write(b.data(), b.size());
}

void write_u64(std::ostream& os, uint64_t v) {
  write_u32(os, static_cast<uint32_t>(v & 0xffffffffu));
  write_u32(os, static_cast<uint32_t>(v >> 32));
}

void write_i32(std::ostream& os, int32_t v) {
  write_u32(os, static_cast<uint32_t>(v));
}

uint32_t read_u32(std::istream& is, const char* what) {
  std::array<unsigned char, 4> b{};
  is.read(reinterpret_cast<char*>(b.data()), b.size());
  if (!is) throw DataError(std::string("truncated read: ") + what);
  return uint32_t{b[0]} | (uint32_t{b[1]} << 8) | (uint32_t{b[2]} << 16) |
         (uint32_t{b[3]} << 24);
}

uint64_t read_u64(std::istream& is, const char* what) {
  uint64_t lo = read_u32(is, what);
  uint64_t hi = read_u32(is, what);
  return lo | (hi << 32);
}

int32_t read_i32(std::istream& is, const char* what) {
  return static_cast<int32_t>(read_u32(is, what));
}

void write_bytes(std::ostream& os, std::span<const uint8_t> bytes) {
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
}

void read_bytes(std::istream& is, std::span<uint8_t> out, const char* what) {
  is.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!is) throw DataError(std::string("truncated read: ") + what);
}

std::string format_rational(int64_t num, int64_t den) {
  bool neg = num < 0;
  unsigned long long n = neg ? 0ull - static_cast<unsigned long long>(num)
                             : static_cast<unsigned long long>(num);
  unsigned long long d = static_cast<unsigned long long>(den);
  unsigned long long whole = n / d;
  unsigned long long rem = n % d;
  // Six fractional digits, round half up on the seventh.
  __uint128_t scaled = static_cast<__uint128_t>(rem) * 10000000ull / d;
  unsigned long long frac7 = static_cast<unsigned long long>(scaled);
  unsigned long long frac = frac7 / 10 + (frac7 % 10 >= 5 ? 1 : 0);
  if (frac >= 1000000ull) {
    frac -= 1000000ull;
    whole += 1;
  }
  std::string f = std::to_string(frac);
  f.insert(f.begin(), 6 - f.size(), '0');
  return (neg ? "-" : "") + std::to_string(whole) + "." + f;
}

std::string int128_to_string(__int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  std::string out;
  while (u > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace tnn
