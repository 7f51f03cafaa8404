#include "tnn/checkpoint.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "tnn/util.hpp"

namespace tnn {

namespace {

constexpr char kMagic[8] = {'T', 'N', 'N', 'C', 'K', 'P', 'T', '\0'};
constexpr uint32_t kVersion = 1;

std::string read_file_checked(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  std::string body = ss.str();
  if (body.size() < sizeof kMagic + 8) {
    throw DataError("checkpoint " + path + " is too short (" +
                    std::to_string(body.size()) + " bytes)");
  }
  if (!std::equal(kMagic, kMagic + sizeof kMagic, body.begin())) {
    throw DataError("checkpoint " + path + " has a bad magic header");
  }
  uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) {
    stored |= uint32_t{static_cast<uint8_t>(body[body.size() - 4 + i])} << (8 * i);
  }
  uint32_t actual = crc32(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(body.data()), body.size() - 4));
  if (stored != actual) {
    throw DataError("checkpoint " + path + " failed its checksum");
  }
  return body.substr(0, body.size() - 4);
}

std::string read_config_echo(std::istream& is, const std::string& path) {
  char magic[sizeof kMagic];
  is.read(magic, sizeof magic);
  uint32_t version = read_u32(is, "checkpoint version");
  if (version != kVersion) {
    throw DataError("checkpoint " + path + " has version " +
                    std::to_string(version) + ", expected " +
                    std::to_string(kVersion));
  }
  uint32_t len = read_u32(is, "config length");
  std::string cfg(len, '\0');
  is.read(cfg.data(), len);
  if (!is) throw DataError("checkpoint " + path + " truncated in config echo");
  return cfg;
}

}  // namespace

void save_checkpoint(const std::string& path, const Network& net,
                     uint64_t stream_position,
                     const IntervalTracker& tracker) {
  std::ostringstream os(std::ios::binary);
  os.write(kMagic, sizeof kMagic);
  write_u32(os, kVersion);
  std::string cfg = serialize_config(net.config());
  write_u32(os, static_cast<uint32_t>(cfg.size()));
  os.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
  write_u64(os, stream_position);
  tracker.save(os);
  net.save_state(os);
  std::string body = os.str();
  uint32_t crc = crc32(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(body.data()), body.size()));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write checkpoint " + path);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  write_u32(f, crc);
  f.flush();
  if (!f) throw DataError("failed writing checkpoint " + path);
}

uint64_t load_checkpoint(const std::string& path, Network& net,
                         IntervalTracker& tracker) {
  std::string body = read_file_checked(path);
  std::istringstream is(body, std::ios::binary);
  std::string cfg = read_config_echo(is, path);
  std::string expected = serialize_config(net.config());
  if (cfg != expected) {
    throw ConfigError("checkpoint " + path +
                      " was written with a different config");
  }
  uint64_t pos = read_u64(is, "stream position");
  tracker.load(is);
  net.load_state(is);
  return pos;
}

std::string peek_checkpoint_config(const std::string& path) {
  std::string body = read_file_checked(path);
  std::istringstream is(body, std::ios::binary);
  return read_config_echo(is, path);
}

}  // namespace tnn
