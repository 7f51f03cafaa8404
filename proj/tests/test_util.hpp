#pragma once

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "tnn/core.hpp"
#include "tnn/encode.hpp"
#include "tnn/types.hpp"

namespace tnn_test {

inline std::filesystem::path fresh_dir(const std::string& name) {
  std::filesystem::path p = std::filesystem::temp_directory_path() /
                            ("tnn_test_" + name + "_" +
                             std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline void write_be32(std::ofstream& f, uint32_t v) {
  char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
               static_cast<char>(v >> 8), static_cast<char>(v)};
  f.write(b, 4);
}

// Writes an IDX image/label pair. Image i is deterministic from its label:
// a vertical bar whose position tracks the label, so streams stay learnable.
inline void write_idx_pair(const std::filesystem::path& images,
                           const std::filesystem::path& labels, uint32_t n,
                           uint32_t label_classes = 10) {
  std::ofstream imf(images, std::ios::binary);
  write_be32(imf, 0x00000803);
  write_be32(imf, n);
  write_be32(imf, 28);
  write_be32(imf, 28);
  std::vector<uint8_t> px(784);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t label = i % label_classes;
    std::fill(px.begin(), px.end(), 0);
    uint32_t bar = 3 + label * 2;
    for (uint32_t r = 4; r < 24; ++r) {
      px[r * 28 + bar] = 255;
      px[r * 28 + bar + 1] = 255;
    }
    // A second stroke keyed to the label keeps classes distinct after
    // transposition as well.
    for (uint32_t c = 4; c < 24; ++c) {
      px[(3 + label * 2) * 28 + c] = label % 2 ? 200 : 0;
    }
    imf.write(reinterpret_cast<const char*>(px.data()),
              static_cast<std::streamsize>(px.size()));
  }
  imf.close();

  std::ofstream lbf(labels, std::ios::binary);
  write_be32(lbf, 0x00000801);
  write_be32(lbf, n);
  for (uint32_t i = 0; i < n; ++i) {
    char l = static_cast<char>(i % label_classes);
    lbf.write(&l, 1);
  }
  lbf.close();
}

// In-memory equivalent of write_idx_pair for stream tests.
inline tnn::Dataset synthetic_dataset(uint32_t n, uint32_t label_classes = 10) {
  tnn::Dataset ds;
  ds.pixels.resize(size_t{n} * 784);
  ds.labels.resize(n);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t label = i % label_classes;
    ds.labels[i] = static_cast<uint8_t>(label);
    uint8_t* px = ds.pixels.data() + size_t{i} * 784;
    uint32_t bar = 3 + label * 2;
    for (uint32_t r = 4; r < 24; ++r) {
      px[r * 28 + bar] = 255;
      px[r * 28 + bar + 1] = 255;
    }
    for (uint32_t c = 4; c < 24; ++c) {
      px[(3 + label * 2) * 28 + c] = label % 2 ? 200 : 0;
    }
  }
  return ds;
}

// Definitional fire time: scan t upward, summing responses directly.
inline tnn::SpikeTime naive_fire_time(std::span<const int32_t> weights_raw,
                                      std::span<const tnn::SpikeTime> x,
                                      int32_t threshold,
                                      const tnn::WeightFormat& fmt,
                                      tnn::NeuronModel model) {
  int64_t max_x = -1;
  for (tnn::SpikeTime t : x) {
    if (t.is_finite()) max_x = std::max(max_x, int64_t{t.value()});
  }
  if (max_x < 0) return tnn::SpikeTime::inf();
  int64_t horizon = max_x + fmt.w_max + 2;
  for (int64_t t = 0; t <= horizon; ++t) {
    if (tnn::body_potential(weights_raw, x, t, fmt, model) >= threshold) {
      return tnn::SpikeTime(static_cast<uint32_t>(t));
    }
  }
  return tnn::SpikeTime::inf();
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace tnn_test
