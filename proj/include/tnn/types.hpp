#pragma once

#include <cassert>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace tnn {

// A spike time on one line within a gamma cycle: a non-negative integer, or
// "no spike" (infinity). Infinity compares greater than every finite time.
class SpikeTime {
 public:
  constexpr SpikeTime() = default;
  constexpr explicit SpikeTime(uint32_t t) : raw_(t) { assert(t != kInfRaw); }

  static constexpr SpikeTime inf() { return SpikeTime(Raw{}, kInfRaw); }

  constexpr bool is_inf() const { return raw_ == kInfRaw; }
  constexpr bool is_finite() const { return raw_ != kInfRaw; }

  constexpr uint32_t value() const {
    assert(is_finite());
    return raw_;
  }

  // Underlying encoding; infinity is UINT32_MAX. Used by serialization.
  constexpr uint32_t raw() const { return raw_; }
  static constexpr SpikeTime from_raw(uint32_t r) { return SpikeTime(Raw{}, r); }

  friend constexpr auto operator<=>(SpikeTime a, SpikeTime b) = default;

 private:
  struct Raw {};
  constexpr SpikeTime(Raw, uint32_t r) : raw_(r) {}
  static constexpr uint32_t kInfRaw = std::numeric_limits<uint32_t>::max();
  uint32_t raw_ = kInfRaw;
};

// A volley: one spike time per line.
using Volley = std::vector<SpikeTime>;

inline std::string to_string(SpikeTime t) {
  return t.is_inf() ? "inf" : std::to_string(t.value());
}

// An exact non-negative rational, used for configuration values.
struct Fraction {
  int64_t num = 0;
  int64_t den = 1;
};

// Fixed-point weight format: weights are stored as int32 raw counts of
// 2^-frac_bits units, saturating at [0, w_max * 2^frac_bits].
struct WeightFormat {
  int32_t w_max = 8;
  uint32_t frac_bits = 10;

  constexpr int32_t unit() const { return int32_t{1} << frac_bits; }
  constexpr int32_t raw_max() const { return w_max * unit(); }
  constexpr int32_t raw_half() const { return raw_max() / 2; }
  // Integer part used by the response functions.
  constexpr int32_t int_part(int32_t raw) const {
    return raw >> frac_bits;
  }

  friend constexpr bool operator==(const WeightFormat&, const WeightFormat&) = default;
};

enum class NeuronModel { kRif, kIf };
enum class StdpGate { kPostWta, kPreWta };

constexpr int32_t kNoPrediction = -1;

}  // namespace tnn
