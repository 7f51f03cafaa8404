#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tnn/types.hpp"

namespace tnn {

// Ramp-no-leak response: 0 before the spike, then rises 1 per step up to w.
// w is the integer part of the weight; t is time relative to the spike.
constexpr int32_t rnl_response(int32_t w, int64_t t) {
  if (t < 0) return 0;
  if (t < w) return static_cast<int32_t>(t) + 1;
  return w;
}

// Step-no-leak response: 0 before the spike, then w.
constexpr int32_t snl_response(int32_t w, int64_t t) {
  return t < 0 ? 0 : w;
}

constexpr int32_t response(NeuronModel model, int32_t w, int64_t t) {
  return model == NeuronModel::kRif ? rnl_response(w, t) : snl_response(w, t);
}

// Body potential at time t: sum of responses over lines with finite spikes.
int64_t body_potential(std::span<const int32_t> weights_raw,
                       std::span<const SpikeTime> x, int64_t t,
                       const WeightFormat& fmt, NeuronModel model);

// Earliest t with body potential >= threshold, or infinity. threshold >= 1.
// Exact: equals a time-stepped search over the horizon. scratch, if given,
// avoids reallocation across calls.
SpikeTime fire_time(std::span<const int32_t> weights_raw,
                    std::span<const SpikeTime> x, int32_t threshold,
                    const WeightFormat& fmt, NeuronModel model,
                    std::vector<int32_t>* scratch = nullptr);

// Kernel over pre-gathered finite events (parallel arrays of spike time and
// integer weight). Used by fire_time and by the column fast path.
SpikeTime fire_time_events(std::span<const uint32_t> times,
                           std::span<const int32_t> int_weights,
                           int32_t threshold, int32_t w_max, NeuronModel model,
                           std::vector<int32_t>& scratch);

// Shifts all finite times so the earliest becomes 0. All-infinite volleys are
// unchanged. Idempotent and order-preserving.
Volley normalize_local_time(const Volley& x);
void normalize_local_time_inplace(std::span<SpikeTime> x);

// Maps every finite time to 0; infinities stay.
Volley binarize(const Volley& x);

// Saturating add on raw weight counts, clamped to [0, raw_max].
constexpr int32_t saturating_add(int32_t raw, int32_t delta, int32_t raw_max) {
  int64_t v = int64_t{raw} + delta;
  if (v < 0) return 0;
  if (v > raw_max) return raw_max;
  return static_cast<int32_t>(v);
}

}  // namespace tnn
