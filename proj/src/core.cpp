#include "tnn/core.hpp"

#include <algorithm>
#include <cassert>

namespace tnn {

int64_t body_potential(std::span<const int32_t> weights_raw,
                       std::span<const SpikeTime> x, int64_t t,
                       const WeightFormat& fmt, NeuronModel model) {
  assert(weights_raw.size() == x.size());
  int64_t beta = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_inf()) continue;
    beta += response(model, fmt.int_part(weights_raw[i]),
                     t - int64_t{x[i].value()});
  }
  return beta;
}

SpikeTime fire_time_events(std::span<const uint32_t> times,
                           std::span<const int32_t> int_weights,
                           int32_t threshold, int32_t w_max, NeuronModel model,
                           std::vector<int32_t>& scratch) {
  assert(threshold >= 1);
  assert(times.size() == int_weights.size());
  int64_t asymptote = 0;
  uint32_t max_t = 0;
  for (size_t i = 0; i < times.size(); ++i) {
    asymptote += int_weights[i];
    max_t = std::max(max_t, times[i]);
  }
  if (asymptote < threshold) return SpikeTime::inf();

  if (model == NeuronModel::kRif) {
    // Difference array on the ramp slope: each event contributes slope 1 on
    // [t, t+w). The running prefix-sum of prefix-sums is the body potential.
    size_t horizon = size_t{max_t} + static_cast<size_t>(w_max) + 1;
    scratch.assign(horizon + 1, 0);
    for (size_t i = 0; i < times.size(); ++i) {
      int32_t w = int_weights[i];
      if (w <= 0) continue;
      scratch[times[i]] += 1;
      scratch[times[i] + static_cast<size_t>(w)] -= 1;
    }
    int64_t slope = 0;
    int64_t beta = 0;
    for (size_t t = 0; t <= horizon; ++t) {
      slope += scratch[t];
      beta += slope;
      if (beta >= threshold) return SpikeTime(static_cast<uint32_t>(t));
    }
    assert(false && "asymptote >= threshold guarantees a crossing");
    return SpikeTime::inf();
  }

  // Step responses: the potential jumps by w at each event time.
  size_t horizon = size_t{max_t};
  scratch.assign(horizon + 1, 0);
  for (size_t i = 0; i < times.size(); ++i) {
    scratch[times[i]] += int_weights[i];
  }
  int64_t beta = 0;
  for (size_t t = 0; t <= horizon; ++t) {
    beta += scratch[t];
    if (beta >= threshold) return SpikeTime(static_cast<uint32_t>(t));
  }
  assert(false && "asymptote >= threshold guarantees a crossing");
  return SpikeTime::inf();
}

SpikeTime fire_time(std::span<const int32_t> weights_raw,
                    std::span<const SpikeTime> x, int32_t threshold,
                    const WeightFormat& fmt, NeuronModel model,
                    std::vector<int32_t>* scratch) {
  assert(weights_raw.size() == x.size());
  std::vector<uint32_t> times;
  std::vector<int32_t> iw;
  times.reserve(x.size());
  iw.reserve(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i].is_inf()) continue;
    times.push_back(x[i].value());
    iw.push_back(fmt.int_part(weights_raw[i]));
  }
  std::vector<int32_t> local;
  return fire_time_events(times, iw, threshold, fmt.w_max, model,
                          scratch ? *scratch : local);
}

void normalize_local_time_inplace(std::span<SpikeTime> x) {
  SpikeTime min = SpikeTime::inf();
  for (SpikeTime t : x) min = std::min(min, t);
  if (min.is_inf() || min.value() == 0) return;
  uint32_t shift = min.value();
  for (SpikeTime& t : x) {
    if (t.is_finite()) t = SpikeTime(t.value() - shift);
  }
}

Volley normalize_local_time(const Volley& x) {
  Volley out = x;
  normalize_local_time_inplace(out);
  return out;
}

Volley binarize(const Volley& x) {
  Volley out = x;
  for (SpikeTime& t : out) {
    if (t.is_finite()) t = SpikeTime(0);
  }
  return out;
}

}  // namespace tnn
