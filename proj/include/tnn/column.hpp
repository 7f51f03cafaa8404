#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tnn/core.hpp"
#include "tnn/types.hpp"

namespace tnn {

struct ColumnParams {
  int32_t inputs = 0;       // p
  int32_t neurons = 0;      // q
  int32_t threshold = 1;    // theta, in integer weight units
  int32_t mu_plus_raw = 0;  // learning increments, raw 2^-f units
  int32_t mu_minus_raw = 0;
  int32_t mu_search_raw = 0;
  WeightFormat weights{};
  NeuronModel model = NeuronModel::kRif;
  StdpGate gate = StdpGate::kPostWta;
};

// A column of excitatory neurons with shared input lines, WTA inhibition,
// and unsupervised STDP. All neurons start at w_max/2.
class Column {
 public:
  explicit Column(const ColumnParams& params);

  // Fires each neuron against a volley already normalized to local time.
  void excite(std::span<const SpikeTime> x_norm, Volley& y) const;

  // 1-WTA: keeps only the earliest spike, lowest index on ties.
  static void wta(const Volley& y, Volley& z);

  // One STDP step. gated_out is z under POST_WTA gating, y under PRE_WTA.
  void stdp_update(std::span<const SpikeTime> x_norm,
                   std::span<const SpikeTime> gated_out);

  // Full application: normalize, excite, WTA, optional learning. Fills z
  // (and x_norm if given) and returns the winning neuron index or -1.
  int32_t infer_and_learn(std::span<const SpikeTime> x, bool learning,
                          Volley& z, Volley* x_norm_out = nullptr);

  const ColumnParams& params() const { return params_; }
  std::span<const int32_t> weights_raw() const { return w_; }
  std::span<int32_t> weights_raw_mut() { return w_; }
  std::span<const int32_t> neuron_weights(int32_t j) const {
    return std::span<const int32_t>(w_).subspan(
        static_cast<size_t>(j) * static_cast<size_t>(params_.inputs),
        static_cast<size_t>(params_.inputs));
  }

 private:
  ColumnParams params_;
  std::vector<int32_t> w_;  // q * p raw weights, neuron-major
  mutable std::vector<int32_t> fire_scratch_;
  mutable std::vector<uint32_t> active_times_;
  mutable std::vector<int32_t> active_idx_;
  mutable std::vector<int32_t> gather_w_;
  mutable Volley x_scratch_;
  mutable Volley y_scratch_;
};

}  // namespace tnn
