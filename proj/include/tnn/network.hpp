#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "tnn/column.hpp"
#include "tnn/config.hpp"
#include "tnn/decode.hpp"
#include "tnn/encode.hpp"
#include "tnn/types.hpp"

namespace tnn {

// Receives every column application of a step, after WTA and before
// learning. x_norm is the input as the neurons saw it. May be called from
// worker threads, but never concurrently for the same column.
class ColumnObserver {
 public:
  virtual ~ColumnObserver() = default;
  virtual void on_column(uint32_t layer, uint32_t column,
                         std::span<const SpikeTime> x_norm,
                         std::span<const SpikeTime> z, int32_t winner) = 0;
};

struct StepResult {
  int32_t prediction = kNoPrediction;
  bool tie = false;
  bool no_prediction = false;
  std::vector<int64_t> counts;  // per class, all banks combined

  // Per-bank views, used by the voter ablation. Index matches
  // config.voter_thresholds.
  std::vector<int32_t> bank_prediction;
  std::vector<uint8_t> bank_tie;
  std::vector<uint8_t> bank_no_prediction;

  bool error_against(int32_t label) const { return prediction != label; }
};

// The full column hierarchy plus voter banks. Layer l has grid (26-2l)^2
// columns; column (i,j) of layer l+1 reads the concatenated CIDs of layer-l
// columns (i,j), (i,j+2), (i+2,j), (i+2,j+2).
class Network {
 public:
  explicit Network(const NetworkConfig& cfg);

  // One prequential step: forward pass, prediction, then learning (columns
  // unsupervised, voters supervised). label is ignored when learning is off.
  StepResult step(const EncodedFrame& frame, int32_t label, bool learning,
                  ColumnObserver* obs = nullptr);

  const NetworkConfig& config() const { return cfg_; }
  void set_workers(int32_t n);
  int32_t workers() const { return workers_; }

  size_t layer_count() const { return layers_.size(); }
  size_t columns_in(size_t layer) const { return layers_[layer].cols.size(); }
  int32_t grid(size_t layer) const { return layers_[layer].grid; }
  Column& column(size_t layer, size_t idx) { return layers_[layer].cols[idx]; }
  const Column& column(size_t layer, size_t idx) const {
    return layers_[layer].cols[idx];
  }
  std::span<const SpikeTime> layer_cids(size_t layer) const {
    return layers_[layer].cids;
  }
  size_t bank_count() const { return banks_.size(); }
  VoterBank& bank(size_t b, size_t col) { return banks_[b][col]; }
  const VoterBank& bank(size_t b, size_t col) const { return banks_[b][col]; }

  uint64_t column_synapses(size_t layer) const;
  uint64_t voter_synapses_per_bank() const;
  uint64_t total_synapses() const;

  // State serialization (weights, counters); used by checkpoints.
  void save_state(std::ostream& os) const;
  void load_state(std::istream& is);

 private:
  struct Layer {
    int32_t grid = 0;
    int32_t q = 0;
    std::vector<Column> cols;
    std::vector<SpikeTime> cids;  // cols * q, updated every step
  };

  void forward_layer(size_t l, const EncodedFrame& frame, bool learning,
                     ColumnObserver* obs);

  NetworkConfig cfg_;
  std::vector<Layer> layers_;
  std::vector<std::vector<VoterBank>> banks_;  // [bank][column]
  int32_t workers_ = 1;
  std::vector<Volley> z_scratch_;       // per worker
  std::vector<Volley> x_scratch_;       // per worker
  std::vector<Volley> x_norm_scratch_;  // per worker
};

}  // namespace tnn
