#include "tnn/network.hpp"

#include <algorithm>
#include <cassert>
#include <thread>

#include "tnn/util.hpp"

namespace tnn {

Network::Network(const NetworkConfig& cfg) : cfg_(cfg) {
  validate_config(cfg_);
  WeightFormat fmt{cfg_.w_max, cfg_.frac_bits};
  layers_.resize(cfg_.layers.size());
  for (size_t l = 0; l < cfg_.layers.size(); ++l) {
    const LayerConfig& lc = cfg_.layers[l];
    Layer& layer = layers_[l];
    layer.grid = cfg_.grid(l);
    layer.q = lc.neurons;
    ColumnParams cp;
    cp.inputs = l == 0 ? kRfLines : 4 * cfg_.layers[l - 1].neurons;
    cp.neurons = lc.neurons;
    cp.threshold = lc.threshold;
    cp.mu_plus_raw = fraction_to_raw(lc.mu_plus, cfg_.frac_bits, "mu_plus");
    cp.mu_minus_raw = fraction_to_raw(lc.mu_minus, cfg_.frac_bits, "mu_minus");
    cp.mu_search_raw =
        fraction_to_raw(lc.mu_search, cfg_.frac_bits, "mu_search");
    cp.weights = fmt;
    cp.model = cfg_.model;
    cp.gate = cfg_.gate;
    size_t ncols = static_cast<size_t>(layer.grid) * layer.grid;
    layer.cols.reserve(ncols);
    for (size_t c = 0; c < ncols; ++c) layer.cols.emplace_back(cp);
    layer.cids.assign(ncols * static_cast<size_t>(layer.q), SpikeTime::inf());
  }
  const Layer& last = layers_.back();
  VoterParams vp;
  vp.cid_lines = last.q;
  vp.classes = cfg_.classes;
  vp.tau_eff = cfg_.voter_tau_eff;
  vp.weights = fmt;
  for (const Fraction& theta : cfg_.voter_thresholds) {
    int32_t theta_raw = fraction_to_raw(theta, cfg_.frac_bits, "voter threshold");
    vp.inc_raw = fmt.unit() - theta_raw;
    vp.dec_raw = theta_raw;
    banks_.emplace_back();
    banks_.back().reserve(last.cols.size());
    for (size_t c = 0; c < last.cols.size(); ++c) {
      banks_.back().emplace_back(vp);
    }
  }
  set_workers(1);
}

void Network::set_workers(int32_t n) {
  if (n < 1) n = 1;
  workers_ = n;
  z_scratch_.resize(static_cast<size_t>(n));
  x_scratch_.resize(static_cast<size_t>(n));
  x_norm_scratch_.resize(static_cast<size_t>(n));
}

namespace {

// Splits [0, count) into one contiguous chunk per worker. The partition is
// fixed by (count, workers) alone, and chunks touch disjoint columns, so
// results cannot depend on scheduling.
std::vector<std::pair<size_t, size_t>> chunk_ranges(size_t count,
                                                    size_t workers) {
  std::vector<std::pair<size_t, size_t>> ranges;
  size_t base = count / workers;
  size_t extra = count % workers;
  size_t start = 0;
  for (size_t w = 0; w < workers && start < count; ++w) {
    size_t len = base + (w < extra ? 1 : 0);
    if (len == 0) continue;
    ranges.emplace_back(start, start + len);
    start += len;
  }
  return ranges;
}

}  // namespace

void Network::forward_layer(size_t l, const EncodedFrame& frame,
                            bool learning, ColumnObserver* obs) {
  Layer& layer = layers_[l];
  const size_t q = static_cast<size_t>(layer.q);
  const int32_t grid = layer.grid;

  auto run_column = [&](size_t c, size_t worker) {
    Volley& z = z_scratch_[worker];
    Volley& x_norm = x_norm_scratch_[worker];
    std::span<const SpikeTime> input;
    if (l == 0) {
      input = frame.window(static_cast<int32_t>(c));
    } else {
      const Layer& prev = layers_[l - 1];
      const size_t pq = static_cast<size_t>(prev.q);
      Volley& x = x_scratch_[worker];
      x.resize(4 * pq);
      int32_t i = static_cast<int32_t>(c) / grid;
      int32_t j = static_cast<int32_t>(c) % grid;
      const int32_t src[4][2] = {{i, j}, {i, j + 2}, {i + 2, j}, {i + 2, j + 2}};
      for (int32_t s = 0; s < 4; ++s) {
        size_t sc = static_cast<size_t>(src[s][0]) * prev.grid + src[s][1];
        const SpikeTime* from = prev.cids.data() + sc * pq;
        std::copy(from, from + pq, x.begin() + static_cast<size_t>(s) * pq);
      }
      input = x;
    }
    int32_t winner =
        layer.cols[c].infer_and_learn(input, learning, z, obs ? &x_norm : nullptr);
    std::copy(z.begin(), z.end(), layer.cids.begin() + c * q);
    if (obs) {
      obs->on_column(static_cast<uint32_t>(l), static_cast<uint32_t>(c),
                     x_norm, z, winner);
    }
  };

  size_t count = layer.cols.size();
  if (workers_ <= 1) {
    for (size_t c = 0; c < count; ++c) run_column(c, 0);
    return;
  }
  auto ranges = chunk_ranges(count, static_cast<size_t>(workers_));
  std::vector<std::thread> threads;
  threads.reserve(ranges.size());
  for (size_t w = 0; w < ranges.size(); ++w) {
    threads.emplace_back([&, w] {
      for (size_t c = ranges[w].first; c < ranges[w].second; ++c) {
        run_column(c, w);
      }
    });
  }
  for (std::thread& t : threads) t.join();
}

StepResult Network::step(const EncodedFrame& frame, int32_t label,
                         bool learning, ColumnObserver* obs) {
  for (size_t l = 0; l < layers_.size(); ++l) {
    forward_layer(l, frame, learning, obs);
  }

  // Decode: clamp last-layer CIDs, collect votes, tally, then train voters.
  Layer& last = layers_.back();
  const size_t q = static_cast<size_t>(last.q);
  const size_t ncols = last.cols.size();
  const size_t nbanks = banks_.size();

  StepResult res;
  res.counts.assign(static_cast<size_t>(cfg_.classes), 0);
  std::vector<std::vector<int64_t>> bank_counts(
      nbanks, std::vector<int64_t>(static_cast<size_t>(cfg_.classes), 0));

  Volley clamped;
  for (size_t c = 0; c < ncols; ++c) {
    clamped.assign(last.cids.begin() + c * q, last.cids.begin() + (c + 1) * q);
    clamp_cid_inplace(clamped, cfg_.voter_tau_eff);
    for (size_t b = 0; b < nbanks; ++b) {
      banks_[b][c].accumulate_votes(clamped, bank_counts[b]);
    }
    if (learning) {
      for (size_t b = 0; b < nbanks; ++b) {
        banks_[b][c].update(clamped, label);
      }
    }
  }

  for (size_t b = 0; b < nbanks; ++b) {
    for (size_t j = 0; j < res.counts.size(); ++j) {
      res.counts[j] += bank_counts[b][j];
    }
    TallyResult bt = tally_counts(bank_counts[b]);
    res.bank_prediction.push_back(bt.prediction);
    res.bank_tie.push_back(bt.tie ? 1 : 0);
    res.bank_no_prediction.push_back(bt.prediction == kNoPrediction ? 1 : 0);
  }
  TallyResult t = tally_counts(res.counts);
  res.prediction = t.prediction;
  res.tie = t.tie;
  res.no_prediction = t.prediction == kNoPrediction;
  return res;
}

uint64_t Network::column_synapses(size_t layer) const {
  const Layer& l = layers_[layer];
  uint64_t p = layer == 0 ? kRfLines
                          : 4ull * static_cast<uint64_t>(layers_[layer - 1].q);
  return static_cast<uint64_t>(l.cols.size()) * static_cast<uint64_t>(l.q) * p;
}

uint64_t Network::voter_synapses_per_bank() const {
  const Layer& last = layers_.back();
  return static_cast<uint64_t>(last.cols.size()) *
         static_cast<uint64_t>(last.q) *
         static_cast<uint64_t>(cfg_.classes) *
         static_cast<uint64_t>(cfg_.voter_tau_eff);
}

uint64_t Network::total_synapses() const {
  uint64_t total = 0;
  for (size_t l = 0; l < layers_.size(); ++l) total += column_synapses(l);
  total += voter_synapses_per_bank() * banks_.size();
  return total;
}

void Network::save_state(std::ostream& os) const {
  write_u32(os, static_cast<uint32_t>(layers_.size()));
  for (const Layer& layer : layers_) {
    write_u32(os, static_cast<uint32_t>(layer.cols.size()));
    for (const Column& col : layer.cols) {
      std::span<const int32_t> w = col.weights_raw();
      write_u32(os, static_cast<uint32_t>(w.size()));
      for (int32_t v : w) write_i32(os, v);
    }
  }
  write_u32(os, static_cast<uint32_t>(banks_.size()));
  for (const std::vector<VoterBank>& bank : banks_) {
    write_u32(os, static_cast<uint32_t>(bank.size()));
    for (const VoterBank& vb : bank) {
      std::span<const int32_t> c = vb.counters();
      write_u32(os, static_cast<uint32_t>(c.size()));
      for (int32_t v : c) write_i32(os, v);
    }
  }
}

void Network::load_state(std::istream& is) {
  uint32_t nlayers = read_u32(is, "layer count");
  if (nlayers != layers_.size()) {
    throw DataError("state has " + std::to_string(nlayers) +
                    " layers, network expects " +
                    std::to_string(layers_.size()));
  }
  for (Layer& layer : layers_) {
    uint32_t ncols = read_u32(is, "column count");
    if (ncols != layer.cols.size()) {
      throw DataError("state layer has " + std::to_string(ncols) +
                      " columns, network expects " +
                      std::to_string(layer.cols.size()));
    }
    for (Column& col : layer.cols) {
      uint32_t n = read_u32(is, "weight count");
      std::span<int32_t> w = col.weights_raw_mut();
      if (n != w.size()) {
        throw DataError("state column has " + std::to_string(n) +
                        " weights, network expects " +
                        std::to_string(w.size()));
      }
      for (int32_t& v : w) v = read_i32(is, "weight");
    }
  }
  uint32_t nbanks = read_u32(is, "bank count");
  if (nbanks != banks_.size()) {
    throw DataError("state has " + std::to_string(nbanks) +
                    " voter banks, network expects " +
                    std::to_string(banks_.size()));
  }
  for (std::vector<VoterBank>& bank : banks_) {
    uint32_t ncols = read_u32(is, "bank column count");
    if (ncols != bank.size()) {
      throw DataError("state bank has " + std::to_string(ncols) +
                      " columns, network expects " +
                      std::to_string(bank.size()));
    }
    for (VoterBank& vb : bank) {
      uint32_t n = read_u32(is, "counter count");
      std::span<int32_t> c = vb.counters_mut();
      if (n != c.size()) {
        throw DataError("state bank column has " + std::to_string(n) +
                        " counters, network expects " +
                        std::to_string(c.size()));
      }
      for (int32_t& v : c) v = read_i32(is, "counter");
    }
  }
}

}  // namespace tnn
