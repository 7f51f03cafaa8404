#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "tnn/checkpoint.hpp"
#include "tnn/network.hpp"
#include "tnn/util.hpp"
#include "test_util.hpp"

using namespace tnn;
using namespace tnn_test;

namespace {

NetworkConfig tiny_config() {
  // A deliberately small two-layer network so structural paths stay cheap.
  NetworkConfig cfg = preset_config("eccvt");
  cfg.preset.clear();
  cfg.layers[0].neurons = 4;
  cfg.layers[1].neurons = 3;
  cfg.layers[1].threshold = 4;
  validate_config(cfg);
  return cfg;
}

std::string state_bytes(const Network& net) {
  std::ostringstream os(std::ios::binary);
  net.save_state(os);
  return os.str();
}

std::vector<EncodedFrame> encoded_frames(uint32_t n) {
  Dataset ds = synthetic_dataset(n);
  std::vector<EncodedFrame> frames(n);
  for (uint32_t i = 0; i < n; ++i) {
    posneg_encode(binarize_image(ds.image(i), 128), frames[i]);
  }
  return frames;
}

}  // namespace

TEST_CASE("synapse counts match the published tables") {
  Network a(preset_config("ecvt"));
  CHECK(a.column_synapses(0) == 64896);
  CHECK(a.voter_synapses_per_bank() == 162240);
  CHECK(a.total_synapses() == 389376);

  Network b(preset_config("eccvt"));
  CHECK(b.column_synapses(0) == 64896);
  CHECK(b.column_synapses(1) == 552960);
  CHECK(b.voter_synapses_per_bank() == 345600);
  CHECK(b.total_synapses() == 1309056);

  Network c(preset_config("ecccvt"));
  CHECK(c.column_synapses(2) == 1239040);
  CHECK(c.voter_synapses_per_bank() == 619520);
  CHECK(c.total_synapses() == 3095936);

  // The counts are grid^2 * q * p with p = 8 or 4 * q_prev, and
  // grid shrinking by 2 per layer from 26.
  CHECK(a.column_synapses(0) == 26ull * 26 * 12 * 8);
  CHECK(b.column_synapses(1) == 24ull * 24 * 20 * (4 * 12));
  CHECK(c.column_synapses(2) == 22ull * 22 * 32 * (4 * 20));
  CHECK(c.voter_synapses_per_bank() == 22ull * 22 * 32 * 10 * 4);
}

TEST_CASE("a fresh network fires everything at zero and ties its tally") {
  Network net(preset_config("ecvt"));
  auto frames = encoded_frames(1);
  StepResult res = net.step(frames[0], 3, false);

  // Uniform weights: every neuron crosses together, index 0 wins at 0.
  auto cids = net.layer_cids(0);
  REQUIRE(cids.size() == 26u * 26 * 12);
  for (size_t c = 0; c < 26u * 26; ++c) {
    CHECK(cids[c * 12] == SpikeTime(0));
    for (size_t j = 1; j < 12; ++j) CHECK(cids[c * 12 + j].is_inf());
  }

  // Uniform counters vote for every class: a full tie across classes.
  CHECK(res.prediction == 0);
  CHECK(res.tie);
  for (int64_t count : res.counts) CHECK(count == res.counts[0]);
  CHECK(res.counts[0] == 2 * 26 * 26);
}

TEST_CASE("inference without learning is pure") {
  Network net(tiny_config());
  auto frames = encoded_frames(3);
  std::string before = state_bytes(net);
  StepResult r1 = net.step(frames[0], 0, false);
  StepResult r2 = net.step(frames[0], 7, false);
  CHECK(state_bytes(net) == before);
  CHECK(r1.prediction == r2.prediction);
  CHECK(r1.counts == r2.counts);
}

TEST_CASE("the prediction is made before the label can influence it") {
  NetworkConfig cfg = tiny_config();
  Network a(cfg);
  auto frames = encoded_frames(20);
  for (uint32_t i = 0; i < 20; ++i) {
    // A twin continuing from the same state but shown a different label
    // must still make the same call on this input.
    Network b(cfg);
    std::istringstream is(state_bytes(a));
    b.load_state(is);
    StepResult ra = a.step(frames[i], static_cast<int32_t>(i % 10), true);
    StepResult rb = b.step(frames[i], static_cast<int32_t>((i + 5) % 10), true);
    CHECK(ra.prediction == rb.prediction);
    CHECK(ra.counts == rb.counts);
  }
}

TEST_CASE("labels train only the voters, never the columns") {
  Network a(tiny_config());
  Network b(tiny_config());
  auto frames = encoded_frames(20);
  for (uint32_t i = 0; i < 20; ++i) {
    a.step(frames[i], static_cast<int32_t>(i % 10), true);
    b.step(frames[i], static_cast<int32_t>((i * 3 + 1) % 10), true);
  }
  for (size_t l = 0; l < a.layer_count(); ++l) {
    for (size_t c = 0; c < a.columns_in(l); ++c) {
      auto wa = a.column(l, c).weights_raw();
      auto wb = b.column(l, c).weights_raw();
      REQUIRE(std::equal(wa.begin(), wa.end(), wb.begin(), wb.end()));
    }
  }
  // The voter counters did diverge.
  bool counters_differ = false;
  for (size_t b_i = 0; b_i < a.bank_count() && !counters_differ; ++b_i) {
    for (size_t c = 0; c < a.columns_in(a.layer_count() - 1); ++c) {
      auto ca = a.bank(b_i, c).counters();
      auto cb = b.bank(b_i, c).counters();
      if (!std::equal(ca.begin(), ca.end(), cb.begin(), cb.end())) {
        counters_differ = true;
        break;
      }
    }
  }
  CHECK(counters_differ);
}

TEST_CASE("silent output columns mean no votes and no counter motion") {
  NetworkConfig cfg = tiny_config();
  Network net(cfg);
  // Zeroing the last layer's weights keeps every output neuron silent.
  size_t last = net.layer_count() - 1;
  for (size_t c = 0; c < net.columns_in(last); ++c) {
    auto w = net.column(last, c).weights_raw_mut();
    std::fill(w.begin(), w.end(), 0);
  }
  std::ostringstream os(std::ios::binary);
  net.save_state(os);
  std::string before = os.str();

  auto frames = encoded_frames(1);
  StepResult res = net.step(frames[0], 4, true);
  CHECK(res.no_prediction);
  CHECK(res.prediction == kNoPrediction);
  for (int64_t c : res.counts) CHECK(c == 0);
  for (uint8_t b : res.bank_no_prediction) CHECK(b == 1);

  // Counters saw only silent lines, so even learning moved nothing there.
  bool counters_same = true;
  for (size_t b_i = 0; b_i < net.bank_count(); ++b_i) {
    for (size_t c = 0; c < net.columns_in(last); ++c) {
      for (int32_t v : net.bank(b_i, c).counters()) {
        if (v != net.config().w_max << (net.config().frac_bits - 1)) {
          counters_same = false;
        }
      }
    }
  }
  CHECK(counters_same);
}

TEST_CASE("worker count cannot change the outcome") {
  auto frames = encoded_frames(30);
  std::vector<std::string> states;
  std::vector<std::vector<int32_t>> predictions;
  for (int32_t workers : {1, 2, 3}) {
    Network net(tiny_config());
    net.set_workers(workers);
    std::vector<int32_t> preds;
    for (uint32_t i = 0; i < 30; ++i) {
      preds.push_back(net.step(frames[i], static_cast<int32_t>(i % 10), true)
                          .prediction);
    }
    states.push_back(state_bytes(net));
    predictions.push_back(preds);
  }
  CHECK(states[0] == states[1]);
  CHECK(states[0] == states[2]);
  CHECK(predictions[0] == predictions[1]);
  CHECK(predictions[0] == predictions[2]);
}

TEST_CASE("state round-trips through save and load") {
  auto frames = encoded_frames(10);
  Network net(tiny_config());
  for (uint32_t i = 0; i < 10; ++i) {
    net.step(frames[i], static_cast<int32_t>(i % 10), true);
  }
  std::string bytes = state_bytes(net);

  Network fresh(tiny_config());
  CHECK(state_bytes(fresh) != bytes);
  std::istringstream is(bytes);
  fresh.load_state(is);
  CHECK(state_bytes(fresh) == bytes);

  // Both networks now continue identically.
  StepResult ra = net.step(frames[0], 1, true);
  StepResult rb = fresh.step(frames[0], 1, true);
  CHECK(ra.prediction == rb.prediction);
  CHECK(state_bytes(net) == state_bytes(fresh));
}

TEST_CASE("load_state rejects a mismatched shape") {
  Network net(tiny_config());
  std::string bytes = state_bytes(net);
  NetworkConfig other = tiny_config();
  other.layers[1].neurons = 5;
  Network wrong(other);
  std::istringstream is(bytes);
  CHECK_THROWS_AS(wrong.load_state(is), DataError);

  std::istringstream cut(bytes.substr(0, bytes.size() / 2));
  Network same(tiny_config());
  CHECK_THROWS_WITH_AS(same.load_state(cut), doctest::Contains("truncated"),
                       DataError);
}

TEST_CASE("checkpoints restore a run bit for bit") {
  auto dir = fresh_dir("ckpt");
  auto frames = encoded_frames(12);
  NetworkConfig cfg = tiny_config();

  Network net(cfg);
  IntervalTracker tracker(5);
  for (uint32_t i = 0; i < 12; ++i) {
    StepResult r = net.step(frames[i], static_cast<int32_t>(i % 10), true);
    tracker.record(r.error_against(static_cast<int32_t>(i % 10)), r.tie,
                   r.no_prediction);
  }
  std::string path = (dir / "state.bin").string();
  save_checkpoint(path, net, 12, tracker);

  Network back(cfg);
  IntervalTracker back_tracker(5);
  uint64_t pos = load_checkpoint(path, back, back_tracker);
  CHECK(pos == 12);
  CHECK(state_bytes(back) == state_bytes(net));
  CHECK(back_tracker.inputs_seen() == tracker.inputs_seen());
  CHECK(back_tracker.errors_seen() == tracker.errors_seen());
  CHECK(back_tracker.records().size() == tracker.records().size());
  CHECK(peek_checkpoint_config(path) == serialize_config(cfg));
  std::filesystem::remove_all(dir);
}

TEST_CASE("a corrupted checkpoint is refused") {
  auto dir = fresh_dir("ckpt_bad");
  auto frames = encoded_frames(3);
  NetworkConfig cfg = tiny_config();
  Network net(cfg);
  IntervalTracker tracker(5);
  net.step(frames[0], 1, true);
  std::string path = (dir / "state.bin").string();
  save_checkpoint(path, net, 1, tracker);

  SUBCASE("flipped byte fails the checksum") {
    std::string bytes = read_file(dir / "state.bin");
    bytes[bytes.size() / 2] ^= 0x40;
    std::ofstream f(path, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    Network back(cfg);
    IntervalTracker t2(5);
    CHECK_THROWS_WITH_AS(load_checkpoint(path, back, t2),
                         doctest::Contains("checksum"), DataError);
  }

  SUBCASE("truncation is caught") {
    std::string bytes = read_file(dir / "state.bin");
    std::ofstream f(path, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 7));
    f.close();
    Network back(cfg);
    IntervalTracker t2(5);
    CHECK_THROWS_AS(load_checkpoint(path, back, t2), DataError);
  }

  SUBCASE("a different config is rejected before any state moves") {
    NetworkConfig other = cfg;
    other.layers[0].threshold = 5;
    Network back(other);
    IntervalTracker t2(5);
    CHECK_THROWS_WITH_AS(load_checkpoint(path, back, t2),
                         doctest::Contains("different config"), ConfigError);
  }

  SUBCASE("garbage is not a checkpoint") {
    std::ofstream f(dir / "junk.bin", std::ios::binary);
    f << "not a checkpoint at all";
    f.close();
    Network back(cfg);
    IntervalTracker t2(5);
    CHECK_THROWS_AS(load_checkpoint((dir / "junk.bin").string(), back, t2),
                    DataError);
  }
  std::filesystem::remove_all(dir);
}
