#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tnn/config.hpp"
#include "tnn/encode.hpp"
#include "tnn/metrics.hpp"
#include "tnn/network.hpp"

namespace tnn {

struct RunOptions {
  NetworkConfig config;
  StreamSpec stream;
  // Image/label IDX file pairs, concatenated in order.
  std::vector<std::pair<std::string, std::string>> data;
  std::string out_dir;
  uint64_t interval_len = 1000;
  uint64_t checkpoint_every = 0;  // 0: only the final checkpoint
  uint64_t snapshot_window = 0;   // last N inputs recorded for analysis
  bool probes = false;
  int32_t workers = 1;
  std::string resume_from;
  bool verbose = false;
};

struct RunSummary {
  uint64_t inputs = 0;
  std::vector<IntervalRecord> records;
};

// One prequential run. Writes intervals.csv, config.json, manifest.json,
// checkpoint_final.bin (plus periodic checkpoints), and snapshot.bin when a
// snapshot window is set.
RunSummary run(const RunOptions& opt);

// Runs the rif and if neuron models side by side under rif/ and if/, plus a
// combined comparison.csv.
void ablate_neuron(const RunOptions& opt);

// One simulation of a two-bank config, tallied three ways (combined,
// hi_only, lo_only). Voter updates never depend on votes, so each variant's
// intervals are identical to a dedicated run's.
void ablate_voters(const RunOptions& opt);

// Post-run analysis: reads <dir>/snapshot.bin, writes cconv.csv and, when
// probe snapshots are present, rbf.csv.
void analyze(const std::string& out_dir);

void write_intervals_csv(const std::string& path,
                         const std::vector<IntervalRecord>& records);
uint32_t file_crc32(const std::string& path);

}  // namespace tnn
