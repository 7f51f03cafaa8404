#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tnn/types.hpp"

namespace tnn {

// Exact rational with reduction; denominators stay positive.
struct Rational {
  __int128 num = 0;
  __int128 den = 1;

  static Rational make(__int128 n, __int128 d);
  Rational plus(const Rational& o) const;
  Rational minus(const Rational& o) const;
  Rational abs() const;
  Rational over(__int128 k) const;  // division by a positive integer
  bool less(const Rational& o) const;
  bool leq(const Rational& o) const;
  bool eq(const Rational& o) const;
  std::string to_decimal6() const;  // 6 fractional digits, round half up
  std::string num_string() const;
  std::string den_string() const;
};

// Sum of absolute differences between two time vectors (both already
// mapped to finite values).
int64_t sad(std::span<const uint8_t> a, std::span<const uint8_t> b);
Rational sad(std::span<const Rational> a, std::span<const Rational> b);

// sad between an integer pattern and a centroid given as per-line sums over
// `count` members, scaled by count: returns count * sad(pattern, sums/count).
int64_t sad_scaled(std::span<const uint8_t> pattern,
                   std::span<const int64_t> sums, int64_t count);

struct IntervalRecord {
  uint64_t interval_end = 0;  // cumulative inputs at the end of the interval
  uint64_t inputs = 0;        // inputs inside the interval
  uint64_t errors = 0;
  uint64_t ties = 0;
  uint64_t no_predictions = 0;
  uint64_t cum_errors = 0;
  uint64_t cum_inputs = 0;
};

// Prequential error bookkeeping: one record per closed interval.
class IntervalTracker {
 public:
  explicit IntervalTracker(uint64_t interval_len);

  void record(bool error, bool tie, bool no_prediction);
  void flush();  // closes a trailing partial interval, if any

  const std::vector<IntervalRecord>& records() const { return records_; }
  uint64_t inputs_seen() const { return cum_inputs_; }
  uint64_t errors_seen() const { return cum_errors_; }
  uint64_t interval_len() const { return interval_len_; }

  void save(std::ostream& os) const;
  void load(std::istream& is);

 private:
  uint64_t interval_len_;
  uint64_t cum_inputs_ = 0;
  uint64_t cum_errors_ = 0;
  uint64_t cur_inputs_ = 0;
  uint64_t cur_errors_ = 0;
  uint64_t cur_ties_ = 0;
  uint64_t cur_no_predictions_ = 0;
  std::vector<IntervalRecord> records_;
};

// Per-column window observations: every input the column saw, and for each
// fired input the normalized pattern (no-spike lines mapped to tau_max) plus
// the winning neuron and its spike time.
class ClusterSnapshot {
 public:
  ClusterSnapshot(uint32_t pattern_len, uint32_t clusters);

  void observe(std::span<const SpikeTime> x_norm, int32_t winner,
               SpikeTime out_time, uint32_t inf_value);

  uint32_t pattern_len() const { return pattern_len_; }
  uint32_t clusters() const { return clusters_; }
  uint64_t total_inputs() const { return total_inputs_; }
  uint64_t members(uint32_t k) const;
  std::span<const uint8_t> pattern(uint32_t k, uint64_t m) const;
  uint8_t out_time(uint32_t k, uint64_t m) const;

  void save(std::ostream& os) const;
  static ClusterSnapshot load(std::istream& is);

 private:
  uint32_t pattern_len_;
  uint32_t clusters_;
  uint64_t total_inputs_ = 0;
  std::vector<std::vector<uint8_t>> data_;  // per cluster, stride pattern_len_+1
};

struct ColumnConvergence {
  uint64_t members = 0;  // patterns captured by any cluster
  uint64_t matches = 0;  // patterns whose own centroid attains the min sad
};

// For every member pattern, finds the sad-nearest centroid among the
// column's non-empty clusters (exact arithmetic); a pattern converges when
// its own cluster's centroid attains that minimum.
ColumnConvergence centroid_convergence(const ClusterSnapshot& snap);

struct RbfBucket {
  uint32_t spike_time = 0;
  uint64_t members = 0;
  Rational mean_sad;   // mean sad to the member's own centroid
  Rational coverage;   // members / total window inputs
};

// Buckets a snapshot's members by output spike time, ascending. Buckets with
// no members are omitted.
std::vector<RbfBucket> rbf_profile(const ClusterSnapshot& snap);

}  // namespace tnn
