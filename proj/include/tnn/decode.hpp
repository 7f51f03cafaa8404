#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tnn/types.hpp"

namespace tnn {

struct VoterParams {
  int32_t cid_lines = 0;  // q of the column the bank is attached to
  int32_t classes = 0;    // r
  int32_t tau_eff = 1;
  int32_t inc_raw = 0;  // (1 - theta_v) in raw units, applied on correct class
  int32_t dec_raw = 0;  // theta_v in raw units, applied on other classes
  WeightFormat weights{};
};

// A bank of q x r x tau_eff saturating vote counters for one column.
// Counters start at w_max/2; a counter votes when >= w_max/2.
class VoterBank {
 public:
  explicit VoterBank(const VoterParams& params);

  // votes gets r lines; class j fires (at 0) iff some active CID line's
  // counter for j is at or above the vote threshold.
  void infer(std::span<const SpikeTime> z_clamped, Volley& votes) const;

  // Adds this bank's votes into per-class counts.
  void accumulate_votes(std::span<const SpikeTime> z_clamped,
                        std::span<int64_t> counts) const;

  // Supervised counter update for every CID line that fired; silent lines
  // are untouched. label must be in [0, classes).
  void update(std::span<const SpikeTime> z_clamped, int32_t label);

  const VoterParams& params() const { return params_; }
  std::span<const int32_t> counters() const { return c_; }
  std::span<int32_t> counters_mut() { return c_; }
  int32_t counter(int32_t line, int32_t cls, int32_t t) const {
    return c_[index(line, cls, t)];
  }

 private:
  size_t index(int32_t line, int32_t cls, int32_t t) const {
    return (static_cast<size_t>(line) * params_.classes +
            static_cast<size_t>(cls)) *
               params_.tau_eff +
           static_cast<size_t>(t);
  }
  VoterParams params_;
  std::vector<int32_t> c_;
};

// Clamps finite CID times into [0, tau_eff - 1].
Volley clamp_cid(const Volley& z, int32_t tau_eff);
void clamp_cid_inplace(std::span<SpikeTime> z, int32_t tau_eff);

struct TallyResult {
  std::vector<int64_t> counts;
  int32_t prediction = kNoPrediction;
  bool tie = false;
  std::vector<int32_t> winners;
};

// Majority tally over vote volleys. Lowest class index wins ties (flagged);
// all-zero counts give kNoPrediction.
TallyResult tally(std::span<const Volley> votes, int32_t classes);
TallyResult tally_counts(std::span<const int64_t> counts);

}  // namespace tnn
