#include "tnn/decode.hpp"

#include <algorithm>
#include <cassert>

#include "tnn/core.hpp"
#include "tnn/util.hpp"

namespace tnn {

VoterBank::VoterBank(const VoterParams& params) : params_(params) {
  assert(params_.cid_lines > 0 && params_.classes > 0 && params_.tau_eff > 0);
  c_.assign(static_cast<size_t>(params_.cid_lines) * params_.classes *
                params_.tau_eff,
            params_.weights.raw_half());
}

void VoterBank::infer(std::span<const SpikeTime> z_clamped,
                      Volley& votes) const {
  assert(static_cast<int32_t>(z_clamped.size()) == params_.cid_lines);
  votes.assign(static_cast<size_t>(params_.classes), SpikeTime::inf());
  const int32_t vote_at = params_.weights.raw_half();
  for (int32_t i = 0; i < params_.cid_lines; ++i) {
    SpikeTime t = z_clamped[static_cast<size_t>(i)];
    if (t.is_inf()) continue;
    int32_t k = static_cast<int32_t>(t.value());
    assert(k < params_.tau_eff);
    for (int32_t j = 0; j < params_.classes; ++j) {
      if (c_[index(i, j, k)] >= vote_at) {
        votes[static_cast<size_t>(j)] = SpikeTime(0);
      }
    }
  }
}

void VoterBank::accumulate_votes(std::span<const SpikeTime> z_clamped,
                                 std::span<int64_t> counts) const {
  assert(static_cast<int32_t>(counts.size()) == params_.classes);
  const int32_t vote_at = params_.weights.raw_half();
  for (int32_t i = 0; i < params_.cid_lines; ++i) {
    SpikeTime t = z_clamped[static_cast<size_t>(i)];
    if (t.is_inf()) continue;
    int32_t k = static_cast<int32_t>(t.value());
    for (int32_t j = 0; j < params_.classes; ++j) {
      if (c_[index(i, j, k)] >= vote_at) counts[static_cast<size_t>(j)] += 1;
    }
  }
}

void VoterBank::update(std::span<const SpikeTime> z_clamped, int32_t label) {
  if (label < 0 || label >= params_.classes) {
    throw DataError("voter update: label " + std::to_string(label) +
                    " outside [0, " + std::to_string(params_.classes) + ")");
  }
  const int32_t raw_max = params_.weights.raw_max();
  for (int32_t i = 0; i < params_.cid_lines; ++i) {
    SpikeTime t = z_clamped[static_cast<size_t>(i)];
    if (t.is_inf()) continue;
    int32_t k = static_cast<int32_t>(t.value());
    for (int32_t j = 0; j < params_.classes; ++j) {
      size_t idx = index(i, j, k);
      int32_t delta = j == label ? params_.inc_raw : -params_.dec_raw;
      c_[idx] = saturating_add(c_[idx], delta, raw_max);
    }
  }
}

void clamp_cid_inplace(std::span<SpikeTime> z, int32_t tau_eff) {
  assert(tau_eff >= 1);
  const uint32_t top = static_cast<uint32_t>(tau_eff - 1);
  for (SpikeTime& t : z) {
    if (t.is_finite() && t.value() > top) t = SpikeTime(top);
  }
}

Volley clamp_cid(const Volley& z, int32_t tau_eff) {
  Volley out = z;
  clamp_cid_inplace(out, tau_eff);
  return out;
}

TallyResult tally_counts(std::span<const int64_t> counts) {
  TallyResult r;
  r.counts.assign(counts.begin(), counts.end());
  int64_t best = 0;
  for (int64_t c : counts) best = std::max(best, c);
  if (best == 0) {
    r.prediction = kNoPrediction;
    return r;
  }
  for (size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == best) r.winners.push_back(static_cast<int32_t>(j));
  }
  r.prediction = r.winners.front();
  r.tie = r.winners.size() > 1;
  return r;
}

TallyResult tally(std::span<const Volley> votes, int32_t classes) {
  std::vector<int64_t> counts(static_cast<size_t>(classes), 0);
  for (const Volley& v : votes) {
    assert(static_cast<int32_t>(v.size()) == classes);
    for (size_t j = 0; j < v.size(); ++j) {
      if (v[j].is_finite()) counts[j] += 1;
    }
  }
  return tally_counts(counts);
}

}  // namespace tnn
