#include "tnn/column.hpp"

#include <algorithm>
#include <cassert>

namespace tnn {

Column::Column(const ColumnParams& params) : params_(params) {
  assert(params_.inputs > 0 && params_.neurons > 0);
  assert(params_.threshold >= 1);
  w_.assign(static_cast<size_t>(params_.inputs) *
                static_cast<size_t>(params_.neurons),
            params_.weights.raw_half());
}

void Column::excite(std::span<const SpikeTime> x_norm, Volley& y) const {
  assert(static_cast<int32_t>(x_norm.size()) == params_.inputs);
  active_times_.clear();
  active_idx_.clear();
  for (size_t i = 0; i < x_norm.size(); ++i) {
    if (x_norm[i].is_finite()) {
      active_times_.push_back(x_norm[i].value());
      active_idx_.push_back(static_cast<int32_t>(i));
    }
  }
  y.assign(static_cast<size_t>(params_.neurons), SpikeTime::inf());
  gather_w_.resize(active_idx_.size());
  for (int32_t j = 0; j < params_.neurons; ++j) {
    const int32_t* wj = w_.data() + static_cast<size_t>(j) * params_.inputs;
    for (size_t k = 0; k < active_idx_.size(); ++k) {
      gather_w_[k] = params_.weights.int_part(wj[active_idx_[k]]);
    }
    y[static_cast<size_t>(j)] =
        fire_time_events(active_times_, gather_w_, params_.threshold,
                         params_.weights.w_max, params_.model, fire_scratch_);
  }
}

void Column::wta(const Volley& y, Volley& z) {
  z.assign(y.size(), SpikeTime::inf());
  size_t best = y.size();
  SpikeTime best_t = SpikeTime::inf();
  for (size_t j = 0; j < y.size(); ++j) {
    if (y[j] < best_t) {
      best_t = y[j];
      best = j;
    }
  }
  if (best < y.size()) z[best] = best_t;
}

void Column::stdp_update(std::span<const SpikeTime> x_norm,
                         std::span<const SpikeTime> gated_out) {
  assert(static_cast<int32_t>(x_norm.size()) == params_.inputs);
  assert(static_cast<int32_t>(gated_out.size()) == params_.neurons);
  const int32_t raw_max = params_.weights.raw_max();
  const int32_t raw_half = params_.weights.raw_half();
  active_idx_.clear();
  for (size_t i = 0; i < x_norm.size(); ++i) {
    if (x_norm[i].is_finite()) active_idx_.push_back(static_cast<int32_t>(i));
  }
  for (int32_t j = 0; j < params_.neurons; ++j) {
    int32_t* wj = w_.data() + static_cast<size_t>(j) * params_.inputs;
    SpikeTime out = gated_out[static_cast<size_t>(j)];
    if (out.is_finite()) {
      for (int32_t i = 0; i < params_.inputs; ++i) {
        int32_t w = wj[i];
        if (x_norm[static_cast<size_t>(i)].is_finite()) {
          if (x_norm[static_cast<size_t>(i)] <= out) {
            int32_t inc = w >= raw_half ? params_.mu_plus_raw
                                        : params_.mu_plus_raw / 2;
            wj[i] = saturating_add(w, inc, raw_max);
          } else {
            int32_t dec = w < raw_half ? params_.mu_minus_raw
                                       : params_.mu_minus_raw / 2;
            wj[i] = saturating_add(w, -dec, raw_max);
          }
        } else {
          int32_t dec = w < raw_half ? params_.mu_minus_raw
                                     : params_.mu_minus_raw / 2;
          wj[i] = saturating_add(w, -dec, raw_max);
        }
      }
    } else {
      // Search mode: silent neurons drift up on active lines only.
      for (int32_t i : active_idx_) {
        wj[i] = saturating_add(wj[i], params_.mu_search_raw, raw_max);
      }
    }
  }
}

int32_t Column::infer_and_learn(std::span<const SpikeTime> x, bool learning,
                                Volley& z, Volley* x_norm_out) {
  x_scratch_.assign(x.begin(), x.end());
  normalize_local_time_inplace(x_scratch_);
  excite(x_scratch_, y_scratch_);
  wta(y_scratch_, z);
  int32_t winner = -1;
  for (size_t j = 0; j < z.size(); ++j) {
    if (z[j].is_finite()) {
      winner = static_cast<int32_t>(j);
      break;
    }
  }
  if (learning) {
    stdp_update(x_scratch_,
                params_.gate == StdpGate::kPostWta ? z : y_scratch_);
  }
  if (x_norm_out) *x_norm_out = x_scratch_;
  return winner;
}

}  // namespace tnn
