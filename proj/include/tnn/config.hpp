#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tnn/types.hpp"

namespace tnn {

struct LayerConfig {
  int32_t neurons = 0;
  int32_t threshold = 1;
  Fraction mu_plus{};
  Fraction mu_minus{};
  Fraction mu_search{};
};

struct ProbeWindow {
  int32_t top = 0;
  int32_t left = 0;
};

struct ProbeConfig {
  int32_t side = 5;
  int32_t neurons = 12;
  int32_t threshold = 24;
  std::vector<ProbeWindow> windows = {{3, 9}, {9, 9}, {15, 9}};
};

struct NetworkConfig {
  int32_t tau_max = 8;
  int32_t w_max = 8;
  uint32_t frac_bits = 10;
  NeuronModel model = NeuronModel::kRif;
  StdpGate gate = StdpGate::kPostWta;
  int32_t binarize_threshold = 128;
  int32_t classes = 10;
  std::vector<LayerConfig> layers;
  std::vector<Fraction> voter_thresholds;  // one bank per entry
  int32_t voter_tau_eff = 1;
  ProbeConfig probes{};
  std::string preset;  // originating preset name; empty for custom configs

  int32_t grid(size_t layer) const {
    return kRfGridBase - 2 * static_cast<int32_t>(layer);
  }
  static constexpr int32_t kRfGridBase = 26;
};

// Parses "a/b" or a bare integer. den must be positive.
Fraction parse_fraction(const std::string& text);
std::string fraction_to_string(const Fraction& f);

// Exact raw fixed-point value of f; throws ConfigError naming `field` when
// f is not a multiple of 2^-frac_bits.
int32_t fraction_to_raw(const Fraction& f, uint32_t frac_bits,
                        const std::string& field);

NetworkConfig preset_config(const std::string& name);  // ecvt, eccvt, ecccvt

NetworkConfig parse_config(const std::string& json_text);
NetworkConfig load_config_file(const std::string& path);
std::string serialize_config(const NetworkConfig& cfg);  // canonical form

// Full structural validation; throws ConfigError with the offending field.
void validate_config(const NetworkConfig& cfg);

}  // namespace tnn
