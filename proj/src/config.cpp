#include "tnn/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tnn/encode.hpp"
#include "tnn/util.hpp"

namespace tnn {

using nlohmann::json;

Fraction parse_fraction(const std::string& text) {
  size_t slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return Fraction{std::stoll(text), 1};
    }
    Fraction f{std::stoll(text.substr(0, slash)),
               std::stoll(text.substr(slash + 1))};
    if (f.den <= 0) throw ConfigError("fraction denominator must be positive: " + text);
    return f;
  } catch (const std::invalid_argument&) {
    throw ConfigError("malformed fraction: " + text);
  } catch (const std::out_of_range&) {
    throw ConfigError("fraction out of range: " + text);
  }
}

std::string fraction_to_string(const Fraction& f) {
  return std::to_string(f.num) + "/" + std::to_string(f.den);
}

int32_t fraction_to_raw(const Fraction& f, uint32_t frac_bits,
                        const std::string& field) {
  if (f.num < 0 || f.den <= 0) {
    throw ConfigError(field + ": must be a non-negative fraction, got " +
                      fraction_to_string(f));
  }
  __int128 scaled = static_cast<__int128>(f.num) << frac_bits;
  if (scaled % f.den != 0) {
    throw ConfigError(field + ": " + fraction_to_string(f) +
                      " is not representable in " + std::to_string(frac_bits) +
                      " fractional bits");
  }
  __int128 raw = scaled / f.den;
  if (raw > INT32_MAX) {
    throw ConfigError(field + ": " + fraction_to_string(f) + " is too large");
  }
  return static_cast<int32_t>(raw);
}

namespace {

Fraction fraction_from_json(const json& j, const std::string& field) {
  if (j.is_string()) return parse_fraction(j.get<std::string>());
  if (j.is_number_integer()) return Fraction{j.get<int64_t>(), 1};
  throw ConfigError(field + ": expected a fraction string like \"1/2\"");
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw ConfigError(where + ": missing field \"" + key + "\"");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field \"" + key + "\" has the wrong type");
  }
}

}  // namespace

NetworkConfig preset_config(const std::string& name) {
  NetworkConfig cfg;
  cfg.preset = name;
  if (name == "ecvt") {
    cfg.layers = {{12, 4, {1, 2}, {1, 2}, {1, 1024}}};
    cfg.voter_thresholds = {{15, 32}, {1, 32}};
    cfg.voter_tau_eff = 2;
  } else if (name == "eccvt") {
    cfg.layers = {{12, 4, {1, 2}, {1, 2}, {1, 1024}},
                  {20, 8, {1, 4}, {1, 4}, {1, 512}}};
    cfg.voter_thresholds = {{21, 32}, {1, 64}};
    cfg.voter_tau_eff = 3;
  } else if (name == "ecccvt") {
    cfg.layers = {{12, 4, {1, 2}, {1, 2}, {1, 1024}},
                  {20, 8, {1, 4}, {1, 4}, {1, 512}},
                  {32, 8, {1, 4}, {1, 4}, {1, 512}}};
    cfg.voter_thresholds = {{24, 32}, {1, 64}};
    cfg.voter_tau_eff = 4;
  } else {
    throw ConfigError("unknown preset \"" + name +
                      "\" (expected ecvt, eccvt, or ecccvt)");
  }
  validate_config(cfg);
  return cfg;
}

namespace {

NetworkConfig config_from_json(const json& j) {
  NetworkConfig cfg;
  if (j.contains("preset")) {
    cfg = preset_config(j.at("preset").get<std::string>());
  }
  if (j.contains("tau_max")) cfg.tau_max = j.at("tau_max").get<int32_t>();
  if (j.contains("w_max")) cfg.w_max = j.at("w_max").get<int32_t>();
  if (j.contains("frac_bits")) cfg.frac_bits = j.at("frac_bits").get<uint32_t>();
  if (j.contains("neuron_model")) {
    std::string m = j.at("neuron_model").get<std::string>();
    if (m == "rif") cfg.model = NeuronModel::kRif;
    else if (m == "if") cfg.model = NeuronModel::kIf;
    else throw ConfigError("neuron_model: expected \"rif\" or \"if\", got \"" + m + "\"");
  }
  if (j.contains("stdp_gate")) {
    std::string g = j.at("stdp_gate").get<std::string>();
    if (g == "post_wta") cfg.gate = StdpGate::kPostWta;
    else if (g == "pre_wta") cfg.gate = StdpGate::kPreWta;
    else throw ConfigError("stdp_gate: expected \"post_wta\" or \"pre_wta\", got \"" + g + "\"");
  }
  if (j.contains("binarize_threshold")) {
    cfg.binarize_threshold = j.at("binarize_threshold").get<int32_t>();
  }
  if (j.contains("classes")) cfg.classes = j.at("classes").get<int32_t>();
  if (j.contains("layers")) {
    cfg.layers.clear();
    for (const json& lj : j.at("layers")) {
      LayerConfig lc;
      lc.neurons = require<int32_t>(lj, "neurons", "layer");
      lc.threshold = require<int32_t>(lj, "threshold", "layer");
      for (const char* key : {"mu_plus", "mu_minus", "mu_search"}) {
        if (!lj.contains(key)) {
          throw ConfigError(std::string("layer: missing field \"") + key + "\"");
        }
      }
      lc.mu_plus = fraction_from_json(lj.at("mu_plus"), "mu_plus");
      lc.mu_minus = fraction_from_json(lj.at("mu_minus"), "mu_minus");
      lc.mu_search = fraction_from_json(lj.at("mu_search"), "mu_search");
      cfg.layers.push_back(lc);
    }
  }
  if (j.contains("voter")) {
    const json& vj = j.at("voter");
    cfg.voter_tau_eff = require<int32_t>(vj, "tau_eff", "voter");
    cfg.voter_thresholds.clear();
    for (const json& tj : require<json>(vj, "thresholds", "voter")) {
      cfg.voter_thresholds.push_back(fraction_from_json(tj, "voter threshold"));
    }
  }
  if (j.contains("probes")) {
    const json& pj = j.at("probes");
    if (pj.contains("side")) cfg.probes.side = pj.at("side").get<int32_t>();
    if (pj.contains("neurons")) cfg.probes.neurons = pj.at("neurons").get<int32_t>();
    if (pj.contains("threshold")) cfg.probes.threshold = pj.at("threshold").get<int32_t>();
    if (pj.contains("windows")) {
      cfg.probes.windows.clear();
      for (const json& wj : pj.at("windows")) {
        if (!wj.is_array() || wj.size() != 2) {
          throw ConfigError("probes.windows: each entry must be [top, left]");
        }
        cfg.probes.windows.push_back(
            {wj.at(0).get<int32_t>(), wj.at(1).get<int32_t>()});
      }
    }
  }
  return cfg;
}

}  // namespace

NetworkConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  NetworkConfig cfg;
  try {
    cfg = config_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config field: ") + e.what());
  }
  if (cfg.layers.empty()) {
    throw ConfigError("config has no layers (give \"layers\" or \"preset\")");
  }
  validate_config(cfg);
  return cfg;
}

NetworkConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const NetworkConfig& cfg) {
  json j;
  j["tau_max"] = cfg.tau_max;
  j["w_max"] = cfg.w_max;
  j["frac_bits"] = cfg.frac_bits;
  j["neuron_model"] = cfg.model == NeuronModel::kRif ? "rif" : "if";
  j["stdp_gate"] = cfg.gate == StdpGate::kPostWta ? "post_wta" : "pre_wta";
  j["binarize_threshold"] = cfg.binarize_threshold;
  j["classes"] = cfg.classes;
  json layers = json::array();
  for (const LayerConfig& lc : cfg.layers) {
    json lj;
    lj["neurons"] = lc.neurons;
    lj["threshold"] = lc.threshold;
    lj["mu_plus"] = fraction_to_string(lc.mu_plus);
    lj["mu_minus"] = fraction_to_string(lc.mu_minus);
    lj["mu_search"] = fraction_to_string(lc.mu_search);
    layers.push_back(lj);
  }
  j["layers"] = layers;
  json thresholds = json::array();
  for (const Fraction& f : cfg.voter_thresholds) {
    thresholds.push_back(fraction_to_string(f));
  }
  j["voter"] = {{"tau_eff", cfg.voter_tau_eff}, {"thresholds", thresholds}};
  json windows = json::array();
  for (const ProbeWindow& w : cfg.probes.windows) {
    windows.push_back(json::array({w.top, w.left}));
  }
  j["probes"] = {{"side", cfg.probes.side},
                 {"neurons", cfg.probes.neurons},
                 {"threshold", cfg.probes.threshold},
                 {"windows", windows}};
  if (!cfg.preset.empty()) j["preset"] = cfg.preset;
  return j.dump(2);
}

void validate_config(const NetworkConfig& cfg) {
  if (cfg.tau_max < 2 || cfg.tau_max > 256) {
    throw ConfigError("tau_max: expected 2..256, got " + std::to_string(cfg.tau_max));
  }
  if (cfg.w_max < 1 || cfg.w_max > 1024) {
    throw ConfigError("w_max: expected 1..1024, got " + std::to_string(cfg.w_max));
  }
  if (cfg.frac_bits < 1 || cfg.frac_bits > 20) {
    throw ConfigError("frac_bits: expected 1..20, got " + std::to_string(cfg.frac_bits));
  }
  if ((cfg.w_max << cfg.frac_bits) % 2 != 0) {
    throw ConfigError("w_max * 2^frac_bits must be even so w_max/2 is exact");
  }
  if (cfg.binarize_threshold < 1 || cfg.binarize_threshold > 255) {
    throw ConfigError("binarize_threshold: expected 1..255, got " +
                      std::to_string(cfg.binarize_threshold));
  }
  if (cfg.classes < 2 || cfg.classes > 256) {
    throw ConfigError("classes: expected 2..256, got " + std::to_string(cfg.classes));
  }
  if (cfg.layers.empty() || cfg.layers.size() > 12) {
    throw ConfigError("layers: expected 1..12 layers, got " +
                      std::to_string(cfg.layers.size()));
  }
  for (size_t l = 0; l < cfg.layers.size(); ++l) {
    const LayerConfig& lc = cfg.layers[l];
    std::string where = "layers[" + std::to_string(l) + "]";
    if (cfg.grid(l) < 1) {
      throw ConfigError(where + ": grid collapses below 1x1 at this depth");
    }
    if (lc.neurons < 1 || lc.neurons > 4096) {
      throw ConfigError(where + ".neurons: expected 1..4096, got " +
                        std::to_string(lc.neurons));
    }
    if (lc.threshold < 1) {
      throw ConfigError(where + ".threshold: must be >= 1");
    }
    int32_t mu_plus = fraction_to_raw(lc.mu_plus, cfg.frac_bits, where + ".mu_plus");
    int32_t mu_minus = fraction_to_raw(lc.mu_minus, cfg.frac_bits, where + ".mu_minus");
    fraction_to_raw(lc.mu_search, cfg.frac_bits, where + ".mu_search");
    if (mu_plus % 2 != 0) {
      throw ConfigError(where + ".mu_plus: half-strength updates need " +
                        fraction_to_string(lc.mu_plus) +
                        " to be an even raw count, i.e. a multiple of 2^-" +
                        std::to_string(cfg.frac_bits - 1));
    }
    if (mu_minus % 2 != 0) {
      throw ConfigError(where + ".mu_minus: half-strength updates need " +
                        fraction_to_string(lc.mu_minus) +
                        " to be an even raw count, i.e. a multiple of 2^-" +
                        std::to_string(cfg.frac_bits - 1));
    }
  }
  if (cfg.voter_thresholds.empty() || cfg.voter_thresholds.size() > 2) {
    throw ConfigError("voter.thresholds: expected 1 or 2 banks, got " +
                      std::to_string(cfg.voter_thresholds.size()));
  }
  if (cfg.voter_tau_eff < 1 || cfg.voter_tau_eff > cfg.tau_max) {
    throw ConfigError("voter.tau_eff: expected 1..tau_max, got " +
                      std::to_string(cfg.voter_tau_eff));
  }
  WeightFormat fmt{cfg.w_max, cfg.frac_bits};
  for (size_t b = 0; b < cfg.voter_thresholds.size(); ++b) {
    std::string where = "voter.thresholds[" + std::to_string(b) + "]";
    int32_t raw = fraction_to_raw(cfg.voter_thresholds[b], cfg.frac_bits, where);
    if (raw < 1 || raw >= fmt.unit()) {
      throw ConfigError(where + ": must lie strictly between 0 and 1");
    }
  }
  if (cfg.probes.side < 1 || cfg.probes.side > kImageSide) {
    throw ConfigError("probes.side: expected 1..28");
  }
  if (cfg.probes.neurons < 1 || cfg.probes.threshold < 1) {
    throw ConfigError("probes: neurons and threshold must be >= 1");
  }
  for (const ProbeWindow& w : cfg.probes.windows) {
    if (w.top < 0 || w.left < 0 || w.top + cfg.probes.side > kImageSide ||
        w.left + cfg.probes.side > kImageSide) {
      throw ConfigError("probes.windows: [" + std::to_string(w.top) + ", " +
                        std::to_string(w.left) + "] does not fit in the image");
    }
  }
}

}  // namespace tnn
