#include "tnn/runner.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "tnn/checkpoint.hpp"
#include "tnn/column.hpp"
#include "tnn/util.hpp"

namespace tnn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kSnapMagic[8] = {'T', 'N', 'N', 'S', 'N', 'A', 'P'};
constexpr uint32_t kSnapVersion = 1;

// Streambuf shim that forwards to another buffer while updating a CRC32.
class CrcOutBuf : public std::streambuf {
 public:
  explicit CrcOutBuf(std::streambuf* inner) : inner_(inner) {}
  uint32_t crc() const { return crc_; }

 protected:
  int overflow(int ch) override {
    if (ch == traits_type::eof()) return traits_type::not_eof(ch);
    uint8_t b = static_cast<uint8_t>(ch);
    crc_ = crc32(std::span<const uint8_t>(&b, 1), crc_);
    return inner_->sputc(static_cast<char>(ch));
  }
  std::streamsize xsputn(const char* s, std::streamsize n) override {
    crc_ = crc32(
        std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s),
                                 static_cast<size_t>(n)),
        crc_);
    return inner_->sputn(s, n);
  }

 private:
  std::streambuf* inner_;
  uint32_t crc_ = 0;
};

// Records every column application during the snapshot window.
class SnapshotCollector : public ColumnObserver {
 public:
  SnapshotCollector(const Network& net, uint32_t inf_value)
      : inf_(inf_value) {
    snaps_.reserve(net.layer_count());
    for (size_t l = 0; l < net.layer_count(); ++l) {
      std::vector<ClusterSnapshot> layer;
      layer.reserve(net.columns_in(l));
      for (size_t c = 0; c < net.columns_in(l); ++c) {
        const ColumnParams& cp = net.column(l, c).params();
        layer.emplace_back(static_cast<uint32_t>(cp.inputs),
                           static_cast<uint32_t>(cp.neurons));
      }
      snaps_.push_back(std::move(layer));
    }
  }

  void on_column(uint32_t layer, uint32_t column,
                 std::span<const SpikeTime> x_norm,
                 std::span<const SpikeTime> z, int32_t winner) override {
    SpikeTime out =
        winner >= 0 ? z[static_cast<size_t>(winner)] : SpikeTime::inf();
    snaps_[layer][column].observe(x_norm, winner, out, inf_);
  }

  std::vector<std::vector<ClusterSnapshot>>& snaps() { return snaps_; }

 private:
  uint32_t inf_;
  std::vector<std::vector<ClusterSnapshot>> snaps_;
};

struct Probe {
  ProbeWindow window;
  Column column;
  ClusterSnapshot snap;
  Volley input;
  Volley z;
};

std::vector<Probe> make_probes(const NetworkConfig& cfg) {
  std::vector<Probe> probes;
  ColumnParams cp;
  cp.inputs = 2 * cfg.probes.side * cfg.probes.side;
  cp.neurons = cfg.probes.neurons;
  cp.threshold = cfg.probes.threshold;
  const LayerConfig& l0 = cfg.layers.front();
  cp.mu_plus_raw = fraction_to_raw(l0.mu_plus, cfg.frac_bits, "mu_plus");
  cp.mu_minus_raw = fraction_to_raw(l0.mu_minus, cfg.frac_bits, "mu_minus");
  cp.mu_search_raw = fraction_to_raw(l0.mu_search, cfg.frac_bits, "mu_search");
  cp.weights = WeightFormat{cfg.w_max, cfg.frac_bits};
  cp.model = cfg.model;
  cp.gate = cfg.gate;
  for (const ProbeWindow& w : cfg.probes.windows) {
    probes.push_back(Probe{w, Column(cp),
                           ClusterSnapshot(static_cast<uint32_t>(cp.inputs),
                                           static_cast<uint32_t>(cp.neurons)),
                           Volley{}, Volley{}});
  }
  return probes;
}

struct DataFileInfo {
  std::string images;
  std::string labels;
  uint64_t images_bytes = 0;
  uint64_t labels_bytes = 0;
  uint32_t images_crc = 0;
  uint32_t labels_crc = 0;
};

Dataset load_data(const RunOptions& opt, std::vector<DataFileInfo>& infos) {
  if (opt.data.empty()) {
    throw DataError("no data files given (need image/label IDX pairs)");
  }
  Dataset data;
  for (const auto& [images, labels] : opt.data) {
    load_idx_pair(images, labels, data);
    DataFileInfo info;
    info.images = images;
    info.labels = labels;
    info.images_bytes = fs::file_size(images);
    info.labels_bytes = fs::file_size(labels);
    info.images_crc = file_crc32(images);
    info.labels_crc = file_crc32(labels);
    infos.push_back(info);
  }
  return data;
}

std::string hex32(uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", v);
  return buf;
}

const char* transform_name(PhaseTransform t) {
  switch (t) {
    case PhaseTransform::kIdentity: return "identity";
    case PhaseTransform::kTranspose: return "transpose";
    case PhaseTransform::kTransposeSwap: return "transpose_swap";
  }
  return "identity";
}

json stream_json(const StreamSpec& spec) {
  json phases = json::array();
  for (const StreamPhase& p : spec.phases) {
    phases.push_back(
        {{"length", p.length}, {"transform", transform_name(p.transform)}});
  }
  return json{{"phases", phases}};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path);
  f << text;
  f.flush();
  if (!f) throw DataError("failed writing " + path);
}

void write_manifest(const std::string& path, const RunOptions& opt,
                    const std::vector<DataFileInfo>& infos,
                    const IntervalTracker& tracker, uint64_t stream_position,
                    uint64_t inputs_this_process, const char* command,
                    const std::vector<std::string>& outputs) {
  json m;
  m["format_version"] = 1;
  m["command"] = command;
  m["preset"] = opt.config.preset.empty() ? "custom" : opt.config.preset;
  m["config"] = json::parse(serialize_config(opt.config));
  m["stream"] = stream_json(opt.stream);
  json files = json::array();
  for (const DataFileInfo& fi : infos) {
    files.push_back({{"images", fi.images},
                     {"labels", fi.labels},
                     {"images_bytes", fi.images_bytes},
                     {"images_crc32", hex32(fi.images_crc)},
                     {"labels_bytes", fi.labels_bytes},
                     {"labels_crc32", hex32(fi.labels_crc)}});
  }
  m["data_files"] = files;
  m["interval_len"] = opt.interval_len;
  m["workers"] = opt.workers;
  m["checkpoint_every"] = opt.checkpoint_every;
  m["snapshot_window"] = opt.snapshot_window;
  m["probes"] = opt.probes;
  m["resumed_from"] = opt.resume_from;
  m["stream_position"] = stream_position;
  m["inputs_this_process"] = inputs_this_process;
  uint64_t errors = tracker.errors_seen();
  uint64_t inputs = tracker.inputs_seen();
  json totals;
  totals["inputs"] = inputs;
  totals["errors"] = errors;
  if (inputs > 0) {
    totals["cumulative_error_rate"] =
        format_rational(static_cast<int64_t>(errors),
                        static_cast<int64_t>(inputs));
    totals["cumulative_error_rate_num"] = errors;
    totals["cumulative_error_rate_den"] = inputs;
  }
  m["totals"] = totals;
  m["outputs"] = outputs;
  write_text_file(path, m.dump(2) + "\n");
}

void save_snapshot_file(const std::string& path,
                        std::vector<std::vector<ClusterSnapshot>>* columns,
                        std::vector<Probe>* probes, uint32_t inf_value) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write snapshot " + path);
  CrcOutBuf crcbuf(f.rdbuf());
  std::ostream os(&crcbuf);
  os.write(kSnapMagic, sizeof kSnapMagic);
  write_u32(os, kSnapVersion);
  write_u32(os, inf_value);
  uint32_t ncols = 0;
  if (columns) {
    for (const auto& layer : *columns) {
      ncols += static_cast<uint32_t>(layer.size());
    }
  }
  write_u32(os, ncols);
  write_u32(os, probes ? static_cast<uint32_t>(probes->size()) : 0);
  if (columns) {
    for (size_t l = 0; l < columns->size(); ++l) {
      for (size_t c = 0; c < (*columns)[l].size(); ++c) {
        write_u32(os, static_cast<uint32_t>(l));
        write_u32(os, static_cast<uint32_t>(c));
        (*columns)[l][c].save(os);
      }
    }
  }
  if (probes) {
    for (size_t p = 0; p < probes->size(); ++p) {
      write_u32(os, static_cast<uint32_t>(p));
      write_u32(os, static_cast<uint32_t>((*probes)[p].window.top));
      write_u32(os, static_cast<uint32_t>((*probes)[p].window.left));
      write_u32(os, static_cast<uint32_t>((*probes)[p].column.params().inputs));
      (*probes)[p].snap.save(os);
    }
  }
  os.flush();
  write_u32(f, crcbuf.crc());
  f.flush();
  if (!f) throw DataError("failed writing snapshot " + path);
}

// Drives the whole stream through the network, invoking on_step after every
// prediction+learning step. Probes may be empty; collector may be null.
template <typename F>
uint64_t drive(Network& net, Stream& stream, uint64_t window_start,
               bool window_on, SnapshotCollector* collector,
               std::vector<Probe>* probes, F&& on_step) {
  StreamItem item;
  while (stream.next(item)) {
    bool in_window = window_on && item.index >= window_start;
    StepResult res = net.step(item.frame, item.label, true,
                              in_window ? collector : nullptr);
    if (probes) {
      for (Probe& pr : *probes) {
        posneg_encode_window(item.binary, pr.window.top, pr.window.left,
                             net.config().probes.side, pr.input);
        int32_t winner = pr.column.infer_and_learn(pr.input, true, pr.z);
        if (in_window) {
          SpikeTime out = winner >= 0 ? pr.z[static_cast<size_t>(winner)]
                                      : SpikeTime::inf();
          pr.snap.observe(pr.input, winner, out,
                          static_cast<uint32_t>(net.config().tau_max));
        }
      }
    }
    on_step(item, res);
  }
  return stream.position();
}

void maybe_report(const RunOptions& opt, const IntervalTracker& tracker,
                  size_t& reported) {
  if (!opt.verbose) return;
  const auto& recs = tracker.records();
  while (reported < recs.size()) {
    const IntervalRecord& r = recs[reported];
    std::cout << "[" << r.interval_end << "] interval_error="
              << format_rational(static_cast<int64_t>(r.errors),
                                 static_cast<int64_t>(r.inputs))
              << " cumulative="
              << format_rational(static_cast<int64_t>(r.cum_errors),
                                 static_cast<int64_t>(r.cum_inputs))
              << std::endl;
    ++reported;
  }
}

struct VariantSeries {
  std::string name;
  std::vector<IntervalRecord> records;
};

void write_comparison_csv(const std::string& path,
                          const std::vector<VariantSeries>& variants) {
  std::ostringstream os;
  os << "interval_end";
  for (const VariantSeries& v : variants) {
    os << "," << v.name << "_error_rate," << v.name << "_error_rate_num,"
       << v.name << "_error_rate_den";
  }
  os << "\n";
  size_t rows = variants.empty() ? 0 : variants.front().records.size();
  for (const VariantSeries& v : variants) {
    if (v.records.size() != rows) {
      throw DataError("variant interval counts disagree in comparison");
    }
  }
  for (size_t i = 0; i < rows; ++i) {
    os << variants.front().records[i].interval_end;
    for (const VariantSeries& v : variants) {
      const IntervalRecord& r = v.records[i];
      os << "," << format_rational(static_cast<int64_t>(r.errors),
                                   static_cast<int64_t>(r.inputs))
         << "," << r.errors << "," << r.inputs;
    }
    os << "\n";
  }
  write_text_file(path, os.str());
}

}  // namespace

uint32_t file_crc32(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path);
  std::vector<char> buf(1 << 20);
  uint32_t crc = 0;
  while (f) {
    f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    std::streamsize got = f.gcount();
    if (got <= 0) break;
    crc = crc32(std::span<const uint8_t>(
                    reinterpret_cast<const uint8_t*>(buf.data()),
                    static_cast<size_t>(got)),
                crc);
  }
  return crc;
}

void write_intervals_csv(const std::string& path,
                         const std::vector<IntervalRecord>& records) {
  std::ostringstream os;
  os << "interval_end,errors,error_rate,error_rate_num,error_rate_den,"
        "cumulative_rate,cumulative_rate_num,cumulative_rate_den,"
        "ties,no_predictions\n";
  for (const IntervalRecord& r : records) {
    os << r.interval_end << "," << r.errors << ","
       << format_rational(static_cast<int64_t>(r.errors),
                          static_cast<int64_t>(r.inputs))
       << "," << r.errors << "," << r.inputs << ","
       << format_rational(static_cast<int64_t>(r.cum_errors),
                          static_cast<int64_t>(r.cum_inputs))
       << "," << r.cum_errors << "," << r.cum_inputs << "," << r.ties << ","
       << r.no_predictions << "\n";
  }
  write_text_file(path, os.str());
}

RunSummary run(const RunOptions& opt) {
  if (opt.interval_len < 1) {
    throw ConfigError("interval length must be >= 1");
  }
  validate_config(opt.config);
  fs::create_directories(opt.out_dir);
  std::vector<DataFileInfo> infos;
  Dataset data = load_data(opt, infos);

  Network net(opt.config);
  net.set_workers(opt.workers);
  IntervalTracker tracker(opt.interval_len);
  uint64_t start = 0;
  if (!opt.resume_from.empty()) {
    start = load_checkpoint(opt.resume_from, net, tracker);
    if (tracker.interval_len() != opt.interval_len) {
      throw ConfigError("checkpoint interval length " +
                        std::to_string(tracker.interval_len()) +
                        " does not match requested " +
                        std::to_string(opt.interval_len));
    }
  }
  Stream stream(&data, opt.stream,
                static_cast<uint8_t>(opt.config.binarize_threshold), start);

  const uint64_t total = opt.stream.total();
  const bool window_on = opt.snapshot_window > 0;
  const uint64_t window_start =
      opt.snapshot_window >= total ? 0 : total - opt.snapshot_window;
  SnapshotCollector collector(net, static_cast<uint32_t>(opt.config.tau_max));
  std::vector<Probe> probes;
  if (opt.probes) probes = make_probes(opt.config);

  size_t reported = 0;
  std::vector<std::string> outputs;
  drive(net, stream, window_start, window_on, &collector, &probes,
        [&](const StreamItem& item, const StepResult& res) {
          tracker.record(res.error_against(item.label), res.tie,
                         res.no_prediction);
          maybe_report(opt, tracker, reported);
          uint64_t done = item.index + 1;
          if (opt.checkpoint_every > 0 && done % opt.checkpoint_every == 0 &&
              done < total) {
            std::string name = "checkpoint_" + std::to_string(done) + ".bin";
            save_checkpoint(opt.out_dir + "/" + name, net, done, tracker);
            outputs.push_back(name);
          }
        });
  tracker.flush();
  maybe_report(opt, tracker, reported);

  write_intervals_csv(opt.out_dir + "/intervals.csv", tracker.records());
  outputs.push_back("intervals.csv");
  save_checkpoint(opt.out_dir + "/checkpoint_final.bin", net, total, tracker);
  outputs.push_back("checkpoint_final.bin");
  if (window_on) {
    save_snapshot_file(opt.out_dir + "/snapshot.bin", &collector.snaps(),
                       opt.probes ? &probes : nullptr,
                       static_cast<uint32_t>(opt.config.tau_max));
    outputs.push_back("snapshot.bin");
  }
  write_text_file(opt.out_dir + "/config.json",
                  serialize_config(opt.config) + "\n");
  outputs.push_back("config.json");
  outputs.push_back("manifest.json");
  std::sort(outputs.begin(), outputs.end());
  write_manifest(opt.out_dir + "/manifest.json", opt, infos, tracker, total,
                 total - start, "run", outputs);
  return RunSummary{tracker.inputs_seen(), tracker.records()};
}

void ablate_neuron(const RunOptions& opt) {
  fs::create_directories(opt.out_dir);
  std::vector<VariantSeries> variants;
  for (NeuronModel model : {NeuronModel::kRif, NeuronModel::kIf}) {
    RunOptions sub = opt;
    const char* name = model == NeuronModel::kRif ? "rif" : "if";
    sub.config.model = model;
    sub.out_dir = opt.out_dir + "/" + name;
    RunSummary s = run(sub);
    variants.push_back(VariantSeries{name, s.records});
  }
  write_comparison_csv(opt.out_dir + "/comparison.csv", variants);
  json m;
  m["format_version"] = 1;
  m["command"] = "ablate_neuron";
  m["variants"] = json::array({"rif", "if"});
  m["outputs"] =
      json::array({"comparison.csv", "rif/", "if/", "manifest.json"});
  write_text_file(opt.out_dir + "/manifest.json", m.dump(2) + "\n");
}

void ablate_voters(const RunOptions& opt) {
  if (opt.interval_len < 1) {
    throw ConfigError("interval length must be >= 1");
  }
  validate_config(opt.config);
  if (opt.config.voter_thresholds.size() != 2) {
    throw ConfigError("voter ablation needs a config with two voter banks");
  }
  fs::create_directories(opt.out_dir);
  std::vector<DataFileInfo> infos;
  Dataset data = load_data(opt, infos);

  Network net(opt.config);
  net.set_workers(opt.workers);
  // Bank order in the config is arbitrary; hi is the larger threshold.
  const Fraction& t0 = opt.config.voter_thresholds[0];
  const Fraction& t1 = opt.config.voter_thresholds[1];
  size_t hi = static_cast<__int128>(t0.num) * t1.den >=
                      static_cast<__int128>(t1.num) * t0.den
                  ? 0
                  : 1;
  size_t lo = 1 - hi;

  IntervalTracker combined(opt.interval_len);
  IntervalTracker hi_only(opt.interval_len);
  IntervalTracker lo_only(opt.interval_len);
  uint64_t start = 0;
  if (!opt.resume_from.empty()) {
    throw ConfigError("voter ablation does not support resuming");
  }
  Stream stream(&data, opt.stream,
                static_cast<uint8_t>(opt.config.binarize_threshold), start);
  size_t reported = 0;
  drive(net, stream, 0, false, nullptr, nullptr,
        [&](const StreamItem& item, const StepResult& res) {
          combined.record(res.error_against(item.label), res.tie,
                          res.no_prediction);
          hi_only.record(res.bank_prediction[hi] != item.label,
                         res.bank_tie[hi] != 0,
                         res.bank_no_prediction[hi] != 0);
          lo_only.record(res.bank_prediction[lo] != item.label,
                         res.bank_tie[lo] != 0,
                         res.bank_no_prediction[lo] != 0);
          maybe_report(opt, combined, reported);
        });
  combined.flush();
  hi_only.flush();
  lo_only.flush();
  maybe_report(opt, combined, reported);

  const uint64_t total = opt.stream.total();
  fs::create_directories(opt.out_dir + "/combined");
  fs::create_directories(opt.out_dir + "/hi_only");
  fs::create_directories(opt.out_dir + "/lo_only");
  write_intervals_csv(opt.out_dir + "/combined/intervals.csv",
                      combined.records());
  write_intervals_csv(opt.out_dir + "/hi_only/intervals.csv",
                      hi_only.records());
  write_intervals_csv(opt.out_dir + "/lo_only/intervals.csv",
                      lo_only.records());
  save_checkpoint(opt.out_dir + "/checkpoint_final.bin", net, total, combined);
  write_comparison_csv(opt.out_dir + "/comparison.csv",
                       {VariantSeries{"combined", combined.records()},
                        VariantSeries{"hi_only", hi_only.records()},
                        VariantSeries{"lo_only", lo_only.records()}});
  std::vector<std::string> outputs = {
      "checkpoint_final.bin",       "combined/intervals.csv",
      "comparison.csv",             "config.json",
      "hi_only/intervals.csv",      "lo_only/intervals.csv",
      "manifest.json"};
  write_text_file(opt.out_dir + "/config.json",
                  serialize_config(opt.config) + "\n");
  write_manifest(opt.out_dir + "/manifest.json", opt, infos, combined, total,
                 total, "ablate_voters", outputs);
}

namespace {

struct ColumnSnapshotEntry {
  uint32_t layer = 0;
  uint32_t column = 0;
  ClusterSnapshot snap{1, 1};
};

struct ProbeSnapshotEntry {
  uint32_t probe_id = 0;
  uint32_t top = 0;
  uint32_t left = 0;
  uint32_t lines = 0;
  ClusterSnapshot snap{1, 1};
};

struct SnapshotFile {
  uint32_t inf_value = 0;
  std::vector<ColumnSnapshotEntry> columns;
  std::vector<ProbeSnapshotEntry> probes;
};

SnapshotFile load_snapshot_file(const std::string& path) {
  uint64_t size = 0;
  {
    std::error_code ec;
    size = fs::file_size(path, ec);
    if (ec) throw DataError("cannot stat snapshot " + path);
  }
  if (size < sizeof kSnapMagic + 20) {
    throw DataError("snapshot " + path + " is too short");
  }
  // First pass: checksum everything before the trailer.
  {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open snapshot " + path);
    std::vector<char> buf(1 << 20);
    uint64_t remaining = size - 4;
    uint32_t crc = 0;
    while (remaining > 0) {
      std::streamsize want = static_cast<std::streamsize>(
          std::min<uint64_t>(remaining, buf.size()));
      f.read(buf.data(), want);
      if (f.gcount() != want) {
        throw DataError("snapshot " + path + " truncated mid-checksum");
      }
      crc = crc32(std::span<const uint8_t>(
                      reinterpret_cast<const uint8_t*>(buf.data()),
                      static_cast<size_t>(want)),
                  crc);
      remaining -= static_cast<uint64_t>(want);
    }
    uint32_t stored = read_u32(f, "snapshot checksum");
    if (stored != crc) {
      throw DataError("snapshot " + path + " failed its checksum");
    }
  }
  std::ifstream f(path, std::ios::binary);
  char magic[sizeof kSnapMagic];
  f.read(magic, sizeof magic);
  if (!f || !std::equal(kSnapMagic, kSnapMagic + sizeof kSnapMagic, magic)) {
    throw DataError("snapshot " + path + " has a bad magic header");
  }
  uint32_t version = read_u32(f, "snapshot version");
  if (version != kSnapVersion) {
    throw DataError("snapshot " + path + " has version " +
                    std::to_string(version) + ", expected " +
                    std::to_string(kSnapVersion));
  }
  SnapshotFile out;
  out.inf_value = read_u32(f, "snapshot inf value");
  uint32_t ncols = read_u32(f, "snapshot column count");
  uint32_t nprobes = read_u32(f, "snapshot probe count");
  out.columns.reserve(ncols);
  for (uint32_t i = 0; i < ncols; ++i) {
    ColumnSnapshotEntry e;
    e.layer = read_u32(f, "snapshot entry layer");
    e.column = read_u32(f, "snapshot entry column");
    e.snap = ClusterSnapshot::load(f);
    out.columns.push_back(std::move(e));
  }
  out.probes.reserve(nprobes);
  for (uint32_t i = 0; i < nprobes; ++i) {
    ProbeSnapshotEntry e;
    e.probe_id = read_u32(f, "snapshot probe id");
    e.top = read_u32(f, "snapshot probe top");
    e.left = read_u32(f, "snapshot probe left");
    e.lines = read_u32(f, "snapshot probe lines");
    e.snap = ClusterSnapshot::load(f);
    out.probes.push_back(std::move(e));
  }
  return out;
}

}  // namespace

void analyze(const std::string& out_dir) {
  std::string snap_path = out_dir + "/snapshot.bin";
  if (!fs::exists(snap_path)) {
    throw DataError("no snapshot.bin under " + out_dir +
                    "; run with --snapshot-window to record one");
  }
  SnapshotFile file = load_snapshot_file(snap_path);

  std::ostringstream cc;
  cc << "layer,column,members,matches,c_conv,c_conv_num,c_conv_den\n";
  for (const ColumnSnapshotEntry& e : file.columns) {
    ColumnConvergence conv = centroid_convergence(e.snap);
    if (conv.members == 0) continue;
    cc << e.layer << "," << e.column << "," << conv.members << ","
       << conv.matches << ","
       << format_rational(static_cast<int64_t>(conv.matches),
                          static_cast<int64_t>(conv.members))
       << "," << conv.matches << "," << conv.members << "\n";
  }
  write_text_file(out_dir + "/cconv.csv", cc.str());

  if (file.probes.empty()) return;
  std::ostringstream rb;
  rb << "probe_id,spike_time,members,mean_sad,mean_sad_num,mean_sad_den,"
        "coverage,coverage_num,coverage_den\n";
  for (const ProbeSnapshotEntry& e : file.probes) {
    for (const RbfBucket& b : rbf_profile(e.snap)) {
      rb << e.probe_id << "," << b.spike_time << "," << b.members << ","
         << b.mean_sad.to_decimal6() << "," << b.mean_sad.num_string() << ","
         << b.mean_sad.den_string() << "," << b.coverage.to_decimal6() << ","
         << b.coverage.num_string() << "," << b.coverage.den_string() << "\n";
    }
  }
  write_text_file(out_dir + "/rbf.csv", rb.str());
}

}  // namespace tnn
