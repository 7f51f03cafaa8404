#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tnn/config.hpp"
#include "tnn/runner.hpp"
#include "tnn/util.hpp"

namespace {

struct CliArgs {
  std::string preset;
  std::string config_path;
  std::string stream = "1phase";
  uint64_t stream_length = 70000;
  std::vector<std::string> images;
  std::vector<std::string> labels;
  std::string out;
  std::string resume;
  std::string dimension;
  uint64_t interval = 1000;
  uint64_t checkpoint_every = 0;
  uint64_t snapshot_window = 0;
  bool probes = false;
  int32_t workers = 1;
};

tnn::RunOptions make_options(const CliArgs& a) {
  tnn::RunOptions opt;
  if (!a.preset.empty() && !a.config_path.empty()) {
    throw tnn::UsageError("--preset and --config are mutually exclusive");
  }
  if (a.preset.empty() && a.config_path.empty()) {
    throw tnn::UsageError("one of --preset or --config is required");
  }
  opt.config = a.preset.empty() ? tnn::load_config_file(a.config_path)
                                : tnn::preset_config(a.preset);
  if (a.stream == "1phase") {
    opt.stream = tnn::one_phase_spec(a.stream_length);
  } else if (a.stream == "3phase") {
    opt.stream = tnn::three_phase_spec();
  } else {
    throw tnn::UsageError("--stream must be 1phase or 3phase, got " + a.stream);
  }
  if (a.images.empty() || a.images.size() != a.labels.size()) {
    throw tnn::UsageError(
        "--images and --labels must be given in matching pairs");
  }
  for (size_t i = 0; i < a.images.size(); ++i) {
    opt.data.emplace_back(a.images[i], a.labels[i]);
  }
  opt.out_dir = a.out;
  opt.interval_len = a.interval;
  opt.checkpoint_every = a.checkpoint_every;
  opt.snapshot_window = a.snapshot_window;
  opt.probes = a.probes;
  opt.workers = a.workers;
  opt.resume_from = a.resume;
  opt.verbose = true;
  return opt;
}

void add_common_flags(CLI::App* cmd, CliArgs& a) {
  cmd->add_option("--preset", a.preset,
                  "Built-in configuration: ecvt, eccvt, or ecccvt");
  cmd->add_option("--config", a.config_path, "Path to a JSON config file");
  cmd->add_option("--stream", a.stream, "Benchmark stream: 1phase or 3phase");
  cmd->add_option("--stream-length", a.stream_length,
                  "Input count for the 1phase stream");
  cmd->add_option("--images", a.images, "IDX image file (repeatable)");
  cmd->add_option("--labels", a.labels, "IDX label file (repeatable)");
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--interval", a.interval, "Error interval length");
  cmd->add_option("--checkpoint-every", a.checkpoint_every,
                  "Checkpoint every N inputs (0: final only)");
  cmd->add_option("--snapshot-window", a.snapshot_window,
                  "Record the last N inputs for analysis");
  cmd->add_flag("--probes", a.probes, "Train and record probe columns");
  cmd->add_option("--workers", a.workers, "Worker threads for column updates");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal neural network simulator"};
  app.require_subcommand(1);
  CliArgs a;

  CLI::App* cmd_run = app.add_subcommand("run", "One prequential run");
  add_common_flags(cmd_run, a);
  cmd_run->add_option("--resume", a.resume, "Checkpoint file to resume from");

  CLI::App* cmd_ablate =
      app.add_subcommand("ablate", "Side-by-side variant comparison");
  add_common_flags(cmd_ablate, a);
  cmd_ablate->add_option("--dimension", a.dimension,
                         "What to ablate: neuron or voters")
      ->required();

  CLI::App* cmd_analyze =
      app.add_subcommand("analyze", "Compute cluster metrics from a snapshot");
  std::string analyze_dir;
  cmd_analyze->add_option("--out", analyze_dir, "Run output directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    if (cmd_run->parsed()) {
      tnn::run(make_options(a));
    } else if (cmd_ablate->parsed()) {
      if (a.dimension == "neuron") {
        tnn::ablate_neuron(make_options(a));
      } else if (a.dimension == "voters") {
        tnn::ablate_voters(make_options(a));
      } else {
        throw tnn::UsageError("--dimension must be neuron or voters, got " +
                              a.dimension);
      }
    } else if (cmd_analyze->parsed()) {
      tnn::analyze(analyze_dir);
    }
  } catch (const tnn::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const tnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const tnn::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
