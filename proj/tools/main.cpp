#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ecomplex/pipeline.hpp"

// Command line front end for the export-diversification analysis pipeline.
// Every subcommand reads the shared config file; --out/--threads/--seed and
// the analysis knobs below override it.

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int delta = 0;
  double rca_threshold = 0.0;
  int backward_window = 0;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "path to the run config file")->required();
  cmd->add_option("--out", args->out_dir, "output directory (overrides config)");
  cmd->add_option("--threads", args->threads, "worker threads (overrides config)");
  cmd->add_option("--seed", args->seed, "seed echoed into the manifest")
      ->each([args](const std::string&) { args->seed_set = true; });
  cmd->add_option("--delta", args->delta, "interval length in years (overrides config)");
  cmd->add_option("--rca-threshold", args->rca_threshold, "RCA threshold (overrides config)");
  cmd->add_option("--backward-window", args->backward_window,
                  "clean-history window in years (overrides config)");
}

ecomplex::RunConfig make_config(const CommonArgs& args) {
  ecomplex::RunConfig cfg = ecomplex::load_config(args.config_path);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.threads > 0) cfg.threads = args.threads;
  if (args.seed_set) cfg.seed = args.seed;
  if (args.delta > 0) cfg.delta = args.delta;
  if (args.rca_threshold > 0) cfg.rca_threshold = args.rca_threshold;
  if (args.backward_window > 0) cfg.backward_window = args.backward_window;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"economic complexity and export diversification toolkit"};
  app.require_subcommand(1);

  CommonArgs ingest_args, complexity_args, proximity_args, directions_args, jumps_args,
      stages_args, regress_args, pipeline_args;

  CLI::App* cmd_ingest = app.add_subcommand("ingest", "load, filter and persist the trade panel");
  add_common(cmd_ingest, &ingest_args);
  CLI::App* cmd_complexity =
      app.add_subcommand("complexity", "per-year RCA, ECI and PCI scores");
  add_common(cmd_complexity, &complexity_args);
  CLI::App* cmd_proximity =
      app.add_subcommand("proximity", "product proximity, density and entry curves");
  add_common(cmd_proximity, &proximity_args);
  CLI::App* cmd_jumps = app.add_subcommand("jumps", "new-product detection and survival");
  add_common(cmd_jumps, &jumps_args);
  CLI::App* cmd_directions =
      app.add_subcommand("directions", "development direction vectors and statistics");
  add_common(cmd_directions, &directions_args);
  CLI::App* cmd_stages =
      app.add_subcommand("stages", "option-set correlation and stage classification");
  add_common(cmd_stages, &stages_args);
  CLI::App* cmd_regress = app.add_subcommand("regress", "regression tables and U-shape fits");
  add_common(cmd_regress, &regress_args);
  CLI::App* cmd_pipeline = app.add_subcommand("pipeline", "run every stage in order");
  add_common(cmd_pipeline, &pipeline_args);

  std::string report_dir;
  CLI::App* cmd_report = app.add_subcommand("report", "render a report from an artifact dir");
  cmd_report->add_option("dir", report_dir, "artifact directory with manifest.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_ingest->parsed()) ecomplex::run_ingest(make_config(ingest_args));
    if (cmd_complexity->parsed()) ecomplex::run_complexity(make_config(complexity_args));
    if (cmd_proximity->parsed()) ecomplex::run_proximity(make_config(proximity_args));
    if (cmd_jumps->parsed()) ecomplex::run_jumps(make_config(jumps_args));
    if (cmd_directions->parsed()) ecomplex::run_directions(make_config(directions_args));
    if (cmd_stages->parsed()) ecomplex::run_stages(make_config(stages_args));
    if (cmd_regress->parsed()) ecomplex::run_regress(make_config(regress_args));
    if (cmd_pipeline->parsed()) ecomplex::run_pipeline(make_config(pipeline_args));
    if (cmd_report->parsed()) std::cout << ecomplex::run_report(report_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
