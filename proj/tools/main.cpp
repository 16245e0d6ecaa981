#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "leofl/config.hpp"
#include "leofl/rng.hpp"
#include "leofl/sim.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "config file (defaults used when omitted)");
  cmd->add_option("--set", opts.overrides,
                  "override a config entry, e.g. --set trainer.epochs=15 (repeatable)");
  cmd->add_option("--out", opts.out_path, "output file (stdout when omitted)");
}

leofl::RunConfig load(const CommonOpts& opts) {
  leofl::RunConfig cfg;
  if (!opts.config_path.empty()) cfg = leofl::load_config_file(opts.config_path);
  for (const std::string& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw leofl::ConfigError("--set expects key=value, got '" + kv + "'");
    leofl::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  leofl::validate_config(cfg);
  return cfg;
}

void emit(const CommonOpts& opts, const std::string& text) {
  if (opts.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opts.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + opts.out_path + "'");
  out << text;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) seeds.push_back(std::stoull(item));
  if (seeds.empty()) throw std::runtime_error("--seeds: empty list");
  return seeds;
}

std::vector<leofl::StrategyKind> parse_strategy_list(const std::string& csv) {
  std::vector<leofl::StrategyKind> kinds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) kinds.push_back(leofl::parse_strategy(item));
  if (kinds.empty()) throw std::runtime_error("--strategies: empty list");
  return kinds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous federated learning over a LEO constellation"};
  app.require_subcommand(1);

  CommonOpts windows_opts, data_opts, sim_opts, sweep_opts;
  std::string strategies_csv = "fedgsm,fedbuff,fedsat,fedasync,fedavg";
  std::string seeds_csv = "1,2,3,4,5";
  double target_acc = 0.5;

  CLI::App* windows_cmd =
      app.add_subcommand("windows", "export the contact window schedule as CSV");
  add_common(windows_cmd, windows_opts);

  CLI::App* data_cmd = app.add_subcommand("gen-data", "export the generated dataset as CSV");
  add_common(data_cmd, data_opts);

  CLI::App* sim_cmd = app.add_subcommand("simulate", "run one experiment, emit the metrics CSV");
  add_common(sim_cmd, sim_opts);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run a strategy/seed grid, emit a summary CSV");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--strategies", strategies_csv, "comma-separated strategy list");
  sweep_cmd->add_option("--seeds", seeds_csv, "comma-separated seed list");
  sweep_cmd->add_option("--target-acc", target_acc, "accuracy level for time-to-target");

  CLI11_PARSE(app, argc, argv);

  try {
    if (windows_cmd->parsed()) {
      const leofl::RunConfig cfg = load(windows_opts);
      const auto constellation = leofl::build_constellation(leofl::make_constellation_spec(cfg));
      const auto windows =
          leofl::contact_windows(constellation, leofl::make_ground_station(cfg), 0.0,
                                 cfg.sim.duration_s, cfg.sim.coarse_step_s, cfg.sim.refine_tol_s);
      std::ostringstream out;
      leofl::write_windows_csv(out, windows);
      emit(windows_opts, out.str());
    } else if (data_cmd->parsed()) {
      const leofl::RunConfig cfg = load(data_opts);
      const leofl::Dataset ds =
          leofl::gen_blobs(cfg.data.n_samples, cfg.data.classes, cfg.data.dim, cfg.data.spread,
                           leofl::stream_seed(cfg.seed, "data"));
      std::ostringstream out;
      leofl::write_dataset_csv(out, ds);
      emit(data_opts, out.str());
    } else if (sim_cmd->parsed()) {
      const leofl::RunConfig cfg = load(sim_opts);
      const leofl::SimResult result = leofl::run_simulation(cfg);
      std::ostringstream out;
      leofl::write_metrics_csv(out, result.rows);
      emit(sim_opts, out.str());
    } else if (sweep_cmd->parsed()) {
      const leofl::RunConfig cfg = load(sweep_opts);
      std::vector<std::string> cell_errors;
      const auto table = leofl::compare_sweep(cfg, parse_strategy_list(strategies_csv),
                                              parse_seed_list(seeds_csv), target_acc, &cell_errors);
      for (const std::string& e : cell_errors) std::cerr << "note: run failed: " << e << '\n';
      std::ostringstream out;
      leofl::write_sweep_csv(out, table);
      emit(sweep_opts, out.str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
