// eonsim command-line front end.

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eonsim/config.hpp"
#include "eonsim/harness.hpp"
#include "eonsim/topology.hpp"

namespace {

using eonsim::Assignments;

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

// Command-line overrides are applied after the config file, in this order:
// --preset, --set, then the dedicated flags.
struct RunFlags {
  std::string config;
  std::vector<std::string> presets;
  std::vector<std::string> sets;
  std::string erlang;
  std::string algorithms;
  std::string k;
  std::string episodes;
  std::string seeds;
  std::string out = "results";
  bool save_tables = false;
};

Assignments gather(const RunFlags& f) {
  Assignments a = eonsim::read_assignments_file(f.config);
  for (const auto& p : f.presets) {
    const Assignments preset = eonsim::load_preset(p);
    a.insert(a.end(), preset.begin(), preset.end());
  }
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw eonsim::ConfigError("--set expects key=value, got '" + s + "'");
    }
    a.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) a.emplace_back(key, v);
  };
  put("erlang", f.erlang);
  put("algorithms", f.algorithms);
  put("k", f.k);
  put("episodes", f.episodes);
  put("seeds", f.seeds);
  return a;
}

int cmd_run(const RunFlags& f) {
  const eonsim::ExperimentConfig config = eonsim::parse_config(gather(f));
  eonsim::RunOptions options;
  options.out_dir = f.out;
  options.workers = eonsim::default_workers();
  options.save_tables = f.save_tables;
  eonsim::ExperimentResult result;
  const auto manifest = eonsim::run(config, options, &result);
  for (const auto& a : result.algorithms) {
    std::cout << eonsim::to_string(a.settings.algorithm) << " final_window_bp="
              << a.final_window_bp(config.final_window) << '\n';
  }
  std::cout << "wrote " << manifest.outputs.size() << " files to " << f.out << " in "
            << manifest.wall_clock_seconds << " s\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_path,
              const std::string& out) {
  const Assignments base = eonsim::read_assignments_file(config_path);
  std::ifstream grid_in(grid_path);
  if (!grid_in) throw eonsim::ConfigError("cannot open grid file '" + grid_path + "'");
  const eonsim::SweepGrid grid = eonsim::parse_sweep_grid(grid_in);
  const auto entries = eonsim::sweep(base, grid, out, eonsim::default_workers());
  std::size_t failed = 0;
  for (const auto& e : entries) {
    if (!e.error.empty()) {
      ++failed;
      std::cerr << e.run_name << ": " << e.error << '\n';
    }
  }
  std::cout << entries.size() << " runs, " << failed << " failed; summary in " << out
            << "/summary.csv\n";
  return failed == entries.size() && !entries.empty() ? kExitRuntime : 0;
}

int cmd_validate(const std::string& path) {
  const eonsim::Topology topo = eonsim::load_topology_file(path);
  const auto candidates = eonsim::build_candidate_paths(topo, 1);
  std::cout << "ok: " << topo.node_count() << " nodes, " << topo.link_count() << " links, "
            << candidates.pair_count() << " connected pairs\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Routing agents on a multi-core elastic optical network"};
  app.set_version_flag("--version", std::string(EONSIM_VERSION));
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", rf.config, "Config file")->required();
  run->add_option("--preset", rf.presets, "Apply a named preset (repeatable)");
  run->add_option("--set", rf.sets, "Override key=value (repeatable)");
  run->add_option("--erlang", rf.erlang, "Offered load in Erlang");
  run->add_option("--algorithm", rf.algorithms, "Comma-separated algorithm list");
  run->add_option("--k", rf.k, "Candidate paths per pair, or inf");
  run->add_option("--episodes", rf.episodes, "Episodes per seed");
  run->add_option("--seeds", rf.seeds, "Comma-separated seeds");
  run->add_option("--out", rf.out, "Output directory")->capture_default_str();
  run->add_flag("--save-tables", rf.save_tables, "Write learned tables per seed");

  std::string sweep_config, sweep_grid, sweep_out = "sweep";
  auto* sw = app.add_subcommand("sweep", "Run every combination of a hyperparameter grid");
  sw->add_option("--config", sweep_config, "Base config file")->required();
  sw->add_option("--grid", sweep_grid, "Grid file, lines 'key = v1 | v2'")->required();
  sw->add_option("--out", sweep_out, "Output directory")->capture_default_str();

  std::string topo_file;
  auto* topology = app.add_subcommand("topology", "Topology utilities");
  topology->require_subcommand(1);
  auto* validate = topology->add_subcommand("validate", "Check a topology file");
  validate->add_option("file", topo_file, "Topology file")->required();

  auto* presets = app.add_subcommand("presets", "List available presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(rf);
    if (*sw) return cmd_sweep(sweep_config, sweep_grid, sweep_out);
    if (*validate) return cmd_validate(topo_file);
    if (*presets) {
      for (const auto& name : eonsim::list_presets()) std::cout << name << '\n';
      return 0;
    }
  } catch (const eonsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const eonsim::TopologyError& e) {
    std::cerr << "topology error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
