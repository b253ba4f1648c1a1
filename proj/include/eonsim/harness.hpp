#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eonsim/config.hpp"
#include "eonsim/sim_engine.hpp"

namespace eonsim {

/// What a finished run recorded about itself.
struct RunManifest {
  Assignments config;
  std::vector<std::uint64_t> seeds;
  std::string version;
  double wall_clock_seconds = 0.0;
  std::vector<std::filesystem::path> outputs;
};

struct RunOptions {
  std::filesystem::path out_dir = "results";
  std::size_t workers = 1;
  bool save_tables = false;
};

/// `$EONSIM_WORKERS` if set and positive, else the hardware thread count.
std::size_t default_workers();

/// `episode,<algorithm>...` with the seed-mean BP per episode.
void write_results_csv(std::ostream& out, const ExperimentResult& result);

/// One row per (algorithm, seed, episode) with the raw counts.
void write_episodes_csv(std::ostream& out, const ExperimentConfig& config,
                        const ExperimentResult& result);

/// The manifest is itself a config file: metadata lives in comments and the
/// assignments reproduce the run.
void write_manifest(std::ostream& out, const RunManifest& manifest);

/// Writes `path` through a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Runs the experiment and writes results.csv, episodes.csv and manifest.conf
/// (plus tables/ when requested) into `options.out_dir`.
RunManifest run(const ExperimentConfig& config, const RunOptions& options,
                ExperimentResult* result_out = nullptr);

/// Override grid: each line `key = v1 | v2 | ...`; runs cover the cartesian
/// product, the first key varying slowest.
using SweepGrid = std::vector<std::pair<std::string, std::vector<std::string>>>;

SweepGrid parse_sweep_grid(std::istream& in);
std::vector<Assignments> expand_sweep_grid(const SweepGrid& grid);

struct SweepEntry {
  std::string run_name;
  Assignments overrides;
  std::optional<RunManifest> manifest;
  std::string error;
  /// (algorithm, final-window mean BP) in config order.
  std::vector<std::pair<std::string, double>> final_bp;
};

/// One run per grid combination under `out_dir/run_NNN`. A failing run is
/// recorded and does not stop the others. Writes `out_dir/summary.csv`
/// sorted by ascending final-window BP.
std::vector<SweepEntry> sweep(const Assignments& base, const SweepGrid& grid,
                              const std::filesystem::path& out_dir, std::size_t workers);

}  // namespace eonsim
