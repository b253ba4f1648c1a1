#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eonsim/agents.hpp"
#include "eonsim/grid.hpp"
#include "eonsim/rsa_controller.hpp"
#include "eonsim/topology.hpp"
#include "eonsim/traffic.hpp"

namespace eonsim {

struct ExperimentConfig {
  /// "nsfnet" or a topology file path.
  std::string topology = "nsfnet";
  /// "default" or a modulation table file path.
  std::string modulation_table = "default";
  PathLimit k = 3;
  std::vector<AgentSettings> algorithms;
  TrafficConfig traffic;
  std::size_t slots_per_core = 128;
  LinkSharing link_sharing = LinkSharing::kBidirectional;
  ControllerOptions controller;
  std::size_t episodes = 100;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  std::size_t final_window = 10;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct EpisodeStats {
  std::size_t episode_index = 0;
  std::size_t total = 0;
  std::size_t blocked = 0;
  std::size_t blocked_no_reach = 0;
  std::size_t blocked_no_spectrum = 0;

  std::size_t routed() const noexcept { return total - blocked; }
  double blocking_probability() const noexcept {
    return total == 0 ? 0.0 : static_cast<double>(blocked) / static_cast<double>(total);
  }
};

/// Resolved, immutable inputs shared by every run of an experiment.
struct Scenario {
  Topology topology;
  RsaController controller;
  CandidatePaths k_paths;
  /// Filled only when some algorithm needs every simple path.
  std::optional<CandidatePaths> all_paths;

  static Scenario build(const ExperimentConfig& config);
};

double reward_for(const ProvisionOutcome& outcome, const RewardPolicy& policy);

/// Seed for an independent random stream, mixed with splitmix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// State carried across the episodes of one (algorithm, seed) run.
class SeedRun {
 public:
  SeedRun(const Scenario& scenario, const ExperimentConfig& config, const AgentSettings& settings,
          std::uint64_t seed);

  /// Empties the grid, replays one episode of traffic and drains departures.
  EpisodeStats run_episode(std::size_t episode_index);

  const SpectrumGrid& grid() const noexcept { return grid_; }
  LearningAgent* agent() noexcept { return agent_.get(); }

 private:
  bool route(const Request& request, EpisodeStats& stats);

  const Scenario& scenario_;
  const ExperimentConfig& config_;
  AgentSettings settings_;
  std::uint64_t seed_;
  SpectrumGrid grid_;
  std::unique_ptr<LearningAgent> agent_;
  Rng agent_rng_;
};

struct AlgorithmResult {
  AgentSettings settings;
  std::vector<std::vector<EpisodeStats>> per_seed;  // [seed][episode]
  std::vector<double> mean_bp;                      // across seeds, per episode
  std::vector<std::string> tables;                  // per-seed checkpoints, if captured

  /// Mean BP over the last `window` episodes.
  double final_window_bp(std::size_t window) const;
};

struct ExperimentResult {
  std::vector<AlgorithmResult> algorithms;  // in config order
};

/// Runs every (algorithm, seed) pair on up to `workers` threads. The result
/// does not depend on `workers`.
/// `capture_tables` keeps each learning agent's final checkpoint text.
ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t workers = 1,
                                bool capture_tables = false);

}  // namespace eonsim
