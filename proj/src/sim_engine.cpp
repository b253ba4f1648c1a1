#include "eonsim/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace eonsim {

namespace {

constexpr std::uint64_t kTrafficStream = 0;
constexpr std::uint64_t kAgentStream = 1;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

BaselinePolicy baseline_policy(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kSpfFf:
      return BaselinePolicy::kSpfFf;
    case Algorithm::kKspFf:
      return BaselinePolicy::kKspFf;
    case Algorithm::kKspInf:
      return BaselinePolicy::kKspInf;
    default:
      throw std::logic_error("not a baseline algorithm");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw std::invalid_argument("no algorithms configured");
  for (const auto& a : algorithms) a.validate();
  traffic.validate();
  if (episodes == 0) throw std::invalid_argument("episodes must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
  if (final_window == 0) throw std::invalid_argument("final_window must be >= 1");
  if (k && *k == 0) throw std::invalid_argument("k must be >= 1");
}

Scenario Scenario::build(const ExperimentConfig& config) {
  Topology topology =
      config.topology == "nsfnet" ? nsfnet_preset() : load_topology_file(config.topology);
  ModulationTable table = config.modulation_table == "default"
                              ? default_modulation_table()
                              : load_modulation_table_file(config.modulation_table);
  CandidatePaths k_paths = build_candidate_paths(topology, config.k);
  std::optional<CandidatePaths> all_paths;
  const bool needs_all =
      std::any_of(config.algorithms.begin(), config.algorithms.end(),
                  [](const AgentSettings& a) { return a.algorithm == Algorithm::kKspInf; });
  if (needs_all) {
    all_paths = config.k ? build_candidate_paths(topology, std::nullopt) : k_paths;
  }
  return Scenario{std::move(topology), RsaController(std::move(table), config.controller),
                  std::move(k_paths), std::move(all_paths)};
}

double reward_for(const ProvisionOutcome& outcome, const RewardPolicy& policy) {
  return is_routed(outcome) ? policy.routed_reward : policy.blocked_reward;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

SeedRun::SeedRun(const Scenario& scenario, const ExperimentConfig& config,
                 const AgentSettings& settings, std::uint64_t seed)
    : scenario_(scenario),
      config_(config),
      settings_(settings),
      seed_(seed),
      grid_(scenario.topology.directed_link_count(), config.traffic.cores_per_link,
            config.slots_per_core, config.link_sharing),
      agent_(is_learning(settings.algorithm) ? make_agent(settings, scenario.k_paths) : nullptr),
      agent_rng_(derive_seed(seed, kAgentStream, 0)) {
  if (agent_ && !settings_.warm_start.empty()) {
    std::ifstream in(settings_.warm_start);
    if (!in) throw std::invalid_argument("cannot open warm-start table '" + settings_.warm_start + "'");
    agent_->read_checkpoint(in, scenario_.k_paths, scenario_.topology);
  }
}

bool SeedRun::route(const Request& request, EpisodeStats& stats) {
  const std::size_t pair = scenario_.k_paths.pair_index(request.source, request.destination);
  ProvisionOutcome outcome = Blocked{BlockReason::kNoSpectrum};

  if (agent_) {
    const Observation obs{pair, scenario_.k_paths.paths(pair), &grid_};
    const std::size_t choice = agent_->choose(obs, agent_rng_);
    outcome = scenario_.controller.provision(grid_, request, obs.candidates[choice]);
    agent_->learn(obs, choice, reward_for(outcome, settings_.reward));
  } else {
    const CandidatePaths& table = settings_.algorithm == Algorithm::kKspInf
                                      ? *scenario_.all_paths
                                      : scenario_.k_paths;
    bool reach_failures_only = true;
    auto probe = [&](const Path& path) {
      outcome = scenario_.controller.provision(grid_, request, path);
      if (const auto* blocked = std::get_if<Blocked>(&outcome)) {
        reach_failures_only &= blocked->reason == BlockReason::kNoModulationReach;
        return false;
      }
      return true;
    };
    if (!baseline_select(baseline_policy(settings_.algorithm), table.paths(pair), probe)) {
      outcome = Blocked{reach_failures_only ? BlockReason::kNoModulationReach
                                            : BlockReason::kNoSpectrum};
    }
  }

  if (const auto* blocked = std::get_if<Blocked>(&outcome)) {
    ++stats.blocked;
    if (blocked->reason == BlockReason::kNoModulationReach) {
      ++stats.blocked_no_reach;
    } else {
      ++stats.blocked_no_spectrum;
    }
    return false;
  }
  return true;
}

EpisodeStats SeedRun::run_episode(std::size_t episode_index) {
  grid_.clear();
  if (agent_) agent_->set_epsilon(epsilon_at(settings_.epsilon, episode_index, config_.episodes));

  TrafficConfig traffic = config_.traffic;
  traffic.rng_seed = derive_seed(seed_, kTrafficStream, episode_index);
  const std::vector<Request> requests = generate_episode(traffic, scenario_.topology.node_count());

  EventQueue queue;
  for (std::size_t i = 0; i < requests.size(); ++i) queue.push_arrival(requests[i].arrival_time, i);

  EpisodeStats stats;
  stats.episode_index = episode_index;
  stats.total = requests.size();
  const EventCounts counts = run_events(
      queue, std::span<const Request>(requests),
      [&](std::size_t i) { return route(requests[i], stats); },
      [&](std::size_t i) { scenario_.controller.teardown(grid_, requests[i].id); });

  if (counts.departures != stats.routed() || !grid_.empty()) {
    throw GridError("episode ended with spectrum still allocated");
  }
  return stats;
}

double AlgorithmResult::final_window_bp(std::size_t window) const {
  if (mean_bp.empty()) return 0.0;
  const std::size_t n = std::min(window, mean_bp.size());
  return std::accumulate(mean_bp.end() - static_cast<std::ptrdiff_t>(n), mean_bp.end(), 0.0) /
         static_cast<double>(n);
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t workers,
                                bool capture_tables) {
  config.validate();
  const Scenario scenario = Scenario::build(config);

  ExperimentResult result;
  for (const auto& settings : config.algorithms) {
    AlgorithmResult r;
    r.settings = settings;
    r.per_seed.resize(config.seeds.size());
    if (capture_tables && is_learning(settings.algorithm)) r.tables.resize(config.seeds.size());
    result.algorithms.push_back(std::move(r));
  }

  const std::size_t seed_count = config.seeds.size();
  const std::size_t jobs = config.algorithms.size() * seed_count;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t a = job / seed_count;
      const std::size_t s = job % seed_count;
      try {
        SeedRun run(scenario, config, config.algorithms[a], config.seeds[s]);
        std::vector<EpisodeStats> series;
        series.reserve(config.episodes);
        for (std::size_t e = 0; e < config.episodes; ++e) series.push_back(run.run_episode(e));
        result.algorithms[a].per_seed[s] = std::move(series);
        if (!result.algorithms[a].tables.empty()) {
          std::ostringstream table;
          run.agent()->write_checkpoint(table, scenario.k_paths, scenario.topology);
          result.algorithms[a].tables[s] = table.str();
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t pool = std::clamp<std::size_t>(workers, 1, jobs);
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(pool);
    for (std::size_t i = 0; i < pool; ++i) threads.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& r : result.algorithms) {
    r.mean_bp.assign(config.episodes, 0.0);
    for (std::size_t e = 0; e < config.episodes; ++e) {
      double sum = 0.0;
      for (const auto& series : r.per_seed) sum += series[e].blocking_probability();
      r.mean_bp[e] = sum / static_cast<double>(seed_count);
    }
  }
  return result;
}

}  // namespace eonsim
