#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eonsim/grid.hpp"
#include "eonsim/topology.hpp"

namespace eonsim {

using Rng = std::mt19937_64;

enum class Algorithm { kEpsilonGreedy, kUcb, kQLearning, kSpfFf, kKspFf, kKspInf };

/// Names used in configs and CSV headers: egreedy, ucb, qlearning, spf_ff,
/// ksp_ff, ksp_inf.
std::string_view to_string(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);
bool is_learning(Algorithm algorithm);

struct RewardPolicy {
  double routed_reward = 1.0;
  double blocked_reward = -100.0;

  /// Requires routed_reward >= 0 > blocked_reward.
  void validate() const;
};

struct EpsilonSchedule {
  enum class Mode { kConstant, kLinear };

  double start = 0.05;
  double end = 0.05;
  Mode mode = Mode::kConstant;

  void validate() const;
};

/// Linear mode interpolates start -> end across [0, total_episodes - 1].
double epsilon_at(const EpsilonSchedule& schedule, std::size_t episode_index,
                  std::size_t total_episodes);

/// Ragged row-major table: one row per state, one column per candidate path.
template <typename T>
class ActionTable {
 public:
  ActionTable() = default;
  ActionTable(std::span<const std::size_t> row_sizes, T initial = T{}) {
    offsets_.reserve(row_sizes.size() + 1);
    offsets_.push_back(0);
    for (std::size_t n : row_sizes) offsets_.push_back(offsets_.back() + n);
    cells_.assign(offsets_.back(), initial);
  }

  std::size_t rows() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<T> row(std::size_t r) {
    return {cells_.data() + offsets_.at(r), offsets_.at(r + 1) - offsets_[r]};
  }
  std::span<const T> row(std::size_t r) const {
    return {cells_.data() + offsets_.at(r), offsets_.at(r + 1) - offsets_[r]};
  }
  std::span<const T> cells() const noexcept { return cells_; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<T> cells_;
};

/// Sample-mean value estimates and visit counts per (pair, path).
struct BanditState {
  explicit BanditState(std::span<const std::size_t> paths_per_pair);

  ActionTable<double> values;
  ActionTable<std::uint64_t> counts;
  std::vector<std::uint64_t> steps;  // selections made per pair, UCB's t
};

std::size_t egreedy_select(const BanditState& state, std::size_t pair, double epsilon, Rng& rng);

/// Exploit branch maximizes Q + c * sqrt(ln t / N); untried paths win
/// outright, lowest index first.
std::size_t ucb_select(const BanditState& state, std::size_t pair, double epsilon, double c,
                       Rng& rng);

/// N += 1, then Q += (reward - Q) / N.
void bandit_update(BanditState& state, std::size_t pair, std::size_t path, double reward);

/// Q over (pair, congestion level, path), zero-initialized.
struct QLearnState {
  QLearnState(std::span<const std::size_t> paths_per_pair, double alpha, double gamma);

  std::span<double> row(std::size_t pair, CongestionLevel level) {
    return values.row(pair * kCongestionLevelCount + static_cast<std::size_t>(level));
  }
  std::span<const double> row(std::size_t pair, CongestionLevel level) const {
    return values.row(pair * kCongestionLevelCount + static_cast<std::size_t>(level));
  }

  ActionTable<double> values;
  ActionTable<std::uint64_t> visits;
  double alpha;
  double gamma;
};

/// `levels[i]` is the congestion level path i is evaluated at.
std::size_t qlearn_select(const QLearnState& state, std::size_t pair,
                          std::span<const CongestionLevel> levels, double epsilon, Rng& rng);

void qlearn_update(QLearnState& state, std::size_t pair, CongestionLevel level_before,
                   std::size_t path, double reward, CongestionLevel level_after);

enum class BaselinePolicy { kSpfFf, kKspFf, kKspInf };

/// SPF-FF probes only the first candidate; KSP variants probe in order and
/// stop at the first success. `probe(path)` returns true once provisioned.
template <typename Probe>
std::optional<std::size_t> baseline_select(BaselinePolicy policy, std::span<const Path> candidates,
                                           Probe&& probe) {
  const std::size_t limit =
      policy == BaselinePolicy::kSpfFf ? std::min<std::size_t>(1, candidates.size())
                                       : candidates.size();
  for (std::size_t i = 0; i < limit; ++i) {
    if (probe(candidates[i])) return i;
  }
  return std::nullopt;
}

/// Whether Q-learning judges each path by its own congestion or every path
/// by the mean congestion of the pair's candidate set.
enum class CongestionScope { kPerPath, kAggregate };

struct AgentSettings {
  Algorithm algorithm = Algorithm::kKspFf;
  RewardPolicy reward;
  EpsilonSchedule epsilon;
  double alpha = 0.05;
  double gamma = 0.01;
  double ucb_c = 2.0;
  CongestionScope congestion_scope = CongestionScope::kPerPath;
  /// Optional checkpoint file loaded into a fresh agent.
  std::string warm_start;

  void validate() const;
};

/// What a learning agent sees for one request.
struct Observation {
  std::size_t pair = 0;
  std::span<const Path> candidates;
  const SpectrumGrid* grid = nullptr;
};

/// Path-selection policy that learns from provisioning rewards.
class LearningAgent {
 public:
  virtual ~LearningAgent() = default;

  virtual Algorithm algorithm() const = 0;
  void set_epsilon(double epsilon) { epsilon_ = epsilon; }
  double epsilon() const noexcept { return epsilon_; }

  virtual std::size_t choose(const Observation& observation, Rng& rng) = 0;
  /// Called after provisioning; `observation.grid` reflects the new state.
  virtual void learn(const Observation& observation, std::size_t path, double reward) = 0;

  /// Rows `sd_pair,level,path_index,Q,N`; level is `-` for bandits.
  virtual void write_checkpoint(std::ostream& out, const CandidatePaths& candidates,
                                const Topology& topology) const = 0;
  virtual void read_checkpoint(std::istream& in, const CandidatePaths& candidates,
                               const Topology& topology) = 0;

 protected:
  double epsilon_ = 0.0;
};

std::unique_ptr<LearningAgent> make_agent(const AgentSettings& settings,
                                          const CandidatePaths& candidates);

}  // namespace eonsim
