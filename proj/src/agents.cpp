#include "eonsim/agents.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace eonsim {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 6> kAlgorithmNames{{
    {Algorithm::kEpsilonGreedy, "egreedy"},
    {Algorithm::kUcb, "ucb"},
    {Algorithm::kQLearning, "qlearning"},
    {Algorithm::kSpfFf, "spf_ff"},
    {Algorithm::kKspFf, "ksp_ff"},
    {Algorithm::kKspInf, "ksp_inf"},
}};

// Exploration coin flip; drawn on every call so the stream advances
// identically whatever epsilon is.
std::optional<std::size_t> explore(std::size_t k, double epsilon, Rng& rng) {
  if (k == 0) throw std::invalid_argument("no candidate paths to choose from");
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < epsilon) return std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
  return std::nullopt;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string pair_label(const CandidatePaths& candidates, const Topology& topology,
                       std::size_t pair) {
  auto [s, d] = candidates.pair_endpoints(pair);
  return topology.name(s) + "-" + topology.name(d);
}

struct CheckpointRow {
  std::size_t pair = 0;
  std::optional<CongestionLevel> level;
  std::size_t path = 0;
  double value = 0.0;
  std::uint64_t count = 0;
};

std::vector<CheckpointRow> parse_checkpoint(std::istream& in, const CandidatePaths& candidates,
                                            const Topology& topology) {
  std::vector<CheckpointRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("sd_pair", 0) == 0 || line[0] == '#') continue;
    auto bad = [&](const std::string& why) {
      return std::invalid_argument("checkpoint line " + std::to_string(line_no) + ": " + why);
    };
    std::vector<std::string> fields;
    std::istringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != 5) throw bad("expected 5 fields");

    CheckpointRow row;
    bool matched = false;
    for (auto dash = fields[0].find('-'); dash != std::string::npos;
         dash = fields[0].find('-', dash + 1)) {
      auto s = topology.find_node(fields[0].substr(0, dash));
      auto d = topology.find_node(fields[0].substr(dash + 1));
      if (s && d && *s != *d) {
        row.pair = candidates.pair_index(*s, *d);
        matched = true;
        break;
      }
    }
    if (!matched) throw bad("unknown sd_pair '" + fields[0] + "'");
    if (fields[1] == "1") {
      row.level = CongestionLevel::kLevel1;
    } else if (fields[1] == "2") {
      row.level = CongestionLevel::kLevel2;
    } else if (fields[1] != "-") {
      throw bad("level must be 1, 2 or -");
    }
    try {
      row.path = std::stoul(fields[2]);
      row.value = std::stod(fields[3]);
      row.count = std::stoull(fields[4]);
    } catch (const std::exception&) {
      throw bad("malformed number");
    }
    if (row.path >= candidates.paths(row.pair).size()) throw bad("path_index out of range");
    rows.push_back(row);
  }
  return rows;
}

class BanditAgent : public LearningAgent {
 public:
  BanditAgent(const AgentSettings& settings, const CandidatePaths& candidates)
      : settings_(settings), counts_(candidates.path_counts()), state_(counts_) {}

  Algorithm algorithm() const override { return settings_.algorithm; }

  std::size_t choose(const Observation& obs, Rng& rng) override {
    return settings_.algorithm == Algorithm::kUcb
               ? ucb_select(state_, obs.pair, epsilon_, settings_.ucb_c, rng)
               : egreedy_select(state_, obs.pair, epsilon_, rng);
  }

  void learn(const Observation& obs, std::size_t path, double reward) override {
    bandit_update(state_, obs.pair, path, reward);
  }

  void write_checkpoint(std::ostream& out, const CandidatePaths& candidates,
                        const Topology& topology) const override {
    out << "sd_pair,level,path_index,Q,N\n";
    for (std::size_t pair = 0; pair < state_.values.rows(); ++pair) {
      const std::string label = pair_label(candidates, topology, pair);
      auto q = state_.values.row(pair);
      auto n = state_.counts.row(pair);
      for (std::size_t a = 0; a < q.size(); ++a) {
        out << label << ",-," << a << ',' << format_double(q[a]) << ',' << n[a] << '\n';
      }
    }
  }

  void read_checkpoint(std::istream& in, const CandidatePaths& candidates,
                       const Topology& topology) override {
    BanditState loaded(counts_);
    for (const auto& row : parse_checkpoint(in, candidates, topology)) {
      if (row.level) throw std::invalid_argument("bandit checkpoint rows must use level '-'");
      loaded.values.row(row.pair)[row.path] = row.value;
      loaded.counts.row(row.pair)[row.path] = row.count;
    }
    for (std::size_t pair = 0; pair < loaded.steps.size(); ++pair) {
      auto n = loaded.counts.row(pair);
      loaded.steps[pair] = std::accumulate(n.begin(), n.end(), std::uint64_t{0});
    }
    state_ = std::move(loaded);
  }

 private:
  AgentSettings settings_;
  std::vector<std::size_t> counts_;
  BanditState state_;
};

class QLearningAgent : public LearningAgent {
 public:
  QLearningAgent(const AgentSettings& settings, const CandidatePaths& candidates)
      : settings_(settings),
        counts_(candidates.path_counts()),
        state_(counts_, settings.alpha, settings.gamma) {}

  Algorithm algorithm() const override { return Algorithm::kQLearning; }

  std::size_t choose(const Observation& obs, Rng& rng) override {
    levels_before_ = observe(obs);
    return qlearn_select(state_, obs.pair, levels_before_, epsilon_, rng);
  }

  void learn(const Observation& obs, std::size_t path, double reward) override {
    const auto after = observe(obs);
    qlearn_update(state_, obs.pair, levels_before_.at(path), path, reward, after.at(path));
  }

  void write_checkpoint(std::ostream& out, const CandidatePaths& candidates,
                        const Topology& topology) const override {
    out << "sd_pair,level,path_index,Q,N\n";
    for (std::size_t pair = 0; pair < candidates.pair_count(); ++pair) {
      const std::string label = pair_label(candidates, topology, pair);
      for (auto level : {CongestionLevel::kLevel1, CongestionLevel::kLevel2}) {
        auto q = state_.row(pair, level);
        auto n = state_.visits.row(pair * kCongestionLevelCount + static_cast<std::size_t>(level));
        for (std::size_t a = 0; a < q.size(); ++a) {
          out << label << ',' << to_string(level) << ',' << a << ',' << format_double(q[a]) << ','
              << n[a] << '\n';
        }
      }
    }
  }

  void read_checkpoint(std::istream& in, const CandidatePaths& candidates,
                       const Topology& topology) override {
    QLearnState loaded(counts_, settings_.alpha, settings_.gamma);
    for (const auto& row : parse_checkpoint(in, candidates, topology)) {
      if (!row.level) throw std::invalid_argument("Q-learning checkpoint rows need a level");
      loaded.row(row.pair, *row.level)[row.path] = row.value;
      loaded.visits.row(row.pair * kCongestionLevelCount +
                        static_cast<std::size_t>(*row.level))[row.path] = row.count;
    }
    state_ = std::move(loaded);
  }

 private:
  std::vector<CongestionLevel> observe(const Observation& obs) const {
    std::vector<double> fractions;
    fractions.reserve(obs.candidates.size());
    for (const Path& p : obs.candidates) fractions.push_back(path_congestion(*obs.grid, p.hops));
    if (settings_.congestion_scope == CongestionScope::kAggregate && !fractions.empty()) {
      const double mean =
          std::accumulate(fractions.begin(), fractions.end(), 0.0) / static_cast<double>(fractions.size());
      std::fill(fractions.begin(), fractions.end(), mean);
    }
    std::vector<CongestionLevel> levels;
    levels.reserve(fractions.size());
    for (double f : fractions) levels.push_back(congestion_level(f));
    return levels;
  }

  AgentSettings settings_;
  std::vector<std::size_t> counts_;
  QLearnState state_;
  std::vector<CongestionLevel> levels_before_;
};

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  for (auto [a, name] : kAlgorithmNames) {
    if (a == algorithm) return name;
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto [a, n] : kAlgorithmNames) {
    if (n == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

bool is_learning(Algorithm algorithm) {
  return algorithm == Algorithm::kEpsilonGreedy || algorithm == Algorithm::kUcb ||
         algorithm == Algorithm::kQLearning;
}

void RewardPolicy::validate() const {
  if (!(routed_reward >= 0.0) || !(blocked_reward < 0.0)) {
    throw std::invalid_argument("rewards need routed_reward >= 0 > blocked_reward");
  }
}

void EpsilonSchedule::validate() const {
  if (!(start >= 0.0 && start <= 1.0) || !(end >= 0.0 && end <= 1.0)) {
    throw std::invalid_argument("epsilon values must lie in [0, 1]");
  }
}

double epsilon_at(const EpsilonSchedule& schedule, std::size_t episode_index,
                  std::size_t total_episodes) {
  if (schedule.mode == EpsilonSchedule::Mode::kConstant) return schedule.start;
  if (total_episodes == 0 || episode_index >= total_episodes) {
    throw std::out_of_range("episode index outside the schedule");
  }
  if (total_episodes == 1) return schedule.start;
  const double fraction =
      static_cast<double>(episode_index) / static_cast<double>(total_episodes - 1);
  return schedule.start + (schedule.end - schedule.start) * fraction;
}

BanditState::BanditState(std::span<const std::size_t> paths_per_pair)
    : values(paths_per_pair, 0.0), counts(paths_per_pair, 0), steps(paths_per_pair.size(), 0) {}

std::size_t egreedy_select(const BanditState& state, std::size_t pair, double epsilon, Rng& rng) {
  auto q = state.values.row(pair);
  if (auto random = explore(q.size(), epsilon, rng)) return *random;
  return argmax(q);
}

std::size_t ucb_select(const BanditState& state, std::size_t pair, double epsilon, double c,
                       Rng& rng) {
  auto q = state.values.row(pair);
  auto n = state.counts.row(pair);
  if (auto random = explore(q.size(), epsilon, rng)) return *random;
  for (std::size_t a = 0; a < n.size(); ++a) {
    if (n[a] == 0) return a;
  }
  const double log_t = std::log(static_cast<double>(state.steps[pair]));
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < q.size(); ++a) {
    const double score = q[a] + c * std::sqrt(log_t / static_cast<double>(n[a]));
    if (score > best_score) {
      best = a;
      best_score = score;
    }
  }
  return best;
}

void bandit_update(BanditState& state, std::size_t pair, std::size_t path, double reward) {
  auto q = state.values.row(pair);
  auto n = state.counts.row(pair);
  if (path >= q.size()) throw std::out_of_range("path index outside the candidate set");
  n[path] += 1;
  q[path] += (reward - q[path]) / static_cast<double>(n[path]);
  state.steps[pair] += 1;
}

QLearnState::QLearnState(std::span<const std::size_t> paths_per_pair, double alpha_, double gamma_)
    : alpha(alpha_), gamma(gamma_) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  std::vector<std::size_t> rows;
  rows.reserve(paths_per_pair.size() * kCongestionLevelCount);
  for (std::size_t n : paths_per_pair) {
    for (std::size_t l = 0; l < kCongestionLevelCount; ++l) rows.push_back(n);
  }
  values = ActionTable<double>(rows, 0.0);
  visits = ActionTable<std::uint64_t>(rows, 0);
}

std::size_t qlearn_select(const QLearnState& state, std::size_t pair,
                          std::span<const CongestionLevel> levels, double epsilon, Rng& rng) {
  const std::size_t k = state.row(pair, CongestionLevel::kLevel1).size();
  if (levels.size() != k) throw std::invalid_argument("one congestion level per candidate path");
  if (auto random = explore(k, epsilon, rng)) return *random;
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < k; ++a) {
    const double value = state.row(pair, levels[a])[a];
    if (value > best_value) {
      best = a;
      best_value = value;
    }
  }
  return best;
}

void qlearn_update(QLearnState& state, std::size_t pair, CongestionLevel level_before,
                   std::size_t path, double reward, CongestionLevel level_after) {
  auto next = state.row(pair, level_after);
  const double future = *std::max_element(next.begin(), next.end());
  auto current = state.row(pair, level_before);
  if (path >= current.size()) throw std::out_of_range("path index outside the candidate set");
  current[path] = (1.0 - state.alpha) * current[path] + state.alpha * (reward + state.gamma * future);
  state.visits.row(pair * kCongestionLevelCount + static_cast<std::size_t>(level_before))[path] += 1;
}

void AgentSettings::validate() const {
  if (!is_learning(algorithm)) return;
  reward.validate();
  epsilon.validate();
  if (algorithm == Algorithm::kQLearning) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  if (algorithm == Algorithm::kUcb && !(ucb_c >= 0.0)) {
    throw std::invalid_argument("ucb c must be non-negative");
  }
}

std::unique_ptr<LearningAgent> make_agent(const AgentSettings& settings,
                                          const CandidatePaths& candidates) {
  settings.validate();
  switch (settings.algorithm) {
    case Algorithm::kEpsilonGreedy:
    case Algorithm::kUcb:
      return std::make_unique<BanditAgent>(settings, candidates);
    case Algorithm::kQLearning:
      return std::make_unique<QLearningAgent>(settings, candidates);
    default:
      throw std::invalid_argument(std::string(to_string(settings.algorithm)) +
                                  " is not a learning algorithm");
  }
}

}  // namespace eonsim
