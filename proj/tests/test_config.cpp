#include <doctest.h>

#include <sstream>

#include "eonsim/config.hpp"

using namespace eonsim;

namespace {

Assignments read(const std::string& text) {
  std::istringstream in(text);
  return read_assignments(in, "test");
}

ExperimentConfig parse(const std::string& text) { return parse_config(read(text)); }

const AgentSettings& agent(const ExperimentConfig& c, Algorithm a) {
  for (const auto& s : c.algorithms) {
    if (s.algorithm == a) return s;
  }
  FAIL("algorithm missing");
  return c.algorithms.front();
}

}  // namespace

TEST_CASE("minimal config fills defaults") {
  const auto c = parse("erlang = 500\nalgorithms = spf_ff, ksp_ff\n");
  CHECK(c.traffic.erlang == 500);
  CHECK(c.topology == "nsfnet");
  CHECK(c.k == PathLimit{3});
  CHECK(c.episodes == 100);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(c.final_window == 10);
  CHECK(c.traffic.requests_per_episode == 2000);
  CHECK(c.traffic.mean_holding == 5);
  CHECK(c.traffic.cores_per_link == 4);
  CHECK(c.slots_per_core == 128);
  CHECK(c.controller.guard_band_slots == 1);
  REQUIRE(c.algorithms.size() == 2);
  CHECK(c.algorithms[0].algorithm == Algorithm::kSpfFf);
}

TEST_CASE("erlang750-qlearning preset") {
  const auto c = parse("preset = erlang750-qlearning\nalgorithms = qlearning\n");
  const auto& q = agent(c, Algorithm::kQLearning);
  CHECK(c.traffic.erlang == 750);
  CHECK(q.alpha == 0.01);
  CHECK(q.gamma == 0.95);
  CHECK(q.epsilon.start == 0.20);
  CHECK(q.epsilon.end == 0.05);
  CHECK(q.epsilon.mode == EpsilonSchedule::Mode::kLinear);
  CHECK(q.reward.routed_reward == 10);
  CHECK(q.reward.blocked_reward == -100);
}

TEST_CASE("erlang500-ucb preset") {
  const auto c = parse("preset = erlang500-ucb\nalgorithms = ucb\n");
  const auto& u = agent(c, Algorithm::kUcb);
  CHECK(u.epsilon.start == 0.20);
  CHECK(u.epsilon.mode == EpsilonSchedule::Mode::kConstant);
  CHECK(u.ucb_c == 2);
  CHECK(u.reward.routed_reward == 1);
  CHECK(u.reward.blocked_reward == -10);
}

TEST_CASE("every shipped preset parses with its algorithm") {
  const auto names = list_presets();
  CHECK(names.size() == 9);
  for (const auto& name : names) {
    const std::string alg = name.substr(name.find('-') + 1);
    CAPTURE(name);
    CHECK_NOTHROW(parse("preset = " + name + "\nalgorithms = " + alg + "\n"));
  }
}

TEST_CASE("later assignments override presets") {
  const auto c = parse("preset = erlang750-qlearning\nerlang = 900\nalgorithms = qlearning\n"
                       "qlearning.alpha = 0.5\n");
  CHECK(c.traffic.erlang == 900);
  CHECK(agent(c, Algorithm::kQLearning).alpha == 0.5);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("algorithms = spf_ff\n"), ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\n"), ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\nalgorithms = spf_ff\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\nalgorithms = spf_ff\nspf_ff.nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("erlang = lots\nalgorithms = spf_ff\n"), ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\nalgorithms = spf_ff\nseeds =\n"), ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\nalgorithms = spf_ff\nseeds = 1,x\n"), ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\nalgorithms = spf_ff, spf_ff\n"), ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\nalgorithms = dqn\n"), ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\nalgorithms = spf_ff\nk = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\nalgorithms = spf_ff\nepisodes = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\nalgorithms = spf_ff\nlink_sharing = maybe\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\nalgorithms = spf_ff\nbit_rate_weights = 25\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("erlang = 500\nalgorithms = qlearning\nqlearning.epsilon = 0.1\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse("preset = erlang500-ucb\nalgorithms = ucb\nucb.epsilon = 2\n"),
                  ConfigError);
  CHECK_THROWS_AS(read("preset = no-such-preset\n"), ConfigError);
  CHECK_THROWS_AS(read("preset = ../etc/passwd\n"), ConfigError);
  CHECK_THROWS_AS(read("just words\n"), ConfigError);
}

TEST_CASE("k accepts inf") {
  CHECK(parse("erlang = 1\nalgorithms = ksp_ff\nk = inf\n").k == std::nullopt);
}

TEST_CASE("canonical assignments round-trip") {
  const auto c = parse(
      "preset = erlang750-qlearning\npreset = erlang750-ucb\npreset = erlang750-egreedy\n"
      "algorithms = qlearning, ucb, egreedy, ksp_inf\nseeds = 3,9\nlink_sharing = directed\n"
      "bit_rate_weights = 25:1.5,100:2\nqlearning.congestion_scope = aggregate\n");
  const Assignments canon = to_assignments(c);
  const ExperimentConfig back = parse_config(canon);
  CHECK(to_assignments(back) == canon);
  CHECK(back.link_sharing == LinkSharing::kDirected);
  CHECK(back.seeds == std::vector<std::uint64_t>{3, 9});
  CHECK(agent(back, Algorithm::kQLearning).congestion_scope == CongestionScope::kAggregate);

  std::stringstream text;
  write_assignments(text, canon);
  CHECK(read_assignments(text, "again") == canon);
}

TEST_CASE("seed lists") {
  CHECK(parse_seed_list("1, 2,3") == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(parse_seed_list("").empty());
  CHECK_THROWS_AS(parse_seed_list("1,,2"), ConfigError);
  CHECK_THROWS_AS(parse_seed_list("-1"), ConfigError);
}
