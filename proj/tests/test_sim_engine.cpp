#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "eonsim/config.hpp"
#include "eonsim/sim_engine.hpp"

using namespace eonsim;

namespace {

ExperimentConfig small(const std::string& extra) {
  std::istringstream in("erlang = 750\nepisodes = 3\nseeds = 1,2\nrequests_per_episode = 400\n" +
                        extra);
  return parse_config(read_assignments(in, "test"));
}

bool same(const std::vector<EpisodeStats>& a, const std::vector<EpisodeStats>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].episode_index != b[i].episode_index || a[i].total != b[i].total ||
        a[i].blocked != b[i].blocked || a[i].blocked_no_reach != b[i].blocked_no_reach ||
        a[i].blocked_no_spectrum != b[i].blocked_no_spectrum) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("blocking probability is a ratio") {
  EpisodeStats s;
  s.total = 2000;
  s.blocked = 100;
  CHECK(s.blocking_probability() == 0.05);
  CHECK(s.routed() == 1900);
  CHECK(EpisodeStats{}.blocking_probability() == 0.0);
}

TEST_CASE("rewards follow the policy") {
  const ProvisionOutcome routed = Routed{};
  const ProvisionOutcome blocked = Blocked{};
  CHECK(reward_for(routed, {1, -100}) == 1);
  CHECK(reward_for(blocked, {1, -100}) == -100);
  CHECK(reward_for(routed, {0, -10}) == 0);
}

TEST_CASE("derived seeds separate streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed : {1, 2}) {
    for (std::uint64_t stream : {0, 1}) {
      for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(seed, stream, i));
    }
  }
  CHECK(seen.size() == 200);
  CHECK(derive_seed(5, 0, 3) == derive_seed(5, 0, 3));
}

TEST_CASE("a grid with no slots blocks everything") {
  const auto c = small("algorithms = ksp_ff, qlearning\nslots_per_core = 0\n"
                       "preset = erlang750-qlearning\n");
  const auto r = run_experiment(c);
  for (const auto& a : r.algorithms) {
    for (double bp : a.mean_bp) CHECK(bp == 1.0);
  }
}

TEST_CASE("a single request on an empty network is routed") {
  const auto c = small("algorithms = spf_ff\nrequests_per_episode = 1\nepisodes = 1\n");
  const auto r = run_experiment(c);
  CHECK(r.algorithms[0].mean_bp[0] == 0.0);
  CHECK(r.algorithms[0].per_seed[0][0].total == 1);
}

TEST_CASE("episode accounting and drained grid") {
  const auto c = small("algorithms = egreedy, ucb, qlearning, spf_ff, ksp_ff, ksp_inf\n"
                       "preset = erlang750-qlearning\npreset = erlang750-ucb\n"
                       "preset = erlang750-egreedy\nerlang = 1500\n");
  const Scenario scenario = Scenario::build(c);
  for (const auto& settings : c.algorithms) {
    SeedRun run(scenario, c, settings, 11);
    for (std::size_t e = 0; e < c.episodes; ++e) {
      const EpisodeStats s = run.run_episode(e);
      CHECK(s.total == 400);
      CHECK(s.routed() + s.blocked == s.total);
      CHECK(s.blocked_no_reach + s.blocked_no_spectrum == s.blocked);
      CHECK(run.grid().empty());
    }
  }
}

TEST_CASE("identical seeds give identical series") {
  const auto c = small("algorithms = qlearning, ksp_ff\npreset = erlang750-qlearning\n"
                       "seeds = 7,7\n");
  const auto r = run_experiment(c);
  for (const auto& a : r.algorithms) CHECK(same(a.per_seed[0], a.per_seed[1]));
}

TEST_CASE("spf_ff equals ksp_ff with k = 1") {
  const auto spf = run_experiment(small("algorithms = spf_ff\nk = 3\n"));
  const auto ksp = run_experiment(small("algorithms = ksp_ff\nk = 1\n"));
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(same(spf.algorithms[0].per_seed[s], ksp.algorithms[0].per_seed[s]));
  }
}

TEST_CASE("results do not depend on the worker count") {
  const auto c = small("algorithms = qlearning, egreedy, ksp_ff\npreset = erlang750-qlearning\n"
                       "preset = erlang750-egreedy\nseeds = 1,2,3\n");
  const auto one = run_experiment(c, 1, true);
  const auto four = run_experiment(c, 4, true);
  for (std::size_t a = 0; a < c.algorithms.size(); ++a) {
    CHECK(one.algorithms[a].mean_bp == four.algorithms[a].mean_bp);
    CHECK(one.algorithms[a].tables == four.algorithms[a].tables);
    for (std::size_t s = 0; s < 3; ++s) {
      CHECK(same(one.algorithms[a].per_seed[s], four.algorithms[a].per_seed[s]));
    }
  }
}

TEST_CASE("learning persists across episodes within a seed") {
  const auto c = small("algorithms = qlearning\npreset = erlang750-qlearning\n");
  const Scenario scenario = Scenario::build(c);
  SeedRun run(scenario, c, c.algorithms[0], 1);
  auto snapshot = [&] {
    std::ostringstream out;
    run.agent()->write_checkpoint(out, scenario.k_paths, scenario.topology);
    return out.str();
  };
  run.run_episode(0);
  const std::string after_one = snapshot();
  run.run_episode(1);
  CHECK(snapshot() != after_one);

  SeedRun fresh(scenario, c, c.algorithms[0], 1);
  fresh.run_episode(0);
  std::ostringstream out;
  fresh.agent()->write_checkpoint(out, scenario.k_paths, scenario.topology);
  CHECK(out.str() == after_one);
}

TEST_CASE("stateless baselines show no learning trend") {
  const auto c = small("algorithms = spf_ff\nepisodes = 20\nseeds = 1\nerlang = 500\n");
  const auto r = run_experiment(c);
  const auto& bp = r.algorithms[0].mean_bp;
  double first = 0, last = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    first += bp[i];
    last += bp[10 + i];
  }
  // Halves differ only by traffic noise; no systematic drop.
  CHECK(std::abs(first - last) / 10 < 0.05);
}

TEST_CASE("final window mean") {
  AlgorithmResult r;
  r.mean_bp = {0.9, 0.8, 0.2, 0.4};
  CHECK(r.final_window_bp(2) == doctest::Approx(0.3));
  CHECK(r.final_window_bp(10) == doctest::Approx(0.575));
}

TEST_CASE("warm start loads a saved table") {
  const auto c = small("algorithms = qlearning\npreset = erlang750-qlearning\nseeds = 1\n");
  const auto first = run_experiment(c, 1, true);
  const auto path = std::filesystem::temp_directory_path() / "eonsim_warm_start_test.csv";
  {
    std::ofstream out(path);
    out << first.algorithms[0].tables[0];
  }
  auto warm = c;
  warm.algorithms[0].warm_start = path.string();
  const Scenario scenario = Scenario::build(warm);
  SeedRun run(scenario, warm, warm.algorithms[0], 99);
  std::ostringstream out;
  run.agent()->write_checkpoint(out, scenario.k_paths, scenario.topology);
  CHECK(out.str() == first.algorithms[0].tables[0]);
  std::filesystem::remove(path);
}
