#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "eonsim/traffic.hpp"

using namespace eonsim;

namespace {

TrafficConfig config(double erlang, std::size_t n, std::uint64_t seed) {
  TrafficConfig c;
  c.erlang = erlang;
  c.requests_per_episode = n;
  c.rng_seed = seed;
  return c;
}

}  // namespace

TEST_CASE("arrival rate scales with cores") {
  TrafficConfig c = config(1000, 10, 1);
  CHECK(c.arrival_rate() == doctest::Approx(800.0));
  c.normalization = LoadNormalization::kDivideByCores;
  CHECK(c.arrival_rate() == doctest::Approx(50.0));
}

TEST_CASE("mean inter-arrival at erlang 1000 is 1.25e-3") {
  const auto reqs = generate_episode(config(1000, 200000, 5), 14);
  const double mean = reqs.back().arrival_time / static_cast<double>(reqs.size());
  // Standard error of the mean is 1.25e-3 / sqrt(2e5), about 2.8e-6.
  CHECK(std::abs(mean - 1.25e-3) < 2e-5);
  double holding = 0;
  for (const auto& r : reqs) holding += r.holding_time;
  CHECK(holding / static_cast<double>(reqs.size()) == doctest::Approx(5.0).epsilon(0.02));
}

TEST_CASE("bit-rate frequencies follow 3:5:2") {
  const auto reqs = generate_episode(config(500, 100000, 9), 14);
  std::map<int, double> freq;
  for (const auto& r : reqs) freq[r.bit_rate_gbps] += 1.0 / static_cast<double>(reqs.size());
  CHECK(freq.size() == 3);
  CHECK(std::abs(freq[25] - 0.3) < 0.01);
  CHECK(std::abs(freq[50] - 0.5) < 0.01);
  CHECK(std::abs(freq[100] - 0.2) < 0.01);
}

TEST_CASE("endpoints are distinct and uniform over ordered pairs") {
  const std::size_t n = 5;
  const auto reqs = generate_episode(config(500, 100000, 2), n);
  std::vector<double> counts(n * n, 0.0);
  for (const auto& r : reqs) {
    REQUIRE(r.source != r.destination);
    REQUIRE(r.source < n);
    REQUIRE(r.destination < n);
    counts[r.source * n + r.destination] += 1;
  }
  const double expected = static_cast<double>(reqs.size()) / (n * (n - 1));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t d = 0; d < n; ++d) {
      if (s != d) CHECK(std::abs(counts[s * n + d] - expected) < 0.05 * expected);
    }
  }
}

TEST_CASE("episodes are deterministic per seed and ordered in time") {
  const auto a = generate_episode(config(750, 2000, 42), 14);
  const auto b = generate_episode(config(750, 2000, 42), 14);
  const auto c = generate_episode(config(750, 2000, 43), 14);
  CHECK(a == b);
  CHECK(a != c);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == i);
    if (i) CHECK(a[i].arrival_time >= a[i - 1].arrival_time);
    CHECK(a[i].holding_time > 0);
  }
}

TEST_CASE("traffic config validation") {
  CHECK_THROWS(config(0, 10, 1).validate());
  TrafficConfig c = config(10, 10, 1);
  c.mean_holding = 0;
  CHECK_THROWS(c.validate());
  c = config(10, 10, 1);
  c.bit_rate_weights = {};
  CHECK_THROWS(c.validate());
  c = config(10, 10, 1);
  c.bit_rate_weights = {{25, -1.0}};
  CHECK_THROWS(c.validate());
  c = config(10, 10, 1);
  c.cores_per_link = 0;
  CHECK_THROWS(c.validate());
  CHECK_THROWS(generate_episode(config(10, 10, 1), 1));
}

TEST_CASE("event queue orders by time then departures first") {
  EventQueue q;
  q.push_arrival(2.0, 0);
  q.push_departure(2.0, 1);
  q.push_arrival(1.0, 2);
  q.push_arrival(2.0, 3);
  CHECK(q.pop().request == 2);
  Event e = q.pop();
  CHECK(e.kind == EventKind::kDeparture);
  CHECK(e.request == 1);
  CHECK(q.pop().request == 0);
  CHECK(q.pop().request == 3);
  CHECK(q.empty());
}

TEST_CASE("run_events with no requests completes at once") {
  EventQueue q;
  const std::vector<Request> none;
  const auto counts = run_events(
      q, none, [](std::size_t) { return true; }, [](std::size_t) {});
  CHECK(counts.arrivals == 0);
  CHECK(counts.departures == 0);
}

TEST_CASE("a routed request gets exactly one departure after it") {
  std::vector<Request> reqs(1);
  reqs[0].arrival_time = 1.0;
  reqs[0].holding_time = 2.5;
  EventQueue q;
  q.push_arrival(1.0, 0);
  std::vector<std::pair<char, double>> log;
  double now = 0;
  const auto counts = run_events(
      q, reqs,
      [&](std::size_t) {
        log.emplace_back('a', now);
        return true;
      },
      [&](std::size_t) { log.emplace_back('d', now); });
  CHECK(counts.arrivals == 1);
  CHECK(counts.departures == 1);
  REQUIRE(log.size() == 2);
  CHECK(log[0].first == 'a');
  CHECK(log[1].first == 'd');
}

TEST_CASE("departures match routed arrivals over an episode") {
  const auto reqs = generate_episode(config(750, 2000, 8), 14);
  EventQueue q;
  for (std::size_t i = 0; i < reqs.size(); ++i) q.push_arrival(reqs[i].arrival_time, i);
  std::size_t routed = 0, live = 0, max_live = 0;
  const auto counts = run_events(
      q, reqs,
      [&](std::size_t i) {
        if (i % 3 == 0) return false;
        ++routed;
        max_live = std::max(max_live, ++live);
        return true;
      },
      [&](std::size_t) { --live; });
  CHECK(counts.arrivals == 2000);
  CHECK(counts.departures == routed);
  CHECK(live == 0);
  CHECK(max_live > 1);
}
