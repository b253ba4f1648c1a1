#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <span>
#include <vector>

#include "eonsim/topology.hpp"

namespace eonsim {

using RequestId = std::uint64_t;

struct Request {
  RequestId id = 0;
  NodeIndex source = 0;
  NodeIndex destination = 0;
  int bit_rate_gbps = 0;
  double arrival_time = 0.0;
  double holding_time = 0.0;

  friend bool operator==(const Request&, const Request&) = default;
};

/// How the Erlang load maps onto an arrival rate.
enum class LoadNormalization {
  kScaleByCores,   // lambda = erlang * cores / mean_holding
  kDivideByCores,  // lambda = erlang / (cores * mean_holding)
};

struct TrafficConfig {
  double erlang = 0.0;
  double mean_holding = 5.0;
  std::size_t cores_per_link = 4;
  std::size_t requests_per_episode = 2000;
  std::map<int, double> bit_rate_weights{{25, 3.0}, {50, 5.0}, {100, 2.0}};
  std::uint64_t rng_seed = 0;
  LoadNormalization normalization = LoadNormalization::kScaleByCores;

  double arrival_rate() const;
  /// Throws std::invalid_argument.
  void validate() const;
};

/// Poisson arrivals, exponential holding times, uniform ordered pairs and
/// weighted bit rates. A pure function of (config, node_count).
std::vector<Request> generate_episode(const TrafficConfig& config, std::size_t node_count);

enum class EventKind : std::uint8_t { kDeparture = 0, kArrival = 1 };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::kArrival;
  std::uint64_t sequence = 0;
  std::size_t request = 0;  // index into the episode's request list
};

/// Min-heap on (time, kind, sequence): departures win ties against
/// arrivals; equal events pop in insertion order.
class EventQueue {
 public:
  void push_arrival(double time, std::size_t request);
  void push_departure(double time, std::size_t request);

  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }
  Event pop();

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.kind != b.kind) return a.kind > b.kind;
      return a.sequence > b.sequence;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_sequence_ = 0;
};

struct EventCounts {
  std::size_t arrivals = 0;
  std::size_t departures = 0;
};

/// Drains `queue`. `on_arrival(request_index)` returns true when the
/// request was routed, which schedules its departure after the holding time.
template <typename OnArrival, typename OnDeparture>
EventCounts run_events(EventQueue& queue, std::span<const Request> requests, OnArrival&& on_arrival,
                       OnDeparture&& on_departure) {
  EventCounts counts;
  while (!queue.empty()) {
    const Event event = queue.pop();
    if (event.kind == EventKind::kArrival) {
      ++counts.arrivals;
      if (std::invoke(on_arrival, event.request)) {
        const Request& r = requests[event.request];
        queue.push_departure(r.arrival_time + r.holding_time, event.request);
      }
    } else {
      ++counts.departures;
      std::invoke(on_departure, event.request);
    }
  }
  return counts;
}

}  // namespace eonsim
