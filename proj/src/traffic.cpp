#include "eonsim/traffic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace eonsim {

double TrafficConfig::arrival_rate() const {
  const double cores = static_cast<double>(cores_per_link);
  return normalization == LoadNormalization::kScaleByCores ? erlang * cores / mean_holding
                                                           : erlang / (cores * mean_holding);
}

void TrafficConfig::validate() const {
  if (!(erlang > 0.0) || !std::isfinite(erlang)) throw std::invalid_argument("erlang must be > 0");
  if (!(mean_holding > 0.0)) throw std::invalid_argument("mean_holding must be > 0");
  if (cores_per_link == 0) throw std::invalid_argument("cores_per_link must be > 0");
  if (bit_rate_weights.empty()) throw std::invalid_argument("bit_rate_weights is empty");
  for (auto [rate, weight] : bit_rate_weights) {
    if (rate <= 0 || !(weight > 0.0)) {
      throw std::invalid_argument("bit rates and their weights must be positive");
    }
  }
}

std::vector<Request> generate_episode(const TrafficConfig& config, std::size_t node_count) {
  config.validate();
  if (node_count < 2) throw std::invalid_argument("traffic needs at least two nodes");

  std::mt19937_64 rng(config.rng_seed);
  std::exponential_distribution<double> inter_arrival(config.arrival_rate());
  std::exponential_distribution<double> holding(1.0 / config.mean_holding);
  std::uniform_int_distribution<std::size_t> pick_source(0, node_count - 1);
  std::uniform_int_distribution<std::size_t> pick_destination(0, node_count - 2);

  std::vector<int> rates;
  std::vector<double> weights;
  for (auto [rate, weight] : config.bit_rate_weights) {
    rates.push_back(rate);
    weights.push_back(weight);
  }
  std::discrete_distribution<std::size_t> pick_rate(weights.begin(), weights.end());

  std::vector<Request> requests;
  requests.reserve(config.requests_per_episode);
  double clock = 0.0;
  for (std::size_t i = 0; i < config.requests_per_episode; ++i) {
    Request r;
    r.id = i;
    const double next = clock + inter_arrival(rng);
    // Keep arrivals strictly increasing even if a draw underflows to zero.
    clock = next > clock ? next : std::nextafter(clock, INFINITY);
    r.arrival_time = clock;
    r.source = pick_source(rng);
    r.destination = pick_destination(rng);
    if (r.destination >= r.source) ++r.destination;
    r.bit_rate_gbps = rates[pick_rate(rng)];
    do {
      r.holding_time = holding(rng);
    } while (!(r.holding_time > 0.0));
    requests.push_back(r);
  }
  return requests;
}

void EventQueue::push_arrival(double time, std::size_t request) {
  heap_.push({time, EventKind::kArrival, next_sequence_++, request});
}

void EventQueue::push_departure(double time, std::size_t request) {
  heap_.push({time, EventKind::kDeparture, next_sequence_++, request});
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

}  // namespace eonsim
