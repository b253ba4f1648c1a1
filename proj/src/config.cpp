#include "eonsim/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace eonsim {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  for (std::string part; std::getline(ss, part, sep);) out.push_back(trim(part));
  return out;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

const std::set<std::string>& global_keys() {
  static const std::set<std::string> keys{
      "topology",       "modulation_table",  "k",
      "erlang",         "mean_holding",      "cores_per_link",
      "slots_per_core", "requests_per_episode", "bit_rate_weights",
      "load_normalization", "link_sharing",  "guard_band_slots",
      "modulation_policy", "episodes",       "seeds",
      "final_window",   "algorithms",
  };
  return keys;
}

const std::set<std::string>& algorithm_keys() {
  static const std::set<std::string> keys{
      "epsilon",        "epsilon_start", "epsilon_end", "epsilon_mode", "routed_reward",
      "blocked_reward", "alpha",         "gamma",       "c",            "congestion_scope",
      "warm_start",
  };
  return keys;
}

class Resolver {
 public:
  explicit Resolver(const Assignments& assignments) {
    for (const auto& [key, value] : assignments) {
      check_key(key);
      values_[key] = value;
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& text(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
  }

  double number(const std::string& key) const {
    const std::string& v = text(key);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
    }
    return out;
  }

  std::size_t count(const std::string& key) const {
    const std::string& v = text(key);
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw ConfigError("key '" + key + "' expects a non-negative integer, got '" + v + "'");
    }
    return out;
  }

  template <typename T>
  T number_or(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    if constexpr (std::is_floating_point_v<T>) {
      return number(key);
    } else {
      return static_cast<T>(count(key));
    }
  }

 private:
  static void check_key(const std::string& key) {
    if (global_keys().count(key)) return;
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
      const std::string alg = key.substr(0, dot);
      const std::string param = key.substr(dot + 1);
      bool known_alg = true;
      try {
        parse_algorithm(alg);
      } catch (const std::invalid_argument&) {
        known_alg = false;
      }
      if (known_alg && algorithm_keys().count(param)) return;
    }
    throw ConfigError("unknown config key '" + key + "'");
  }

  std::map<std::string, std::string> values_;
};

template <typename Enum, std::size_t N>
Enum parse_choice(const std::string& key, const std::string& value,
                  const std::array<std::pair<Enum, const char*>, N>& choices) {
  for (auto [e, name] : choices) {
    if (value == name) return e;
  }
  std::string allowed;
  for (auto [e, name] : choices) allowed += std::string(allowed.empty() ? "" : ", ") + name;
  throw ConfigError("key '" + key + "' must be one of: " + allowed);
}

template <typename Enum, std::size_t N>
std::string choice_name(Enum e, const std::array<std::pair<Enum, const char*>, N>& choices) {
  for (auto [c, name] : choices) {
    if (c == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<LoadNormalization, const char*>, 2> kNormalizations{{
    {LoadNormalization::kScaleByCores, "scale_by_cores"},
    {LoadNormalization::kDivideByCores, "divide_by_cores"},
}};
constexpr std::array<std::pair<LinkSharing, const char*>, 2> kSharing{{
    {LinkSharing::kBidirectional, "bidirectional"},
    {LinkSharing::kDirected, "directed"},
}};
constexpr std::array<std::pair<ModulationPolicy, const char*>, 2> kModulationPolicies{{
    {ModulationPolicy::kTryAll, "try_all"},
    {ModulationPolicy::kBestOnly, "best_only"},
}};
constexpr std::array<std::pair<EpsilonSchedule::Mode, const char*>, 2> kEpsilonModes{{
    {EpsilonSchedule::Mode::kConstant, "constant"},
    {EpsilonSchedule::Mode::kLinear, "linear"},
}};
constexpr std::array<std::pair<CongestionScope, const char*>, 2> kScopes{{
    {CongestionScope::kPerPath, "per_path"},
    {CongestionScope::kAggregate, "aggregate"},
}};

AgentSettings resolve_agent(const Resolver& r, Algorithm algorithm) {
  AgentSettings s;
  s.algorithm = algorithm;
  if (!is_learning(algorithm)) return s;
  const std::string p = std::string(to_string(algorithm)) + ".";

  if (r.has(p + "epsilon")) {
    s.epsilon.start = s.epsilon.end = r.number(p + "epsilon");
  } else {
    s.epsilon.start = r.number(p + "epsilon_start");
    s.epsilon.end = s.epsilon.start;
  }
  if (r.has(p + "epsilon_end")) s.epsilon.end = r.number(p + "epsilon_end");
  if (r.has(p + "epsilon_mode")) {
    s.epsilon.mode = parse_choice(p + "epsilon_mode", r.text(p + "epsilon_mode"), kEpsilonModes);
  }
  s.reward.routed_reward = r.number(p + "routed_reward");
  s.reward.blocked_reward = r.number(p + "blocked_reward");
  if (algorithm == Algorithm::kQLearning) {
    s.alpha = r.number(p + "alpha");
    s.gamma = r.number(p + "gamma");
    if (r.has(p + "congestion_scope")) {
      s.congestion_scope =
          parse_choice(p + "congestion_scope", r.text(p + "congestion_scope"), kScopes);
    }
  }
  if (algorithm == Algorithm::kUcb) s.ucb_c = r.number(p + "c");
  if (r.has(p + "warm_start")) s.warm_start = r.text(p + "warm_start");

  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(to_string(algorithm)) + ": " + e.what());
  }
  return s;
}

}  // namespace

Assignments read_assignments(std::istream& in, const std::string& source_name) {
  Assignments out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(stripped).substr(0, eq));
    std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty()) throw ConfigError(source_name + ":" + std::to_string(line_no) + ": empty key");
    if (key == "preset") {
      for (auto& kv : load_preset(value)) out.push_back(std::move(kv));
    } else {
      out.emplace_back(std::move(key), std::move(value));
    }
  }
  return out;
}

Assignments read_assignments_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return read_assignments(in, path.string());
}

std::filesystem::path preset_directory() {
  if (const char* dir = std::getenv("EONSIM_PRESET_DIR"); dir && *dir) return dir;
  return EONSIM_PRESET_DIR;
}

Assignments load_preset(const std::string& name) {
  const bool safe = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
  const auto path = preset_directory() / (name + ".conf");
  if (!safe || !std::filesystem::exists(path)) throw ConfigError("unknown preset '" + name + "'");
  std::ifstream in(path);
  Assignments out;
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw ConfigError("malformed line in preset '" + name + "'");
    std::string key = trim(std::string_view(stripped).substr(0, eq));
    if (key == "preset") throw ConfigError("preset '" + name + "' may not include other presets");
    out.emplace_back(std::move(key), trim(std::string_view(stripped).substr(eq + 1)));
  }
  return out;
}

std::vector<std::string> list_presets() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(preset_directory(), ec)) {
    if (entry.path().extension() == ".conf") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (trim(text).empty()) return seeds;
  for (const std::string& part : split(text, ',')) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw ConfigError("bad seed '" + part + "'");
    }
    seeds.push_back(v);
  }
  return seeds;
}

ExperimentConfig parse_config(const Assignments& assignments) {
  const Resolver r(assignments);
  ExperimentConfig c;

  if (r.has("topology")) c.topology = r.text("topology");
  if (r.has("modulation_table")) c.modulation_table = r.text("modulation_table");
  if (r.has("k")) {
    try {
      c.k = parse_path_limit(r.text("k"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  c.traffic.erlang = r.number("erlang");
  c.traffic.mean_holding = r.number_or("mean_holding", c.traffic.mean_holding);
  c.traffic.cores_per_link = r.number_or("cores_per_link", c.traffic.cores_per_link);
  c.traffic.requests_per_episode =
      r.number_or("requests_per_episode", c.traffic.requests_per_episode);
  if (r.has("bit_rate_weights")) {
    c.traffic.bit_rate_weights.clear();
    for (const std::string& item : split(r.text("bit_rate_weights"), ',')) {
      const auto colon = item.find(':');
      int rate = 0;
      double weight = 0.0;
      bool ok = colon != std::string::npos;
      if (ok) {
        const std::string rs = trim(item.substr(0, colon));
        const std::string ws = trim(item.substr(colon + 1));
        auto a = std::from_chars(rs.data(), rs.data() + rs.size(), rate);
        auto b = std::from_chars(ws.data(), ws.data() + ws.size(), weight);
        ok = a.ec == std::errc{} && a.ptr == rs.data() + rs.size() && b.ec == std::errc{} &&
             b.ptr == ws.data() + ws.size();
      }
      if (!ok) throw ConfigError("bit_rate_weights expects 'rate:weight,...', got '" + item + "'");
      c.traffic.bit_rate_weights[rate] = weight;
    }
  }
  if (r.has("load_normalization")) {
    c.traffic.normalization =
        parse_choice("load_normalization", r.text("load_normalization"), kNormalizations);
  }

  c.slots_per_core = r.number_or("slots_per_core", c.slots_per_core);
  if (r.has("link_sharing")) c.link_sharing = parse_choice("link_sharing", r.text("link_sharing"), kSharing);
  c.controller.guard_band_slots = r.number_or("guard_band_slots", c.controller.guard_band_slots);
  if (r.has("modulation_policy")) {
    c.controller.modulation_policy =
        parse_choice("modulation_policy", r.text("modulation_policy"), kModulationPolicies);
  }
  c.episodes = r.number_or("episodes", c.episodes);
  if (r.has("seeds")) c.seeds = parse_seed_list(r.text("seeds"));
  c.final_window = r.number_or("final_window", c.final_window);

  std::set<Algorithm> seen;
  for (const std::string& name : split(r.text("algorithms"), ',')) {
    Algorithm a;
    try {
      a = parse_algorithm(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (!seen.insert(a).second) throw ConfigError("algorithm '" + name + "' listed twice");
    c.algorithms.push_back(resolve_agent(r, a));
  }

  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

Assignments to_assignments(const ExperimentConfig& c) {
  Assignments out;
  auto put = [&](std::string key, std::string value) {
    out.emplace_back(std::move(key), std::move(value));
  };
  put("topology", c.topology);
  put("modulation_table", c.modulation_table);
  put("k", to_string(c.k));
  put("erlang", format_double(c.traffic.erlang));
  put("mean_holding", format_double(c.traffic.mean_holding));
  put("cores_per_link", std::to_string(c.traffic.cores_per_link));
  put("slots_per_core", std::to_string(c.slots_per_core));
  put("requests_per_episode", std::to_string(c.traffic.requests_per_episode));
  std::string weights;
  for (auto [rate, w] : c.traffic.bit_rate_weights) {
    weights += (weights.empty() ? "" : ",") + std::to_string(rate) + ":" + format_double(w);
  }
  put("bit_rate_weights", weights);
  put("load_normalization", choice_name(c.traffic.normalization, kNormalizations));
  put("link_sharing", choice_name(c.link_sharing, kSharing));
  put("guard_band_slots", std::to_string(c.controller.guard_band_slots));
  put("modulation_policy", choice_name(c.controller.modulation_policy, kModulationPolicies));
  put("episodes", std::to_string(c.episodes));
  std::string seeds;
  for (auto s : c.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  put("seeds", seeds);
  put("final_window", std::to_string(c.final_window));
  std::string names;
  for (const auto& a : c.algorithms) names += (names.empty() ? "" : ",") + std::string(to_string(a.algorithm));
  put("algorithms", names);

  for (const auto& a : c.algorithms) {
    if (!is_learning(a.algorithm)) continue;
    const std::string p = std::string(to_string(a.algorithm)) + ".";
    put(p + "epsilon_start", format_double(a.epsilon.start));
    put(p + "epsilon_end", format_double(a.epsilon.end));
    put(p + "epsilon_mode", choice_name(a.epsilon.mode, kEpsilonModes));
    put(p + "routed_reward", format_double(a.reward.routed_reward));
    put(p + "blocked_reward", format_double(a.reward.blocked_reward));
    if (a.algorithm == Algorithm::kQLearning) {
      put(p + "alpha", format_double(a.alpha));
      put(p + "gamma", format_double(a.gamma));
      put(p + "congestion_scope", choice_name(a.congestion_scope, kScopes));
    }
    if (a.algorithm == Algorithm::kUcb) put(p + "c", format_double(a.ucb_c));
    if (!a.warm_start.empty()) put(p + "warm_start", a.warm_start);
  }
  return out;
}

void write_assignments(std::ostream& out, const Assignments& assignments) {
  for (const auto& [key, value] : assignments) out << key << " = " << value << '\n';
}

}  // namespace eonsim
