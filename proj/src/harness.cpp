#include "eonsim/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace eonsim {

namespace {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string describe(const Assignments& overrides) {
  std::string out;
  for (const auto& [k, v] : overrides) out += (out.empty() ? "" : "; ") + k + "=" + v;
  return out;
}

}  // namespace

std::size_t default_workers() {
  if (const char* env = std::getenv("EONSIM_WORKERS"); env && *env) {
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), n);
    if (ec == std::errc{} && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_results_csv(std::ostream& out, const ExperimentResult& result) {
  out << "episode";
  for (const auto& a : result.algorithms) out << ',' << to_string(a.settings.algorithm);
  out << '\n';
  const std::size_t episodes = result.algorithms.empty() ? 0 : result.algorithms[0].mean_bp.size();
  for (std::size_t e = 0; e < episodes; ++e) {
    out << e;
    for (const auto& a : result.algorithms) out << ',' << format_double(a.mean_bp[e]);
    out << '\n';
  }
}

void write_episodes_csv(std::ostream& out, const ExperimentConfig& config,
                        const ExperimentResult& result) {
  out << "algorithm,seed,episode,total,blocked,blocked_no_reach,blocked_no_spectrum,"
         "blocking_probability\n";
  for (const auto& a : result.algorithms) {
    for (std::size_t s = 0; s < a.per_seed.size(); ++s) {
      for (const EpisodeStats& e : a.per_seed[s]) {
        out << to_string(a.settings.algorithm) << ',' << config.seeds[s] << ',' << e.episode_index
            << ',' << e.total << ',' << e.blocked << ',' << e.blocked_no_reach << ','
            << e.blocked_no_spectrum << ',' << format_double(e.blocking_probability()) << '\n';
      }
    }
  }
}

void write_manifest(std::ostream& out, const RunManifest& manifest) {
  out << "# eonsim run manifest\n";
  out << "# version: " << manifest.version << '\n';
  out << "# seeds: " << manifest.seeds.size() << '\n';
  out << "# wall_clock_seconds: " << format_double(manifest.wall_clock_seconds) << '\n';
  for (const auto& p : manifest.outputs) out << "# output: " << p.string() << '\n';
  write_assignments(out, manifest.config);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

RunManifest run(const ExperimentConfig& config, const RunOptions& options,
                ExperimentResult* result_out) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentResult result = run_experiment(config, options.workers, options.save_tables);

  std::filesystem::create_directories(options.out_dir);
  RunManifest manifest;
  manifest.config = to_assignments(config);
  manifest.seeds = config.seeds;
  manifest.version = EONSIM_VERSION;

  std::ostringstream results;
  write_results_csv(results, result);
  const auto results_path = options.out_dir / "results.csv";
  write_file_atomic(results_path, results.str());
  manifest.outputs.push_back(results_path);

  std::ostringstream episodes;
  write_episodes_csv(episodes, config, result);
  const auto episodes_path = options.out_dir / "episodes.csv";
  write_file_atomic(episodes_path, episodes.str());
  manifest.outputs.push_back(episodes_path);

  if (options.save_tables) {
    const auto dir = options.out_dir / "tables";
    std::filesystem::create_directories(dir);
    for (const auto& a : result.algorithms) {
      for (std::size_t s = 0; s < a.tables.size(); ++s) {
        const auto path = dir / (std::string(to_string(a.settings.algorithm)) + "_seed" +
                                 std::to_string(config.seeds[s]) + ".csv");
        write_file_atomic(path, a.tables[s]);
        manifest.outputs.push_back(path);
      }
    }
  }

  const auto manifest_path = options.out_dir / "manifest.conf";
  manifest.outputs.push_back(manifest_path);
  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ostringstream text;
  write_manifest(text, manifest);
  write_file_atomic(manifest_path, text.str());
  if (result_out) *result_out = std::move(result);
  return manifest;
}

SweepGrid parse_sweep_grid(std::istream& in) {
  SweepGrid grid;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("grid line " + std::to_string(line_no) + ": expected 'key = v1 | v2'");
    }
    std::vector<std::string> values;
    const std::string rhs = stripped.substr(eq + 1);
    for (std::size_t from = 0;;) {
      const auto bar = rhs.find('|', from);
      values.push_back(trim(rhs.substr(from, bar == std::string::npos ? bar : bar - from)));
      if (bar == std::string::npos) break;
      from = bar + 1;
    }
    if (values.empty() || std::any_of(values.begin(), values.end(),
                                      [](const std::string& v) { return v.empty(); })) {
      throw ConfigError("grid line " + std::to_string(line_no) + ": empty value");
    }
    grid.emplace_back(trim(stripped.substr(0, eq)), std::move(values));
  }
  return grid;
}

std::vector<Assignments> expand_sweep_grid(const SweepGrid& grid) {
  std::vector<Assignments> combos{{}};
  for (const auto& [key, values] : grid) {
    std::vector<Assignments> next;
    next.reserve(combos.size() * values.size());
    for (const auto& combo : combos) {
      for (const auto& v : values) {
        Assignments extended = combo;
        extended.emplace_back(key, v);
        next.push_back(std::move(extended));
      }
    }
    combos = std::move(next);
  }
  return combos;
}

std::vector<SweepEntry> sweep(const Assignments& base, const SweepGrid& grid,
                              const std::filesystem::path& out_dir, std::size_t workers) {
  const std::vector<Assignments> combos = expand_sweep_grid(grid);
  std::vector<SweepEntry> entries(combos.size());
  std::filesystem::create_directories(out_dir);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < combos.size(); i = next++) {
      SweepEntry& entry = entries[i];
      char name[32];
      std::snprintf(name, sizeof name, "run_%03zu", i);
      entry.run_name = name;
      entry.overrides = combos[i];
      try {
        Assignments assignments = base;
        assignments.insert(assignments.end(), combos[i].begin(), combos[i].end());
        const ExperimentConfig config = parse_config(assignments);
        RunOptions options;
        options.out_dir = out_dir / entry.run_name;
        options.workers = 1;
        ExperimentResult result;
        entry.manifest = run(config, options, &result);
        for (const auto& a : result.algorithms) {
          entry.final_bp.emplace_back(std::string(to_string(a.settings.algorithm)),
                                      a.final_window_bp(config.final_window));
        }
      } catch (const std::exception& e) {
        entry.error = e.what();
      }
    }
  };

  const std::size_t pool = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, combos.size()));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < pool; ++i) threads.emplace_back(worker);
  }

  struct Row {
    const SweepEntry* entry;
    std::string algorithm;
    std::optional<double> bp;
  };
  std::vector<Row> rows;
  for (const auto& e : entries) {
    if (!e.error.empty()) {
      rows.push_back({&e, "", std::nullopt});
      continue;
    }
    for (const auto& [alg, bp] : e.final_bp) rows.push_back({&e, alg, bp});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.bp.has_value() != b.bp.has_value()) return a.bp.has_value();
    return a.bp && *a.bp < *b.bp;
  });

  std::ostringstream summary;
  summary << "run,algorithm,final_window_bp,overrides,status\n";
  for (const Row& r : rows) {
    summary << r.entry->run_name << ',' << r.algorithm << ','
            << (r.bp ? format_double(*r.bp) : std::string()) << ','
            << csv_field(describe(r.entry->overrides)) << ','
            << csv_field(r.entry->error.empty() ? "ok" : "failed: " + r.entry->error) << '\n';
  }
  write_file_atomic(out_dir / "summary.csv", summary.str());
  return entries;
}

}  // namespace eonsim
