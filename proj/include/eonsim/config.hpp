#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eonsim/sim_engine.hpp"

namespace eonsim {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered `key = value` assignments; later ones win.
using Assignments = std::vector<std::pair<std::string, std::string>>;

/// Reads a flat `key = value` file. Blank lines and `#` comments are
/// skipped. `preset = <name>` lines are expanded in place from the preset
/// directory.
Assignments read_assignments(std::istream& in, const std::string& source_name);
Assignments read_assignments_file(const std::filesystem::path& path);

/// `$EONSIM_PRESET_DIR` if set, else the repository's presets/ directory.
std::filesystem::path preset_directory();
Assignments load_preset(const std::string& name);
std::vector<std::string> list_presets();

/// Resolves assignments into a validated config. Unknown keys, type errors,
/// missing required keys and inconsistent hyperparameters raise ConfigError.
ExperimentConfig parse_config(const Assignments& assignments);

/// Canonical assignments reproducing `config` exactly.
Assignments to_assignments(const ExperimentConfig& config);
void write_assignments(std::ostream& out, const Assignments& assignments);

/// Parses "1,2,3".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace eonsim
