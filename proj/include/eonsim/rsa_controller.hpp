#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eonsim/grid.hpp"
#include "eonsim/topology.hpp"
#include "eonsim/traffic.hpp"

namespace eonsim {

struct ModulationFormat {
  std::string name;
  int bit_rate_gbps = 0;
  std::size_t slots_required = 0;
  double max_reach_km = 0.0;

  friend bool operator==(const ModulationFormat&, const ModulationFormat&) = default;
};

/// Reach-limited slot demand per (format, bit rate).
class ModulationTable {
 public:
  /// Validates ordering: within a bit rate, longer reach never needs fewer
  /// slots and reaches are distinct.
  explicit ModulationTable(std::vector<ModulationFormat> rows);

  const std::vector<ModulationFormat>& rows() const noexcept { return rows_; }
  bool supports(int bit_rate_gbps) const;

  /// Rows for `bit_rate_gbps` reaching `path_length_km` (inclusive), best
  /// first: fewest slots, then shortest reach. Throws std::invalid_argument
  /// for an unsupported bit rate.
  std::vector<const ModulationFormat*> reachable(int bit_rate_gbps, double path_length_km) const;

 private:
  std::vector<ModulationFormat> rows_;
};

/// QPSK / 16-QAM / 64-QAM at 25, 50 and 100 Gbps.
ModulationTable default_modulation_table();

/// Columns `format bit_rate_gbps slots reach_km`; `#` comment lines.
ModulationTable parse_modulation_table(std::istream& in);
ModulationTable load_modulation_table_file(const std::string& path);

struct ModulationChoice {
  const ModulationFormat* format = nullptr;
  std::size_t slots_required = 0;
};

std::optional<ModulationChoice> select_modulation(const ModulationTable& table, int bit_rate_gbps,
                                                  double path_length_km);

enum class BlockReason { kNoModulationReach, kNoSpectrum };

std::string_view to_string(BlockReason reason);

struct Routed {
  Allocation allocation;
  ModulationFormat format;
};

struct Blocked {
  BlockReason reason = BlockReason::kNoSpectrum;
};

using ProvisionOutcome = std::variant<Routed, Blocked>;

inline bool is_routed(const ProvisionOutcome& outcome) {
  return std::holds_alternative<Routed>(outcome);
}

enum class ModulationPolicy {
  kTryAll,    // fall back through reachable formats until one fits
  kBestOnly,  // only the most spectrally efficient reachable format
};

struct ControllerOptions {
  std::size_t guard_band_slots = 1;
  ModulationPolicy modulation_policy = ModulationPolicy::kTryAll;
};

/// Modulation by reach, then first-fit core and spectrum on one path.
class RsaController {
 public:
  explicit RsaController(ModulationTable table, ControllerOptions options = {})
      : table_(std::move(table)), options_(options) {}

  const ModulationTable& table() const noexcept { return table_; }
  const ControllerOptions& options() const noexcept { return options_; }

  /// Allocates on success. Never touches the grid when blocking.
  ProvisionOutcome provision(SpectrumGrid& grid, const Request& request, const Path& path) const;

  /// Throws GridError if the request holds no spectrum.
  void teardown(SpectrumGrid& grid, RequestId id) const { grid.release(id); }

 private:
  ModulationTable table_;
  ControllerOptions options_;
};

}  // namespace eonsim
