#include "eonsim/rsa_controller.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace eonsim {

ModulationTable::ModulationTable(std::vector<ModulationFormat> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("modulation table is empty");
  std::map<int, std::vector<const ModulationFormat*>> by_rate;
  for (const auto& row : rows_) {
    if (row.bit_rate_gbps <= 0 || row.slots_required == 0 || !(row.max_reach_km > 0.0)) {
      throw std::invalid_argument("modulation row '" + row.name + "' has a non-positive field");
    }
    by_rate[row.bit_rate_gbps].push_back(&row);
  }
  for (auto& [rate, group] : by_rate) {
    std::sort(group.begin(), group.end(),
              [](auto* a, auto* b) { return a->max_reach_km > b->max_reach_km; });
    for (std::size_t i = 1; i < group.size(); ++i) {
      if (group[i]->max_reach_km == group[i - 1]->max_reach_km ||
          group[i]->slots_required > group[i - 1]->slots_required) {
        throw std::invalid_argument("modulation rows at " + std::to_string(rate) +
                                    " Gbps: shorter reach must not need more slots");
      }
    }
  }
}

bool ModulationTable::supports(int bit_rate_gbps) const {
  return std::any_of(rows_.begin(), rows_.end(),
                     [&](const auto& r) { return r.bit_rate_gbps == bit_rate_gbps; });
}

std::vector<const ModulationFormat*> ModulationTable::reachable(int bit_rate_gbps,
                                                                double path_length_km) const {
  if (!supports(bit_rate_gbps)) {
    throw std::invalid_argument("unsupported bit rate " + std::to_string(bit_rate_gbps) + " Gbps");
  }
  std::vector<const ModulationFormat*> out;
  for (const auto& row : rows_) {
    if (row.bit_rate_gbps == bit_rate_gbps && path_length_km <= row.max_reach_km) {
      out.push_back(&row);
    }
  }
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) {
    if (a->slots_required != b->slots_required) return a->slots_required < b->slots_required;
    return a->max_reach_km < b->max_reach_km;
  });
  return out;
}

ModulationTable default_modulation_table() {
  return ModulationTable({
      {"QPSK", 25, 1, 22160},  {"QPSK", 50, 2, 11080},  {"QPSK", 100, 4, 5540},
      {"16-QAM", 25, 1, 9500}, {"16-QAM", 50, 1, 4750}, {"16-QAM", 100, 2, 2375},
      {"64-QAM", 25, 1, 3664}, {"64-QAM", 50, 1, 1832}, {"64-QAM", 100, 2, 916},
  });
}

ModulationTable parse_modulation_table(std::istream& in) {
  std::vector<ModulationFormat> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    ModulationFormat row;
    std::string extra;
    if (!(fields >> row.name >> row.bit_rate_gbps >> row.slots_required >> row.max_reach_km) ||
        (fields >> extra)) {
      throw std::invalid_argument("modulation table line " + std::to_string(line_no) +
                                  ": expected 'format bit_rate_gbps slots reach_km'");
    }
    rows.push_back(std::move(row));
  }
  return ModulationTable(std::move(rows));
}

ModulationTable load_modulation_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open modulation table '" + path + "'");
  return parse_modulation_table(in);
}

std::optional<ModulationChoice> select_modulation(const ModulationTable& table, int bit_rate_gbps,
                                                  double path_length_km) {
  auto rows = table.reachable(bit_rate_gbps, path_length_km);
  if (rows.empty()) return std::nullopt;
  return ModulationChoice{rows.front(), rows.front()->slots_required};
}

std::string_view to_string(BlockReason reason) {
  return reason == BlockReason::kNoModulationReach ? "no_modulation_reach" : "no_spectrum";
}

ProvisionOutcome RsaController::provision(SpectrumGrid& grid, const Request& request,
                                          const Path& path) const {
  auto formats = table_.reachable(request.bit_rate_gbps, path.length_km);
  if (formats.empty()) return Blocked{BlockReason::kNoModulationReach};
  if (options_.modulation_policy == ModulationPolicy::kBestOnly) formats.resize(1);

  for (const ModulationFormat* format : formats) {
    const std::size_t width = format->slots_required + options_.guard_band_slots;
    if (auto placement = grid.first_fit_search(path.hops, width)) {
      Allocation allocation{request.id, path.hops, placement->core, placement->start_slot, width};
      grid.allocate(allocation);
      return Routed{std::move(allocation), *format};
    }
  }
  return Blocked{BlockReason::kNoSpectrum};
}

}  // namespace eonsim
