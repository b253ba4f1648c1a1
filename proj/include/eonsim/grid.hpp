#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eonsim/topology.hpp"

namespace eonsim {

using RequestId = std::uint64_t;

/// Raised when an operation would break the grid's bookkeeping. Never
/// expected during a well-formed simulation.
class GridError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct SlotPlacement {
  std::size_t core = 0;
  std::size_t start_slot = 0;

  friend bool operator==(const SlotPlacement&, const SlotPlacement&) = default;
};

/// A lightpath's spectrum: the same core and slot block on every hop.
struct Allocation {
  RequestId request_id = 0;
  std::vector<DirectedLinkIndex> hops;
  std::size_t core = 0;
  std::size_t start_slot = 0;
  std::size_t width = 0;
};

enum class CongestionLevel : std::uint8_t { kLevel1 = 0, kLevel2 = 1 };

inline constexpr std::size_t kCongestionLevelCount = 2;

/// Whether the two directions of a fiber link have their own spectrum or
/// a lightpath occupies its slots in both directions at once.
enum class LinkSharing : std::uint8_t { kDirected, kBidirectional };
inline constexpr double kCongestionThreshold = 0.3;

/// Per directed link, per core slot occupancy.
class SpectrumGrid {
 public:
  SpectrumGrid(std::size_t directed_links, std::size_t cores_per_link = 4,
               std::size_t slots_per_core = 128, LinkSharing sharing = LinkSharing::kDirected);

  std::size_t directed_link_count() const noexcept { return links_; }
  LinkSharing sharing() const noexcept { return sharing_; }
  /// Storage plane for a directed link; both directions share one plane
  /// under LinkSharing::kBidirectional.
  std::size_t plane(DirectedLinkIndex link) const noexcept {
    return sharing_ == LinkSharing::kBidirectional ? link / 2 : link;
  }
  std::size_t plane_count() const noexcept { return planes_; }
  std::size_t cores_per_link() const noexcept { return cores_; }
  std::size_t slots_per_core() const noexcept { return slots_; }

  bool occupied(DirectedLinkIndex link, std::size_t core, std::size_t slot) const;
  std::size_t occupied_count(DirectedLinkIndex link, std::size_t core) const;
  std::size_t total_occupied() const noexcept { return total_occupied_; }
  std::size_t active_count() const noexcept { return active_.size(); }
  bool empty() const noexcept { return active_.empty() && total_occupied_ == 0; }

  const Allocation* find(RequestId id) const;
  const std::unordered_map<RequestId, Allocation>& active() const noexcept { return active_; }

  /// Lowest core, then lowest start slot, free on every hop. Absent when no
  /// contiguous block of `width` exists (including width > slots_per_core).
  std::optional<SlotPlacement> first_fit_search(std::span<const DirectedLinkIndex> hops,
                                                std::size_t width) const;

  /// Throws GridError on overlap, out-of-range slots or a reused request id.
  void allocate(Allocation allocation);

  /// Throws GridError for an unknown request id.
  void release(RequestId id);

  /// Drops every allocation.
  void clear();

  /// Occupancy bits only, for bit-identity checks.
  bool same_occupancy(const SpectrumGrid& other) const;

 private:
  std::size_t word_offset(DirectedLinkIndex link, std::size_t core) const {
    return (plane(link) * cores_ + core) * words_;
  }
  void set_range(const Allocation& a, bool value);

  std::size_t links_;
  LinkSharing sharing_;
  std::size_t planes_;
  std::size_t cores_;
  std::size_t slots_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::size_t> counts_;
  std::size_t total_occupied_ = 0;
  std::unordered_map<RequestId, Allocation> active_;
  mutable std::vector<std::uint64_t> scratch_;
};

/// Mean of occupied/slots_per_core over every (hop, core) on the path.
/// A grid with zero slots per core counts as fully congested.
double path_congestion(const SpectrumGrid& grid, std::span<const DirectedLinkIndex> hops);

/// Level1 iff fraction < 0.3. Throws std::out_of_range outside [0, 1].
CongestionLevel congestion_level(double fraction);

std::string_view to_string(CongestionLevel level);

/// Diagnostic dump, one line per storage plane and core:
/// `link=<plane> core=<c> runs=0*12,1*3,0*113` where 0 marks free slots and 1
/// occupied ones; runs alternate and start with the state of slot 0.
void write_occupancy_snapshot(std::ostream& out, const SpectrumGrid& grid);

}  // namespace eonsim
