#include "eonsim/grid.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <string>

namespace eonsim {

namespace {

constexpr std::size_t kWordBits = 64;

// Bit `j` of the result is bit `j + shift` of `words`; bits past the end read 0.
std::uint64_t shifted_word(std::span<const std::uint64_t> words, std::size_t w, std::size_t shift) {
  const std::size_t q = shift / kWordBits;
  const std::size_t r = shift % kWordBits;
  auto get = [&](std::size_t i) -> std::uint64_t { return i < words.size() ? words[i] : 0; };
  if (r == 0) return get(w + q);
  return (get(w + q) >> r) | (get(w + q + 1) << (kWordBits - r));
}

}  // namespace

SpectrumGrid::SpectrumGrid(std::size_t directed_links, std::size_t cores_per_link,
                           std::size_t slots_per_core, LinkSharing sharing)
    : links_(directed_links),
      sharing_(sharing),
      planes_(sharing == LinkSharing::kBidirectional ? (directed_links + 1) / 2 : directed_links),
      cores_(cores_per_link),
      slots_(slots_per_core),
      words_((slots_per_core + kWordBits - 1) / kWordBits),
      bits_(planes_ * cores_per_link * words_, 0),
      counts_(planes_ * cores_per_link, 0),
      scratch_(2 * words_, 0) {}

bool SpectrumGrid::occupied(DirectedLinkIndex link, std::size_t core, std::size_t slot) const {
  if (link >= links_ || core >= cores_ || slot >= slots_) throw GridError("slot out of range");
  return (bits_[word_offset(link, core) + slot / kWordBits] >> (slot % kWordBits)) & 1U;
}

std::size_t SpectrumGrid::occupied_count(DirectedLinkIndex link, std::size_t core) const {
  if (link >= links_ || core >= cores_) throw GridError("link or core out of range");
  return counts_[plane(link) * cores_ + core];
}

const Allocation* SpectrumGrid::find(RequestId id) const {
  auto it = active_.find(id);
  return it == active_.end() ? nullptr : &it->second;
}

std::optional<SlotPlacement> SpectrumGrid::first_fit_search(
    std::span<const DirectedLinkIndex> hops, std::size_t width) const {
  if (width == 0) throw GridError("first-fit width must be positive");
  if (width > slots_ || hops.empty()) return std::nullopt;
  for (DirectedLinkIndex hop : hops) {
    if (hop >= links_) throw GridError("hop outside grid");
  }

  std::span<std::uint64_t> free(scratch_.data(), words_);
  std::span<std::uint64_t> fits(scratch_.data() + words_, words_);
  for (std::size_t core = 0; core < cores_; ++core) {
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t used = 0;
      for (DirectedLinkIndex hop : hops) used |= bits_[word_offset(hop, core) + w];
      std::uint64_t valid = ~std::uint64_t{0};
      const std::size_t tail = slots_ - w * kWordBits;
      if (tail < kWordBits) valid = (std::uint64_t{1} << tail) - 1;
      free[w] = ~used & valid;
    }
    // fits[j] is set iff slots j .. j+width-1 are all free.
    std::copy(free.begin(), free.end(), fits.begin());
    for (std::size_t s = 1; s < width; ++s) {
      for (std::size_t w = 0; w < words_; ++w) fits[w] &= shifted_word(free, w, s);
    }
    for (std::size_t w = 0; w < words_; ++w) {
      if (fits[w] != 0) {
        return SlotPlacement{core, w * kWordBits + static_cast<std::size_t>(std::countr_zero(fits[w]))};
      }
    }
  }
  return std::nullopt;
}

void SpectrumGrid::set_range(const Allocation& a, bool value) {
  for (DirectedLinkIndex hop : a.hops) {
    const std::size_t base = word_offset(hop, a.core);
    for (std::size_t s = a.start_slot; s < a.start_slot + a.width; ++s) {
      const std::uint64_t mask = std::uint64_t{1} << (s % kWordBits);
      if (value) {
        bits_[base + s / kWordBits] |= mask;
      } else {
        bits_[base + s / kWordBits] &= ~mask;
      }
    }
    auto& count = counts_[plane(hop) * cores_ + a.core];
    count = value ? count + a.width : count - a.width;
  }
  const std::size_t delta = a.width * a.hops.size();
  total_occupied_ = value ? total_occupied_ + delta : total_occupied_ - delta;
}

void SpectrumGrid::allocate(Allocation allocation) {
  if (allocation.width == 0 || allocation.hops.empty()) throw GridError("empty allocation");
  if (allocation.core >= cores_ || allocation.start_slot + allocation.width > slots_) {
    throw GridError("allocation outside the spectrum grid");
  }
  if (active_.count(allocation.request_id)) {
    throw GridError("request " + std::to_string(allocation.request_id) + " is already allocated");
  }
  for (std::size_t i = 0; i < allocation.hops.size(); ++i) {
    const DirectedLinkIndex hop = allocation.hops[i];
    if (hop >= links_) throw GridError("hop outside grid");
    for (std::size_t j = 0; j < i; ++j) {
      if (plane(allocation.hops[j]) == plane(hop)) throw GridError("allocation repeats a link");
    }
    for (std::size_t s = allocation.start_slot; s < allocation.start_slot + allocation.width; ++s) {
      if (occupied(hop, allocation.core, s)) {
        throw GridError("allocation overlaps occupied spectrum on link " + std::to_string(hop));
      }
    }
  }
  set_range(allocation, true);
  const RequestId id = allocation.request_id;
  active_.emplace(id, std::move(allocation));
}

void SpectrumGrid::release(RequestId id) {
  auto it = active_.find(id);
  if (it == active_.end()) {
    throw GridError("request " + std::to_string(id) + " has no active allocation");
  }
  set_range(it->second, false);
  active_.erase(it);
}

void SpectrumGrid::clear() {
  std::fill(bits_.begin(), bits_.end(), 0);
  std::fill(counts_.begin(), counts_.end(), 0);
  total_occupied_ = 0;
  active_.clear();
}

bool SpectrumGrid::same_occupancy(const SpectrumGrid& other) const {
  return links_ == other.links_ && sharing_ == other.sharing_ && cores_ == other.cores_ &&
         slots_ == other.slots_ && bits_ == other.bits_;
}

double path_congestion(const SpectrumGrid& grid, std::span<const DirectedLinkIndex> hops) {
  if (hops.empty() || grid.cores_per_link() == 0) return 0.0;
  if (grid.slots_per_core() == 0) return 1.0;
  std::size_t occupied = 0;
  for (DirectedLinkIndex hop : hops) {
    for (std::size_t core = 0; core < grid.cores_per_link(); ++core) {
      occupied += grid.occupied_count(hop, core);
    }
  }
  const double capacity =
      static_cast<double>(hops.size() * grid.cores_per_link() * grid.slots_per_core());
  return static_cast<double>(occupied) / capacity;
}

CongestionLevel congestion_level(double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::out_of_range("congestion fraction must lie in [0, 1]");
  }
  return fraction < kCongestionThreshold ? CongestionLevel::kLevel1 : CongestionLevel::kLevel2;
}

std::string_view to_string(CongestionLevel level) {
  return level == CongestionLevel::kLevel1 ? "1" : "2";
}

void write_occupancy_snapshot(std::ostream& out, const SpectrumGrid& grid) {
  const std::size_t step = grid.sharing() == LinkSharing::kBidirectional ? 2 : 1;
  for (DirectedLinkIndex link = 0; link < grid.directed_link_count(); link += step) {
    for (std::size_t core = 0; core < grid.cores_per_link(); ++core) {
      out << "link=" << grid.plane(link) << " core=" << core << " runs=";
      std::size_t s = 0;
      bool first = true;
      while (s < grid.slots_per_core()) {
        const bool state = grid.occupied(link, core, s);
        std::size_t run = 0;
        while (s < grid.slots_per_core() && grid.occupied(link, core, s) == state) {
          ++s;
          ++run;
        }
        out << (first ? "" : ",") << (state ? 1 : 0) << '*' << run;
        first = false;
      }
      out << '\n';
    }
  }
}

}  // namespace eonsim
