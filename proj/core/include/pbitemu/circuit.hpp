#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbitemu/fixed_point.hpp"
#include "pbitemu/lfsr.hpp"
#include "pbitemu/stats.hpp"
#include "pbitemu/weighted_pbit.hpp"

namespace pbitemu {

struct PBitRef {
  std::size_t tile = 0;
  std::size_t index = 0;
  friend auto operator<=>(const PBitRef&, const PBitRef&) = default;
};

enum class LinkMode {
  clamp_follow,  // destination select held high, clamp follows the source output
  weighted,      // source output enters the destination sum through h_C
};

/// One-way connection between p-bits in different tiles. Nothing flows back
/// from destination to source.
struct DirectedLink {
  PBitRef source;
  PBitRef dest;
  LinkMode mode = LinkMode::clamp_follow;
  std::optional<FixedPoint> strength;  // h_C, weighted mode only
};

struct UpdateEvent {
  std::uint64_t cycle = 0;
  std::size_t tile = 0;
  std::size_t pbit = 0;
  std::uint8_t output = 0;
};

using UpdateObserver = std::function<void(const UpdateEvent&)>;

/// Reciprocally coupled p-bits driven by one sequencer.
///
/// The sequencer enables one p-bit at a time in `update_order`. Each enable
/// window is three cycles: evaluate (sum, MUX, table), compare and latch,
/// then a one-cycle gap. A full sweep is therefore size() * 3 cycles.
class Tile {
 public:
  static constexpr std::uint64_t kCyclesPerUpdate = 2;
  static constexpr std::uint64_t kGapCycles = 1;
  static constexpr std::uint64_t kCyclesPerSlot = kCyclesPerUpdate + kGapCycles;

  Tile(std::string name, std::vector<WeightedPBit> pbits, std::vector<std::string> pbit_names,
       std::vector<std::size_t> update_order = {});

  const std::string& name() const { return name_; }
  std::size_t size() const { return pbits_.size(); }
  std::uint64_t sweep_cycles() const { return size() * kCyclesPerSlot; }

  WeightedPBit& pbit(std::size_t i) { return pbits_.at(i); }
  const WeightedPBit& pbit(std::size_t i) const { return pbits_.at(i); }
  const std::vector<std::string>& pbit_names() const { return names_; }
  std::optional<std::size_t> find(std::string_view pbit_name) const;

  std::span<const std::size_t> update_order() const { return base_order_; }
  std::span<const std::size_t> current_order() const { return order_; }
  void set_update_order(std::vector<std::size_t> order);
  void set_randomized_order(bool enabled, std::uint32_t seed);
  bool randomized_order() const { return randomize_; }

  std::span<const std::uint8_t> outputs() const { return outputs_; }

  // The p-bit whose enable window covers the next cycle, if it is in its
  // evaluate or compare cycle.
  std::optional<std::size_t> active_pbit() const;
  std::size_t pending_count() const;

  // Advances one clock cycle; returns true when a p-bit latched a new output.
  bool step(std::uint64_t cycle, std::size_t tile_index, const UpdateObserver* observer);
  void reset(std::span<const std::uint32_t> seeds, std::uint32_t shuffle_seed);

 private:
  void reshuffle();

  std::string name_;
  std::vector<WeightedPBit> pbits_;
  std::vector<std::string> names_;
  std::vector<std::size_t> base_order_;
  std::vector<std::size_t> order_;
  std::vector<std::uint8_t> outputs_;
  std::uint64_t cursor_ = 0;
  bool randomize_ = false;
  Lfsr32 shuffler_{};
};

struct CycleStats {
  std::uint64_t cycles = 0;
  std::uint64_t updates = 0;
  // Largest number of p-bits of one tile caught mid-update at a cycle boundary.
  std::size_t max_concurrent_updates = 0;
};

/// Tiles on a shared clock plus the directed links between them.
///
/// Every tile's sequencer runs independently (serial inside a tile, parallel
/// across tiles). Every p-bit's LFSR is free-running: it shifts once per
/// clock cycle whether or not the p-bit is enabled, and the comparator
/// samples it on the compare cycle. Links copy latched source outputs to
/// their destinations at the end of each cycle, so all tiles see pre-cycle
/// values within a cycle.
class Circuit {
 public:
  Circuit();
  explicit Circuit(FixedPoint i0);

  std::size_t add_tile(Tile tile);
  void add_link(DirectedLink link);
  // Group bits are flat p-bit indices.
  void add_group(BitGroup group);

  const FixedPoint& i0() const { return i0_; }
  const std::vector<Tile>& tiles() const { return tiles_; }
  Tile& tile(std::size_t t) { return tiles_.at(t); }
  const Tile& tile(std::size_t t) const { return tiles_.at(t); }
  const std::vector<DirectedLink>& links() const { return links_; }
  const std::vector<BitGroup>& groups() const { return groups_; }

  std::size_t pbit_count() const { return total_pbits_; }
  std::size_t flat_index(PBitRef ref) const;
  PBitRef ref(std::size_t flat) const;
  WeightedPBit& pbit(PBitRef ref) { return tiles_.at(ref.tile).pbit(ref.index); }
  const WeightedPBit& pbit(PBitRef ref) const { return tiles_.at(ref.tile).pbit(ref.index); }

  // "tile.pbit"
  std::string qualified_name(PBitRef ref) const;
  std::optional<PBitRef> find_pbit(std::string_view qualified) const;
  const BitGroup* find_group(std::string_view name) const;
  bool is_link_driven(PBitRef ref) const;

  void set_clamp(PBitRef ref, ClampValue value);
  // A qualified p-bit name or a one-bit group.
  void set_clamp(std::string_view name, ClampValue value);
  // Clamps every bit of a group to the binary digits of `value`.
  void clamp_group(std::string_view name, std::uint64_t value);
  void float_group(std::string_view name);

  // Reseeds every LFSR from `master_seed` and returns to cycle 0 with all
  // outputs low. Clamps and links are kept.
  void reset(std::uint64_t master_seed);
  std::uint64_t seed() const { return seed_; }
  void set_randomized_order(bool enabled);

  void step_clock();
  void run_cycles(std::uint64_t cycles);
  // Cycles for every tile to update each of its p-bits at least once.
  std::uint64_t sweep_cycles() const;
  // Runs one sweep and returns the resulting state.
  std::vector<std::uint8_t> sweep();

  std::uint64_t clock() const { return clock_; }
  std::vector<std::uint8_t> state() const;
  void read_state(std::span<std::uint8_t> out) const;

  void set_instrumented(bool enabled) { instrumented_ = enabled; }
  const CycleStats& cycle_stats() const { return stats_; }
  void set_update_observer(UpdateObserver observer) { observer_ = std::move(observer); }

 private:
  void propagate_links();
  void validate_ref(PBitRef ref, const char* what) const;

  FixedPoint i0_;
  std::vector<Tile> tiles_;
  std::vector<std::size_t> tile_offsets_;
  std::size_t total_pbits_ = 0;
  std::vector<DirectedLink> links_;
  std::vector<BitGroup> groups_;
  std::uint64_t clock_ = 0;
  std::uint64_t seed_ = 0;
  bool randomized_ = false;
  bool instrumented_ = false;
  CycleStats stats_;
  UpdateObserver observer_;
};

}  // namespace pbitemu
