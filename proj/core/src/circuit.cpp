#include "pbitemu/circuit.hpp"

#include <algorithm>
#include <numeric>

#include "pbitemu/errors.hpp"

namespace pbitemu {

// ---------------------------------------------------------------------------
// Tile

Tile::Tile(std::string name, std::vector<WeightedPBit> pbits, std::vector<std::string> pbit_names,
           std::vector<std::size_t> update_order)
    : name_(std::move(name)), pbits_(std::move(pbits)), names_(std::move(pbit_names)) {
  if (name_.empty() || name_.find('.') != std::string::npos) {
    throw ValidationError("tile name '" + name_ + "' must be non-empty and contain no '.'");
  }
  if (names_.size() != pbits_.size()) {
    throw ValidationError("tile '" + name_ + "': " + std::to_string(pbits_.size()) +
                          " p-bits but " + std::to_string(names_.size()) + " names");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty() || names_[i].find('.') != std::string::npos) {
      throw ValidationError("tile '" + name_ + "': bad p-bit name '" + names_[i] + "'");
    }
    if (std::find(names_.begin(), names_.begin() + static_cast<std::ptrdiff_t>(i), names_[i]) !=
        names_.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw ValidationError("tile '" + name_ + "': duplicate p-bit name '" + names_[i] + "'");
    }
    if (pbits_[i].weights().size() != pbits_.size()) {
      throw ValidationError("tile '" + name_ + "': p-bit '" + names_[i] + "' has " +
                            std::to_string(pbits_[i].weights().size()) + " weights, expected " +
                            std::to_string(pbits_.size()));
    }
  }
  outputs_.assign(pbits_.size(), 0);
  if (update_order.empty()) {
    update_order.resize(pbits_.size());
    std::iota(update_order.begin(), update_order.end(), std::size_t{0});
  }
  set_update_order(std::move(update_order));
}

std::optional<std::size_t> Tile::find(std::string_view pbit_name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == pbit_name) return i;
  }
  return std::nullopt;
}

void Tile::set_update_order(std::vector<std::size_t> order) {
  std::vector<std::size_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] != i) {
      throw ValidationError("tile '" + name_ + "': update order is not a permutation");
    }
  }
  if (sorted.size() != pbits_.size()) {
    throw ValidationError("tile '" + name_ + "': update order has " +
                          std::to_string(sorted.size()) + " entries, expected " +
                          std::to_string(pbits_.size()));
  }
  base_order_ = std::move(order);
  order_ = base_order_;
  cursor_ = 0;
}

void Tile::set_randomized_order(bool enabled, std::uint32_t seed) {
  randomize_ = enabled;
  shuffler_ = Lfsr32(seed);
  order_ = base_order_;
  if (randomize_ && cursor_ == 0) reshuffle();
}

void Tile::reshuffle() {
  for (std::size_t i = order_.size(); i > 1; --i) {
    const std::size_t j = shuffler_.step() % i;
    std::swap(order_[i - 1], order_[j]);
  }
}

std::optional<std::size_t> Tile::active_pbit() const {
  if (pbits_.empty()) return std::nullopt;
  if (cursor_ % kCyclesPerSlot >= kCyclesPerUpdate) return std::nullopt;
  return order_[cursor_ / kCyclesPerSlot];
}

std::size_t Tile::pending_count() const {
  return static_cast<std::size_t>(
      std::count_if(pbits_.begin(), pbits_.end(), [](const WeightedPBit& p) { return p.pending(); }));
}

bool Tile::step(std::uint64_t cycle, std::size_t tile_index, const UpdateObserver* observer) {
  if (pbits_.empty()) return false;
  bool latched = false;
  const std::size_t p = order_[cursor_ / kCyclesPerSlot];
  switch (cursor_ % kCyclesPerSlot) {
    case 0:
      pbits_[p].evaluate(outputs_);
      break;
    case 1: {
      // The register has shifted once per elapsed cycle, including this one.
      pbits_[p].advance_rng_to(cycle + 1);
      outputs_[p] = pbits_[p].compare();
      latched = true;
      if (observer && *observer) (*observer)(UpdateEvent{cycle, tile_index, p, outputs_[p]});
      break;
    }
    default:
      break;  // gap
  }
  if (++cursor_ == sweep_cycles()) {
    cursor_ = 0;
    if (randomize_) reshuffle();
  }
  return latched;
}

void Tile::reset(std::span<const std::uint32_t> seeds, std::uint32_t shuffle_seed) {
  for (std::size_t i = 0; i < pbits_.size(); ++i) {
    pbits_[i].reseed(seeds[i]);
    pbits_[i].set_output(0);
  }
  std::fill(outputs_.begin(), outputs_.end(), 0);
  cursor_ = 0;
  set_randomized_order(randomize_, shuffle_seed);
}

// ---------------------------------------------------------------------------
// Circuit

Circuit::Circuit() : Circuit(default_i0()) {}

Circuit::Circuit(FixedPoint i0) : i0_(i0) {}

std::size_t Circuit::add_tile(Tile tile) {
  for (const auto& t : tiles_) {
    if (t.name() == tile.name()) throw ValidationError("duplicate tile name '" + tile.name() + "'");
  }
  tile_offsets_.push_back(total_pbits_);
  total_pbits_ += tile.size();
  tiles_.push_back(std::move(tile));
  return tiles_.size() - 1;
}

void Circuit::validate_ref(PBitRef ref, const char* what) const {
  if (ref.tile >= tiles_.size() || ref.index >= tiles_[ref.tile].size()) {
    throw ValidationError(std::string(what) + ": no p-bit at tile " + std::to_string(ref.tile) +
                          " index " + std::to_string(ref.index));
  }
}

void Circuit::add_link(DirectedLink link) {
  validate_ref(link.source, "link source");
  validate_ref(link.dest, "link destination");
  if (link.source.tile == link.dest.tile) {
    throw ValidationError("link " + qualified_name(link.source) + " -> " +
                          qualified_name(link.dest) + " stays inside one tile");
  }
  if (is_link_driven(link.dest)) {
    throw ValidationError(qualified_name(link.dest) + " already has an incoming link");
  }
  WeightedPBit& dest = pbit(link.dest);
  if (link.mode == LinkMode::weighted) {
    if (!link.strength) throw ValidationError("weighted link needs a strength");
    dest.set_coupling(*link.strength);
  } else {
    link.strength.reset();
  }
  links_.push_back(link);
  propagate_links();
}

void Circuit::add_group(BitGroup group) {
  if (group.name.empty() || group.bits.empty() || group.bits.size() > 62) {
    throw ValidationError("group '" + group.name + "' must be named and 1..62 bits wide");
  }
  if (find_group(group.name)) throw ValidationError("duplicate group '" + group.name + "'");
  for (std::size_t b : group.bits) {
    if (b >= total_pbits_) {
      throw ValidationError("group '" + group.name + "' references p-bit " + std::to_string(b));
    }
  }
  groups_.push_back(std::move(group));
}

std::size_t Circuit::flat_index(PBitRef ref) const {
  validate_ref(ref, "flat_index");
  return tile_offsets_[ref.tile] + ref.index;
}

PBitRef Circuit::ref(std::size_t flat) const {
  if (flat >= total_pbits_) throw ValidationError("p-bit index out of range");
  const auto it = std::upper_bound(tile_offsets_.begin(), tile_offsets_.end(), flat);
  // Last tile starting at or before `flat`; empty tiles never end up here.
  const auto t = static_cast<std::size_t>(it - tile_offsets_.begin()) - 1;
  return {t, flat - tile_offsets_[t]};
}

std::string Circuit::qualified_name(PBitRef ref) const {
  validate_ref(ref, "qualified_name");
  return tiles_[ref.tile].name() + "." + tiles_[ref.tile].pbit_names()[ref.index];
}

std::optional<PBitRef> Circuit::find_pbit(std::string_view qualified) const {
  const auto dot = qualified.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  const auto tile_name = qualified.substr(0, dot);
  for (std::size_t t = 0; t < tiles_.size(); ++t) {
    if (tiles_[t].name() != tile_name) continue;
    if (auto i = tiles_[t].find(qualified.substr(dot + 1))) return PBitRef{t, *i};
  }
  return std::nullopt;
}

const BitGroup* Circuit::find_group(std::string_view name) const {
  for (const auto& g : groups_) {
    if (g.name == name) return &g;
  }
  return nullptr;
}

bool Circuit::is_link_driven(PBitRef ref) const {
  return std::any_of(links_.begin(), links_.end(), [&](const DirectedLink& l) { return l.dest == ref; });
}

void Circuit::set_clamp(PBitRef ref, ClampValue value) {
  validate_ref(ref, "set_clamp");
  const bool followed = std::any_of(links_.begin(), links_.end(), [&](const DirectedLink& l) {
    return l.dest == ref && l.mode == LinkMode::clamp_follow;
  });
  if (followed) {
    throw ValidationError(qualified_name(ref) + " is driven by a clamp-follow link");
  }
  pbit(ref).set_clamp(value);
}

void Circuit::set_clamp(std::string_view name, ClampValue value) {
  if (const BitGroup* g = find_group(name)) {
    if (value == ClampValue::floating) {
      float_group(name);
      return;
    }
    if (g->bits.size() != 1) {
      throw ValidationError("group '" + std::string(name) + "' is " +
                            std::to_string(g->bits.size()) + " bits wide; clamp it with a value");
    }
    set_clamp(ref(g->bits[0]), value);
    return;
  }
  if (auto r = find_pbit(name)) {
    set_clamp(*r, value);
    return;
  }
  throw ValidationError("unknown terminal '" + std::string(name) + "'");
}

void Circuit::clamp_group(std::string_view name, std::uint64_t value) {
  const BitGroup* g = find_group(name);
  if (!g) throw ValidationError("unknown terminal '" + std::string(name) + "'");
  if (g->bits.size() < 64 && (value >> g->bits.size()) != 0) {
    throw ValidationError("value " + std::to_string(value) + " does not fit the " +
                          std::to_string(g->bits.size()) + "-bit terminal '" + std::string(name) +
                          "'");
  }
  for (std::size_t k = 0; k < g->bits.size(); ++k) {
    set_clamp(ref(g->bits[k]), ((value >> k) & 1u) ? ClampValue::one : ClampValue::zero);
  }
}

void Circuit::float_group(std::string_view name) {
  const BitGroup* g = find_group(name);
  if (!g) throw ValidationError("unknown terminal '" + std::string(name) + "'");
  for (std::size_t b : g->bits) set_clamp(ref(b), ClampValue::floating);
}

void Circuit::reset(std::uint64_t master_seed) {
  seed_ = master_seed;
  std::vector<std::uint32_t> seeds;
  for (std::size_t t = 0; t < tiles_.size(); ++t) {
    seeds.clear();
    for (std::size_t i = 0; i < tiles_[t].size(); ++i) {
      seeds.push_back(derive_seed(master_seed, tile_offsets_[t] + i));
    }
    // Shuffler seeds come after every p-bit index, so they never repeat one.
    tiles_[t].reset(seeds, derive_seed(master_seed, total_pbits_ + t));
  }
  clock_ = 0;
  stats_ = {};
  propagate_links();
}

void Circuit::set_randomized_order(bool enabled) {
  randomized_ = enabled;
  for (std::size_t t = 0; t < tiles_.size(); ++t) {
    tiles_[t].set_randomized_order(enabled, derive_seed(seed_, total_pbits_ + t));
  }
}

void Circuit::propagate_links() {
  for (const auto& link : links_) {
    const std::uint8_t bit = pbit(link.source).output();
    WeightedPBit& dest = pbit(link.dest);
    if (link.mode == LinkMode::clamp_follow) {
      dest.set_select(true);
      dest.set_clamp_level(bit != 0);
    } else {
      dest.set_coupling_input(bit);
    }
  }
}

void Circuit::step_clock() {
  const UpdateObserver* observer = observer_ ? &observer_ : nullptr;
  for (std::size_t t = 0; t < tiles_.size(); ++t) {
    if (tiles_[t].step(clock_, t, observer)) ++stats_.updates;
  }
  if (instrumented_) {
    for (const auto& tile : tiles_) {
      stats_.max_concurrent_updates = std::max(stats_.max_concurrent_updates, tile.pending_count());
    }
  }
  ++clock_;
  ++stats_.cycles;
  propagate_links();
}

void Circuit::run_cycles(std::uint64_t cycles) {
  for (std::uint64_t c = 0; c < cycles; ++c) step_clock();
}

std::uint64_t Circuit::sweep_cycles() const {
  std::uint64_t cycles = 0;
  for (const auto& t : tiles_) cycles = std::max(cycles, t.sweep_cycles());
  return cycles;
}

std::vector<std::uint8_t> Circuit::sweep() {
  run_cycles(sweep_cycles());
  return state();
}

std::vector<std::uint8_t> Circuit::state() const {
  std::vector<std::uint8_t> out(total_pbits_);
  read_state(out);
  return out;
}

void Circuit::read_state(std::span<std::uint8_t> out) const {
  if (out.size() != total_pbits_) throw ValidationError("read_state: wrong buffer size");
  for (std::size_t t = 0; t < tiles_.size(); ++t) {
    const auto outputs = tiles_[t].outputs();
    std::copy(outputs.begin(), outputs.end(), out.begin() + static_cast<std::ptrdiff_t>(tile_offsets_[t]));
  }
}

}  // namespace pbitemu
