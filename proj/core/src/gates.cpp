#include "pbitemu/gates.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <optional>

#include "pbitemu/errors.hpp"

namespace pbitemu {
namespace {

constexpr int kWeightFracBits = 2;

// Re-expresses every entry of a gate in one shared, narrowest s[x][2] format.
void refit(GateSpec& gate) {
  std::vector<FixedPoint> all = gate.h;
  for (const auto& row : gate.j) all.insert(all.end(), row.begin(), row.end());
  const FixedFormat format = fit_format(all, kWeightFracBits);
  for (auto& row : gate.j) {
    for (auto& v : row) v = convert(v, format);
  }
  for (auto& v : gate.h) v = convert(v, format);
}

std::int64_t raw_at_grid(const FixedPoint& v) { return convert(v, FixedFormat::s(40, kWeightFracBits)).raw(); }

FixedPoint from_grid_raw(std::int64_t raw) {
  return FixedPoint::from_raw(raw, FixedFormat::s(40, kWeightFracBits));
}

}  // namespace

std::size_t GateSpec::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  throw ValidationError("gate has no terminal '" + std::string(name) + "'");
}

FixedFormat GateSpec::format() const {
  if (!h.empty()) return h.front().format();
  return FixedFormat::s(0, kWeightFracBits);
}

bool GateSpec::is_symmetric() const {
  for (std::size_t r = 0; r < j.size(); ++r) {
    for (std::size_t c = 0; c < r; ++c) {
      if (!(j[r][c] == j[c][r])) return false;
    }
  }
  return true;
}

void GateSpec::validate() const {
  const std::size_t n = names.size();
  if (terminals > n) throw ValidationError("gate: more terminals than p-bits");
  if (h.size() != n || j.size() != n) {
    throw ValidationError("gate: J, h and names disagree on size");
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (j[r].size() != n) throw ValidationError("gate: J is not square");
    if (j[r][r].raw() != 0) throw ValidationError("gate: J has a non-zero diagonal entry");
    for (std::size_t c = 0; c < r; ++c) {
      if (names[r] == names[c]) throw ValidationError("gate: duplicate name '" + names[r] + "'");
    }
  }
  if (!is_symmetric()) throw ValidationError("gate: J is not symmetric");
}

GateSpec make_gate(std::vector<std::string> names, const std::vector<std::vector<int>>& j,
                   const std::vector<int>& h, Convention convention) {
  GateSpec gate;
  gate.names = std::move(names);
  gate.convention = convention;
  const FixedFormat wide = FixedFormat::s(40, kWeightFracBits);
  for (const auto& row : j) {
    auto& out = gate.j.emplace_back();
    for (int v : row) out.push_back(FixedPoint::from_int(v, wide));
  }
  for (int v : h) gate.h.push_back(FixedPoint::from_int(v, wide));
  gate.validate();
  refit(gate);
  return gate;
}

GateSpec and_gate() {
  return make_gate({"A", "B", "C"},
                   {{0, -1, 2},
                    {-1, 0, 2},
                    {2, 2, 0}},
                   {1, 1, -2});
}

GateSpec full_adder_5() {
  // The truth table is closed under complement, which forces h = 0.
  return make_gate({"Cin", "B", "A", "S", "Cout"},
                   {{0, -1, -1, 1, 2},
                    {-1, 0, -1, 1, 2},
                    {-1, -1, 0, 1, 2},
                    {1, 1, 1, 0, -2},
                    {2, 2, 2, -2, 0}},
                   {0, 0, 0, 0, 0});
}

GateSpec full_adder_14() {
  GateComposer fa({"Cin", "B", "A", "S", "Cout"});
  // A xor B
  fa.add_or("A", "B", "O1");
  fa.add_nand("A", "B", "N1");
  fa.add_and("O1", "N1", "X1");
  // (A xor B) xor Cin
  fa.add_or("X1", "Cin", "O2");
  fa.add_nand("X1", "Cin", "N2");
  fa.add_and("O2", "N2", "S");
  // majority
  fa.add_and("A", "B", "Y1");
  fa.add_and("A", "Cin", "Y2");
  fa.add_and("B", "Cin", "Y3");
  fa.add_or("Y1", "Y2", "Z");
  fa.add_or("Z", "Y3", "Cout");
  return fa.build();
}

GateSpec to_binary(const GateSpec& bipolar) {
  bipolar.validate();
  if (bipolar.convention != Convention::bipolar) {
    throw ValidationError("to_binary: gate is already in the binary convention");
  }
  const std::size_t n = bipolar.size();
  GateSpec out;
  out.names = bipolar.names;
  out.convention = Convention::binary;
  out.terminals = bipolar.terminals;
  out.j.resize(n);
  out.h.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::int64_t row_sum = 0;
    for (std::size_t c = 0; c < n; ++c) {
      const std::int64_t v = raw_at_grid(bipolar.j[r][c]);
      row_sum += v;
      out.j[r].push_back(from_grid_raw(2 * v));
    }
    out.h.push_back(from_grid_raw(raw_at_grid(bipolar.h[r]) - row_sum));
  }
  refit(out);
  return out;
}

// ---------------------------------------------------------------------------

GateComposer::GateComposer(std::vector<std::string> terminals) : terminals_(terminals.size()) {
  for (const auto& t : terminals) node(t);
}

std::size_t GateComposer::node(std::string_view name) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  names_.emplace_back(name);
  for (auto& row : j_) row.push_back(0);
  j_.emplace_back(names_.size(), 0);
  h_.push_back(0);
  return names_.size() - 1;
}

void GateComposer::add(std::string_view a, std::string_view b, std::string_view out,
                       bool negate_inputs, bool negate_output) {
  // AND Hamiltonian; negating a spin flips the sign of its bias and of its couplings.
  static constexpr int kJ[3][3] = {{0, -1, 2}, {-1, 0, 2}, {2, 2, 0}};
  static constexpr int kH[3] = {1, 1, -2};
  const std::size_t idx[3] = {node(a), node(b), node(out)};
  if (idx[0] == idx[1] || idx[0] == idx[2] || idx[1] == idx[2]) {
    throw ValidationError("subgate terminals must be distinct");
  }
  int sign[3] = {negate_inputs ? -1 : 1, negate_inputs ? -1 : 1, negate_output ? -1 : 1};
  for (int p = 0; p < 3; ++p) {
    h_[idx[p]] += sign[p] * kH[p];
    for (int q = 0; q < 3; ++q) j_[idx[p]][idx[q]] += sign[p] * sign[q] * kJ[p][q];
  }
}

void GateComposer::add_and(std::string_view a, std::string_view b, std::string_view out) {
  add(a, b, out, false, false);
}

// OR(a, b) = NOT AND(NOT a, NOT b)
void GateComposer::add_or(std::string_view a, std::string_view b, std::string_view out) {
  add(a, b, out, true, true);
}

void GateComposer::add_nand(std::string_view a, std::string_view b, std::string_view out) {
  add(a, b, out, false, true);
}

GateSpec GateComposer::build() const {
  GateSpec gate = make_gate(names_, j_, h_);
  gate.terminals = terminals_ == names_.size() ? 0 : terminals_;
  return gate;
}

// ---------------------------------------------------------------------------

Tile make_tile(const GateSpec& gate, std::string tile_name, const FixedPoint& i0) {
  const GateSpec binary = gate.convention == Convention::binary ? gate : to_binary(gate);
  binary.validate();
  std::vector<WeightedPBit> pbits;
  pbits.reserve(binary.size());
  for (std::size_t i = 0; i < binary.size(); ++i) {
    pbits.emplace_back(binary.j[i], binary.h[i], i0, derive_seed(0, i));
  }
  return Tile(std::move(tile_name), std::move(pbits), binary.names);
}

GateSpec gate_of(const Tile& tile) {
  GateSpec gate;
  gate.names = tile.pbit_names();
  gate.convention = Convention::binary;
  for (std::size_t i = 0; i < tile.size(); ++i) {
    const auto& p = tile.pbit(i);
    gate.j.emplace_back(p.weights().begin(), p.weights().end());
    gate.h.push_back(p.bias());
  }
  gate.validate();
  refit(gate);
  return gate;
}

Circuit build_gate_circuit(const GateSpec& gate, std::string tile_name,
                           const BuildOptions& options) {
  Circuit circuit(options.i0);
  const std::size_t t = circuit.add_tile(make_tile(gate, std::move(tile_name), options.i0));
  for (std::size_t i = 0; i < gate.terminal_count(); ++i) {
    circuit.add_group({gate.names[i], {circuit.flat_index({t, i})}});
  }
  circuit.reset(options.seed);
  return circuit;
}

namespace {

struct FaPorts {
  std::size_t cin, a, b, s, cout;
};

FaPorts fa_ports(const GateSpec& fa) {
  return {fa.index_of("Cin"), fa.index_of("A"), fa.index_of("B"), fa.index_of("S"),
          fa.index_of("Cout")};
}

// Adds a carry chain of `count` Full Adder tiles named prefix0, prefix1, ...
// and returns their tile indices.
std::vector<std::size_t> add_adder_chain(Circuit& circuit, const GateSpec& fa_binary,
                                         const FaPorts& ports, const std::string& prefix,
                                         std::size_t count, const FixedPoint& i0) {
  std::vector<std::size_t> tiles;
  for (std::size_t k = 0; k < count; ++k) {
    tiles.push_back(circuit.add_tile(make_tile(fa_binary, prefix + std::to_string(k), i0)));
  }
  for (std::size_t k = 0; k + 1 < count; ++k) {
    circuit.add_link({{tiles[k], ports.cout}, {tiles[k + 1], ports.cin}, LinkMode::clamp_follow, {}});
  }
  circuit.set_clamp(PBitRef{tiles.front(), ports.cin}, ClampValue::zero);
  return tiles;
}

BitGroup port_group(const Circuit& circuit, std::string name, const std::vector<std::size_t>& tiles,
                    std::size_t port, std::size_t count) {
  BitGroup g{std::move(name), {}};
  for (std::size_t k = 0; k < count; ++k) g.bits.push_back(circuit.flat_index({tiles[k], port}));
  return g;
}

}  // namespace

Circuit build_rca(std::size_t n_bits, const GateSpec& fa, const BuildOptions& options) {
  if (n_bits == 0) throw ValidationError("build_rca: need at least one bit");
  if (n_bits > 61) throw ValidationError("build_rca: at most 61 bits");
  const GateSpec binary = fa.convention == Convention::binary ? fa : to_binary(fa);
  const FaPorts ports = fa_ports(binary);

  Circuit circuit(options.i0);
  const auto tiles = add_adder_chain(circuit, binary, ports, "fa", n_bits, options.i0);

  circuit.add_group(port_group(circuit, "A", tiles, ports.a, n_bits));
  circuit.add_group(port_group(circuit, "B", tiles, ports.b, n_bits));
  BitGroup sum = port_group(circuit, "S", tiles, ports.s, n_bits);
  sum.bits.push_back(circuit.flat_index({tiles.back(), ports.cout}));
  circuit.add_group(std::move(sum));
  circuit.reset(options.seed);
  return circuit;
}

Circuit build_ssp(std::uint64_t target, std::span<const std::vector<std::uint64_t>> sets,
                  const GateSpec& fa, const SspOptions& options) {
  const std::size_t w = options.input_bits;
  if (w == 0 || w > 60) throw ValidationError("build_ssp: input width must be 1..60 bits");
  if (sets.size() != 3) throw ValidationError("build_ssp: expected three input sets (A, B, C)");
  if ((target >> (w + 2)) != 0) {
    throw ValidationError("build_ssp: target " + std::to_string(target) + " needs more than " +
                          std::to_string(w + 2) + " bits");
  }
  // Free bit per set, if any.
  std::vector<std::optional<std::size_t>> free_bit;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const auto& members = sets[s];
    const std::string label(1, static_cast<char>('A' + s));
    if (std::find(members.begin(), members.end(), 0u) == members.end()) {
      throw ValidationError("set " + label + " must contain 0");
    }
    std::optional<std::size_t> bit;
    for (std::uint64_t m : members) {
      if (m == 0) continue;
      if (!std::has_single_bit(m) || (m >> w) != 0) {
        throw ValidationError("set " + label + ": member " + std::to_string(m) +
                              " is not a power of two below 2^" + std::to_string(w));
      }
      const auto k = static_cast<std::size_t>(std::countr_zero(m));
      if (bit && *bit != k) {
        throw ValidationError("set " + label + " has more than one non-zero member; only {0, 2^k} sets are encodable");
      }
      bit = k;
    }
    free_bit.push_back(bit);
  }

  const GateSpec binary = fa.convention == Convention::binary ? fa : to_binary(fa);
  const FaPorts ports = fa_ports(binary);
  Circuit circuit(options.i0);
  const auto top = add_adder_chain(circuit, binary, ports, "top", w, options.i0);
  const auto bottom = add_adder_chain(circuit, binary, ports, "bot", w + 1, options.i0);

  // Upward links: the bottom layer's T inputs drive the top layer's sum bits.
  for (std::size_t k = 0; k < w; ++k) {
    circuit.add_link({{bottom[k], ports.a}, {top[k], ports.s}, LinkMode::clamp_follow, {}});
  }
  circuit.add_link({{bottom[w], ports.a}, {top[w - 1], ports.cout}, LinkMode::clamp_follow, {}});

  circuit.add_group(port_group(circuit, "A", top, ports.a, w));
  circuit.add_group(port_group(circuit, "B", top, ports.b, w));
  circuit.add_group(port_group(circuit, "C", bottom, ports.b, w));
  circuit.add_group(port_group(circuit, "T", bottom, ports.a, w + 1));
  BitGroup sum = port_group(circuit, "S", bottom, ports.s, w + 1);
  sum.bits.push_back(circuit.flat_index({bottom.back(), ports.cout}));
  circuit.add_group(std::move(sum));

  // C is only w bits wide.
  circuit.set_clamp(PBitRef{bottom[w], ports.b}, ClampValue::zero);
  const std::array<std::pair<const std::vector<std::size_t>*, std::size_t>, 3> inputs{{
      {&top, ports.a}, {&top, ports.b}, {&bottom, ports.b}}};
  for (std::size_t s = 0; s < 3; ++s) {
    const auto& [layer, port] = inputs[s];
    for (std::size_t k = 0; k < w; ++k) {
      if (free_bit[s] != k) circuit.set_clamp(PBitRef{(*layer)[k], port}, ClampValue::zero);
    }
  }
  circuit.clamp_group("S", target);
  circuit.reset(options.seed);
  return circuit;
}

}  // namespace pbitemu
