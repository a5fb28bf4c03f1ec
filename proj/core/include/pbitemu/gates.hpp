#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pbitemu/circuit.hpp"
#include "pbitemu/fixed_point.hpp"

namespace pbitemu {

enum class Convention {
  bipolar,  // m in {-1, +1}
  binary,   // m in {0, 1}
};

/// Symmetric coupling matrix J and bias h for one reciprocal p-circuit.
///
/// All entries share one s[x][2] format (the narrowest that holds them).
struct GateSpec {
  std::vector<std::string> names;
  std::vector<std::vector<FixedPoint>> j;
  std::vector<FixedPoint> h;
  Convention convention = Convention::bipolar;
  // names[0, terminals) are I/O terminals and the rest are auxiliary p-bits.
  // Zero means every p-bit is a terminal.
  std::size_t terminals = 0;

  std::size_t size() const { return names.size(); }
  std::size_t terminal_count() const { return terminals == 0 ? size() : terminals; }
  std::size_t index_of(std::string_view name) const;
  FixedFormat format() const;

  // Square, symmetric, zero diagonal, consistent sizes, unique names.
  void validate() const;
  bool is_symmetric() const;
};

GateSpec make_gate(std::vector<std::string> names, const std::vector<std::vector<int>>& j,
                   const std::vector<int>& h, Convention convention = Convention::bipolar);

// J = [[0,-1,2],[-1,0,2],[2,2,0]], h = [1,1,-2] over [A,B,C].
GateSpec and_gate();

// Five-p-bit Full Adder over [Cin,B,A,S,Cout] with zero bias.
GateSpec full_adder_5();

// Fourteen-p-bit Full Adder assembled from three-p-bit AND/OR/NAND subgates:
// S = XOR(XOR(A,B),Cin) with XOR(x,y) = AND(OR(x,y), NAND(x,y)), and
// Cout = OR(OR(AB, A Cin), B Cin). Terminals [Cin,B,A,S,Cout] come first,
// followed by nine auxiliary p-bits. This is a reconstruction: it reproduces
// the Full Adder truth table as its eight dominant states.
GateSpec full_adder_14();

// J_binary = 2 J_bipolar, h_binary = h_bipolar - J_bipolar * 1.
GateSpec to_binary(const GateSpec& bipolar);

/// Sums three-p-bit gate Hamiltonians over shared named nodes. Every
/// consistent assignment sits at the same minimum energy and every violated
/// subgate costs at least 4 (in bipolar units).
class GateComposer {
 public:
  explicit GateComposer(std::vector<std::string> terminals = {});

  std::size_t node(std::string_view name);
  void add_and(std::string_view a, std::string_view b, std::string_view out);
  void add_or(std::string_view a, std::string_view b, std::string_view out);
  void add_nand(std::string_view a, std::string_view b, std::string_view out);

  GateSpec build() const;

 private:
  std::size_t terminals_ = 0;
  void add(std::string_view a, std::string_view b, std::string_view out, bool negate_inputs,
           bool negate_output);

  std::vector<std::string> names_;
  std::vector<std::vector<int>> j_;
  std::vector<int> h_;
};

struct BuildOptions {
  FixedPoint i0 = default_i0();
  std::uint64_t seed = 1;
};

// One tile holding the gate in binary form; p-bit names are the gate labels.
// Seeds are placeholders until Circuit::reset.
Tile make_tile(const GateSpec& gate, std::string tile_name, const FixedPoint& i0);

// Binary-convention gate read back from a tile's weight rows and biases.
// Throws if the rows are not symmetric.
GateSpec gate_of(const Tile& tile);

// Single-tile circuit with a one-bit group per terminal label.
Circuit build_gate_circuit(const GateSpec& gate, std::string tile_name,
                           const BuildOptions& options = {});

/// N Full Adder tiles chained LSB to MSB: tile k's Cout drives tile k+1's
/// Cin through a clamp-follow link, and tile 0's Cin is clamped to 0.
/// Groups: A and B (n bits), S (n + 1 bits, the top bit is the last Cout).
Circuit build_rca(std::size_t n_bits, const GateSpec& fa, const BuildOptions& options = {});

struct SspOptions : BuildOptions {
  std::size_t input_bits = 15;
};

/// Subset-sum instance on two adder layers. The top layer adds A + B = T;
/// the bottom layer adds T + C = S with S clamped to the target. Each T bit
/// of the bottom layer drives the matching top-layer sum bit, so information
/// flows only upward from S. Each input set must be {0} or {0, 2^k}: bit k
/// floats and every other input bit is clamped to 0.
/// Groups: A, B, C (input_bits), T (input_bits + 1), S (input_bits + 2).
Circuit build_ssp(std::uint64_t target, std::span<const std::vector<std::uint64_t>> sets,
                  const GateSpec& fa, const SspOptions& options = {});

}  // namespace pbitemu
