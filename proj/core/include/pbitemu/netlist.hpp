#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pbitemu/circuit.hpp"

namespace pbitemu {

inline constexpr std::string_view kNetlistFormat = "pbitemu-netlist";
inline constexpr int kNetlistVersion = 1;

struct LoadedNetlist {
  Circuit circuit;
  std::vector<std::string> warnings;
};

/// JSON netlist layout (docs/netlist.schema.json):
///
///   { "format": "pbitemu-netlist", "version": 1, "i0": "1",
///     "tiles": [ { "name", "format": "s[3][2]", "update_order": [...],
///                  "pbits": [ { "name", "bias": "-2", "weights": ["0", ...] } ] } ],
///     "links": [ { "source": "t.p", "dest": "u.q", "mode": "clamp_follow" | "weighted",
///                  "strength": "1" } ],
///     "clamps": [ { "pbit": "t.p", "value": 0 | 1 } ],
///     "terminals": [ { "name": "A", "bits": ["t.p", ...] } ] }
///
/// Numbers are decimal strings that must be exact in the declared format.
/// Errors name the offending field, e.g. tiles[0].pbits[2].weights[1].
LoadedNetlist parse_netlist(std::string_view text);
LoadedNetlist load_netlist(const std::filesystem::path& path);

// Saving the result of a load reproduces the file byte for byte when it was
// itself written by save_netlist.
std::string netlist_json(const Circuit& circuit);
void save_netlist(const Circuit& circuit, const std::filesystem::path& path);

}  // namespace pbitemu
