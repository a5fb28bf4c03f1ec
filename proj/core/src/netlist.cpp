#include "pbitemu/netlist.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pbitemu/errors.hpp"

namespace pbitemu {
namespace {

using Json = nlohmann::ordered_json;

constexpr FixedFormat kStrengthFormat = FixedFormat::s(15, 2);

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw ValidationError("netlist: " + path + ": " + why);
}

const Json& field(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing required field '") + key + "'");
  return *it;
}

void check_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) fail(path, "unknown field '" + key + "'");
  }
}

const Json& array_at(const Json& obj, const std::string& path, const char* key) {
  const Json& v = field(obj, path, key);
  if (!v.is_array()) fail(path + "." + key, "expected an array");
  return v;
}

std::string string_at(const Json& obj, const std::string& path, const char* key) {
  const Json& v = field(obj, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

FixedPoint number(const Json& v, const std::string& path, FixedFormat format) {
  if (!v.is_string()) fail(path, "expected a decimal string such as \"-1.25\"");
  try {
    return FixedPoint::parse(v.get<std::string>(), format);
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

PBitRef resolve(const Circuit& circuit, const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a qualified p-bit name \"tile.pbit\"");
  auto ref = circuit.find_pbit(v.get<std::string>());
  if (!ref) fail(path, "unknown p-bit '" + v.get<std::string>() + "'");
  return *ref;
}

Tile parse_tile(const Json& t, const std::string& path, const FixedPoint& i0,
                std::vector<std::string>& warnings) {
  check_keys(t, path, {"name", "format", "pbits", "update_order"});
  const std::string name = string_at(t, path, "name");
  FixedFormat format;
  try {
    format = FixedFormat::parse(string_at(t, path, "format"));
  } catch (const ValidationError& e) {
    fail(path + ".format", e.what());
  }
  if (!format.is_signed || format.frac_bits != 2) {
    fail(path + ".format", "weights must use a signed s[x][2] format, got " + format.to_string());
  }
  const Json& pbits = array_at(t, path, "pbits");
  if (pbits.empty()) fail(path + ".pbits", "a tile needs at least one p-bit");
  std::vector<WeightedPBit> units;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < pbits.size(); ++i) {
    const std::string ppath = path + ".pbits[" + std::to_string(i) + "]";
    const Json& p = pbits[i];
    check_keys(p, ppath, {"name", "bias", "weights"});
    names.push_back(string_at(p, ppath, "name"));
    const FixedPoint bias = number(field(p, ppath, "bias"), ppath + ".bias", format);
    const Json& row = array_at(p, ppath, "weights");
    if (row.size() != pbits.size()) {
      fail(ppath + ".weights", "expected " + std::to_string(pbits.size()) + " entries, got " +
                                   std::to_string(row.size()));
    }
    std::vector<FixedPoint> weights;
    for (std::size_t k = 0; k < row.size(); ++k) {
      weights.push_back(number(row[k], ppath + ".weights[" + std::to_string(k) + "]", format));
    }
    units.emplace_back(std::move(weights), bias, i0, 0);
  }
  std::vector<std::size_t> order;
  if (auto it = t.find("update_order"); it != t.end()) {
    if (!it->is_array()) fail(path + ".update_order", "expected an array");
    for (const auto& v : *it) {
      if (!v.is_number_unsigned()) fail(path + ".update_order", "expected p-bit indices");
      order.push_back(v.get<std::size_t>());
    }
  } else {
    warnings.push_back(path + ": no update_order, using index order");
  }
  try {
    return Tile(name, std::move(units), std::move(names), std::move(order));
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
}

FixedFormat tile_format(const Tile& tile) {
  std::vector<FixedPoint> values;
  for (std::size_t i = 0; i < tile.size(); ++i) {
    const auto& p = tile.pbit(i);
    values.push_back(p.bias());
    values.insert(values.end(), p.weights().begin(), p.weights().end());
  }
  const FixedFormat first = values.front().format();
  for (const auto& v : values) {
    if (!(v.format() == first)) return fit_format(values, 2);
  }
  return first;
}

}  // namespace

LoadedNetlist parse_netlist(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("netlist: malformed JSON: ") + e.what());
  }
  check_keys(doc, "$", {"format", "version", "i0", "tiles", "links", "clamps", "terminals"});
  if (string_at(doc, "$", "format") != kNetlistFormat) {
    fail("$.format", "expected \"" + std::string(kNetlistFormat) + "\"");
  }
  const Json& version = field(doc, "$", "version");
  if (!version.is_number_integer() || version.get<int>() != kNetlistVersion) {
    fail("$.version", "unsupported version (expected " + std::to_string(kNetlistVersion) + ")");
  }

  LoadedNetlist out;
  const FixedPoint i0 = number(field(doc, "$", "i0"), "$.i0", kI0Format);
  out.circuit = Circuit(i0);
  Circuit& circuit = out.circuit;

  const Json& tiles = array_at(doc, "$", "tiles");
  if (tiles.empty()) fail("$.tiles", "a netlist needs at least one tile");
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    const std::string path = "$.tiles[" + std::to_string(t) + "]";
    Tile tile = parse_tile(tiles[t], path, i0, out.warnings);
    try {
      circuit.add_tile(std::move(tile));
    } catch (const ValidationError& e) {
      fail(path, e.what());
    }
  }

  if (auto it = doc.find("links"); it != doc.end()) {
    if (!it->is_array()) fail("$.links", "expected an array");
    for (std::size_t l = 0; l < it->size(); ++l) {
      const std::string path = "$.links[" + std::to_string(l) + "]";
      const Json& j = (*it)[l];
      check_keys(j, path, {"source", "dest", "mode", "strength"});
      DirectedLink link;
      link.source = resolve(circuit, field(j, path, "source"), path + ".source");
      link.dest = resolve(circuit, field(j, path, "dest"), path + ".dest");
      const std::string mode = string_at(j, path, "mode");
      if (mode == "clamp_follow") {
        link.mode = LinkMode::clamp_follow;
        if (j.contains("strength")) fail(path + ".strength", "only weighted links have a strength");
      } else if (mode == "weighted") {
        link.mode = LinkMode::weighted;
        link.strength = number(field(j, path, "strength"), path + ".strength", kStrengthFormat);
      } else {
        fail(path + ".mode", "expected \"clamp_follow\" or \"weighted\"");
      }
      try {
        circuit.add_link(link);
      } catch (const ValidationError& e) {
        fail(path, e.what());
      }
    }
  }

  if (auto it = doc.find("terminals"); it != doc.end()) {
    if (!it->is_array()) fail("$.terminals", "expected an array");
    for (std::size_t g = 0; g < it->size(); ++g) {
      const std::string path = "$.terminals[" + std::to_string(g) + "]";
      const Json& j = (*it)[g];
      check_keys(j, path, {"name", "bits"});
      BitGroup group{string_at(j, path, "name"), {}};
      const Json& bits = array_at(j, path, "bits");
      for (std::size_t b = 0; b < bits.size(); ++b) {
        group.bits.push_back(circuit.flat_index(
            resolve(circuit, bits[b], path + ".bits[" + std::to_string(b) + "]")));
      }
      try {
        circuit.add_group(std::move(group));
      } catch (const ValidationError& e) {
        fail(path, e.what());
      }
    }
  }

  if (auto it = doc.find("clamps"); it != doc.end()) {
    if (!it->is_array()) fail("$.clamps", "expected an array");
    for (std::size_t c = 0; c < it->size(); ++c) {
      const std::string path = "$.clamps[" + std::to_string(c) + "]";
      const Json& j = (*it)[c];
      check_keys(j, path, {"pbit", "value"});
      const PBitRef ref = resolve(circuit, field(j, path, "pbit"), path + ".pbit");
      const Json& value = field(j, path, "value");
      if (!value.is_number_unsigned() || value.get<unsigned>() > 1) {
        fail(path + ".value", "expected 0 or 1");
      }
      try {
        circuit.set_clamp(ref, value.get<unsigned>() ? ClampValue::one : ClampValue::zero);
      } catch (const ValidationError& e) {
        fail(path, e.what());
      }
    }
  }
  circuit.reset(0);
  return out;
}

LoadedNetlist load_netlist(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open netlist '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_netlist(text.str());
}

std::string netlist_json(const Circuit& circuit) {
  Json doc;
  doc["format"] = kNetlistFormat;
  doc["version"] = kNetlistVersion;
  doc["i0"] = circuit.i0().to_string();
  Json tiles = Json::array();
  for (const Tile& tile : circuit.tiles()) {
    const FixedFormat format = tile_format(tile);
    Json t;
    t["name"] = tile.name();
    t["format"] = format.to_string();
    Json pbits = Json::array();
    for (std::size_t i = 0; i < tile.size(); ++i) {
      const auto& p = tile.pbit(i);
      Json row = Json::array();
      for (const auto& w : p.weights()) row.push_back(w.to_string());
      pbits.push_back(Json{{"name", tile.pbit_names()[i]}, {"bias", p.bias().to_string()},
                           {"weights", std::move(row)}});
    }
    t["pbits"] = std::move(pbits);
    t["update_order"] = std::vector<std::size_t>(tile.update_order().begin(),
                                                 tile.update_order().end());
    tiles.push_back(std::move(t));
  }
  doc["tiles"] = std::move(tiles);

  Json links = Json::array();
  for (const auto& link : circuit.links()) {
    Json l;
    l["source"] = circuit.qualified_name(link.source);
    l["dest"] = circuit.qualified_name(link.dest);
    l["mode"] = link.mode == LinkMode::clamp_follow ? "clamp_follow" : "weighted";
    if (link.mode == LinkMode::weighted) l["strength"] = link.strength->to_string();
    links.push_back(std::move(l));
  }
  doc["links"] = std::move(links);

  Json clamps = Json::array();
  for (std::size_t t = 0; t < circuit.tiles().size(); ++t) {
    for (std::size_t i = 0; i < circuit.tile(t).size(); ++i) {
      const PBitRef ref{t, i};
      const bool followed = std::any_of(circuit.links().begin(), circuit.links().end(),
                                        [&](const DirectedLink& l) {
                                          return l.dest == ref && l.mode == LinkMode::clamp_follow;
                                        });
      if (followed) continue;
      const ClampValue v = circuit.pbit(ref).clamp_value();
      if (v == ClampValue::floating) continue;
      clamps.push_back(Json{{"pbit", circuit.qualified_name(ref)},
                            {"value", v == ClampValue::one ? 1 : 0}});
    }
  }
  doc["clamps"] = std::move(clamps);

  Json terminals = Json::array();
  for (const auto& group : circuit.groups()) {
    Json bits = Json::array();
    for (std::size_t b : group.bits) bits.push_back(circuit.qualified_name(circuit.ref(b)));
    terminals.push_back(Json{{"name", group.name}, {"bits", std::move(bits)}});
  }
  doc["terminals"] = std::move(terminals);
  return doc.dump(2) + "\n";
}

void save_netlist(const Circuit& circuit, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write netlist '" + path.string() + "'");
  out << netlist_json(circuit);
}

}  // namespace pbitemu
