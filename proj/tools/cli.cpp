#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pbitemu/activation_table.hpp"
#include "pbitemu/errors.hpp"
#include "pbitemu/experiment.hpp"
#include "pbitemu/gates.hpp"
#include "pbitemu/netlist.hpp"
#include "pbitemu/oracle.hpp"
#include "pbitemu/stats.hpp"

namespace pbitemu::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr const char* kOutDirEnv = "PBITEMU_OUT_DIR";

struct CircuitOptions {
  std::string circuit = "and";
  std::uint64_t seed = 1;
  std::optional<std::string> i0;
  std::vector<std::string> clamps;
  std::string fa;
  bool randomize_order = false;
  std::uint64_t target = 3584;
  std::string sets = "512,1024,2048";
  std::size_t input_bits = 15;
};

struct Built {
  Circuit circuit;
  // Reciprocal single-tile circuits only; the oracle runs on it.
  std::optional<GateSpec> gate;
  std::string default_expression;
  std::vector<std::string> warnings;
};

std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::uint64_t parse_uint(std::string_view text, const std::string& what) {
  std::uint64_t v = 0;
  auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
    throw ValidationError(what + ": '" + std::string(text) + "' is not a non-negative integer");
  }
  return v;
}

GateSpec full_adder(const std::string& name) {
  if (name == "fa5") return full_adder_5();
  if (name == "fa14") return full_adder_14();
  throw ValidationError("--fa must be fa5 or fa14, got '" + name + "'");
}

std::vector<std::vector<std::uint64_t>> parse_sets(const std::string& text) {
  std::vector<std::vector<std::uint64_t>> sets;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    const std::uint64_t v = parse_uint(token, "--sets");
    sets.push_back(v == 0 ? std::vector<std::uint64_t>{0} : std::vector<std::uint64_t>{0, v});
  }
  return sets;
}

void apply_clamp(Circuit& circuit, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("--clamp expects NAME=VALUE, got '" + assignment + "'");
  }
  const std::string name = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  const bool floating = value == "float" || value == "x";
  if (circuit.find_group(name)) {
    if (floating) {
      circuit.float_group(name);
    } else {
      circuit.clamp_group(name, parse_uint(value, "--clamp " + name));
    }
    return;
  }
  if (!circuit.find_pbit(name)) throw ValidationError("unknown terminal '" + name + "'");
  if (floating) {
    circuit.set_clamp(name, ClampValue::floating);
    return;
  }
  const std::uint64_t bit = parse_uint(value, "--clamp " + name);
  if (bit > 1) throw ValidationError("--clamp " + name + ": a single p-bit takes 0 or 1");
  circuit.set_clamp(name, bit ? ClampValue::one : ClampValue::zero);
}

Built build(const CircuitOptions& opts) {
  Built out;
  const std::string& name = opts.circuit;
  const bool is_file = name.ends_with(".json");
  BuildOptions bo;
  bo.seed = opts.seed;
  if (opts.i0) {
    if (is_file) throw ValidationError("--i0 cannot override the i0 stored in a netlist");
    bo.i0 = FixedPoint::parse(*opts.i0, kI0Format);
  }

  if (name == "and" || name == "fa5" || name == "fa14") {
    if (!opts.fa.empty()) throw ValidationError("--fa applies to rca and ssp circuits only");
    GateSpec gate = name == "and" ? and_gate() : full_adder(name);
    out.circuit = build_gate_circuit(gate, name == "and" ? "and" : "fa", bo);
    out.gate = std::move(gate);
  } else if (name.starts_with("rca:")) {
    const auto bits = parse_uint(std::string_view(name).substr(4), "rca width");
    out.circuit = build_rca(bits, full_adder(opts.fa.empty() ? "fa5" : opts.fa), bo);
    out.default_expression = "S-A-B";
  } else if (name == "ssp") {
    SspOptions so;
    so.i0 = bo.i0;
    so.seed = bo.seed;
    so.input_bits = opts.input_bits;
    const auto sets = parse_sets(opts.sets);
    out.circuit = build_ssp(opts.target, sets, full_adder(opts.fa.empty() ? "fa14" : opts.fa), so);
    out.default_expression = "A+B+C";
  } else if (is_file) {
    LoadedNetlist loaded = load_netlist(name);
    out.circuit = std::move(loaded.circuit);
    out.warnings = std::move(loaded.warnings);
    if (out.circuit.tiles().size() == 1 && out.circuit.links().empty()) {
      out.gate = gate_of(out.circuit.tile(0));
    }
  } else {
    throw ValidationError("unknown circuit '" + name +
                          "' (expected and, fa5, fa14, rca:N, ssp or a .json netlist)");
  }

  for (const auto& c : opts.clamps) apply_clamp(out.circuit, c);
  out.circuit.set_randomized_order(opts.randomize_order);
  out.circuit.reset(opts.seed);
  return out;
}

// Every terminal bit in group order, or all p-bits when there are no groups.
std::vector<std::size_t> terminal_bits(const Circuit& circuit) {
  std::vector<std::size_t> bits;
  for (const auto& g : circuit.groups()) bits.insert(bits.end(), g.bits.begin(), g.bits.end());
  if (bits.empty()) {
    for (std::size_t i = 0; i < circuit.pbit_count(); ++i) bits.push_back(i);
  }
  return bits;
}

std::string terminal_label(const Circuit& circuit) {
  std::string label;
  for (const auto& g : circuit.groups()) label += (label.empty() ? "" : ",") + g.name;
  return label.empty() ? "state" : label;
}

Clamps oracle_clamps(const Circuit& circuit) {
  Clamps clamps;
  const Tile& tile = circuit.tile(0);
  for (std::size_t i = 0; i < tile.size(); ++i) {
    const ClampValue v = tile.pbit(i).clamp_value();
    if (v != ClampValue::floating) clamps[i] = v == ClampValue::one;
  }
  return clamps;
}

// Terminal-marginal TV distance between the samples and the exact distribution.
double oracle_tv(const Built& built, const SampleLog& log) {
  const auto bits = terminal_bits(built.circuit);
  const auto exact = enumerate(*built.gate, built.circuit.i0().to_double(),
                               oracle_clamps(built.circuit));
  return tv_distance(normalize(state_histogram(log, bits)), exact.marginal(bits));
}

fs::path output_path(const std::string& path) {
  fs::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) p = fs::path(dir) / p;
  }
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

std::ofstream open_output(const std::string& path) {
  const fs::path p = output_path(path);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  return out;
}

void add_circuit_options(CLI::App& cmd, CircuitOptions& opts) {
  cmd.add_option("--circuit", opts.circuit, "and | fa5 | fa14 | rca:N | ssp | netlist.json")
      ->capture_default_str();
  cmd.add_option("--seed", opts.seed, "Master seed")->capture_default_str();
  cmd.add_option("--i0", opts.i0, "Inverse pseudo-temperature, exact in s[7][8] (default 1)");
  cmd.add_option("--clamp", opts.clamps,
                 "NAME=VALUE: 0/1 for a p-bit or one-bit terminal, an integer for a group, "
                 "'float' to release")
      ->take_all();
  cmd.add_option("--fa", opts.fa, "Full Adder tile for rca/ssp: fa5 | fa14")
      ->check(CLI::IsMember({"fa5", "fa14"}));
  cmd.add_flag("--randomize-order", opts.randomize_order,
               "Shuffle each tile's update order every sweep");
  cmd.add_option("--target", opts.target, "ssp: target sum")->capture_default_str();
  cmd.add_option("--sets", opts.sets, "ssp: comma list v1,v2,v3 for the sets {0,v}")
      ->capture_default_str();
  cmd.add_option("--input-bits", opts.input_bits, "ssp: input width")->capture_default_str();
}

struct RunOptions {
  std::uint64_t sweeps = 100000;
  std::size_t replicas = 1;
  std::string expression;
  std::string out;
  std::string hist;
};

int do_run(const CircuitOptions& copts, const RunOptions& ropts, std::ostream& out,
           std::ostream& err) {
  Built built = build(copts);
  for (const auto& w : built.warnings) err << "warning: " << w << '\n';
  const SampleLog log = run_replicas(built.circuit, ropts.sweeps, copts.seed, ropts.replicas);

  const std::string expression =
      ropts.expression.empty() ? built.default_expression : ropts.expression;
  Json bins = Json::array();
  std::ostringstream csv;
  std::string mode_label;
  if (expression.empty()) {
    const auto bits = terminal_bits(built.circuit);
    const auto hist = state_histogram(log, bits);
    write_state_histogram_csv(csv, hist, bits.size());
    for (const auto& [k, c] : hist) {
      bins.push_back({{"value", state_string(k, bits.size())},
                      {"count", c},
                      {"probability", static_cast<double>(c) / static_cast<double>(log.size())}});
    }
    mode_label = state_string(mode(hist), bits.size());
  } else {
    const auto hist = histogram(log, expression);
    write_histogram_csv(csv, hist);
    for (const auto& [v, c] : hist) {
      bins.push_back({{"value", v},
                      {"count", c},
                      {"probability", static_cast<double>(c) / static_cast<double>(log.size())}});
    }
    mode_label = std::to_string(mode(hist));
  }

  Json report;
  report["circuit"] = copts.circuit;
  report["seed"] = copts.seed;
  report["sweeps"] = ropts.sweeps;
  report["replicas"] = ropts.replicas;
  report["samples"] = log.size();
  report["i0"] = built.circuit.i0().to_string();
  report["clamps"] = copts.clamps;
  report["pbits"] = built.circuit.pbit_count();
  report["sweep_cycles"] = built.circuit.sweep_cycles();
  report["histogram_of"] = expression.empty() ? terminal_label(built.circuit) : expression;
  report["mode"] = mode_label;
  if (built.gate) {
    try {
      report["tv_vs_boltzmann"] = oracle_tv(built, log);
    } catch (const BudgetExceededError& e) {
      err << "warning: " << e.what() << '\n';
    }
  }
  report["histogram"] = std::move(bins);

  out << "circuit " << copts.circuit << ", " << log.size() << " samples, histogram of "
      << report["histogram_of"].get<std::string>() << '\n';
  out << "mode " << mode_label << '\n';
  if (report.contains("tv_vs_boltzmann")) {
    out << "TV vs Boltzmann " << format_double(report["tv_vs_boltzmann"].get<double>()) << '\n';
  }
  if (ropts.hist.empty()) {
    out << csv.str();
  } else {
    open_output(ropts.hist) << csv.str();
  }
  if (!ropts.out.empty()) open_output(ropts.out) << report.dump(2) << '\n';
  return kOk;
}

struct VerifyOptions {
  std::uint64_t sweeps = 1000000;
  std::size_t replicas = 1;
  double tolerance = 0.01;
  std::string out;
};

int do_verify(const CircuitOptions& copts, const VerifyOptions& vopts, std::ostream& out,
              std::ostream& err) {
  Built built = build(copts);
  for (const auto& w : built.warnings) err << "warning: " << w << '\n';
  if (!built.gate) {
    throw ValidationError("verify needs a reciprocal single-tile circuit; the Boltzmann law "
                          "does not apply to directed multi-tile circuits");
  }
  // Enumerate first so an over-budget circuit fails before sampling.
  const auto bits = terminal_bits(built.circuit);
  const auto exact = enumerate(*built.gate, built.circuit.i0().to_double(),
                               oracle_clamps(built.circuit));
  const SampleLog log = run_replicas(built.circuit, vopts.sweeps, copts.seed, vopts.replicas);
  const double tv = tv_distance(normalize(state_histogram(log, bits)), exact.marginal(bits));
  const bool pass = tv < vopts.tolerance;
  out << "TV " << format_double(tv) << " (tolerance " << format_double(vopts.tolerance) << ", "
      << log.size() << " samples over " << terminal_label(built.circuit) << "): "
      << (pass ? "PASS" : "FAIL") << '\n';
  if (!vopts.out.empty()) {
    Json report;
    report["circuit"] = copts.circuit;
    report["seed"] = copts.seed;
    report["sweeps"] = vopts.sweeps;
    report["samples"] = log.size();
    report["i0"] = built.circuit.i0().to_string();
    report["terminals"] = terminal_label(built.circuit);
    report["tv"] = tv;
    report["tolerance"] = vopts.tolerance;
    report["pass"] = pass;
    open_output(vopts.out) << report.dump(2) << '\n';
  }
  return pass ? kOk : kVerifyFailed;
}

int do_sigmoid(std::uint64_t updates, std::uint64_t seed, const std::string& path,
               std::ostream& out) {
  const auto grid = activation_grid();
  const auto points = sigmoid_sweep(updates, grid, seed);
  std::ostringstream csv;
  csv << "u,mean,ideal\n";
  double worst = 0;
  for (const auto& p : points) {
    csv << p.input.to_string() << ',' << format_double(p.mean) << ',' << format_double(p.ideal)
        << '\n';
    worst = std::max(worst, std::abs(p.mean - p.ideal));
  }
  if (path.empty()) {
    out << csv.str();
  } else {
    open_output(path) << csv.str();
    out << points.size() << " points, max |mean - ideal| " << format_double(worst) << '\n';
  }
  return kOk;
}

int do_lut(bool dump, std::ostream& out) {
  const auto& table = ActivationTable::standard();
  char buf[16];
  if (!dump) out << "index,u,raw,value\n";
  for (std::size_t i = 0; i < ActivationTable::kSize; ++i) {
    std::snprintf(buf, sizeof buf, "%08X", table.raw_at(i));
    if (dump) {
      out << buf << '\n';
    } else {
      out << i << ',' << ActivationTable::input_at(i).to_string() << ",0x" << buf << ','
          << format_double(std::ldexp(static_cast<double>(table.raw_at(i)), -31)) << '\n';
    }
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bit-exact p-bit fabric emulator"};
  app.require_subcommand(1);

  CircuitOptions run_circuit;
  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Sample a circuit and write its histogram");
  add_circuit_options(*run_cmd, run_circuit);
  run_cmd->add_option("--sweeps", run_opts.sweeps, "Sweeps per replica")->capture_default_str();
  run_cmd->add_option("--replicas", run_opts.replicas, "Independent seeds seed..seed+K-1")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--expr", run_opts.expression,
                      "Signed group expression to histogram, e.g. S-A-B");
  run_cmd->add_option("--out", run_opts.out, "JSON report path");
  run_cmd->add_option("--hist", run_opts.hist, "Histogram CSV path (stdout if omitted)");

  CircuitOptions verify_circuit;
  VerifyOptions verify_opts;
  auto* verify_cmd =
      app.add_subcommand("verify", "Compare sampled statistics with the exact Boltzmann law");
  add_circuit_options(*verify_cmd, verify_circuit);
  verify_cmd->add_option("--sweeps", verify_opts.sweeps, "Sweeps per replica")
      ->capture_default_str();
  verify_cmd->add_option("--replicas", verify_opts.replicas, "Independent seeds")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--tolerance", verify_opts.tolerance, "Largest passing TV distance")
      ->capture_default_str();
  verify_cmd->add_option("--out", verify_opts.out, "JSON report path");

  std::uint64_t sig_updates = 100000;
  std::uint64_t sig_seed = 1;
  std::string sig_out;
  auto* sigmoid_cmd =
      app.add_subcommand("sigmoid", "Time-averaged output of a lone p-bit over the input grid");
  sigmoid_cmd->add_option("--updates", sig_updates, "Updates per grid point")
      ->capture_default_str();
  sigmoid_cmd->add_option("--seed", sig_seed, "Master seed")->capture_default_str();
  sigmoid_cmd->add_option("--out", sig_out, "CSV path (stdout if omitted)");

  bool lut_dump = false;
  auto* lut_cmd = app.add_subcommand("lut", "Print the activation table");
  lut_cmd->add_flag("--dump", lut_dump, "64 hex words, one per line");

  CircuitOptions export_circuit;
  std::string export_out;
  auto* export_cmd = app.add_subcommand("export", "Write a circuit as a JSON netlist");
  add_circuit_options(*export_cmd, export_circuit);
  export_cmd->add_option("--out", export_out, "Netlist path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (*run_cmd) return do_run(run_circuit, run_opts, out, err);
    if (*verify_cmd) return do_verify(verify_circuit, verify_opts, out, err);
    if (*sigmoid_cmd) return do_sigmoid(sig_updates, sig_seed, sig_out, out);
    if (*lut_cmd) return do_lut(lut_dump, out);
    if (*export_cmd) {
      const Built built = build(export_circuit);
      const fs::path path = output_path(export_out);
      save_netlist(built.circuit, path);
      out << "wrote " << path.string() << '\n';
      return kOk;
    }
  } catch (const BudgetExceededError& e) {
    err << "error: " << e.what() << '\n';
    return kBudgetExceeded;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}

}  // namespace pbitemu::cli
