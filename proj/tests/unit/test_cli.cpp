#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "pbitemu/gates.hpp"
#include "pbitemu/netlist.hpp"
#include "test_support.hpp"

namespace pbitemu {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "pbitemu");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

// Rows of a "value,count,probability" CSV, header dropped.
std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "value,count,probability");
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    for (std::string cell; std::getline(cs, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pbitemu_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ::setenv("PBITEMU_OUT_DIR", dir_.c_str(), 1);
  }
  void TearDown() override {
    ::unsetenv("PBITEMU_OUT_DIR");
    fs::remove_all(dir_);
  }
  fs::path dir_;
};

TEST_F(CliTest, AndRunHasFourDominantStates) {
  const auto r = run({"run", "--circuit", "and", "--sweeps", "200000", "--seed", "7", "--hist",
                      "hist.csv", "--out", "report.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(slurp(dir_ / "hist.csv"));
  std::vector<std::string> dominant;
  for (const auto& row : rows) {
    if (std::stod(row[2]) > 0.2) dominant.push_back(row[0]);
  }
  std::sort(dominant.begin(), dominant.end());
  EXPECT_EQ(dominant, (std::vector<std::string>{"000", "010", "100", "111"}));
  const auto report = nlohmann::json::parse(slurp(dir_ / "report.json"));
  EXPECT_EQ(report["samples"], 200000);
  EXPECT_EQ(report["sweep_cycles"], 9);
  EXPECT_LT(report["tv_vs_boltzmann"].get<double>(), 0.02);
}

TEST_F(CliTest, ClampedOutputGivesThreeStates) {
  const auto r = run({"run", "--circuit", "and", "--clamp", "C=0", "--sweeps", "200000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out.substr(r.out.find("value,count")));
  int frequent = 0;
  for (const auto& row : rows) {
    EXPECT_EQ(row[0].back(), '0');
    if (std::stod(row[2]) > 0.3) ++frequent;
  }
  EXPECT_EQ(frequent, 3);
}

TEST_F(CliTest, HistogramIsReproducible) {
  const std::vector<std::string> args{"run", "--circuit", "rca:4", "--sweeps", "3000",
                                      "--seed", "11", "--replicas", "3", "--hist"};
  auto a = args, b = args;
  a.push_back("a.csv");
  b.push_back("b.csv");
  ASSERT_EQ(run(a).code, 0);
  ASSERT_EQ(run(b).code, 0);
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
  EXPECT_FALSE(slurp(dir_ / "a.csv").empty());
}

TEST_F(CliTest, RelativeOutputsUseOutDir) {
  ASSERT_EQ(run({"sigmoid", "--updates", "1000", "--out", "sig.csv"}).code, 0);
  const auto text = slurp(dir_ / "sig.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')), "u,mean,ideal");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 65);
}

TEST_F(CliTest, LutDump) {
  const auto r = run({"lut", "--dump"});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::size_t k = 0;
  for (; std::getline(in, line); ++k) {
    ASSERT_LT(k, 64u);
    EXPECT_EQ(std::stoul(line, nullptr, 16), testing::kActivationOracle[k]);
    EXPECT_EQ(line.size(), 8u);
  }
  EXPECT_EQ(k, 64u);
}

TEST_F(CliTest, ValidationErrorsExitTwo) {
  EXPECT_EQ(run({"run", "--circuit", "and", "--clamp", "D=1", "--sweeps", "10"}).code, 2);
  EXPECT_EQ(run({"run", "--circuit", "and", "--clamp", "A=2", "--sweeps", "10"}).code, 2);
  EXPECT_EQ(run({"run", "--circuit", "nand"}).code, 2);
  EXPECT_EQ(run({"run", "--circuit", "and", "--i0", "0.001"}).code, 2);
  EXPECT_EQ(run({"run", "--bogus"}).code, 2);
  EXPECT_EQ(run({"verify", "--circuit", "rca:2", "--sweeps", "10"}).code, 2);
  EXPECT_EQ(run({"run", "--circuit", (dir_ / "missing.json").string()}).code, 2);
  const auto r = run({"run", "--circuit", "and", "--clamp", "D=1"});
  EXPECT_NE(r.err.find("unknown terminal"), std::string::npos) << r.err;
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, VerifyPassAndFail) {
  const auto pass = run({"verify", "--circuit", "and", "--out", "verify.json"});
  EXPECT_EQ(pass.code, 0) << pass.out;
  EXPECT_NE(pass.out.find("PASS"), std::string::npos);
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir_ / "verify.json"))["pass"].get<bool>());
  const auto fail = run({"verify", "--circuit", "fa5", "--sweeps", "100", "--tolerance", "0.001"});
  EXPECT_EQ(fail.code, 3);
  EXPECT_NE(fail.out.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, VerifyOverBudgetExitsFour) {
  const std::size_t n = 25;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
  const auto gate = make_gate(names, std::vector<std::vector<int>>(n, std::vector<int>(n, 0)),
                              std::vector<int>(n, 0));
  save_netlist(build_gate_circuit(gate, "big"), dir_ / "big.json");
  const auto r = run({"verify", "--circuit", (dir_ / "big.json").string(), "--sweeps", "1"});
  EXPECT_EQ(r.code, 4) << r.err;
}

TEST_F(CliTest, ExportThenRun) {
  ASSERT_EQ(run({"export", "--circuit", "fa5", "--clamp", "Cin=1", "--out", "fa.json"}).code, 0);
  const auto path = (dir_ / "fa.json").string();
  const auto first = slurp(path);
  ASSERT_EQ(run({"export", "--circuit", path, "--out", "again.json"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "again.json"), first);
  const auto r = run({"run", "--circuit", path, "--sweeps", "20000", "--expr", "Cin"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("mode 1"), std::string::npos) << r.out;
}

TEST_F(CliTest, RcaDefaultExpressionPeaksAtZero) {
  const auto r = run({"run", "--circuit", "rca:4", "--sweeps", "20000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("histogram of S-A-B"), std::string::npos);
  EXPECT_NE(r.out.find("mode 0"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace pbitemu
