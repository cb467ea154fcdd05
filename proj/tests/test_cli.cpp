#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wavenet/cli/config.hpp"
#include "wavenet/cli/dispatch.hpp"
#include "wavenet/cli/emit.hpp"
#include "wavenet/cli/report_io.hpp"

using namespace wavenet;
using namespace wavenet::cli;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = WAVENET_CONFIG_DIR;

struct Result {
  int code = 0;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "wavenet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wavenet_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

// a short Pi-tree run, quick enough for a unit test
const char* kSmallTree = R"({
  "variant": "tree",
  "vertices": [
    {"id": "R", "kind": "root"},
    {"id": "a", "kind": "mass", "mass": 1},
    {"id": "u", "kind": "controlled"},
    {"id": "v", "kind": "controlled"}
  ],
  "edges": [
    {"id": "e1", "tail": "R", "head": "a", "length": 1},
    {"id": "e2", "tail": "a", "head": "u", "length": 1},
    {"id": "e3", "tail": "a", "head": "v", "length": "1/2"}
  ],
  "simulation": {"T": 6, "cells-per-unit-length": 20, "sample-stride": 5},
  "spectrum": {"box": [-2, 0.5, -3, 3]},
  "sweep": {"beta": [0, 1, 2], "ladder": [10, 20]}
})";

}  // namespace

TEST_CASE("config errors carry line and column") {
  try {
    parse_document("{\n  \"a\": 1,\n  oops\n}", "bad.json");
    FAIL("no throw");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() >= 1);
    CHECK(std::string(e.what()).find("bad.json:3:") == 0);
  }
  CHECK_THROWS_AS(load_document("/nonexistent/dir/x.json"), ConfigError);
  const Document d = parse_document(
      R"({"variant": "tree", "vertices": [{"id": "R", "kind": "spring"}], "edges": []})");
  CHECK_THROWS_AS(read_network(d), ConfigError);
  CHECK_THROWS_AS(parse_document("[1, 2]"), ConfigError);
  CHECK(feedback_from_string("first-mass") == CircuitFeedback::FirstMass);
  CHECK(std::string(to_string(CircuitFeedback::PerNode)) == "per-node");
  CHECK_THROWS(feedback_from_string("nope"));
}

TEST_CASE("network and chain configs") {
  const NetworkConfig chain = read_network(load_document(kConfigs + "/chain_pi.json"));
  REQUIRE(chain.chain.has_value());
  CHECK(chain.chain->N() == 3);
  CHECK(chain.graph.edges.size() == 3);
  const NetworkConfig tree = read_network(parse_document(kSmallTree));
  CHECK(!tree.chain.has_value());
  CHECK(tree.graph.edges.size() == 3);
  const SweepConfig sw = read_sweep(parse_document(kSmallTree));
  CHECK(sw.betas == std::vector<double>{0, 1, 2});
  CHECK(sw.options.ladder == std::vector<double>{10, 20});
}

TEST_CASE("numbers, CSV and JSON text are deterministic") {
  CHECK(format_number(1.5) == "1.500000000000e+00");
  CHECK(csv_text({"a", "b"}, {{1, 2}}) == "a,b\n1.000000000000e+00,2.000000000000e+00\n");
  CHECK(csv_text({"a"}, {}) == "a\n");
  const nlohmann::json j = {{"z", 1}, {"a", 2}};
  const std::string t = json_text(j);
  CHECK(t.find("\"a\"") < t.find("\"z\""));
  CHECK(t.back() == '\n');
}

TEST_CASE("simulate twice gives byte-identical outputs and a complete manifest") {
  const fs::path cfg = write_file(scratch("sim") / "tree.json", kSmallTree);
  const fs::path o1 = scratch("sim_a"), o2 = scratch("sim_b");
  const Result r1 = call({"simulate", "--config", cfg.string(), "--out", o1.string(), "--svg"});
  const Result r2 = call({"simulate", "--config", cfg.string(), "--out", o2.string(), "--svg"});
  REQUIRE(r1.code == kOk);
  REQUIRE(r2.code == kOk);
  CHECK(slurp(o1 / "energy.csv") == slurp(o2 / "energy.csv"));
  CHECK(slurp(o1 / "summary.json") == slurp(o2 / "summary.json"));
  CHECK(slurp(o1 / "energy.csv").rfind("t,E,D,R\n", 0) == 0);

  const auto manifest = nlohmann::json::parse(slurp(o1 / "manifest.json"));
  std::set<std::string> listed, on_disk;
  for (const auto& f : manifest.at("files")) listed.insert(f.get<std::string>());
  for (const auto& e : fs::directory_iterator(o1)) on_disk.insert(e.path().filename().string());
  CHECK(listed == on_disk);
  CHECK(listed.count("manifest.json") == 1);
  CHECK(manifest.at("subcommand") == "simulate");
  CHECK(manifest.at("version") == kToolVersion);

  const std::string svg = slurp(o1 / "energy.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("log scale") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos);

  // stdout carries the same summary
  CHECK(nlohmann::json::parse(r1.out) == nlohmann::json::parse(slurp(o1 / "summary.json")));
}

TEST_CASE("empty spectrum box gives a header-only CSV") {
  const fs::path cfg = write_file(scratch("empty") / "edge.json", R"({
    "variant": "tree",
    "vertices": [{"id": "R", "kind": "root"}, {"id": "u", "kind": "controlled"}],
    "edges": [{"id": "e1", "tail": "R", "head": "u", "length": 1}],
    "spectrum": {"box": [-1, 0.5, -5, 5]}
  })");
  const fs::path out = scratch("empty_out");
  const Result r = call({"spectrum", "--config", cfg.string(), "--out", out.string()});
  REQUIRE(r.code == kOk);
  CHECK(slurp(out / "spectrum.csv") == "re,im,residual,box_count\n");
  CHECK(nlohmann::json::parse(r.out).at("count") == 0);
}

TEST_CASE("exit codes") {
  CHECK(call({"check", "--config", kConfigs + "/pitree.json"}).code == kOk);
  CHECK(call({"check", "--config", kConfigs + "/chain_pi.json", "--expect-stable"}).code == kUnstable);
  CHECK(call({"chain-check", "--config", kConfigs + "/chain_stable.json", "--expect-stable"}).code == kOk);
  CHECK(call({"chain-check", "--config", kConfigs + "/chain_pi.json", "--expect-stable"}).code == kUnstable);
  CHECK(call({"sweep", "--config", kConfigs + "/chain_pi.json", "--expect-stable"}).code == kUnstable);

  const fs::path bad = write_file(scratch("bad") / "bad.json", "{\"variant\": tree}");
  const Result malformed = call({"check", "--config", bad.string()});
  CHECK(malformed.code == kUsage);
  CHECK(malformed.err.find("1:") != std::string::npos);
  CHECK(call({"frobnicate"}).code == kUsage);
  CHECK(call({}).code == kUsage);
  CHECK(call({"check"}).code == kUsage);
  CHECK(call({"simulate", "--config", kConfigs + "/pitree.json", "--svg"}).code == kUsage);
  CHECK(call({"counterexample", "--variant", "circuit", "--length", "3/2"}).code == kUsage);
  CHECK(call({"--help"}).code == kOk);
}

TEST_CASE("installed binary reports the same exit codes") {
  const char* tool = std::getenv("WAVENET_TOOL");
  if (!tool) return;
  auto run = [&](const std::string& args) {
    const int raw = std::system(("\"" + std::string(tool) + "\" " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(run("check --config " + kConfigs + "/pitree.json") == 0);
  CHECK(run("chain-check --config " + kConfigs + "/chain_pi.json --expect-stable") == 1);
  CHECK(run("nonsense") == 2);
}

TEST_CASE("counterexample summaries") {
  const Result c = call({"counterexample", "--variant", "circuit", "--probes", "8"});
  REQUIRE(c.code == kOk);
  const CircuitSummary cs = circuit_from_json(nlohmann::json::parse(c.out));
  CHECK(cs.ratios.size() == 8);
  CHECK(cs.length == "sqrt(2)");
  const Result s = call({"counterexample", "--variant", "star", "--probes", "17", "--expect-stable"});
  CHECK(s.code == kUnstable);
  CHECK(star_from_json(nlohmann::json::parse(s.out)).unbounded);
}

TEST_CASE("summaries round-trip through JSON") {
  auto rt = [](const auto& v, auto back) { return back(nlohmann::json::parse(to_json(v).dump())) == v; };
  const double inf = std::numeric_limits<double>::infinity();

  PiTreeVerdict pv{false, {"e2", "e5"}};
  CHECK(rt(pv, pi_tree_from_json));
  ChainVerdict cv{false, {{1, 1, 0.5}, {2, 1, 1e-12}}, {{2, 1, 1e-12}}};
  CHECK(rt(cv, chain_from_json));
  DecaySummary ds{1.0, 0.25, 1e-4, 0.75, 0.384, 7.5e-3, true, "decaying"};
  CHECK(rt(ds, decay_from_json));
  SpectrumSummary ss{{-1, 0.5, -2, 2}, 2, 1, {{{-0.1, 1.0 / 3}, 1e-13, 1, 1}, {{0, 1}, 2e-12, 2, 1}}};
  CHECK(rt(ss, spectrum_from_json));
  SweepSummary sw{Verdict::Unbounded, 16, 1, {{0, 20, 3.5, 1}, {1, 40, inf, 1}}};
  CHECK(rt(sw, sweep_from_json));
  CircuitSummary cs;
  cs.length = "sqrt(2)";
  cs.ratios = {{1, -2}, {0.1, 0.2}};
  cs.limit = {7.6e-5, 1.8e-5};
  cs.limit_eqcir = {-12.6, -10.3};
  cs.predicted = 3.1716;
  cs.rel_error = 1;
  cs.rel_error_eqcir = 8.6;
  cs.max_eqcir_diff = 2.5e5;
  cs.asymptotic_errors = {0.083, 0.128, 1.877, 0.053, 0.152, std::nan("")};
  cs.monotone = false;
  // NaN never compares equal, so check that entry separately
  CircuitSummary back = circuit_from_json(nlohmann::json::parse(to_json(cs).dump()));
  CHECK(std::isnan(back.asymptotic_errors.back()));
  cs.asymptotic_errors.back() = back.asymptotic_errors.back() = 0;
  CHECK(back == cs);
  StarSummary st{"sqrt(2)", {1.6, 0.9, 2.47}, true};
  CHECK(rt(st, star_from_json));
}
