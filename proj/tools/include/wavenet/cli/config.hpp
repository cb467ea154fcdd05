#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "wavenet/chain.hpp"
#include "wavenet/dynamics.hpp"
#include "wavenet/network.hpp"
#include "wavenet/resolvent.hpp"
#include "wavenet/spectra.hpp"

namespace wavenet::cli {

// Malformed or invalid configuration. line/column are 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

// A parsed document plus where it came from, for diagnostics.
struct Document {
  std::string path;
  nlohmann::json root;
};

Document load_document(const std::string& path);
Document parse_document(const std::string& text, const std::string& path = "<memory>");

// Either a general network or a chain {lengths, masses}.
struct NetworkConfig {
  GraphSpec graph;
  std::optional<ChainSpec> chain;
};

NetworkConfig read_network(const Document& doc);
ChainSpec read_chain(const Document& doc);

struct SimulationConfig {
  RunConfig run;
  InitialData data;
};

// "simulation": {T, cfl, cells-per-unit-length, sample-stride, feedback, initial}
SimulationConfig read_simulation(const Document& doc, const MetricGraph& g);
// default data: a smooth velocity bump centred on every edge
InitialData default_initial_data(const MetricGraph& g);

struct SpectrumConfig {
  Box box{-20, 0.5, -20, 20};
  SpectrumOptions options;
};
SpectrumConfig read_spectrum(const Document& doc);

struct SweepConfig {
  std::vector<double> betas;
  SweepOptions options;
};
// "sweep": {beta: [..]} or {beta-min, beta-max, beta-step}, ladder, h-beta, feedback
SweepConfig read_sweep(const Document& doc);

CircuitFeedback feedback_from_string(const std::string& s);
const char* to_string(CircuitFeedback f);

}  // namespace wavenet::cli
