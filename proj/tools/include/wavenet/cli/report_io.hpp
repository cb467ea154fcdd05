#pragma once

#include <complex>
#include <string>
#include <vector>

#include "json.hpp"

#include "wavenet/chain.hpp"
#include "wavenet/counterex.hpp"
#include "wavenet/dynamics.hpp"
#include "wavenet/network.hpp"
#include "wavenet/resolvent.hpp"
#include "wavenet/spectra.hpp"

namespace wavenet::cli {

// Plain summaries of every analysis. Each one serialises to JSON and parses
// back to an equal value; non-finite numbers travel as "inf" / "-inf" / "nan".

struct DecaySummary {
  double E0 = 0, ET = 0;
  double residual = 0;        // R(T) / E(0)
  double dissipated = 0;      // D(T)
  double omega = 0, fit_residual = 0;
  bool fitted = false;
  std::string verdict;        // decaying | non-decaying | unfitted
  bool operator==(const DecaySummary&) const = default;
};
DecaySummary summarize(const EnergySeries& s);

struct SpectrumRoot {
  std::complex<double> lambda;
  double residual = 0;
  int multiplicity = 1;
  int null_dim = 1;
  bool operator==(const SpectrumRoot&) const = default;
};
struct SpectrumSummary {
  std::vector<double> box;    // re0, re1, im0, im1
  int count = 0;
  int axis_roots = 0;         // roots with Re >= -1e-8
  std::vector<SpectrumRoot> roots;
  bool operator==(const SpectrumSummary&) const = default;
};
SpectrumSummary summarize(const EigenReport& r);

struct SweepLevel {
  int level = 0;
  double base_mesh = 0, sup = 0, beta_at_sup = 0;
  bool operator==(const SweepLevel&) const = default;
};
struct SweepSummary {
  Verdict verdict = Verdict::Inconclusive;
  double sup_ratio = 0, peak_beta = 0;
  std::vector<SweepLevel> levels;
  bool operator==(const SweepSummary&) const = default;
};
SweepSummary summarize(const SweepReport& r);

struct CircuitSummary {
  std::string length;
  std::vector<std::complex<double>> ratios;
  std::complex<double> limit, limit_eqcir;
  double predicted = 0, rel_error = 0, rel_error_eqcir = 0;
  double max_eqcir_diff = 0;
  std::vector<double> asymptotic_errors;   // A, B, C, F, G, H at the largest q
  bool monotone = true;
  GrowthVerdict verdict = GrowthVerdict::Inconclusive;
  bool operator==(const CircuitSummary&) const = default;
};
CircuitSummary summarize(const GrowthSummary& g, const std::vector<CircuitProbe>& probes, const Length& l4);

struct StarSummary {
  std::string length;
  std::vector<double> ratios;
  bool unbounded = false;
  bool operator==(const StarSummary&) const = default;
};
StarSummary summarize(const StarGrowth& g, const Length& l3);

nlohmann::json to_json(const PiTreeVerdict& v);
nlohmann::json to_json(const ChainVerdict& v);
nlohmann::json to_json(const DecaySummary& s);
nlohmann::json to_json(const SpectrumSummary& s);
nlohmann::json to_json(const SweepSummary& s);
nlohmann::json to_json(const CircuitSummary& s);
nlohmann::json to_json(const StarSummary& s);

PiTreeVerdict pi_tree_from_json(const nlohmann::json& j);
ChainVerdict chain_from_json(const nlohmann::json& j);
DecaySummary decay_from_json(const nlohmann::json& j);
SpectrumSummary spectrum_from_json(const nlohmann::json& j);
SweepSummary sweep_from_json(const nlohmann::json& j);
CircuitSummary circuit_from_json(const nlohmann::json& j);
StarSummary star_from_json(const nlohmann::json& j);

}  // namespace wavenet::cli
