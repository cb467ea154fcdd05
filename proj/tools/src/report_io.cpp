#include "wavenet/cli/report_io.hpp"

#include <cmath>
#include <limits>

namespace wavenet::cli {

using nlohmann::json;

namespace {

json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double num(const json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("not a number: " + s);
  }
  return j.get<double>();
}

json cnum(std::complex<double> z) { return json::array({num(z.real()), num(z.imag())}); }
std::complex<double> cnum(const json& j) { return {num(j.at(0)), num(j.at(1))}; }

std::complex<double> narrow(lcplx z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

json witness(const ChainWitness& w) { return {{"mass", num(w.mass)}, {"r", w.r}, {"delta", num(w.delta)}}; }
ChainWitness witness(const json& j) { return {num(j.at("mass")), j.at("r").get<int>(), num(j.at("delta"))}; }

}  // namespace

DecaySummary summarize(const EnergySeries& s) {
  DecaySummary d;
  if (s.E.empty()) return d;
  d.E0 = s.E.front();
  d.ET = s.E.back();
  d.residual = d.E0 > 0 ? s.R.back() / d.E0 : 0.0;
  d.dissipated = s.D.back();
  d.omega = s.omega;
  d.fit_residual = s.fit_residual;
  d.fitted = s.fitted;
  d.verdict = !s.fitted ? "unfitted" : (s.omega > 1e-3 ? "decaying" : "non-decaying");
  return d;
}

SpectrumSummary summarize(const EigenReport& r) {
  SpectrumSummary s;
  s.box = {r.box.re0, r.box.re1, r.box.im0, r.box.im1};
  s.count = r.count;
  for (const auto& root : r.roots) {
    s.roots.push_back({root.lambda, root.residual, root.multiplicity, root.null_dim});
    if (root.lambda.real() >= -1e-8) ++s.axis_roots;
  }
  return s;
}

SweepSummary summarize(const SweepReport& r) {
  SweepSummary s;
  s.verdict = r.verdict;
  s.sup_ratio = r.sup_ratio;
  s.peak_beta = r.peak_beta;
  for (const auto& l : r.levels) s.levels.push_back({l.level, l.base_mesh, l.sup, l.beta_at_sup});
  return s;
}

CircuitSummary summarize(const GrowthSummary& g, const std::vector<CircuitProbe>& probes, const Length& l4) {
  CircuitSummary s;
  s.length = l4.literal();
  for (auto r : g.ratios) s.ratios.push_back(narrow(r));
  s.limit = narrow(g.limit);
  s.limit_eqcir = narrow(g.limit_eqcir);
  s.predicted = static_cast<double>(g.predicted);
  s.rel_error = static_cast<double>(g.rel_error);
  s.rel_error_eqcir = static_cast<double>(g.rel_error_eqcir);
  for (const auto& p : probes) s.max_eqcir_diff = std::max(s.max_eqcir_diff, static_cast<double>(p.eqcir_rel_diff));
  if (!probes.empty())
    for (auto e : asymptotic_errors(probes.back(), l4.value)) s.asymptotic_errors.push_back(static_cast<double>(e));
  s.monotone = g.monotone;
  s.verdict = g.verdict;
  return s;
}

StarSummary summarize(const StarGrowth& g, const Length& l3) {
  StarSummary s;
  s.length = l3.literal();
  for (auto r : g.ratios) s.ratios.push_back(static_cast<double>(r));
  s.unbounded = g.unbounded;
  return s;
}

json to_json(const PiTreeVerdict& v) { return {{"pi_tree", v.pi_tree}, {"witnesses", v.witnesses}}; }

PiTreeVerdict pi_tree_from_json(const json& j) {
  return {j.at("pi_tree").get<bool>(), j.at("witnesses").get<std::vector<std::string>>()};
}

json to_json(const ChainVerdict& v) {
  json t = json::array(), w = json::array();
  for (const auto& x : v.table) t.push_back(witness(x));
  for (const auto& x : v.witnesses) w.push_back(witness(x));
  return {{"stable", v.stable}, {"table", t}, {"witnesses", w}};
}

ChainVerdict chain_from_json(const json& j) {
  ChainVerdict v;
  v.stable = j.at("stable").get<bool>();
  for (const auto& x : j.at("table")) v.table.push_back(witness(x));
  for (const auto& x : j.at("witnesses")) v.witnesses.push_back(witness(x));
  return v;
}

json to_json(const DecaySummary& s) {
  return {{"E0", num(s.E0)},         {"ET", num(s.ET)},       {"residual", num(s.residual)},
          {"dissipated", num(s.dissipated)}, {"omega", num(s.omega)}, {"fit_residual", num(s.fit_residual)},
          {"fitted", s.fitted},      {"verdict", s.verdict}};
}

DecaySummary decay_from_json(const json& j) {
  return {num(j.at("E0")),    num(j.at("ET")),           num(j.at("residual")),  num(j.at("dissipated")),
          num(j.at("omega")), num(j.at("fit_residual")), j.at("fitted").get<bool>(), j.at("verdict").get<std::string>()};
}

json to_json(const SpectrumSummary& s) {
  json roots = json::array();
  for (const auto& r : s.roots)
    roots.push_back({{"lambda", cnum(r.lambda)},
                     {"residual", num(r.residual)},
                     {"multiplicity", r.multiplicity},
                     {"null_dim", r.null_dim}});
  json box = json::array();
  for (double b : s.box) box.push_back(num(b));
  return {{"box", box}, {"count", s.count}, {"axis_roots", s.axis_roots}, {"roots", roots}};
}

SpectrumSummary spectrum_from_json(const json& j) {
  SpectrumSummary s;
  for (const auto& b : j.at("box")) s.box.push_back(num(b));
  s.count = j.at("count").get<int>();
  s.axis_roots = j.at("axis_roots").get<int>();
  for (const auto& r : j.at("roots"))
    s.roots.push_back({cnum(r.at("lambda")), num(r.at("residual")), r.at("multiplicity").get<int>(),
                       r.at("null_dim").get<int>()});
  return s;
}

json to_json(const SweepSummary& s) {
  json levels = json::array();
  for (const auto& l : s.levels)
    levels.push_back({{"level", l.level},
                      {"base_mesh", num(l.base_mesh)},
                      {"sup", num(l.sup)},
                      {"beta_at_sup", num(l.beta_at_sup)}});
  return {{"verdict", to_string(s.verdict)},
          {"sup_ratio", num(s.sup_ratio)},
          {"peak_beta", num(s.peak_beta)},
          {"levels", levels},
          {"note", "bounded/unbounded is a mesh-ladder heuristic, not a certified bound"}};
}

SweepSummary sweep_from_json(const json& j) {
  SweepSummary s;
  s.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  s.sup_ratio = num(j.at("sup_ratio"));
  s.peak_beta = num(j.at("peak_beta"));
  for (const auto& l : j.at("levels"))
    s.levels.push_back({l.at("level").get<int>(), num(l.at("base_mesh")), num(l.at("sup")), num(l.at("beta_at_sup"))});
  return s;
}

json to_json(const CircuitSummary& s) {
  json ratios = json::array(), errs = json::array();
  for (auto r : s.ratios) ratios.push_back(cnum(r));
  for (double e : s.asymptotic_errors) errs.push_back(num(e));
  return {{"variant", "circuit"},
          {"length", s.length},
          {"ratios", ratios},
          {"limit", cnum(s.limit)},
          {"limit_eqcir", cnum(s.limit_eqcir)},
          {"predicted", num(s.predicted)},
          {"rel_error", num(s.rel_error)},
          {"rel_error_eqcir", num(s.rel_error_eqcir)},
          {"max_eqcir_diff", num(s.max_eqcir_diff)},
          {"asymptotic_errors", errs},
          {"monotone", s.monotone},
          {"verdict", to_string(s.verdict)}};
}

CircuitSummary circuit_from_json(const json& j) {
  CircuitSummary s;
  s.length = j.at("length").get<std::string>();
  for (const auto& r : j.at("ratios")) s.ratios.push_back(cnum(r));
  s.limit = cnum(j.at("limit"));
  s.limit_eqcir = cnum(j.at("limit_eqcir"));
  s.predicted = num(j.at("predicted"));
  s.rel_error = num(j.at("rel_error"));
  s.rel_error_eqcir = num(j.at("rel_error_eqcir"));
  s.max_eqcir_diff = num(j.at("max_eqcir_diff"));
  for (const auto& e : j.at("asymptotic_errors")) s.asymptotic_errors.push_back(num(e));
  s.monotone = j.at("monotone").get<bool>();
  s.verdict = growth_verdict_from_string(j.at("verdict").get<std::string>());
  return s;
}

json to_json(const StarSummary& s) {
  json ratios = json::array();
  for (double r : s.ratios) ratios.push_back(num(r));
  return {{"variant", "star"},
          {"length", s.length},
          {"ratios", ratios},
          {"unbounded", s.unbounded},
          {"verdict", s.unbounded ? "non-exponential" : "inconclusive"}};
}

StarSummary star_from_json(const json& j) {
  StarSummary s;
  s.length = j.at("length").get<std::string>();
  for (const auto& r : j.at("ratios")) s.ratios.push_back(num(r));
  s.unbounded = j.at("unbounded").get<bool>();
  return s;
}

}  // namespace wavenet::cli
