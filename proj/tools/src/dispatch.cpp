#include "wavenet/cli/dispatch.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "wavenet/cli/config.hpp"
#include "wavenet/cli/emit.hpp"
#include "wavenet/cli/report_io.hpp"
#include "wavenet/counterex.hpp"

namespace wavenet::cli {

using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out_dir;
  bool expect_stable = false;
  bool svg = false;
};

struct Context {
  Context(std::string name, Common c, std::ostream& o) : subcommand(std::move(name)), common(std::move(c)), out(o) {}
  std::string subcommand;
  Common common;
  std::ostream& out;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::optional<OutputDir> dir;
  json parameters = json::object();

  void open() {
    if (!common.out_dir.empty()) dir.emplace(common.out_dir);
  }
  // prints the summary and closes the run; returns the exit code
  int finish(const json& summary, bool unstable) {
    out << json_text(summary);
    if (dir) {
      dir->write_json("summary.json", summary);
      RunManifest m;
      m.subcommand = subcommand;
      m.config = common.config;
      m.parameters = parameters;
      m.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      dir->finish(m);
    }
    return common.expect_stable && unstable ? kUnstable : kOk;
  }
};

std::shared_ptr<const MetricGraph> load_graph(const Document& doc) {
  NetworkConfig nc = read_network(doc);
  try {
    return std::make_shared<const MetricGraph>(build_graph(nc.graph));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(doc.path + ": " + e.what());
  }
}

json graph_parameters(const MetricGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges())
    edges.push_back({{"id", e.id},
                     {"tail", g.vertices()[e.tail].id},
                     {"head", g.vertices()[e.head].id},
                     {"length", e.length.literal()}});
  return {{"variant", to_string(g.variant())}, {"edges", edges}};
}

int run_check(Context& ctx, double tol) {
  Document doc = load_document(ctx.common.config);
  auto g = load_graph(doc);
  ctx.parameters = graph_parameters(*g);
  ctx.parameters["tol"] = tol;
  if (g->variant() != Variant::Tree && g->variant() != Variant::Chain)
    throw ConfigError(doc.path + ": the Pi-tree test needs a tree or chain network, got " + to_string(g->variant()));
  ctx.open();
  PiTreeVerdict v = pi_tree_check(*g, tol);
  return ctx.finish(to_json(v), !v.pi_tree);
}

int run_simulate(Context& ctx) {
  Document doc = load_document(ctx.common.config);
  auto g = load_graph(doc);
  SimulationConfig sc = read_simulation(doc, *g);
  ctx.parameters = graph_parameters(*g);
  ctx.parameters["T"] = sc.run.T;
  ctx.parameters["cfl"] = sc.run.cfl;
  ctx.parameters["cells-per-unit-length"] = sc.run.cells_per_unit;
  ctx.parameters["sample-stride"] = sc.run.sample_stride;
  ctx.parameters["feedback"] = to_string(sc.run.feedback);
  ctx.open();
  EnergySeries es = run(g, sc.run, sc.data);
  if (ctx.dir) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < es.t.size(); ++i) rows.push_back({es.t[i], es.E[i], es.D[i], es.R[i]});
    ctx.dir->write_csv("energy.csv", {"t", "E", "D", "R"}, rows);
    if (ctx.common.svg)
      ctx.dir->write_text("energy.svg", svg_line_plot({{"E(t)", es.t, es.E}}, "Energy decay", "t", "E", true));
  }
  DecaySummary s = summarize(es);
  return ctx.finish(to_json(s), s.verdict == "non-decaying");
}

int run_spectrum(Context& ctx) {
  Document doc = load_document(ctx.common.config);
  auto g = load_graph(doc);
  SpectrumConfig sc = read_spectrum(doc);
  ctx.parameters = graph_parameters(*g);
  ctx.parameters["box"] = {sc.box.re0, sc.box.re1, sc.box.im0, sc.box.im1};
  ctx.parameters["tol"] = sc.options.tol;
  ctx.open();
  EigenReport r = find_eigenvalues(*g, sc.box, sc.options);
  SpectrumSummary s = summarize(r);
  if (ctx.dir) {
    std::vector<std::vector<double>> rows;
    std::vector<double> re, im;
    for (const auto& root : r.roots) {
      rows.push_back({root.lambda.real(), root.lambda.imag(), root.residual, double(root.multiplicity)});
      re.push_back(root.lambda.real());
      im.push_back(root.lambda.imag());
    }
    ctx.dir->write_csv("spectrum.csv", {"re", "im", "residual", "box_count"}, rows);
    if (ctx.common.svg)
      ctx.dir->write_text("spectrum.svg", svg_scatter(re, im, "Spectrum", "Re lambda", "Im lambda"));
  }
  return ctx.finish(to_json(s), s.axis_roots > 0);
}

int run_sweep(Context& ctx) {
  Document doc = load_document(ctx.common.config);
  auto g = load_graph(doc);
  SweepConfig sc = read_sweep(doc);
  ctx.parameters = graph_parameters(*g);
  ctx.parameters["betas"] = sc.betas.size();
  if (!sc.betas.empty()) {
    ctx.parameters["beta-min"] = *std::min_element(sc.betas.begin(), sc.betas.end());
    ctx.parameters["beta-max"] = *std::max_element(sc.betas.begin(), sc.betas.end());
  }
  ctx.parameters["ladder"] = sc.options.ladder;
  ctx.parameters["h-beta"] = sc.options.h_beta;
  ctx.open();
  SweepReport r = sweep(g, sc.betas, sc.options);
  if (ctx.dir) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : r.samples) rows.push_back({s.beta, s.mesh, s.sigma_min, s.norm});
    ctx.dir->write_csv("sweep.csv", {"beta", "mesh", "sigma_min", "norm"}, rows);
    if (ctx.common.svg) {
      std::vector<Series> series;
      for (const auto& lvl : r.levels) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& s : r.samples)
          if (s.level == lvl.level) pts.push_back({s.beta, s.norm});
        std::sort(pts.begin(), pts.end());
        Series ser;
        ser.label = "base mesh " + format_number(lvl.base_mesh).substr(0, 6);
        for (auto [b, n] : pts) ser.x.push_back(b), ser.y.push_back(n);
        series.push_back(std::move(ser));
      }
      ctx.dir->write_text("sweep.svg", svg_line_plot(series, "Resolvent norm", "beta", "norm", true));
    }
  }
  SweepSummary s = summarize(r);
  return ctx.finish(to_json(s), s.verdict == Verdict::Unbounded);
}

int run_chain_check(Context& ctx, double tol) {
  Document doc = load_document(ctx.common.config);
  ChainSpec c = read_chain(doc);
  json lengths = json::array();
  for (const auto& l : c.lengths) lengths.push_back(l.literal());
  ctx.parameters = {{"lengths", lengths}, {"masses", c.masses}, {"tol", tol}};
  ctx.open();
  ChainVerdict v = chain_stable(c, tol);
  return ctx.finish(to_json(v), !v.stable);
}

int run_counterexample(Context& ctx, const std::string& variant, const std::string& length_text, int probes) {
  Length l;
  try {
    l = parse_length(length_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--length: ") + e.what());
  }
  ctx.parameters = {{"variant", variant}, {"length", l.literal()}, {"probes", probes}};
  if (variant == "circuit") {
    if (probes < 3) throw ConfigError("--probes: the growth law needs at least 3 probes");
    auto pqs = dirichlet_convergents(l, probes);
    ctx.open();
    std::vector<CircuitProbe> ps;
    for (const auto& pq : pqs) ps.push_back(circuit_solve(pq, l.value));
    GrowthSummary gs = growth_law(ps, l);
    if (ctx.dir) {
      std::vector<std::vector<double>> rows;
      for (const auto& p : ps)
        rows.push_back({double(p.pq->q), double(p.beta), double(p.b[0].real()), double(p.b[0].imag()),
                        double(std::abs(p.ratio))});
      ctx.dir->write_csv("probes.csv", {"q_n", "beta_n", "b1_re", "b1_im", "ratio"}, rows);
      if (ctx.common.svg) {
        Series s{"|ratio|", {}, {}};
        for (const auto& p : ps) s.x.push_back(std::log10(double(p.pq->q))), s.y.push_back(double(std::abs(p.ratio)));
        ctx.dir->write_text("probes.svg", svg_line_plot({s}, "Circuit growth ratio", "log10 q_n", "|ratio|", true));
      }
    }
    CircuitSummary s = summarize(gs, ps, l);
    return ctx.finish(to_json(s), s.verdict == GrowthVerdict::NonExponential);
  }
  if (variant == "star") {
    auto pqs = dirichlet_convergents(l, probes);
    ctx.open();
    std::vector<StarProbe> ps;
    for (const auto& pq : pqs) ps.push_back(star_probe(pq, l));
    StarGrowth sg = star_growth(ps);
    if (ctx.dir) {
      std::vector<std::vector<double>> rows;
      for (const auto& p : ps)
        rows.push_back({double(p.pq->q), double(p.beta), double(p.b.real()), double(p.b.imag()), double(p.ratio)});
      ctx.dir->write_csv("probes.csv", {"q_n", "beta_n", "b1_re", "b1_im", "ratio"}, rows);
      if (ctx.common.svg) {
        Series s{"|z|/|f|", {}, {}};
        for (const auto& p : ps) s.x.push_back(std::log10(double(p.pq->q))), s.y.push_back(double(p.ratio));
        ctx.dir->write_text("probes.svg", svg_line_plot({s}, "Star resolvent lower bound", "log10 q_n", "ratio", true));
      }
    }
    StarSummary s = summarize(sg, l);
    return ctx.finish(to_json(s), s.unbounded);
  }
  throw ConfigError("--variant must be circuit or star");
}

void add_common(CLI::App* sub, Common& c, bool needs_config, bool has_svg) {
  if (needs_config) sub->add_option("--config", c.config, "JSON configuration file")->required();
  sub->add_option("--out", c.out_dir, "output directory (files and manifest.json)");
  sub->add_flag("--expect-stable", c.expect_stable, "exit 1 when the verdict is unstable or unbounded");
  if (has_svg) sub->add_flag("--svg", c.svg, "also write an SVG plot (needs --out)");
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Damped wave networks with point masses: simulation, spectra and stability checks", "wavenet"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Common common;
  double tol = 1e-9;
  std::string variant, length = "sqrt(2)";
  int probes = 12;

  auto* check = app.add_subcommand("check", "Pi-tree test of a tree or chain network");
  add_common(check, common, true, false);
  check->add_option("--tol", tol, "tolerance of the pi-multiple test (relative)");
  auto* simulate = app.add_subcommand("simulate", "time-domain run with energy audit");
  add_common(simulate, common, true, true);
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues in a box of the complex plane");
  add_common(spectrum, common, true, true);
  auto* sw = app.add_subcommand("sweep", "resolvent norm along the imaginary axis on a mesh ladder");
  add_common(sw, common, true, true);
  auto* chain = app.add_subcommand("chain-check", "determinant stability test of a chain with masses");
  add_common(chain, common, true, false);
  chain->add_option("--tol", tol, "threshold on |Delta|");
  auto* cex = app.add_subcommand("counterexample", "circuit and star probes along Dirichlet convergents");
  add_common(cex, common, false, true);
  cex->add_option("--variant", variant, "circuit | star")->required()->check(CLI::IsMember({"circuit", "star"}));
  cex->add_option("--length", length, "irrational length of the closing edge, e.g. sqrt(2)");
  cex->add_option("--probes", probes, "number of convergents")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (e.get_name() == "CallForVersion" ? std::string(kToolVersion) + "\n" : app.help());
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  if (common.svg && common.out_dir.empty()) {
    err << "error: --svg needs --out\n";
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  Context ctx{sub->get_name(), common, out};
  try {
    if (sub == check) return run_check(ctx, tol);
    if (sub == simulate) return run_simulate(ctx);
    if (sub == spectrum) return run_spectrum(ctx);
    if (sub == sw) return run_sweep(ctx);
    if (sub == chain) return run_chain_check(ctx, tol);
    if (sub == cex) return run_counterexample(ctx, variant, length, probes);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace wavenet::cli
