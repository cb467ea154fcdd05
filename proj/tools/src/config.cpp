#include "wavenet/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace wavenet::cli {

using nlohmann::json;

namespace {

// nlohmann reports a byte offset one past the offending character
void offset_to_position(const std::string& text, std::size_t offset, std::size_t& line, std::size_t& column) {
  line = 1;
  column = 1;
  std::size_t end = std::min(offset == 0 ? 0 : offset - 1, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ConfigError(where.empty() ? msg : where + ": " + msg);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

const json* find(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

Length length_of(const json& j, const std::string& where) {
  try {
    if (j.is_number()) return Length::decimal(j.get<double>());
    if (j.is_string()) return parse_length(j.get<std::string>());
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  fail(where, "length must be a number or a literal such as \"pi*1/2\"");
}

VertexKind kind_of(const json& v, const std::string& where) {
  const json* k = find(v, "kind");
  if (!k || !k->is_string()) fail(where, "missing string field 'kind'");
  std::string s = k->get<std::string>();
  if (s == "root") return VertexKind::root();
  if (s == "controlled") return VertexKind::controlled();
  if (s == "fixed") return VertexKind::fixed();
  if (s == "mass" || s == "interior") {
    double m = 1.0;
    if (const json* jm = find(v, "mass")) m = number(*jm, where + ".mass");
    return VertexKind::interior(m);
  }
  fail(where, "unknown vertex kind '" + s + "'");
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json* f = find(obj, key);
  if (!f || !f->is_string()) fail(where, std::string("missing string field '") + key + "'");
  return f->get<std::string>();
}

Profile profile_of(const json& p, double ell, const std::string& where) {
  if (!p.is_object()) fail(where, "profile must be an object");
  std::string type = string_field(p, "type", where);
  double a = 1.0;
  if (const json* ja = find(p, "amplitude")) a = number(*ja, where + ".amplitude");
  if (type == "bump") {
    // a cos^4(pi t / 2) on |t| < 1, t = (x - center) / half-width
    double c = ell / 2, w = ell / 4;
    if (const json* jc = find(p, "center")) c = number(*jc, where + ".center");
    if (const json* jw = find(p, "half-width")) w = number(*jw, where + ".half-width");
    if (w <= 0) fail(where, "half-width must be positive");
    return [=](double x) {
      double t = (x - c) / w;
      return std::fabs(t) < 1 ? a * std::pow(std::cos(M_PI * t / 2), 4) : 0.0;
    };
  }
  if (type == "sine") {
    double k = 1;
    if (const json* jk = find(p, "mode")) k = number(*jk, where + ".mode");
    return [=](double x) { return a * std::sin(k * M_PI * x / ell); };
  }
  if (type == "zero") return [](double) { return 0.0; };
  fail(where, "unknown profile type '" + type + "'");
}

void read_profiles(const json* section, const MetricGraph& g, std::map<std::string, Profile>& out, const std::string& where) {
  if (!section) return;
  if (!section->is_object()) fail(where, "expected an object keyed by edge id");
  for (auto& [id, p] : section->items()) {
    int j = g.edge_index(id);
    if (j < 0) fail(where, "unknown edge '" + id + "'");
    out[id] = profile_of(p, g.edges()[j].ell(), where + "." + id);
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(what), line_(line), column_(column) {}

Document parse_document(const std::string& text, const std::string& path) {
  Document d{path, {}};
  try {
    d.root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 0, column = 0;
    offset_to_position(text, e.byte, line, column);
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": malformed JSON", line,
                      column);
  }
  if (!d.root.is_object()) throw ConfigError(path + ":1:1: top level must be an object", 1, 1);
  return d;
}

Document load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str(), path);
}

ChainSpec read_chain(const Document& doc) {
  const json& r = doc.root;
  const json* src = find(r, "chain");
  if (!src) src = &r;
  const json* ls = find(*src, "lengths");
  const json* ms = find(*src, "masses");
  if (!ls || !ls->is_array()) fail(doc.path, "chain config needs an array 'lengths'");
  if (!ms || !ms->is_array()) fail(doc.path, "chain config needs an array 'masses'");
  ChainSpec c;
  for (std::size_t i = 0; i < ls->size(); ++i)
    c.lengths.push_back(length_of((*ls)[i], doc.path + ": lengths[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < ms->size(); ++i)
    c.masses.push_back(number((*ms)[i], doc.path + ": masses[" + std::to_string(i) + "]"));
  try {
    validate(c);
  } catch (const std::exception& e) {
    fail(doc.path, e.what());
  }
  return c;
}

NetworkConfig read_network(const Document& doc) {
  const json& r = doc.root;
  NetworkConfig nc;
  if (find(r, "chain") || (find(r, "lengths") && !find(r, "edges"))) {
    nc.chain = read_chain(doc);
    nc.graph = to_graph_spec(*nc.chain);
    return nc;
  }
  GraphSpec& s = nc.graph;
  if (const json* v = find(r, "variant")) {
    if (!v->is_string()) fail(doc.path, "'variant' must be a string");
    try {
      s.variant = variant_from_string(v->get<std::string>());
    } catch (const std::exception& e) {
      fail(doc.path, e.what());
    }
  }
  const json* vs = find(r, "vertices");
  const json* es = find(r, "edges");
  if (!vs || !vs->is_array()) fail(doc.path, "missing array 'vertices'");
  if (!es || !es->is_array()) fail(doc.path, "missing array 'edges'");
  for (std::size_t i = 0; i < vs->size(); ++i) {
    std::string where = doc.path + ": vertices[" + std::to_string(i) + "]";
    const json& v = (*vs)[i];
    s.vertices.push_back({string_field(v, "id", where), kind_of(v, where)});
  }
  for (std::size_t i = 0; i < es->size(); ++i) {
    std::string where = doc.path + ": edges[" + std::to_string(i) + "]";
    const json& e = (*es)[i];
    const json* len = find(e, "length");
    if (!len) fail(where, "missing field 'length'");
    s.edges.push_back({string_field(e, "id", where), string_field(e, "tail", where), string_field(e, "head", where),
                       length_of(*len, where + ".length")});
  }
  return nc;
}

CircuitFeedback feedback_from_string(const std::string& s) {
  if (s == "per-node") return CircuitFeedback::PerNode;
  if (s == "first-mass") return CircuitFeedback::FirstMass;
  throw ConfigError("unknown feedback '" + s + "' (per-node | first-mass)");
}

const char* to_string(CircuitFeedback f) { return f == CircuitFeedback::PerNode ? "per-node" : "first-mass"; }

InitialData default_initial_data(const MetricGraph& g) {
  InitialData d;
  for (const auto& e : g.edges()) {
    double c = e.ell() / 2, w = e.ell() / 4;
    d.y1[e.id] = [=](double x) {
      double t = (x - c) / w;
      return std::fabs(t) < 1 ? std::pow(std::cos(M_PI * t / 2), 4) : 0.0;
    };
  }
  return d;
}

SimulationConfig read_simulation(const Document& doc, const MetricGraph& g) {
  SimulationConfig sc;
  const json* sim = find(doc.root, "simulation");
  if (!sim) {
    sc.data = default_initial_data(g);
    return sc;
  }
  std::string where = doc.path + ": simulation";
  if (!sim->is_object()) fail(where, "expected an object");
  RunConfig& rc = sc.run;
  if (const json* j = find(*sim, "T")) rc.T = number(*j, where + ".T");
  if (const json* j = find(*sim, "cfl")) rc.cfl = number(*j, where + ".cfl");
  if (const json* j = find(*sim, "cells-per-unit-length")) rc.cells_per_unit = number(*j, where + ".cells-per-unit-length");
  if (const json* j = find(*sim, "sample-stride")) {
    if (!j->is_number_integer() || j->get<long long>() < 1) fail(where, "sample-stride must be a positive integer");
    rc.sample_stride = j->get<int>();
  }
  if (const json* j = find(*sim, "feedback")) {
    if (!j->is_string()) fail(where, "feedback must be a string");
    rc.feedback = feedback_from_string(j->get<std::string>());
  }
  if (rc.T <= 0) fail(where, "T must be positive");
  if (rc.cfl <= 0 || rc.cfl > 1) fail(where, "cfl must lie in (0, 1]");
  if (rc.cells_per_unit <= 0) fail(where, "cells-per-unit-length must be positive");

  const json* init = find(*sim, "initial");
  if (!init) {
    sc.data = default_initial_data(g);
    return sc;
  }
  read_profiles(find(*init, "y0"), g, sc.data.y0, where + ".initial.y0");
  read_profiles(find(*init, "y1"), g, sc.data.y1, where + ".initial.y1");
  if (const json* osc = find(*init, "oscillators")) {
    if (!osc->is_object()) fail(where, "initial.oscillators must be an object keyed by vertex id");
    for (auto& [id, pair] : osc->items()) {
      int k = g.vertex_index(id);
      if (k < 0 || g.mass_index(k) < 0) fail(where, "'" + id + "' is not a mass vertex");
      if (!pair.is_array() || pair.size() != 2) fail(where, "oscillator data must be [s0, s1]");
      sc.data.oscillators[id] = {number(pair[0], where), number(pair[1], where)};
    }
  }
  return sc;
}

SpectrumConfig read_spectrum(const Document& doc) {
  SpectrumConfig sc;
  const json* sp = find(doc.root, "spectrum");
  if (!sp) return sc;
  std::string where = doc.path + ": spectrum";
  if (const json* b = find(*sp, "box")) {
    if (!b->is_array() || b->size() != 4) fail(where, "box must be [re0, re1, im0, im1]");
    sc.box = {number((*b)[0], where), number((*b)[1], where), number((*b)[2], where), number((*b)[3], where)};
    if (!(sc.box.re0 < sc.box.re1 && sc.box.im0 < sc.box.im1)) fail(where, "box corners out of order");
  }
  if (const json* t = find(*sp, "tol")) sc.options.tol = number(*t, where + ".tol");
  return sc;
}

SweepConfig read_sweep(const Document& doc) {
  SweepConfig sc;
  double lo = 0, hi = 10, step = 0.25;
  const json* sw = find(doc.root, "sweep");
  std::string where = doc.path + ": sweep";
  if (sw) {
    if (const json* b = find(*sw, "beta")) {
      if (!b->is_array()) fail(where, "beta must be an array");
      for (auto& x : *b) sc.betas.push_back(number(x, where + ".beta"));
    }
    if (const json* j = find(*sw, "beta-min")) lo = number(*j, where);
    if (const json* j = find(*sw, "beta-max")) hi = number(*j, where);
    if (const json* j = find(*sw, "beta-step")) step = number(*j, where);
    if (const json* l = find(*sw, "ladder")) {
      if (!l->is_array() || l->size() < 2) fail(where, "ladder needs at least two meshes");
      sc.options.ladder.clear();
      for (auto& x : *l) sc.options.ladder.push_back(number(x, where + ".ladder"));
    }
    if (const json* j = find(*sw, "h-beta")) sc.options.h_beta = number(*j, where);
    if (const json* j = find(*sw, "feedback")) sc.options.feedback = feedback_from_string(j->get<std::string>());
  }
  if (!sw || !find(*sw, "beta")) {
    if (step <= 0 || hi < lo) fail(where, "need beta-min <= beta-max and beta-step > 0");
    int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= n; ++i) sc.betas.push_back(lo + i * step);
  }
  return sc;
}

}  // namespace wavenet::cli
