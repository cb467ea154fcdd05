#include "wavenet/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <stdexcept>

namespace wavenet {

int MetricGraph::incidence(int k, int j) const {
  const Edge& e = edges_.at(j);
  if (e.head == k) return +1;
  if (e.tail == k) return -1;
  return 0;
}

int MetricGraph::vertex_index(const std::string& id) const {
  for (int k = 0; k < vertex_count(); ++k)
    if (vertices_[k].id == id) return k;
  return -1;
}

int MetricGraph::edge_index(const std::string& id) const {
  for (int j = 0; j < edge_count(); ++j)
    if (edges_[j].id == id) return j;
  return -1;
}

double MetricGraph::min_length() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : edges_) m = std::min(m, e.ell());
  return m;
}

double MetricGraph::diameter() const {
  // Dijkstra from every vertex; graphs here are tiny.
  const int n = vertex_count();
  double best = 0;
  for (int s = 0; s < n; ++s) {
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0;
    pq.push({0, s});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (int j : vertices_[u].edges) {
        const Edge& e = edges_[j];
        int w = e.head == u ? e.tail : e.head;
        if (d + e.ell() < dist[w]) {
          dist[w] = d + e.ell();
          pq.push({dist[w], w});
        }
      }
    }
    for (double d : dist) best = std::max(best, d);
  }
  return best;
}

MetricGraph build_graph(const GraphSpec& spec) {
  MetricGraph g;
  g.variant_ = spec.variant;
  std::map<std::string, int> vid;
  for (const auto& v : spec.vertices) {
    if (vid.count(v.id)) throw std::invalid_argument("duplicate vertex id '" + v.id + "'");
    if (v.kind.type == VertexType::InteriorMass && !(v.kind.mass > 0))
      throw std::invalid_argument("nonpositive mass at vertex '" + v.id + "'");
    vid[v.id] = static_cast<int>(g.vertices_.size());
    g.vertices_.push_back({v.id, v.kind, {}});
  }
  std::map<std::string, int> eid;
  for (const auto& e : spec.edges) {
    if (eid.count(e.id)) throw std::invalid_argument("duplicate edge id '" + e.id + "'");
    if (!(e.length.value > 0)) throw std::invalid_argument("nonpositive length on edge '" + e.id + "'");
    auto t = vid.find(e.tail), h = vid.find(e.head);
    if (t == vid.end() || h == vid.end())
      throw std::invalid_argument("edge '" + e.id + "' references an unknown vertex");
    if (t->second == h->second) throw std::invalid_argument("self-loop on edge '" + e.id + "'");
    eid[e.id] = static_cast<int>(g.edges_.size());
    g.vertices_[t->second].edges.push_back(static_cast<int>(g.edges_.size()));
    g.vertices_[h->second].edges.push_back(static_cast<int>(g.edges_.size()));
    g.edges_.push_back({e.id, t->second, h->second, e.length});
  }

  const int n = g.vertex_count();
  int roots = 0;
  for (int k = 0; k < n; ++k)
    if (g.vertices_[k].kind.type == VertexType::Root) ++roots, g.root_ = k;
  if (roots == 0) throw std::invalid_argument("no root vertex");
  if (roots > 1) throw std::invalid_argument("multiple root vertices");
  if (g.edges_.empty()) throw std::invalid_argument("graph has no edges");

  // connectivity
  std::vector<char> seen(n, 0);
  std::vector<int> stack{g.root_};
  seen[g.root_] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int j : g.vertices_[u].edges) {
      int w = g.edges_[j].head == u ? g.edges_[j].tail : g.edges_[j].head;
      if (!seen[w]) seen[w] = 1, stack.push_back(w);
    }
  }
  if (std::count(seen.begin(), seen.end(), 0) > 0) throw std::invalid_argument("graph is disconnected");

  const int cycles = g.edge_count() - n + 1;
  if (spec.variant == Variant::Circuit) {
    if (cycles != 1) throw std::invalid_argument("circuit variant needs exactly one cycle");
  } else if (cycles != 0) {
    throw std::invalid_argument(std::string("cycle in a ") + to_string(spec.variant) + " variant");
  }

  g.mass_index_.assign(n, -1);
  for (int k = 0; k < n; ++k) {
    const Vertex& v = g.vertices_[k];
    const auto deg = v.edges.size();
    switch (v.kind.type) {
      case VertexType::InteriorMass:
        if (deg < 2) throw std::invalid_argument("interior vertex '" + v.id + "' has multiplicity 1");
        g.mass_index_[k] = static_cast<int>(g.masses_.size());
        g.masses_.push_back(k);
        break;
      case VertexType::ControlledLeaf:
        if (deg != 1) throw std::invalid_argument("controlled leaf '" + v.id + "' must have multiplicity 1");
        g.controlled_.push_back(k);
        break;
      case VertexType::FixedLeaf:
        if (deg != 1) throw std::invalid_argument("fixed leaf '" + v.id + "' must have multiplicity 1");
        if (spec.variant != Variant::Star && spec.variant != Variant::Chain)
          throw std::invalid_argument("fixed leaves are only allowed in star and chain variants");
        break;
      case VertexType::Root:
        break;
    }
  }
  return g;
}

bool is_pi_multiple(const Length& l, double tol) {
  switch (l.form) {
    case Length::Form::PiRational:
      return l.num > 0 && l.num % l.den == 0;
    case Length::Form::Rational:
    case Length::Form::Sqrt:
      return false;  // algebraic, pi is transcendental
    case Length::Form::Decimal:
      break;
  }
  const long double pi = std::numbers::pi_v<long double>;
  long double k = std::round(l.value / pi);
  if (k < 1) k = 1;
  return std::fabs(l.value - k * pi) <= tol * l.value;
}

PiTreeVerdict pi_tree_check(const MetricGraph& g, double tol) {
  if (g.variant() != Variant::Tree && g.variant() != Variant::Chain)
    throw std::invalid_argument("pi_tree_check needs a tree");
  PiTreeVerdict v;
  for (const Edge& e : g.edges()) {
    bool leaf = false;
    for (int end : {e.tail, e.head})
      if (g.vertices()[end].kind.type == VertexType::ControlledLeaf) leaf = true;
    if (leaf) continue;
    if (is_pi_multiple(e.length, tol)) v.witnesses.push_back(e.id);
  }
  std::sort(v.witnesses.begin(), v.witnesses.end());
  v.pi_tree = v.witnesses.empty();
  return v;
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Tree: return "tree";
    case Variant::Circuit: return "circuit";
    case Variant::Star: return "star";
    case Variant::Chain: return "chain";
  }
  return "?";
}

const char* to_string(VertexType t) {
  switch (t) {
    case VertexType::Root: return "root";
    case VertexType::InteriorMass: return "mass";
    case VertexType::ControlledLeaf: return "controlled";
    case VertexType::FixedLeaf: return "fixed";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "tree") return Variant::Tree;
  if (s == "circuit") return Variant::Circuit;
  if (s == "star") return Variant::Star;
  if (s == "chain") return Variant::Chain;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

VertexType vertex_type_from_string(const std::string& s) {
  if (s == "root") return VertexType::Root;
  if (s == "mass" || s == "interior") return VertexType::InteriorMass;
  if (s == "controlled") return VertexType::ControlledLeaf;
  if (s == "fixed") return VertexType::FixedLeaf;
  throw std::invalid_argument("unknown vertex kind '" + s + "'");
}

GraphSpec chain_spec(const std::vector<Length>& lengths, const std::vector<double>& masses) {
  const int n = static_cast<int>(lengths.size());
  if (n < 1) throw std::invalid_argument("chain needs at least one edge");
  if (static_cast<int>(masses.size()) != n - 1)
    throw std::invalid_argument("chain with N edges needs N-1 masses");
  GraphSpec s;
  s.variant = Variant::Chain;
  s.vertices.push_back({"a1", VertexKind::controlled()});
  for (int j = 2; j <= n; ++j) s.vertices.push_back({"a" + std::to_string(j), VertexKind::interior(masses[j - 2])});
  s.vertices.push_back({"a" + std::to_string(n + 1), VertexKind::root()});
  for (int j = 1; j <= n; ++j)
    s.edges.push_back({"e" + std::to_string(j), "a" + std::to_string(j), "a" + std::to_string(j + 1), lengths[j - 1]});
  return s;
}

GraphSpec circuit_spec(const Length& l4) {
  GraphSpec s;
  s.variant = Variant::Circuit;
  s.vertices = {{"R", VertexKind::root()},
                {"O", VertexKind::interior(1)},
                {"P", VertexKind::interior(1)},
                {"Q", VertexKind::interior(1)}};
  s.edges = {{"e1", "O", "R", Length::rational(1, 1)},
             {"e2", "O", "P", Length::rational(1, 1)},
             {"e3", "O", "Q", Length::rational(1, 1)},
             {"e4", "P", "Q", l4}};
  return s;
}

GraphSpec star_spec(const Length& l3) {
  GraphSpec s;
  s.variant = Variant::Star;
  s.vertices = {{"c", VertexKind::interior(1)},
                {"u", VertexKind::controlled()},
                {"R", VertexKind::root()},
                {"f", VertexKind::fixed()}};
  s.edges = {{"e1", "c", "u", Length::rational(1, 1)},
             {"e2", "c", "R", Length::rational(1, 1)},
             {"e3", "c", "f", l3}};
  return s;
}

}  // namespace wavenet
