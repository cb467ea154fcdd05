#pragma once

#include <string>
#include <vector>

#include "wavenet/length.hpp"

namespace wavenet {

enum class VertexType { Root, InteriorMass, ControlledLeaf, FixedLeaf };
enum class Variant { Tree, Circuit, Star, Chain };

struct VertexKind {
  VertexType type = VertexType::Root;
  double mass = 0;  // only for InteriorMass

  static VertexKind root() { return {VertexType::Root, 0}; }
  static VertexKind interior(double m = 1.0) { return {VertexType::InteriorMass, m}; }
  static VertexKind controlled() { return {VertexType::ControlledLeaf, 0}; }
  static VertexKind fixed() { return {VertexType::FixedLeaf, 0}; }
  bool dirichlet() const { return type == VertexType::Root || type == VertexType::FixedLeaf; }
};

struct VertexSpec {
  std::string id;
  VertexKind kind;
};

struct EdgeSpec {
  std::string id;
  std::string tail;
  std::string head;
  Length length;
};

struct GraphSpec {
  Variant variant = Variant::Tree;
  std::vector<VertexSpec> vertices;
  std::vector<EdgeSpec> edges;
};

struct Vertex {
  std::string id;
  VertexKind kind;
  std::vector<int> edges;  // incident edges, ascending
};

struct Edge {
  std::string id;
  int tail = -1;
  int head = -1;
  Length length;
  double ell() const { return length.to_double(); }
};

// Immutable validated network. Edge j is parametrised x in [0, l_j] from tail
// to head, so d(head, j) = +1 and d(tail, j) = -1.
class MetricGraph {
 public:
  Variant variant() const { return variant_; }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int root() const { return root_; }

  int incidence(int k, int j) const;
  // interior vertices carrying an oscillator (I_M) and controlled leaves (I_S)
  const std::vector<int>& masses() const { return masses_; }
  const std::vector<int>& controlled() const { return controlled_; }
  // ordinal of an interior vertex inside masses(), or -1
  int mass_index(int k) const { return mass_index_[k]; }
  int vertex_index(const std::string& id) const;
  int edge_index(const std::string& id) const;
  double diameter() const;  // longest shortest path, by length
  double min_length() const;

 private:
  friend MetricGraph build_graph(const GraphSpec&);
  Variant variant_ = Variant::Tree;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<int> masses_, controlled_, mass_index_;
  int root_ = -1;
};

// Throws std::invalid_argument with a short reason on any invariant violation.
MetricGraph build_graph(const GraphSpec& spec);

struct PiTreeVerdict {
  bool pi_tree = true;
  std::vector<std::string> witnesses;  // offending edge ids
  bool operator==(const PiTreeVerdict&) const = default;
};

// Distance of l to pi*N*, exact for "pi*a/b" literals and for exact
// rational / sqrt lengths (never a multiple of pi).
bool is_pi_multiple(const Length& l, double tol);
PiTreeVerdict pi_tree_check(const MetricGraph& g, double tol = 1e-9);

const char* to_string(Variant v);
const char* to_string(VertexType t);
Variant variant_from_string(const std::string& s);
VertexType vertex_type_from_string(const std::string& s);

// The reconstructed example networks used throughout the tools and tests.
// chain: a1 controlled, a2..aN masses, a_{N+1} Dirichlet.
GraphSpec chain_spec(const std::vector<Length>& lengths, const std::vector<double>& masses);
// circuit: root-O, O-P, O-Q (unit lengths) and P-Q of length l4; O, P, Q unit masses.
GraphSpec circuit_spec(const Length& l4);
// star: centre mass 1; edge to a controlled leaf (1), to a fixed end (1), to a fixed end (l3).
GraphSpec star_spec(const Length& l3);

}  // namespace wavenet
