#pragma once

#include <optional>
#include <vector>

#include "wavenet/network.hpp"

namespace wavenet {

// Chain a_1 - a_2 - ... - a_{N+1}: feedback at a_1, masses m_2..m_N, Dirichlet at a_{N+1}.
struct ChainSpec {
  std::vector<Length> lengths;   // l_1..l_N
  std::vector<double> masses;    // m_2..m_N
  int N() const { return static_cast<int>(lengths.size()); }
  double ell(int j) const { return lengths.at(j - 1).to_double(); }   // 1-based
  double mass(int j) const { return masses.at(j - 2); }               // 2..N
};

void validate(const ChainSpec& c);
GraphSpec to_graph_spec(const ChainSpec& c);

struct MassGroup {
  double mass = 1;
  std::vector<int> nodes;   // vertex indices i_1 < ... < i_k, each in 2..N
  double beta() const;      // resonance 1/sqrt(m)
  int k() const { return static_cast<int>(nodes.size()); }
};

// Groups equal masses (relative tolerance 1e-12), ordered by first occurrence.
std::vector<MassGroup> mass_groups(const ChainSpec& c);

// Edges [first, last] (1-based) spanned by the r-th member of a group; the
// last member spans to the Dirichlet end.
struct Span {
  int first = 0;
  int last = 0;
};
Span span_of(const MassGroup& g, int r, const ChainSpec& c);

// c_j at the non-resonant interior node j: 1/(beta (m - m_j)).
double c_coefficient(double beta, double m_j, double m);

// Alternating sine-product sum over index chains for a span with angles
// x (L entries) and coefficients c (L-1 entries, one per interior node).
// Exponential in L; refuses L > 20.
double delta_closed(const std::vector<double>& x, const std::vector<double>& c);
// Same for a group member; beta defaults to the group's resonance.
double delta_closed(const MassGroup& g, int r, const ChainSpec& c, std::optional<double> beta = std::nullopt);

struct DeltaPair {
  double delta = 0;
  double m = 0;
};

// Delta_2 = sin x_2, M_2 = -cos x_2, then the two-term recurrence.
// x = (x_2..x_N), c = (c_3..c_N).
DeltaPair delta_recurrence(const std::vector<double>& x, const std::vector<double>& c);

struct ChainWitness {
  double mass = 0;
  int r = 0;
  double delta = 0;
  bool operator==(const ChainWitness&) const = default;
};

struct ChainVerdict {
  bool stable = true;
  std::vector<ChainWitness> table;       // every (m, r) evaluated
  std::vector<ChainWitness> witnesses;   // those with |Delta| <= tol
  bool operator==(const ChainVerdict&) const = default;
};

ChainVerdict chain_stable(const ChainSpec& c, double tol = 1e-9);

}  // namespace wavenet
