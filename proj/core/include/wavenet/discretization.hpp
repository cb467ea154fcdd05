#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "wavenet/network.hpp"

namespace wavenet {

// How the circuit inner nodes read the oscillator feedback. PerNode uses
// s_k' at node k; FirstMass feeds s_1' to every inner node as printed.
enum class CircuitFeedback { PerNode, FirstMass };

// Second-order semi-discretisation  M u'' + D u' + K u = 0  of the network.
// u holds y at every non-Dirichlet grid node followed by one s_k per mass.
// M is lumped (trapezoid weights, m_k for oscillators), K is the staggered
// difference stiffness plus identity on s, D = C - G with C >= 0 diagonal
// (controlled leaves, circuit inner nodes) and G skew (vertex/oscillator coupling).
struct Discretization {
  std::shared_ptr<const MetricGraph> graph;
  std::vector<int> cells;          // n_j
  std::vector<double> spacing;     // h_j
  std::vector<int> edge_offset;    // first global node of edge j's interior nodes
  std::vector<int> node_dof;       // global node -> dof, -1 if Dirichlet
  std::vector<int> mass_dof;       // mass ordinal -> dof of s_k
  int node_count = 0;
  int field_dofs = 0;              // number of y dofs
  int dofs = 0;                    // field_dofs + masses

  Eigen::VectorXd mass;            // diagonal of M
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SparseMatrix<double> damping;
  Eigen::VectorXd dissipation;     // diagonal of C

  // global node of grid point i (0..n_j) on edge j
  int edge_node(int j, int i) const;
  double h_min() const;
};

// n_j = ceil(l_j * cells_per_unit); refuses edges that would get fewer than 4 cells.
Discretization discretize(std::shared_ptr<const MetricGraph> g, double cells_per_unit,
                          CircuitFeedback feedback = CircuitFeedback::PerNode);

}  // namespace wavenet
