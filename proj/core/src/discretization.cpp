#include "wavenet/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavenet {

int Discretization::edge_node(int j, int i) const {
  const Edge& e = graph->edges()[j];
  if (i == 0) return e.tail;
  if (i == cells[j]) return e.head;
  return edge_offset[j] + i - 1;
}

double Discretization::h_min() const { return *std::min_element(spacing.begin(), spacing.end()); }

Discretization discretize(std::shared_ptr<const MetricGraph> g, double cells_per_unit, CircuitFeedback feedback) {
  if (!(cells_per_unit > 0)) throw std::invalid_argument("cells per unit length must be positive");
  Discretization d;
  d.graph = g;
  const int nv = g->vertex_count(), ne = g->edge_count();

  // vertices occupy global nodes 0..nv-1, edge interiors follow
  int next = nv;
  for (int j = 0; j < ne; ++j) {
    const double ell = g->edges()[j].ell();
    if (ell * cells_per_unit < 4 - 1e-9)
      throw std::invalid_argument("edge '" + g->edges()[j].id + "' is shorter than 4 cells");
    const int n = std::max(4, static_cast<int>(std::ceil(ell * cells_per_unit - 1e-9)));
    d.cells.push_back(n);
    d.spacing.push_back(ell / n);
    d.edge_offset.push_back(next);
    next += n - 1;
  }
  d.node_count = next;
  d.node_dof.assign(next, -1);
  int dof = 0;
  for (int k = 0; k < nv; ++k)
    if (!g->vertices()[k].kind.dirichlet()) d.node_dof[k] = dof++;
  for (int q = nv; q < next; ++q) d.node_dof[q] = dof++;
  d.field_dofs = dof;
  for (std::size_t m = 0; m < g->masses().size(); ++m) d.mass_dof.push_back(dof++);
  d.dofs = dof;

  d.mass = Eigen::VectorXd::Zero(dof);
  d.dissipation = Eigen::VectorXd::Zero(dof);
  std::vector<Eigen::Triplet<double>> kt, dt;
  for (int j = 0; j < ne; ++j) {
    const double h = d.spacing[j];
    for (int i = 0; i < d.cells[j]; ++i) {
      const int a = d.node_dof[d.edge_node(j, i)], b = d.node_dof[d.edge_node(j, i + 1)];
      if (a >= 0) d.mass[a] += h / 2, kt.emplace_back(a, a, 1 / h);
      if (b >= 0) d.mass[b] += h / 2, kt.emplace_back(b, b, 1 / h);
      if (a >= 0 && b >= 0) kt.emplace_back(a, b, -1 / h), kt.emplace_back(b, a, -1 / h);
    }
  }
  for (int k : g->controlled()) d.dissipation[d.node_dof[k]] = 1;
  const bool circuit = g->variant() == Variant::Circuit;
  for (std::size_t m = 0; m < g->masses().size(); ++m) {
    const int k = g->masses()[m];
    const int y = d.node_dof[k], s = d.mass_dof[m];
    d.mass[s] = g->vertices()[k].kind.mass;
    kt.emplace_back(s, s, 1.0);
    // oscillator law  m s'' + s + y_t(a_k) = 0
    dt.emplace_back(s, y, 1.0);
    // flux law  H Y'' + (K y)_Y - s_fb' [+ Y'] = 0
    const int fb = (circuit && feedback == CircuitFeedback::FirstMass) ? d.mass_dof[0] : s;
    dt.emplace_back(y, fb, -1.0);
    if (circuit) d.dissipation[y] = 1;
  }
  for (int i = 0; i < dof; ++i)
    if (d.dissipation[i] != 0) dt.emplace_back(i, i, d.dissipation[i]);
  d.stiffness.resize(dof, dof);
  d.stiffness.setFromTriplets(kt.begin(), kt.end());
  d.damping.resize(dof, dof);
  d.damping.setFromTriplets(dt.begin(), dt.end());
  return d;
}

}  // namespace wavenet
