#include "wavenet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wavenet {

std::vector<double> NetworkState::edge_y(int j) const {
  std::vector<double> out(disc->cells[j] + 1, 0.0);
  for (int i = 0; i <= disc->cells[j]; ++i) {
    int dof = disc->node_dof[disc->edge_node(j, i)];
    if (dof >= 0) out[i] = u[dof];
  }
  return out;
}

std::vector<double> NetworkState::edge_v(int j) const {
  std::vector<double> out(disc->cells[j] + 1, 0.0);
  for (int i = 0; i <= disc->cells[j]; ++i) {
    int dof = disc->node_dof[disc->edge_node(j, i)];
    if (dof >= 0) out[i] = w[dof];
  }
  return out;
}

double NetworkState::p(int m) const { return u[disc->mass_dof[m]]; }
double NetworkState::q(int m) const { return w[disc->mass_dof[m]]; }

NetworkState init_state(const Discretization& d, const InitialData& data, double tol) {
  const MetricGraph& g = *d.graph;
  for (const auto* field : {&data.y0, &data.y1})
    for (const auto& [id, f] : *field)
      if (g.edge_index(id) < 0) throw std::invalid_argument("initial data for unknown edge '" + id + "'");

  NetworkState s;
  s.disc = &d;
  s.u = Eigen::VectorXd::Zero(d.dofs);
  s.w = Eigen::VectorXd::Zero(d.dofs);

  const int nv = g.vertex_count();
  std::vector<std::vector<double>> y_at(nv), v_at(nv);
  for (int j = 0; j < g.edge_count(); ++j) {
    const Edge& e = g.edges()[j];
    auto y0 = data.y0.find(e.id);
    auto y1 = data.y1.find(e.id);
    for (int i = 0; i <= d.cells[j]; ++i) {
      const double x = i * d.spacing[j];
      const double yv = y0 != data.y0.end() ? y0->second(x) : 0.0;
      const double vv = y1 != data.y1.end() ? y1->second(x) : 0.0;
      const int node = d.edge_node(j, i);
      if (node < nv) {
        y_at[node].push_back(yv);
        v_at[node].push_back(vv);
        continue;
      }
      s.u[d.node_dof[node]] = yv;
      s.w[d.node_dof[node]] = vv;
    }
  }
  for (int k = 0; k < nv; ++k) {
    const auto& ys = y_at[k];
    const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    if (*hi - *lo > tol)
      throw std::invalid_argument("initial displacement discontinuous at vertex '" + g.vertices()[k].id + "'");
    const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    const double vmean = std::accumulate(v_at[k].begin(), v_at[k].end(), 0.0) / v_at[k].size();
    if (g.vertices()[k].kind.dirichlet()) {
      if (std::fabs(mean) > tol)
        throw std::invalid_argument("initial displacement nonzero at Dirichlet vertex '" + g.vertices()[k].id + "'");
      continue;
    }
    s.u[d.node_dof[k]] = mean;
    s.w[d.node_dof[k]] = vmean;
  }
  for (const auto& [id, sv] : data.oscillators) {
    const int k = g.vertex_index(id);
    if (k < 0 || g.mass_index(k) < 0) throw std::invalid_argument("oscillator data for non-mass vertex '" + id + "'");
    s.u[d.mass_dof[g.mass_index(k)]] = sv.first;
    s.w[d.mass_dof[g.mass_index(k)]] = sv.second;
  }
  return s;
}

double energy(const NetworkState& s) {
  const Discretization& d = *s.disc;
  const Eigen::VectorXd ku = d.stiffness * (s.u - s.lag * s.w);
  return 0.5 * s.w.dot(d.mass.cwiseProduct(s.w)) + 0.5 * s.u.dot(ku);
}

Leapfrog::Leapfrog(const Discretization& d, double dt) : d_(d), dt_(dt) {
  if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
  const int n = d.dofs;
  Eigen::SparseMatrix<double> mdt(n, n);
  mdt.setIdentity();
  mdt = (d.mass / dt).asDiagonal() * mdt;
  rhs_ = mdt - 0.5 * d.damping;

  // group dofs coupled through D into small dense blocks
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (int c = 0; c < d.damping.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d.damping, c); it; ++it)
      if (it.row() != it.col()) parent[find(it.row())] = find(it.col());
  std::vector<int> root_block(n, -1);
  block_of_.assign(n, -1);
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (root_block[r] < 0) {
      root_block[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[root_block[r]].push_back(i);
  }
  diag_ = d.mass / dt + 0.5 * d.damping.diagonal();
  for (auto& grp : groups) {
    if (grp.size() == 1) continue;
    const int m = static_cast<int>(grp.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int r = 0; r < m; ++r) {
      a(r, r) = d.mass[grp[r]] / dt;
      for (int c = 0; c < m; ++c) a(r, c) += 0.5 * d.damping.coeff(grp[r], grp[c]);
    }
    for (int i : grp) block_of_[i] = static_cast<int>(blocks_.size());
    blocks_.push_back({grp, Eigen::PartialPivLU<Eigen::MatrixXd>(a)});
  }
}

double Leapfrog::advance(NetworkState& s) const {
  const Discretization& d = d_;
  const double dt = dt_;
  if (s.lag == 0) {
    // collocated data: shift the velocity back half a step
    const Eigen::VectorXd a0 =
        (-(d.stiffness * s.u) - d.damping * s.w).cwiseQuotient(d.mass);
    s.w -= 0.5 * dt * a0;
    s.lag = dt;
  } else if (std::fabs(s.lag - dt) > 1e-12 * dt) {
    throw std::invalid_argument("time step changed mid-run");
  }
  const Eigen::VectorXd b = rhs_ * s.w - d.stiffness * s.u;
  Eigen::VectorXd wn(d.dofs);
  for (int i = 0; i < d.dofs; ++i)
    if (block_of_[i] < 0) wn[i] = b[i] / diag_[i];
  for (const Block& blk : blocks_) {
    Eigen::VectorXd bb(blk.dofs.size());
    for (std::size_t r = 0; r < blk.dofs.size(); ++r) bb[r] = b[blk.dofs[r]];
    const Eigen::VectorXd x = blk.lu.solve(bb);
    for (std::size_t r = 0; r < blk.dofs.size(); ++r) wn[blk.dofs[r]] = x[r];
  }
  const Eigen::VectorXd wc = 0.5 * (wn + s.w);
  const double diss = dt * wc.dot(d.damping * wc);
  s.w = wn;
  s.u += dt * wn;
  s.t += dt;
  return diss;
}

namespace {

void check_step(const Discretization& d, double dt, double cfl) {
  if (dt > cfl * d.h_min() * (1 + 1e-12))
    throw std::invalid_argument("CFL violation: dt exceeds cfl * h_min");
  for (int k : d.graph->masses())
    if (dt >= 2 * std::sqrt(d.graph->vertices()[k].kind.mass))
      throw std::invalid_argument("time step does not resolve an oscillator");
}

}  // namespace

NetworkState step(const NetworkState& s, double dt, double cfl) {
  check_step(*s.disc, dt, cfl);
  NetworkState out = s;
  Leapfrog(*s.disc, dt).advance(out);
  return out;
}

void fit_decay(EnergySeries& s, double t_start) {
  s.fitted = false;
  s.omega = 0;
  s.fit_residual = 0;
  if (s.E.empty()) return;
  const double floor = 1e-28 * std::max(s.E.front(), 1e-300);
  std::vector<double> t, y;
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (s.t[i] >= t_start && s.E[i] > floor) t.push_back(s.t[i]), y.push_back(std::log(s.E[i]));
  if (t.size() < 3) return;
  Eigen::MatrixXd a(t.size(), 2);
  Eigen::VectorXd b(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) a(i, 0) = 1, a(i, 1) = t[i], b[i] = y[i];
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  const double res = (a * c - b).norm();
  const double spread = (b.array() - b.mean()).matrix().norm();
  s.fitted = true;
  s.fit_residual = spread > 0 ? res / spread : (res > 0 ? 1.0 : 0.0);
  s.omega = s.fit_residual > 0.2 ? 0.0 : -c[1];
}

EnergySeries run(const NetworkState& s0, const RunConfig& cfg, NetworkState* final_state) {
  const Discretization& d = *s0.disc;
  if (!(cfg.T > 0)) throw std::invalid_argument("T must be positive");
  if (cfg.sample_stride < 1) throw std::invalid_argument("sample stride must be >= 1");
  const double dt_max = cfg.cfl * d.h_min();
  const long steps = static_cast<long>(std::ceil(cfg.T / dt_max - 1e-9));
  const double dt = cfg.T / steps;
  check_step(d, dt, cfg.cfl);

  Leapfrog lf(d, dt);
  NetworkState s = s0;
  EnergySeries out;
  const double e0 = energy(s);
  out.t.push_back(s.t - s.lag / 2);
  out.E.push_back(e0);
  out.D.push_back(0);
  out.R.push_back(0);
  double dissipated = 0;
  double prev = e0;
  for (long n = 0; n < steps; ++n) {
    const bool fresh = s.lag == 0;
    const double r = lf.advance(s);
    dissipated += r;
    if (fresh) dissipated -= 0.5 * r;  // the first half step starts at t = 0
    const bool sample = (n + 1) % cfg.sample_stride == 0 || n + 1 == steps;
    if (!sample) continue;
    const double e = energy(s);
    if (e > 1.01 * prev + 1e-14 * e0)
      throw std::runtime_error("energy blow-up: E grew by more than 1% between samples");
    prev = e;
    out.t.push_back(s.t - s.lag / 2);
    out.E.push_back(e);
    out.D.push_back(dissipated);
    out.R.push_back(e0 - e - dissipated);
  }
  const double diam = d.graph->diameter();
  if (cfg.T >= 4 * diam) fit_decay(out, cfg.T / 2);
  if (final_state) *final_state = s;
  return out;
}

EnergySeries run(std::shared_ptr<const MetricGraph> g, const RunConfig& cfg, const InitialData& data) {
  const Discretization d = discretize(std::move(g), cfg.cells_per_unit, cfg.feedback);
  const NetworkState s = init_state(d, data);
  return run(s, cfg);
}

}  // namespace wavenet
