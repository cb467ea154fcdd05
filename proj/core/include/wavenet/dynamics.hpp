#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wavenet/discretization.hpp"

namespace wavenet {

using Profile = std::function<double(double)>;

// Initial data keyed by edge / vertex ids; missing entries are zero.
struct InitialData {
  std::map<std::string, Profile> y0;                    // displacement potential per edge
  std::map<std::string, Profile> y1;                    // velocity per edge
  std::map<std::string, std::pair<double, double>> oscillators;  // vertex id -> (s0, s1)
};

// Leapfrog state: u at t, w at t - lag/2 (w = u' on the staggered grid).
// lag == 0 means the velocity is collocated with u (freshly initialised).
struct NetworkState {
  const Discretization* disc = nullptr;
  Eigen::VectorXd u;
  Eigen::VectorXd w;
  double t = 0;
  double lag = 0;

  std::vector<double> edge_y(int j) const;   // y at grid points 0..n_j
  std::vector<double> edge_v(int j) const;
  double p(int mass) const;                  // s_k
  double q(int mass) const;                  // s_k'
};

NetworkState init_state(const Discretization& d, const InitialData& data, double tol = 1e-8);

// One leapfrog step. Throws on CFL violation (dt > cfl * h_min) or when dt
// cannot resolve an oscillator (dt >= 2 sqrt(m_k)).
NetworkState step(const NetworkState& s, double dt, double cfl = 0.9);

double energy(const NetworkState& s);

struct RunConfig {
  double T = 10;
  double cfl = 0.9;
  double cells_per_unit = 40;
  int sample_stride = 1;
  CircuitFeedback feedback = CircuitFeedback::PerNode;
};

struct EnergySeries {
  std::vector<double> t, E, D, R;
  double omega = 0;          // fitted decay exponent of E
  double fit_residual = 0;   // relative residual of the log-linear fit
  bool fitted = false;       // fit window available (T >= 4 * diameter)
};

// Fits log E on [T/2, T]; omega := 0 when the relative residual exceeds 0.2.
void fit_decay(EnergySeries& s, double t_start);

EnergySeries run(std::shared_ptr<const MetricGraph> g, const RunConfig& cfg, const InitialData& data);
// same, on an existing discretisation and state
EnergySeries run(const NetworkState& s0, const RunConfig& cfg, NetworkState* final_state = nullptr);

// Stepper that keeps factorised local solves; step() builds one per call.
class Leapfrog {
 public:
  Leapfrog(const Discretization& d, double dt);
  // advances s in place; returns the dissipated energy dt * w_c' D w_c
  double advance(NetworkState& s) const;
  double dt() const { return dt_; }

 private:
  struct Block {
    std::vector<int> dofs;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  };
  const Discretization& d_;
  double dt_;
  Eigen::SparseMatrix<double> rhs_;    // M/dt - D/2
  Eigen::VectorXd diag_;               // (M/dt + D/2) diagonal for uncoupled dofs
  std::vector<int> block_of_;
  std::vector<Block> blocks_;
};

}  // namespace wavenet
