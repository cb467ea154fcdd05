#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "wavenet/discretization.hpp"

namespace wavenet {

// First-order form z' = A_h z with z = (u, w):
//   A_h = [[0, I], [-M^-1 K, -M^-1 D]],  W_h = blkdiag(K, M)
// so that |z|_W^2 is twice the discrete energy.
struct DiscreteGenerator {
  std::shared_ptr<const Discretization> disc;
  Eigen::SparseMatrix<double> A;
  Eigen::SparseMatrix<double> W;
  double h = 0;   // requested mesh width
  int dim() const { return static_cast<int>(A.rows()); }
};

DiscreteGenerator assemble_generator(std::shared_ptr<const MetricGraph> g, double h,
                                     CircuitFeedback feedback = CircuitFeedback::PerNode);

using CVec = Eigen::VectorXcd;

// Factorised (i beta - A_h) for repeated solves.
class ResolventSolver {
 public:
  ResolventSolver(const DiscreteGenerator& gen, double beta);
  bool ok() const { return ok_; }
  CVec apply(const CVec& f) const;           // (i beta - A)^{-1} f
  CVec apply_adjoint(const CVec& y) const;   // Euclidean adjoint of the above
  double w_norm(const CVec& z) const;
  CVec w_apply(const CVec& z) const;
  CVec w_solve(const CVec& z) const;

 private:
  const DiscreteGenerator& gen_;
  double beta_;
  bool ok_ = false;
  int n_ = 0;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>> lu_;
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> kchol_;
};

struct NormEstimate {
  double norm = 0;        // |(i beta - A)^{-1}|_W, +inf if i beta is an eigenvalue
  double sigma_min = 0;   // 1 / norm
  int iterations = 0;
  bool converged = false;
};

NormEstimate resolvent_norm(const DiscreteGenerator& gen, double beta, double rel_tol = 1e-10, int max_iter = 120);

// Re <A z, z>_W
double dissipation_form(const DiscreteGenerator& gen, const Eigen::VectorXd& z);

enum class Verdict { Bounded, Unbounded, Inconclusive };
const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct SweepOptions {
  std::vector<double> ladder{20, 40};  // cells per unit length at the coarsest coupling
  double h_beta = 0.2;                 // enforce h * beta <= h_beta on every level
  int refine_peaks = 3;                // local maxima refined per level
  int refine_iterations = 60;
  CircuitFeedback feedback = CircuitFeedback::PerNode;
};

struct SweepSample {
  double beta = 0;
  int level = 0;
  double mesh = 0;          // cells per unit length actually used
  double sigma_min = 0;
  double norm = 0;
  bool refined = false;     // produced by peak refinement, not the user grid
};

struct LevelSummary {
  int level = 0;
  double base_mesh = 0;
  double sup = 0;
  double beta_at_sup = 0;
};

struct SweepReport {
  std::vector<SweepSample> samples;
  std::vector<LevelSummary> levels;
  Verdict verdict = Verdict::Inconclusive;
  double sup_ratio = 0;     // finest / second finest
  double peak_beta = 0;     // location of the finest sup
};

SweepReport sweep(std::shared_ptr<const MetricGraph> g, const std::vector<double>& betas, const SweepOptions& opt = {});
// cells per unit length used at beta on a level whose base is `base`
double coupled_mesh(double base, double coarsest, double beta, double h_beta);

}  // namespace wavenet
