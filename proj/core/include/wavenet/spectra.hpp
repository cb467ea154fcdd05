#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "wavenet/network.hpp"

namespace wavenet {

using cplx = std::complex<double>;

// Unknowns (alpha_j, gamma_j) of y_j(x) = alpha_j cosh(lx) + gamma_j sinh(lx)/l.
// The sinh(lx)/l basis is entire in l, so no row degenerates at l = 0.
// Mass denominators (m l^2 + 1) are cleared row by row.
struct CharacteristicSystem {
  cplx lambda;
  Eigen::MatrixXcd matrix;
  Eigen::MatrixXcd derivative;   // dM/dlambda, analytic
  Eigen::VectorXd row_scale;     // positive max-abs equilibration factors
};

CharacteristicSystem char_matrix(const MetricGraph& g, cplx lambda);
cplx char_det(const MetricGraph& g, cplx lambda);             // det of the raw matrix
cplx normalized_det(const MetricGraph& g, cplx lambda);       // det after row equilibration

struct Box {
  double re0, re1, im0, im1;
};

struct Root {
  cplx lambda;
  double residual = 0;   // |normalized det| at lambda
  int multiplicity = 1;  // argument-principle count of the isolating box
  int null_dim = 1;      // numerical nullity of M(lambda)
};

struct EigenReport {
  Box box{};
  int count = 0;               // argument-principle count over the search box
  std::vector<Root> roots;     // sorted by real then imaginary part
  int boxes_examined = 0;
};

struct SpectrumOptions {
  double tol = 1e-10;          // Newton target on |normalized det|
  int max_depth = 40;
  int max_retries = 6;
};

// Throws std::runtime_error if a root sits on a contour after all retries.
EigenReport find_eigenvalues(const MetricGraph& g, const Box& box, const SpectrumOptions& opt = {});
// winding number of normalized_det around the box
int winding_count(const MetricGraph& g, const Box& box);
// polishes a root estimate; returns the refined value
cplx newton_refine(const MetricGraph& g, cplx lambda, double tol = 1e-12, int max_iter = 60);

struct Eigenfunction {
  cplx lambda;
  Eigen::VectorXcd coeffs;        // (alpha_j, gamma_j) pairs, scaled to unit state norm
  Eigen::VectorXcd p, q;          // oscillator values per mass ordinal
  int null_dim = 1;
  double residual = 0;            // |M c| / |c| on the equilibrated matrix
  cplx y(int edge, double x) const;
  cplx dy(int edge, double x) const;
  cplx v(int edge, double x) const { return lambda * y(edge, x); }
};

// Null vector of M(lambda) lifted to (y, v, p, q), unit norm in the energy space.
Eigenfunction eigenfunction(const MetricGraph& g, cplx lambda, double tol = 1e-8);
// energy-space norm of the lifted state
double state_norm(const MetricGraph& g, const Eigenfunction& e);

}  // namespace wavenet
