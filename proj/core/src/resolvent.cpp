#include "wavenet/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace wavenet {

using SpC = Eigen::SparseMatrix<std::complex<double>>;
using Trip = Eigen::Triplet<double>;

DiscreteGenerator assemble_generator(std::shared_ptr<const MetricGraph> g, double h, CircuitFeedback feedback) {
  if (!(h > 0)) throw std::invalid_argument("mesh width must be positive");
  DiscreteGenerator gen;
  gen.h = h;
  gen.disc = std::make_shared<Discretization>(discretize(std::move(g), 1.0 / h, feedback));
  const Discretization& d = *gen.disc;
  const int n = d.dofs;
  std::vector<Trip> at, wt;
  for (int i = 0; i < n; ++i) at.emplace_back(i, n + i, 1.0), wt.emplace_back(n + i, n + i, d.mass[i]);
  for (int c = 0; c < n; ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(d.stiffness, c); it; ++it) {
      at.emplace_back(n + it.row(), it.col(), -it.value() / d.mass[it.row()]);
      wt.emplace_back(it.row(), it.col(), it.value());
    }
    for (Eigen::SparseMatrix<double>::InnerIterator it(d.damping, c); it; ++it)
      at.emplace_back(n + it.row(), n + it.col(), -it.value() / d.mass[it.row()]);
  }
  gen.A.resize(2 * n, 2 * n);
  gen.A.setFromTriplets(at.begin(), at.end());
  gen.W.resize(2 * n, 2 * n);
  gen.W.setFromTriplets(wt.begin(), wt.end());
  return gen;
}

double dissipation_form(const DiscreteGenerator& gen, const Eigen::VectorXd& z) {
  return z.dot(gen.W * (gen.A * z));
}

namespace {

SpC complexify(const Eigen::SparseMatrix<double>& a) { return a.cast<std::complex<double>>(); }

}  // namespace

ResolventSolver::ResolventSolver(const DiscreteGenerator& gen, double beta) : gen_(gen), beta_(beta) {
  const Discretization& d = *gen.disc;
  n_ = d.dofs;
  const std::complex<double> ib(0, beta);
  SpC mdiag(n_, n_);
  mdiag.setIdentity();
  mdiag = d.mass.cast<std::complex<double>>().asDiagonal() * mdiag;
  SpC z = complexify(d.stiffness) - (beta * beta) * mdiag + ib * complexify(d.damping);
  z.makeCompressed();
  lu_.analyzePattern(z);
  lu_.factorize(z);
  ok_ = lu_.info() == Eigen::Success;
  kchol_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>(d.stiffness);
  if (kchol_->info() != Eigen::Success) throw std::runtime_error("stiffness is not positive definite");
}

CVec ResolventSolver::apply(const CVec& x) const {
  const Discretization& d = *gen_.disc;
  const std::complex<double> ib(0, beta_);
  const CVec f = x.head(n_), g = x.tail(n_);
  const CVec m = d.mass.cast<std::complex<double>>();
  const CVec rhs = m.cwiseProduct(g) + ib * m.cwiseProduct(f) + complexify(d.damping) * f;
  const CVec u = lu_.solve(rhs);
  CVec out(2 * n_);
  out.head(n_) = u;
  out.tail(n_) = ib * u - f;
  return out;
}

CVec ResolventSolver::apply_adjoint(const CVec& y) const {
  const Discretization& d = *gen_.disc;
  const std::complex<double> ib(0, beta_);
  const CVec y1 = y.head(n_), y2 = y.tail(n_);
  const CVec c = lu_.adjoint().solve(CVec(y1 - ib * y2));
  const CVec m = d.mass.cast<std::complex<double>>();
  CVec out(2 * n_);
  out.head(n_) = -ib * m.cwiseProduct(c) + complexify(d.damping).transpose() * c - y2;
  out.tail(n_) = m.cwiseProduct(c);
  return out;
}

CVec ResolventSolver::w_apply(const CVec& z) const {
  const Discretization& d = *gen_.disc;
  CVec out(2 * n_);
  out.head(n_) = complexify(d.stiffness) * z.head(n_);
  out.tail(n_) = d.mass.cast<std::complex<double>>().cwiseProduct(z.tail(n_));
  return out;
}

CVec ResolventSolver::w_solve(const CVec& z) const {
  const Discretization& d = *gen_.disc;
  CVec out(2 * n_);
  const Eigen::VectorXd re = kchol_->solve(Eigen::VectorXd(z.head(n_).real()));
  const Eigen::VectorXd im = kchol_->solve(Eigen::VectorXd(z.head(n_).imag()));
  out.head(n_) = re.cast<std::complex<double>>() + std::complex<double>(0, 1) * im.cast<std::complex<double>>();
  out.tail(n_) = z.tail(n_).cwiseQuotient(d.mass.cast<std::complex<double>>());
  return out;
}

double ResolventSolver::w_norm(const CVec& z) const { return std::sqrt(std::max(0.0, z.dot(w_apply(z)).real())); }

NormEstimate resolvent_norm(const DiscreteGenerator& gen, double beta, double rel_tol, int max_iter) {
  NormEstimate est;
  ResolventSolver rs(gen, beta);
  const double inf = std::numeric_limits<double>::infinity();
  if (!rs.ok()) {
    est.norm = inf;
    est.converged = true;
    return est;
  }
  const int dim = gen.dim();
  max_iter = std::min(max_iter, dim);
  // Lanczos for the W-self-adjoint operator B = W^-1 T^* W T
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  CVec q(dim);
  for (int i = 0; i < dim; ++i) q[i] = {nd(rng), nd(rng)};
  q /= rs.w_norm(q);
  std::vector<CVec> basis{q};
  std::vector<double> alpha, betas;
  double theta_prev = 0;
  for (int k = 0; k < max_iter; ++k) {
    const CVec tq = rs.apply(basis[k]);
    CVec r = rs.w_solve(rs.apply_adjoint(rs.w_apply(tq)));
    if (!r.allFinite()) {
      est.norm = inf;
      est.converged = true;
      return est;
    }
    const double a = rs.w_norm(tq);  // <q, B q>_W = |T q|_W^2
    alpha.push_back(a * a);
    // full reorthogonalisation, twice
    for (int pass = 0; pass < 2; ++pass)
      for (const CVec& b : basis) r -= b.dot(rs.w_apply(r)) * b;
    const double bnorm = rs.w_norm(r);

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = alpha[i];
    for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = betas[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const double theta = es.eigenvalues()[m - 1];
    const double ritz_res = bnorm * std::fabs(es.eigenvectors()(m - 1, m - 1));
    est.iterations = k + 1;
    est.norm = std::sqrt(std::max(theta, 0.0));
    if (k > 0 && std::fabs(theta - theta_prev) <= rel_tol * theta && ritz_res <= std::sqrt(rel_tol) * theta) {
      est.converged = true;
      break;
    }
    if (bnorm <= 1e-14 * std::sqrt(theta)) {
      est.converged = true;
      break;
    }
    theta_prev = theta;
    betas.push_back(bnorm);
    basis.push_back(r / bnorm);
  }
  est.sigma_min = est.norm > 0 ? 1 / est.norm : inf;
  return est;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "bounded";
    case Verdict::Unbounded: return "unbounded";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "bounded") return Verdict::Bounded;
  if (s == "unbounded") return Verdict::Unbounded;
  if (s == "inconclusive") return Verdict::Inconclusive;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

double coupled_mesh(double base, double coarsest, double beta, double h_beta) {
  const double need = std::fabs(beta) / h_beta;
  double scale = std::max(1.0, need / coarsest);
  scale = std::ceil(scale * 4 - 1e-9) / 4;  // quantised so nearby betas share a mesh
  return base * scale;
}

SweepReport sweep(std::shared_ptr<const MetricGraph> g, const std::vector<double>& betas, const SweepOptions& opt) {
  SweepReport rep;
  if (betas.empty() || opt.ladder.empty()) return rep;
  std::vector<double> ladder = opt.ladder;
  std::sort(ladder.begin(), ladder.end());
  const double coarsest = ladder.front();

  for (int level = 0; level < static_cast<int>(ladder.size()); ++level) {
    std::map<double, std::shared_ptr<DiscreteGenerator>> gens;
    auto eval = [&](double beta, bool refined) {
      const double mesh = coupled_mesh(ladder[level], coarsest, beta, opt.h_beta);
      auto& gen = gens[mesh];
      if (!gen) gen = std::make_shared<DiscreteGenerator>(assemble_generator(g, 1.0 / mesh, opt.feedback));
      const NormEstimate e = resolvent_norm(*gen, beta);
      rep.samples.push_back({beta, level, mesh, e.sigma_min, e.norm, refined});
      return e.norm;
    };
    std::vector<double> vals;
    for (double b : betas) vals.push_back(eval(b, false));

    LevelSummary ls{level, ladder[level], 0, betas[0]};
    for (std::size_t i = 0; i < betas.size(); ++i)
      if (vals[i] > ls.sup) ls.sup = vals[i], ls.beta_at_sup = betas[i];

    // refine the largest local maxima of the sampled curve by golden-section search
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const bool left = i == 0 || vals[i] >= vals[i - 1];
      const bool right = i + 1 == vals.size() || vals[i] >= vals[i + 1];
      if (left && right) peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    if (static_cast<int>(peaks.size()) > opt.refine_peaks) peaks.resize(opt.refine_peaks);
    for (std::size_t i : peaks) {
      if (betas.size() < 2 || !std::isfinite(vals[i])) continue;
      double lo = i > 0 ? betas[i - 1] : betas[i];
      double hi = i + 1 < betas.size() ? betas[i + 1] : betas[i];
      if (hi <= lo) continue;
      const double gr = (std::sqrt(5.0) - 1) / 2;
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = eval(x1, true), f2 = eval(x2, true);
      for (int it = 0; it < opt.refine_iterations && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        if (f1 > f2) {
          hi = x2, x2 = x1, f2 = f1;
          x1 = hi - gr * (hi - lo);
          f1 = eval(x1, true);
        } else {
          lo = x1, x1 = x2, f1 = f2;
          x2 = lo + gr * (hi - lo);
          f2 = eval(x2, true);
        }
        if (!std::isfinite(f1) || !std::isfinite(f2)) break;
      }
      for (double f : {f1, f2}) {
        const double b = f == f1 ? x1 : x2;
        if (f > ls.sup) ls.sup = f, ls.beta_at_sup = b;
      }
    }
    rep.levels.push_back(ls);
  }

  const auto& fine = rep.levels.back();
  rep.peak_beta = fine.beta_at_sup;
  if (rep.levels.size() >= 2) {
    const auto& prev = rep.levels[rep.levels.size() - 2];
    rep.sup_ratio = fine.sup / prev.sup;
    if (!std::isfinite(fine.sup) || rep.sup_ratio > 2)
      rep.verdict = Verdict::Unbounded;
    else if (std::fabs(rep.sup_ratio - 1) < 0.2)
      rep.verdict = Verdict::Bounded;
    else
      rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

}  // namespace wavenet
