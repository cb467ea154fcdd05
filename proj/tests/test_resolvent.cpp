#include "doctest.h"

#include <cmath>
#include <random>

#include "wavenet/resolvent.hpp"
#include "wavenet/spectra.hpp"

using namespace wavenet;

namespace {

std::shared_ptr<const MetricGraph> share(const GraphSpec& s) { return std::make_shared<const MetricGraph>(build_graph(s)); }

std::shared_ptr<const MetricGraph> pi_chain() {
  return share(chain_spec({parse_length("1"), parse_length("pi"), parse_length("1")}, {1, 1}));
}
std::shared_ptr<const MetricGraph> good_chain() {
  return share(chain_spec({parse_length("1"), parse_length("2"), parse_length("1")}, {1, 1}));
}

GraphSpec random_tree(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> len(0.5, 2.5), mass(0.3, 3.0);
  GraphSpec s{Variant::Tree, {{"v0", VertexKind::root()}}, {}};
  std::vector<int> deg(n, 0), parent(n, -1);
  for (int i = 1; i < n; ++i) {
    parent[i] = std::uniform_int_distribution<int>(i == 1 ? 0 : 1, i - 1)(rng);
    ++deg[parent[i]];
    ++deg[i];
  }
  for (int i = 1; i < n; ++i)
    s.vertices.push_back({"v" + std::to_string(i), deg[i] == 1 ? VertexKind::controlled() : VertexKind::interior(mass(rng))});
  for (int i = 1; i < n; ++i)
    s.edges.push_back({"e" + std::to_string(i), "v" + std::to_string(parent[i]), "v" + std::to_string(i),
                       Length::decimal(len(rng))});
  return s;
}

CVec random_cvec(int n, std::mt19937& rng) {
  std::normal_distribution<double> d(0, 1);
  CVec v(n);
  for (int i = 0; i < n; ++i) v[i] = {d(rng), d(rng)};
  return v;
}

}  // namespace

TEST_CASE("discrete generator is dissipative on random graphs") {
  std::mt19937 rng(17);
  std::vector<std::shared_ptr<const MetricGraph>> graphs{
      share(random_tree(rng, 4)), share(random_tree(rng, 7)), share(circuit_spec(parse_length("sqrt(2)"))),
      share(star_spec(parse_length("sqrt(5)"))), share(chain_spec({parse_length("0.8"), parse_length("1.7"),
                                                                   parse_length("pi"), parse_length("1")}, {2, 0.5, 1}))};
  std::normal_distribution<double> nd(0, 1);
  double worst = -1e300;
  for (const auto& g : graphs) {
    DiscreteGenerator gen = assemble_generator(g, 1.0 / 16);
    for (int t = 0; t < 200; ++t) {
      Eigen::VectorXd z(gen.dim());
      for (int i = 0; i < z.size(); ++i) z[i] = nd(rng);
      double nz = z.dot(gen.W * z);
      worst = std::max(worst, dissipation_form(gen, z) / nz);
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("state dimension") {
  auto g = share(circuit_spec(parse_length("sqrt(2)")));
  const double h = 1.0 / 12;
  DiscreteGenerator gen = assemble_generator(g, h);
  int nodes = 0;
  for (const auto& e : g->edges()) nodes += static_cast<int>(std::ceil(e.ell() / h - 1e-12)) - 1;
  for (const auto& v : g->vertices()) nodes += v.kind.dirichlet() ? 0 : 1;
  CHECK(gen.dim() == 2 * (nodes + static_cast<int>(g->masses().size())));
  CHECK_THROWS(assemble_generator(g, 0.5));   // unit edges would get 2 cells
}

TEST_CASE("resolvent solves are consistent") {
  auto g = good_chain();
  DiscreteGenerator gen = assemble_generator(g, 1.0 / 20);
  std::mt19937 rng(5);
  for (double beta : {0.0, 0.7, 3.0, -2.5}) {
    ResolventSolver rs(gen, beta);
    REQUIRE(rs.ok());
    CVec f = random_cvec(gen.dim(), rng), y = random_cvec(gen.dim(), rng);
    CVec z = rs.apply(f);
    Eigen::SparseMatrix<cplx> Ac = gen.A.cast<cplx>();
    CVec back = cplx(0, beta) * z - Ac * z;
    CHECK((back - f).norm() <= 1e-9 * f.norm());
    // Euclidean adjoint
    cplx lhs = y.dot(z), rhs = rs.apply_adjoint(y).dot(f);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * (std::abs(lhs) + 1));
  }
}

TEST_CASE("norm estimate: symmetry and lower bounds") {
  auto g = good_chain();
  DiscreteGenerator gen = assemble_generator(g, 1.0 / 20);
  std::mt19937 rng(9);
  for (double beta : {0.3, 1.0, 4.0}) {
    NormEstimate a = resolvent_norm(gen, beta), b = resolvent_norm(gen, -beta);
    CHECK(a.converged);
    CHECK(a.norm == doctest::Approx(b.norm).epsilon(1e-6));
    CHECK(a.sigma_min * a.norm == doctest::Approx(1.0));
    ResolventSolver rs(gen, beta);
    for (int t = 0; t < 20; ++t) {
      CVec f = random_cvec(gen.dim(), rng);
      CHECK(rs.w_norm(rs.apply(f)) / rs.w_norm(f) <= a.norm * (1 + 1e-6));
    }
  }
}

TEST_CASE("zero is in the resolvent set of a Pi-tree") {
  auto g = good_chain();
  DiscreteGenerator gen = assemble_generator(g, 1.0 / 20);
  NormEstimate n = resolvent_norm(gen, 0.0);
  CHECK(std::isfinite(n.norm));
  Eigen::MatrixXd A(gen.A);
  std::mt19937 rng(2);
  CVec f = random_cvec(gen.dim(), rng);
  CVec direct = (-A.cast<cplx>()).partialPivLu().solve(f);
  CHECK((ResolventSolver(gen, 0.0).apply(f) - direct).norm() <= 1e-9 * direct.norm());
}

TEST_CASE("non-Pi chain near beta = 1 blows up under refinement") {
  auto g = pi_chain();
  double prev = 0;
  for (double cpu : {20.0, 40.0}) {
    DiscreteGenerator gen = assemble_generator(g, 1.0 / cpu);
    double best = 0;
    for (double beta = 0.95; beta <= 1.05; beta += 0.0025) best = std::max(best, resolvent_norm(gen, beta).norm);
    CHECK(best > 1e3);
    CHECK(best > 2 * prev);
    prev = best;
  }
}

TEST_CASE("sweeps") {
  SUBCASE("empty grid") {
    SweepReport r = sweep(good_chain(), {});
    CHECK(r.samples.empty());
    CHECK(r.verdict == Verdict::Inconclusive);
  }
  std::vector<double> betas;
  for (int i = 0; i <= 40; ++i) betas.push_back(0.25 * i);
  SweepOptions opt;
  opt.ladder = {20, 40, 80};
  SUBCASE("pi chain is unbounded near beta = 1") {
    SweepReport r = sweep(pi_chain(), betas, opt);
    CHECK(r.verdict == Verdict::Unbounded);
    CHECK(std::fabs(r.peak_beta - 1) <= 2 * 0.25);
    for (const auto& s : r.samples) CHECK(s.norm > 0);
  }
  SUBCASE("Pi-tree chain is bounded") {
    SweepReport r = sweep(good_chain(), betas, opt);
    CHECK(r.verdict == Verdict::Bounded);
    CHECK(r.levels.size() == 3);
  }
}

TEST_CASE("sweep peaks sit at near-axis eigenvalues") {
  auto g = good_chain();
  EigenReport er = find_eigenvalues(*g, {-0.2, 0.5, 0.05, 3});
  REQUIRE(!er.roots.empty());
  cplx nearest = er.roots.front().lambda;
  for (const auto& r : er.roots)
    if (r.lambda.real() > nearest.real()) nearest = r.lambda;
  std::vector<double> betas;
  for (int i = 0; i <= 60; ++i) betas.push_back(0.05 * i);
  SweepOptions opt;
  opt.ladder = {40, 80};
  SweepReport r = sweep(g, betas, opt);
  CHECK(std::fabs(r.peak_beta - nearest.imag()) <= 2 * 0.05);
}

TEST_CASE("mesh coupling and verdict names") {
  for (double beta : {0.0, 5.0, 50.0, 200.0}) {
    double m = coupled_mesh(20, 20, beta, 0.2);
    CHECK(m >= 20);
    CHECK(beta / m <= 0.2 + 1e-12);
  }
  for (Verdict v : {Verdict::Bounded, Verdict::Unbounded, Verdict::Inconclusive})
    CHECK(verdict_from_string(to_string(v)) == v);
}
