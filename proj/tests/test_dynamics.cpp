#include "doctest.h"

#include <cmath>
#include <random>

#include "wavenet/dynamics.hpp"
#include "wavenet/quadrature.hpp"

using namespace wavenet;

namespace {

std::shared_ptr<const MetricGraph> share(const GraphSpec& s) { return std::make_shared<const MetricGraph>(build_graph(s)); }

std::shared_ptr<const MetricGraph> pi_tree() {
  return share({Variant::Tree,
                {{"R", VertexKind::root()},
                 {"a", VertexKind::interior(1)},
                 {"b", VertexKind::controlled()},
                 {"c", VertexKind::controlled()}},
                {{"e1", "R", "a", parse_length("1")},
                 {"e2", "a", "b", parse_length("3/2")},
                 {"e3", "a", "c", parse_length("2")}}});
}

Profile bump(double c, double w, double a = 1) {
  return [=](double x) {
    double t = (x - c) / w;
    return std::fabs(t) < 1 ? a * std::pow(std::cos(M_PI * t / 2), 4) : 0.0;
  };
}

NetworkState random_state(const Discretization& d, std::mt19937& rng) {
  std::normal_distribution<double> n(0, 1);
  NetworkState s = init_state(d, {});
  for (int i = 0; i < d.dofs; ++i) s.u[i] = n(rng), s.w[i] = n(rng);
  return s;
}

}  // namespace

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  for (int n : {2, 5, 10}) {
    GaussRule r = gauss_legendre(n);
    double sum = 0;
    for (double w : r.weights) sum += w;
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    for (int p = 0; p < 2 * n; ++p) {
      double q = 0;
      for (int i = 0; i < n; ++i) q += r.weights[i] * std::pow(r.nodes[i], p);
      double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      CHECK(q == doctest::Approx(exact).epsilon(1e-13).scale(1));
    }
  }
  CHECK(integrate([](double x) { return std::exp(x); }, 0, 1) == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-14));
}

TEST_CASE("initial states") {
  auto g = pi_tree();
  Discretization d = discretize(g, 20);
  NetworkState z = init_state(d, {});
  CHECK(energy(z) == 0.0);

  InitialData bad;
  bad.y0["e1"] = [](double x) { return x; };   // 1 at vertex a, 0 on the other edges
  CHECK_THROWS_AS(init_state(d, bad), std::invalid_argument);

  InitialData root;
  root.y0["e1"] = [](double) { return 1.0; };
  root.y0["e2"] = [](double) { return 1.0; };
  root.y0["e3"] = [](double) { return 1.0; };
  CHECK_THROWS_WITH_AS(init_state(d, root), doctest::Contains("Dirichlet"), std::invalid_argument);

  InitialData osc;
  osc.oscillators["a"] = {1.0, 0.0};
  CHECK(energy(init_state(d, osc)) == doctest::Approx(0.5).epsilon(1e-15));

  InitialData unknown;
  unknown.y1["e9"] = bump(0.5, 0.2);
  CHECK_THROWS(init_state(d, unknown));
}

TEST_CASE("discrete energy of smooth data converges at second order") {
  auto g = pi_tree();
  const double l = 1.5;
  InitialData data;
  data.y0["e2"] = [=](double x) { return std::sin(M_PI * x / l); };
  data.y1["e3"] = [](double x) { return x * x * (2 - x); };
  const double exact = 0.5 * integrate([=](double x) { return std::pow(M_PI / l * std::cos(M_PI * x / l), 2); }, 0, l) +
                       0.5 * integrate([](double x) { return std::pow(x * x * (2 - x), 2); }, 0, 2);
  std::vector<double> err;
  for (double cpu : {20.0, 40.0, 80.0}) {
    Discretization d = discretize(g, cpu);
    err.push_back(std::fabs(energy(init_state(d, data)) - exact));
  }
  CHECK(err[2] < 1e-3 * exact);
  CHECK(std::log2(err[0] / err[1]) > 1.8);
  CHECK(std::log2(err[1] / err[2]) > 1.8);
}

TEST_CASE("step basics") {
  auto g = pi_tree();
  Discretization d = discretize(g, 20);
  NetworkState z = init_state(d, {});
  NetworkState z1 = step(z, 0.9 * d.h_min());
  CHECK(z1.u.norm() == 0.0);
  CHECK(z1.w.norm() == 0.0);
  CHECK_THROWS_WITH_AS(step(z, 1.1 * d.h_min()), doctest::Contains("CFL"), std::invalid_argument);
  CHECK_THROWS(discretize(g, 2));   // edge e1 would get 2 cells
}

TEST_CASE("the scheme is linear") {
  auto g = pi_tree();
  Discretization d = discretize(g, 16);
  std::mt19937 rng(3);
  const double dt = 0.8 * d.h_min();
  for (int trial = 0; trial < 20; ++trial) {
    NetworkState a = random_state(d, rng), b = random_state(d, rng);
    const double alpha = 0.7, beta = -1.3;
    NetworkState c = a;
    c.u = alpha * a.u + beta * b.u;
    c.w = alpha * a.w + beta * b.w;
    Leapfrog lf(d, dt);
    for (int n = 0; n < 5; ++n) lf.advance(a), lf.advance(b), lf.advance(c);
    CHECK((c.u - (alpha * a.u + beta * b.u)).norm() <= 1e-12 * (c.u.norm() + 1));
    CHECK((c.w - (alpha * a.w + beta * b.w)).norm() <= 1e-12 * (c.w.norm() + 1));
  }
}

TEST_CASE("energy is nonincreasing and balances the dissipation step by step") {
  std::mt19937 rng(11);
  std::vector<std::shared_ptr<const MetricGraph>> graphs{
      pi_tree(), share(circuit_spec(parse_length("sqrt(2)"))), share(star_spec(parse_length("sqrt(3)"))),
      share(chain_spec({parse_length("1"), parse_length("pi"), parse_length("1/2")}, {1, 3}))};
  int trials = 0;
  for (int t = 0; t < 1000; ++t) {
    auto g = graphs[t % graphs.size()];
    Discretization d = discretize(g, 8);
    Leapfrog lf(d, 0.9 * d.h_min());
    NetworkState s = random_state(d, rng);
    lf.advance(s);   // enter the staggered regime
    double e = energy(s);
    for (int n = 0; n < 10; ++n) {
      double r = lf.advance(s);
      double en = energy(s);
      CHECK(r >= 0);
      CHECK(en <= e + 1e-12 * e);
      CHECK(std::fabs(e - en - r) <= 1e-11 * e);
      e = en;
    }
    ++trials;
  }
  CHECK(trials == 1000);
}

TEST_CASE("undamped analogue conserves energy") {
  // both ends Dirichlet: no controlled leaf, D is purely skew
  GraphSpec s{Variant::Chain,
              {{"a1", VertexKind::fixed()},
               {"a2", VertexKind::interior(1)},
               {"a3", VertexKind::interior(2)},
               {"a4", VertexKind::root()}},
              {{"e1", "a1", "a2", parse_length("1")},
               {"e2", "a2", "a3", parse_length("1.3")},
               {"e3", "a3", "a4", parse_length("0.8")}}};
  auto g = share(s);
  InitialData data;
  data.y0["e2"] = bump(0.65, 0.4);
  data.oscillators["a3"] = {0.2, -0.1};
  RunConfig cfg;
  cfg.T = 10;
  cfg.cells_per_unit = 40;
  cfg.sample_stride = 50;
  EnergySeries es = run(g, cfg, data);
  for (std::size_t i = 1; i < es.E.size(); ++i) CHECK(std::fabs(es.E[i] - es.E[1]) <= 1e-10 * es.E[1]);
  CHECK(std::fabs(es.D.back()) <= 1e-14 * es.E[0]);
  // only the O(h^2) start-up bias separates E(0) from the invariant
  CHECK(std::fabs(es.E[0] - es.E[1]) < 2e-2 * es.E[0]);
}

TEST_CASE("matched edge absorbs a pulse") {
  auto g = share({Variant::Tree, {{"R", VertexKind::root()}, {"L", VertexKind::controlled()}},
                  {{"e", "R", "L", parse_length("1")}}});
  InitialData data;
  data.y0["e"] = bump(0.5, 0.25);
  double prev = 1;
  for (double cpu : {40.0, 80.0, 160.0}) {
    RunConfig cfg;
    cfg.T = 2;
    cfg.cells_per_unit = cpu;
    EnergySeries es = run(g, cfg, data);
    double ratio = es.E.back() / es.E.front();
    CHECK(ratio < prev);
    prev = ratio;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("decay fit") {
  EnergySeries s;
  for (int i = 0; i <= 100; ++i) {
    s.t.push_back(0.1 * i);
    s.E.push_back(3 * std::exp(-0.7 * s.t.back()));
  }
  fit_decay(s, 5);
  CHECK(s.fitted);
  CHECK(s.omega == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(s.fit_residual < 1e-10);

  EnergySeries p;
  for (int i = 0; i <= 100; ++i) {
    p.t.push_back(0.1 * i);
    p.E.push_back(1 + 0.3 * std::sin(3 * p.t.back()));
  }
  fit_decay(p, 5);
  CHECK(p.fitted);
  CHECK(p.fit_residual > 0.2);
  CHECK(p.omega == 0.0);
}

TEST_CASE("run: residual shrinks at second order and the decay rate separates the chains") {
  auto g = pi_tree();
  InitialData data;
  data.y0["e2"] = bump(0.75, 0.5);
  data.y1["e1"] = bump(0.5, 0.3);
  data.oscillators["a"] = {0.1, 0.2};
  std::vector<double> r;
  for (double cpu : {20.0, 40.0, 80.0}) {
    RunConfig cfg;
    cfg.T = 10;
    cfg.cells_per_unit = cpu;
    cfg.sample_stride = 20;
    EnergySeries es = run(g, cfg, data);
    for (std::size_t i = 1; i < es.D.size(); ++i) CHECK(es.D[i] >= es.D[i - 1]);
    for (double e : es.E) CHECK(e >= 0);
    r.push_back(std::fabs(es.R.back()) / es.E.front());
  }
  CHECK(std::log2(r[0] / r[1]) > 1.8);
  CHECK(std::log2(r[1] / r[2]) > 1.8);

  InitialData cd;
  cd.y0["e2"] = bump(1.5, 0.8);
  cd.y1["e1"] = bump(0.5, 0.3);
  RunConfig cfg;
  cfg.T = 80;
  cfg.cells_per_unit = 40;
  cfg.sample_stride = 20;
  EnergySeries pi = run(share(chain_spec({parse_length("1"), parse_length("pi"), parse_length("1")}, {1, 1})), cfg, cd);
  CHECK(pi.fitted);
  CHECK(pi.omega <= 1e-3);
  CHECK(pi.E.back() > 0.01 * pi.E.front());

  cd.y0["e2"] = bump(1.0, 0.6);
  EnergySeries ok = run(share(chain_spec({parse_length("1"), parse_length("2"), parse_length("1")}, {1, 1})), cfg, cd);
  CHECK(ok.fitted);
  CHECK(ok.omega > 1e-2);
}

TEST_CASE("circuit feedback readings") {
  auto g = share(circuit_spec(parse_length("sqrt(2)")));
  InitialData data;
  data.y1["e2"] = bump(0.5, 0.3);
  RunConfig cfg;
  cfg.T = 10;
  cfg.cells_per_unit = 20;
  EnergySeries es = run(g, cfg, data);
  for (std::size_t i = 2; i < es.E.size(); ++i) CHECK(es.E[i] <= es.E[i - 1] * (1 + 1e-12));

  // s_1' fed to every inner node is not skew against the oscillator laws, so
  // the symmetric part of D is indefinite; per node it is positive semidefinite
  auto min_sym_eig = [&](CircuitFeedback f) {
    Discretization d = discretize(g, 8, f);
    Eigen::MatrixXd D(d.damping);
    Eigen::MatrixXd S = 0.5 * (D + D.transpose());
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues().minCoeff();
  };
  CHECK(min_sym_eig(CircuitFeedback::PerNode) >= -1e-14);
  CHECK(min_sym_eig(CircuitFeedback::FirstMass) < -0.1);

  // the step balance E_n - E_{n+1} = dt w_c' D w_c holds for either reading
  Discretization d = discretize(g, 8, CircuitFeedback::FirstMass);
  Leapfrog lf(d, 0.9 * d.h_min());
  std::mt19937 rng(5);
  for (int t = 0; t < 200; ++t) {
    NetworkState s = random_state(d, rng);
    lf.advance(s);
    double e = energy(s);
    double r = lf.advance(s);
    CHECK(std::fabs(e - energy(s) - r) <= 1e-11 * e);
  }
}
