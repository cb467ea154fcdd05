#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "wavenet/chain.hpp"
#include "wavenet/spectra.hpp"

using namespace wavenet;

namespace {

// determinant of the span matrix S_N (and of its variant with the last row
// replaced by (sin x_N, -cos x_N)), assembled entry by entry
std::pair<double, double> s_matrix_dets(const std::vector<double>& x, const std::vector<double>& c) {
  const int L = static_cast<int>(x.size());   // x_2..x_N
  const int n = 2 * L;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  S(0, 0) = 1;
  for (int b = 0; b + 1 < L; ++b) {
    S(1 + 2 * b, 2 * b) = std::cos(x[b]);
    S(1 + 2 * b, 2 * b + 1) = std::sin(x[b]);
    S(1 + 2 * b, 2 * b + 2) = -1;
    S(2 + 2 * b, 2 * b) = std::sin(x[b]);
    S(2 + 2 * b, 2 * b + 1) = -std::cos(x[b]);
    S(2 + 2 * b, 2 * b + 2) = c[b];
    S(2 + 2 * b, 2 * b + 3) = 1;
  }
  Eigen::MatrixXd Mm = S;
  S(n - 1, n - 2) = std::cos(x[L - 1]);
  S(n - 1, n - 1) = std::sin(x[L - 1]);
  Mm(n - 1, n - 2) = std::sin(x[L - 1]);
  Mm(n - 1, n - 1) = -std::cos(x[L - 1]);
  return {S.determinant(), Mm.determinant()};
}

ChainSpec make_chain(std::vector<double> lengths, std::vector<double> masses) {
  ChainSpec c;
  for (double l : lengths) c.lengths.push_back(Length::decimal(l));
  c.masses = std::move(masses);
  return c;
}

}  // namespace

TEST_CASE("mass groups") {
  auto g = mass_groups(make_chain({1, 1, 1, 1}, {1, 2, 1}));
  REQUIRE(g.size() == 2);
  CHECK(g[0].mass == 1);
  CHECK(g[0].nodes == std::vector<int>{2, 4});
  CHECK(g[1].mass == 2);
  CHECK(g[1].nodes == std::vector<int>{3});
  CHECK(g[0].beta() == doctest::Approx(1.0));

  auto d = mass_groups(make_chain({1, 1, 1, 1}, {1, 2, 3}));
  CHECK(d.size() == 3);
  for (const auto& x : d) CHECK(x.k() == 1);

  CHECK(mass_groups(make_chain({1, 1, 1}, {1, 1 + 1e-9})).size() == 2);
  CHECK(mass_groups(make_chain({1, 1, 1}, {1, 1 + 1e-14})).size() == 1);
}

TEST_CASE("spans") {
  ChainSpec c = make_chain({1, 1, 1, 1, 1}, {1, 2, 1, 3});
  auto g = mass_groups(c);
  Span a = span_of(g[0], 1, c), b = span_of(g[0], 2, c);
  CHECK(a.first == 2);
  CHECK(a.last == 3);
  CHECK(b.first == 4);
  CHECK(b.last == 5);
  CHECK_THROWS(span_of(g[0], 3, c));
}

TEST_CASE("closed form: printed low-order determinants") {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> ux(-4, 4), uc(-3, 3);
  for (int t = 0; t < 100; ++t) {
    double x2 = ux(rng), x3 = ux(rng), x4 = ux(rng), c3 = uc(rng), c4 = uc(rng);
    using std::cos;
    using std::sin;
    double D2 = sin(x2), M2 = -cos(x2);
    double D3 = -sin(x2 + x3) + c3 * sin(x2) * sin(x3);
    double M3 = cos(x2 + x3) - c3 * sin(x2) * cos(x3);
    double D4 = sin(x2 + x3 + x4) - c3 * sin(x2) * sin(x3 + x4) - c4 * sin(x2 + x3) * sin(x4) +
                c3 * c4 * sin(x2) * sin(x3) * sin(x4);
    double M4 = -cos(x2 + x3 + x4) + c3 * sin(x2) * cos(x3 + x4) + c4 * sin(x2 + x3) * cos(x4) -
                c3 * c4 * sin(x2) * sin(x3) * cos(x4);

    CHECK(std::fabs(delta_closed({x2}, {}) - D2) <= 1e-12);
    CHECK(std::fabs(delta_closed({x2, x3}, {c3}) - D3) <= 1e-12);
    CHECK(std::fabs(delta_closed({x2, x3, x4}, {c3, c4}) - D4) <= 1e-12);
    DeltaPair p2 = delta_recurrence({x2}, {}), p3 = delta_recurrence({x2, x3}, {c3}),
              p4 = delta_recurrence({x2, x3, x4}, {c3, c4});
    CHECK(std::fabs(p2.delta - D2) <= 1e-12);
    CHECK(std::fabs(p2.m - M2) <= 1e-12);
    CHECK(std::fabs(p3.delta - D3) <= 1e-12);
    CHECK(std::fabs(p3.m - M3) <= 1e-12);
    CHECK(std::fabs(p4.delta - D4) <= 1e-12);
    CHECK(std::fabs(p4.m - M4) <= 1e-12);
  }
}

TEST_CASE("recurrence, closed form and the span matrix agree") {
  std::mt19937 rng(22);
  std::uniform_real_distribution<double> ux(-3.5, 3.5), uc(-2, 2);
  double worst = 0, worst_det = 0;
  for (int t = 0; t < 1000; ++t) {
    int L = 1 + t % 7;   // N = L + 1 <= 8
    std::vector<double> x(L), c(L - 1);
    for (auto& v : x) v = ux(rng);
    for (auto& v : c) v = uc(rng);
    DeltaPair r = delta_recurrence(x, c);
    double closed = delta_closed(x, c);
    worst = std::max(worst, std::fabs(r.delta - closed) / std::max(1.0, std::fabs(closed)));
    auto [ds, dm] = s_matrix_dets(x, c);
    worst_det = std::max(worst_det, std::fabs(ds - r.delta) / std::max(1.0, std::fabs(ds)));
    worst_det = std::max(worst_det, std::fabs(dm - r.m) / std::max(1.0, std::fabs(dm)));
  }
  CHECK(worst <= 1e-12);
  CHECK(worst_det <= 1e-12);
}

TEST_CASE("closed form by explicit index chains on a 3-edge span") {
  const double x2 = M_PI / 3, x3 = M_PI / 4, x4 = M_PI / 6, c3 = 1, c4 = 2;
  // chains 2 = j0 < j1 < ... over the breakpoints {3, 4}; sign (-1)^(L+1+s)
  double sum = 0;
  sum += std::sin(x2 + x3 + x4);                                        // s = 0
  sum -= c3 * std::sin(x2) * std::sin(x3 + x4);                         // j1 = 3
  sum -= c4 * std::sin(x2 + x3) * std::sin(x4);                         // j1 = 4
  sum += c3 * c4 * std::sin(x2) * std::sin(x3) * std::sin(x4);          // j1 = 3, j2 = 4
  CHECK(delta_closed({x2, x3, x4}, {c3, c4}) == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("closed form edge cases") {
  CHECK(delta_closed({0.7}, {}) == doctest::Approx(std::sin(0.7)));
  CHECK(delta_closed({0, 0, 0, 0}, {1.5, -2, 0.3}) == 0.0);
  CHECK_THROWS(delta_closed(std::vector<double>(21, 0.1), std::vector<double>(20, 1)));
  CHECK_THROWS(delta_closed({0.1, 0.2}, {}));
}

TEST_CASE("pure rotation keeps unit modulus") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> ux(-10, 10);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(1 + t % 9);
    for (auto& v : x) v = ux(rng);
    DeltaPair p = delta_recurrence(x, std::vector<double>(x.size() - 1, 0.0));
    CHECK(p.delta * p.delta + p.m * p.m == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Delta depends only on the lengths of its span") {
  ChainSpec c = make_chain({0.9, 1.1, 1.7, 0.6, 1.3}, {1, 2, 1, 3});
  auto g = mass_groups(c);
  double before = delta_closed(g[0], 1, c);   // span edges 2..3
  ChainSpec d = c;
  d.lengths[0] = Length::decimal(2.9);
  d.lengths[3] = Length::decimal(0.1);
  d.lengths[4] = Length::decimal(4.2);
  CHECK(delta_closed(mass_groups(d)[0], 1, d) == doctest::Approx(before).epsilon(1e-15));
  d.lengths[2] = Length::decimal(1.8);
  CHECK(delta_closed(mass_groups(d)[0], 1, d) != doctest::Approx(before));
}

TEST_CASE("chain_stable examples") {
  ChainVerdict a = chain_stable(make_chain({1, M_PI / 2}, {1}));
  CHECK(a.stable);
  REQUIRE(a.table.size() == 1);
  CHECK(a.table[0].delta == doctest::Approx(1.0));

  ChainSpec pi;
  pi.lengths = {parse_length("1"), parse_length("pi")};
  pi.masses = {1};
  ChainVerdict b = chain_stable(pi);
  CHECK_FALSE(b.stable);
  REQUIRE(b.witnesses.size() == 1);
  CHECK(b.witnesses[0].mass == 1);
  CHECK(b.witnesses[0].r == 1);

  ChainVerdict e = chain_stable(make_chain({1.4}, {}));
  CHECK(e.stable);
  CHECK(e.table.empty());
}

TEST_CASE("chain verdicts agree with axis roots of the characteristic system") {
  // Delta for masses (1, 2) vanishes where -sin(x2 + x3) + c3 sin x2 sin x3 = 0
  auto delta_at = [](double l3) {
    ChainSpec c = make_chain({1.0, 1.2, l3}, {1, 2});
    return delta_closed(mass_groups(c)[0], 1, c);
  };
  double lo = 0.5, hi = 3.0;
  REQUIRE(delta_at(lo) * delta_at(hi) < 0);
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (delta_at(lo) * delta_at(mid) <= 0 ? hi : lo) = mid;
  }
  const double tuned = 0.5 * (lo + hi);

  std::vector<ChainSpec> curated{
      make_chain({1, M_PI}, {1}),                    // sin(pi) = 0
      make_chain({1, M_PI / 2}, {1}),                // sin(pi / 2) = 1
      make_chain({1.0, 1.2, tuned}, {1, 2}),         // tuned zero of a two-edge span
      make_chain({0.8, 1.1, 0.7, M_PI}, {1, 2, 1}),  // second member spans a pi edge
      make_chain({0.8, 1.1, 0.7, 1.9}, {1, 3, 0.5}), // generic
  };
  std::vector<bool> expected{false, true, false, false, true};
  for (std::size_t t = 0; t < curated.size(); ++t) {
    const ChainSpec& c = curated[t];
    ChainVerdict v = chain_stable(c, 1e-9);
    CHECK(v.stable == expected[t]);
    MetricGraph g = build_graph(to_graph_spec(c));
    for (const MassGroup& grp : mass_groups(c)) {
      bool unstable = false;
      for (const auto& w : v.witnesses) unstable = unstable || w.mass == grp.mass;
      const double b = grp.beta();
      // a root within 1e-6 of i beta?
      bool root = false;
      try {
        cplx z = newton_refine(g, cplx(-1e-7, b * (1 + 1e-7)));
        root = std::abs(z - cplx(0, b)) <= 1e-6 && std::abs(normalized_det(g, z)) <= 1e-9;
      } catch (const std::exception&) {
      }
      root = root || winding_count(g, {-1e-6, 1e-6, b - 1e-6, b + 1e-6}) > 0;
      CHECK_MESSAGE(root == unstable, "instance " << t << " mass " << grp.mass);
    }
  }
}
