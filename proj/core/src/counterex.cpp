#include "wavenet/counterex.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "wavenet/network.hpp"

namespace wavenet {

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;
const lcplx kI(0, 1);

// partial quotients of sqrt(n) by the exact integer recurrence
std::vector<std::uint64_t> sqrt_quotients(std::int64_t n, int terms) {
  const auto a0 = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<long double>(n))));
  std::vector<std::uint64_t> out{static_cast<std::uint64_t>(a0)};
  std::int64_t m = 0, d = 1, a = a0;
  for (int i = 1; i < terms; ++i) {
    m = d * a - m;
    d = (n - m * m) / d;
    a = (a0 + m) / d;
    out.push_back(static_cast<std::uint64_t>(a));
  }
  return out;
}

std::vector<std::uint64_t> float_quotients(long double x, int terms) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < terms; ++i) {
    const long double a = std::floor(x);
    out.push_back(static_cast<std::uint64_t>(a));
    const long double frac = x - a;
    if (frac < 1e-18L) break;
    x = 1 / frac;
  }
  return out;
}

std::vector<ConvergentPair> convergents_from(const std::vector<std::uint64_t>& quot, long double l, int count) {
  std::vector<ConvergentPair> out;
  unsigned __int128 h1 = 1, h2 = 0, k1 = 0, k2 = 1;
  for (std::uint64_t a : quot) {
    const unsigned __int128 h = a * h1 + h2, k = a * k1 + k2;
    if (h > (static_cast<unsigned __int128>(1) << 62) || k > (static_cast<unsigned __int128>(1) << 62)) break;
    h2 = h1, h1 = h, k2 = k1, k1 = k;
    const ConvergentPair pq{static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(k)};
    if (pq.p == 0) continue;
    const long double gap = std::fabs(static_cast<long double>(pq.q) * l - static_cast<long double>(pq.p));
    if (!(gap < 1.0L / pq.q)) continue;
    if (!out.empty() && out.back().q == pq.q)
      out.back() = pq;
    else
      out.push_back(pq);
    if (static_cast<int>(out.size()) == count) break;
  }
  if (static_cast<int>(out.size()) < count) throw std::runtime_error("convergent count unreachable within iteration cap");
  return out;
}

}  // namespace

std::vector<ConvergentPair> dirichlet_convergents(long double l, int count) {
  if (!(l > 0)) throw std::invalid_argument("length must be positive");
  return convergents_from(float_quotients(l, 200), l, count);
}

std::vector<ConvergentPair> dirichlet_convergents(const Length& l, int count) {
  if (!(l.value > 0)) throw std::invalid_argument("length must be positive");
  if (l.is_rational()) throw std::invalid_argument("rational length has no infinite convergent sequence");
  if (l.form == Length::Form::Sqrt) return convergents_from(sqrt_quotients(l.num, 200), l.value, count);
  return dirichlet_convergents(l.value, count);
}

long double probe_beta(std::uint64_t q) {
  return 2 * kPi * static_cast<long double>(q) + 2 * kPi / std::pow(static_cast<long double>(q), 0.25L);
}

ProbeAngles probe_angles(const ConvergentPair& pq, long double l) {
  ProbeAngles a;
  const long double t = 1 / std::pow(static_cast<long double>(pq.q), 0.25L);
  a.beta = probe_beta(pq.q);
  a.sb = std::sin(2 * kPi * t);
  a.cb = std::cos(2 * kPi * t);
  const long double gap = static_cast<long double>(pq.q) * l - static_cast<long double>(pq.p);
  const long double th = 2 * kPi * gap + 2 * kPi * l * t;
  a.sl = std::sin(th);
  a.cl = std::cos(th);
  return a;
}

ProbeAngles direct_angles(long double beta, long double l) {
  return {beta, std::sin(beta), std::cos(beta), std::sin(beta * l), std::cos(beta * l)};
}

CircuitCoefficients circuit_coefficients(const ProbeAngles& g) {
  const long double b = g.beta, sb = g.sb, cb = g.cb, sl = g.sl, cl = g.cl;
  const lcplx e(cb, -sb);  // exp(-i beta)
  CircuitCoefficients c;
  c.A = (1 + cl) * sb + e * sl;
  c.B = (2 - cl * cb) + kI * (e * sl - sb);
  c.C = sb / (2 * b * b) - (0.5L * sb + 0.5L * lcplx(-1, 1) * cb) * sl + cb * cl / (2 * b);
  c.F = e * (cb - 1) - sb * sl;
  c.G = e * (cb / sb - 2.0L * kI) - cb * sl - kI * e * cl;
  c.H = -e / (2 * b) - cb * sl / (2 * b) - 0.5L * sb * cl - 0.5L * lcplx(-1, 1) * cb * cl;
  return c;
}

namespace {

CircuitProbe solve_with(const ProbeAngles& g) {
  using M6 = Eigen::Matrix<lcplx, 6, 6>;
  using V6 = Eigen::Matrix<lcplx, 6, 1>;
  const long double b = g.beta, sb = g.sb, cb = g.cb, sl = g.sl, cl = g.cl;
  const lcplx e(cb, -sb);
  // unknowns a1 a2 a3 a4 b1 b4
  M6 m = M6::Zero();
  V6 r = V6::Zero();
  m(0, 0) = sb, m(0, 4) = cb;
  m(1, 0) = b, m(1, 1) = b, m(1, 2) = b, m(1, 4) = kI * b, r(1) = 1 / (2 * b);
  m(2, 1) = sb, m(2, 4) = cb, m(2, 5) = -1, r(2) = cb / (2 * b);
  m(3, 3) = b, m(3, 4) = b * sb, m(3, 1) = -b * cb, m(3, 5) = kI * b, r(3) = 0.5L * sb - cb / (2 * b);
  m(4, 2) = sb, m(4, 4) = cb, m(4, 3) = -sl, m(4, 5) = -cl;
  m(5, 2) = b * e, m(5, 5) = -b * sl, m(5, 3) = b * cl, m(5, 4) = -kI * b * e;

  CircuitProbe p;
  p.beta = b;
  p.coef = circuit_coefficients(g);
  Eigen::FullPivLU<M6> lu(m);
  if (!lu.isInvertible()) {
    p.singular = true;
    return p;
  }
  const V6 x = lu.solve(r);
  p.a = {x(0), x(1), x(2), x(3)};
  p.b = {x(4), x(4), x(4), x(5)};
  const auto& c = p.coef;
  p.b1_eqcir = (c.A * c.H - c.F * b * c.C) / ((c.F * c.B + c.A * c.G) * b);
  p.eqcir_rel_diff = std::abs(p.b[0] - p.b1_eqcir) / std::abs(p.b[0]);
  return p;
}

}  // namespace

CircuitProbe circuit_solve(long double beta, long double l4) { return solve_with(direct_angles(beta, l4)); }

CircuitProbe circuit_solve(const ConvergentPair& pq, long double l4) {
  CircuitProbe p = solve_with(probe_angles(pq, l4));
  p.pq = pq;
  const long double q4 = std::pow(static_cast<long double>(pq.q), 0.25L);
  const lcplx den = lcplx(-1, 1) * kPi * kPi * kPi * q4;
  p.ratio = p.beta * p.b[0] / den;
  p.ratio_eqcir = p.beta * p.b1_eqcir / den;
  return p;
}

Bracket bracketing(const ConvergentPair& pq, long double l4) {
  Bracket br;
  const long double q = static_cast<long double>(pq.q);
  const long double t = 1 / std::pow(q, 0.25L);
  br.lambda_n = -2 * kPi / q + 2 * kPi * l4 * t;
  br.mu_n = 2 * kPi / q + 2 * kPi * l4 * t;
  br.angle = 2 * kPi * (q * l4 - static_cast<long double>(pq.p)) + 2 * kPi * l4 * t;
  br.holds = 0 < br.lambda_n && br.lambda_n < br.angle && br.angle < br.mu_n && br.mu_n < kPi / 2;
  return br;
}

std::array<long double, 6> asymptotic_errors(const CircuitProbe& p, long double l) {
  if (!p.pq) throw std::invalid_argument("asymptotic checks need a convergent-driven probe");
  const long double q = static_cast<long double>(p.pq->q);
  const long double q4 = std::pow(q, 0.25L);
  const lcplx m1(-1, 1);
  const std::array<lcplx, 6> lead{2 * kPi * (2 + l) / q4,
                                  lcplx(1, 0),
                                  m1 * kPi * l / q4,
                                  -2 * kPi * kPi * (2 * l + 1) / std::sqrt(q),
                                  q4 / (2 * kPi) - 4.0L * kI,
                                  -0.5L * m1};
  const auto& c = p.coef;
  const std::array<lcplx, 6> got{c.A, c.B, c.C, c.F, c.G, c.H};
  std::array<long double, 6> err{};
  for (int i = 0; i < 6; ++i) err[i] = std::abs(got[i] - lead[i]) / std::abs(lead[i]);
  return err;
}

long double growth_constant(long double l) { return 2 * l * (2 * l + 1) / (l + 2); }

const char* to_string(GrowthVerdict v) {
  return v == GrowthVerdict::NonExponential ? "non-exponential" : "inconclusive";
}

GrowthVerdict growth_verdict_from_string(const std::string& s) {
  if (s == "non-exponential") return GrowthVerdict::NonExponential;
  if (s == "inconclusive") return GrowthVerdict::Inconclusive;
  throw std::invalid_argument("unknown growth verdict '" + s + "'");
}

GrowthSummary growth_law(const std::vector<CircuitProbe>& probes, const Length& l4) {
  if (l4.is_rational())
    throw std::invalid_argument("rational l4 = a/b: i*b*pi is an eigenvalue on the axis; growth law does not apply");
  if (probes.size() < 3) throw std::invalid_argument("growth law needs at least 3 probes");
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (!probes[i].pq) throw std::invalid_argument("growth law needs convergent-driven probes");
    if (i > 0 && probes[i].pq->q <= probes[i - 1].pq->q) throw std::invalid_argument("probes must have increasing q");
  }
  GrowthSummary s;
  s.predicted = growth_constant(l4.value);
  for (const auto& p : probes) s.ratios.push_back(p.ratio);
  // ratio ~ limit + c q^{-1/4}: eliminate c with the last two probes
  auto extrapolate = [&](auto pick) {
    const auto& p1 = probes[probes.size() - 2];
    const auto& p2 = probes.back();
    const long double t1 = 1 / std::pow(static_cast<long double>(p1.pq->q), 0.25L);
    const long double t2 = 1 / std::pow(static_cast<long double>(p2.pq->q), 0.25L);
    return (pick(p2) * t1 - pick(p1) * t2) / (t1 - t2);
  };
  s.limit = extrapolate([](const CircuitProbe& p) { return p.ratio; });
  s.limit_eqcir = extrapolate([](const CircuitProbe& p) { return p.ratio_eqcir; });
  s.rel_error = std::abs(s.limit - s.predicted) / s.predicted;
  s.rel_error_eqcir = std::abs(s.limit_eqcir - s.predicted) / s.predicted;
  const std::size_t tail = std::max<std::size_t>(3, probes.size() / 3);
  for (std::size_t i = probes.size() - tail + 1; i < probes.size(); ++i)
    if (std::abs(s.ratios[i] - s.limit) > std::abs(s.ratios[i - 1] - s.limit) * (1 + 1e-9L)) s.monotone = false;
  s.verdict = (s.monotone && s.rel_error <= 0.1L) ? GrowthVerdict::NonExponential : GrowthVerdict::Inconclusive;
  return s;
}

namespace {

// integral over [0, L] of x^k exp(i w x), k = 0..2
std::array<lcplx, 3> moments(long double w, long double L) {
  std::array<lcplx, 3> j{};
  if (std::fabs(w * L) < 1) {
    for (int k = 0; k < 3; ++k) {
      lcplx term = 1, sum = 0;
      long double fact = 1;
      for (int n = 0; n < 40; ++n) {
        if (n > 0) fact *= n, term *= kI * w * L;
        sum += term / fact * std::pow(L, (long double)(k + 1)) / (long double)(n + k + 1);
      }
      j[k] = sum;
    }
    return j;
  }
  const lcplx iw = kI * w;
  const lcplx ew = std::exp(iw * L);
  j[0] = (ew - 1.0L) / iw;
  j[1] = (L * ew - j[0]) / iw;
  j[2] = (L * L * ew - 2.0L * j[1]) / iw;
  return j;
}

// linear complex polynomial c0 + c1 x
struct Lin {
  lcplx c0, c1;
};

// integral over [0, L] of |P sin(bx) + Q cos(bx)|^2
long double trig_norm2(Lin P, Lin Q, long double b, long double L) {
  auto quad = [](Lin a, Lin c) {  // coefficients of a(x) * conj(c(x))
    return std::array<lcplx, 3>{a.c0 * std::conj(c.c0), a.c0 * std::conj(c.c1) + a.c1 * std::conj(c.c0),
                                a.c1 * std::conj(c.c1)};
  };
  const auto pp = quad(P, P), qq = quad(Q, Q), pq = quad(P, Q);
  const auto m = moments(2 * b, L);
  long double total = 0;
  for (int k = 0; k < 3; ++k) {
    const long double xk = std::pow(L, (long double)(k + 1)) / (k + 1);
    const long double c2 = m[k].real(), s2 = m[k].imag();
    // sin^2 = (1 - cos 2bx)/2, cos^2 = (1 + cos 2bx)/2, sin cos = sin(2bx)/2
    total += pp[k].real() * 0.5L * (xk - c2) + qq[k].real() * 0.5L * (xk + c2) + pq[k].real() * s2;
  }
  return total;
}

// |y'|^2 + b^2 |y|^2 integrated, y = U sin + V cos
long double edge_energy(Lin U, Lin V, long double b, long double L) {
  const Lin dP{U.c1 - b * V.c0, -b * V.c1};  // coefficient of sin in y'
  const Lin dQ{V.c1 + b * U.c0, b * U.c1};   // coefficient of cos in y'
  return trig_norm2(dP, dQ, b, L) + b * b * trig_norm2(U, V, b, L);
}

void check_star_length(const Length& l3) {
  if (is_pi_multiple(l3, 1e-12))
    throw std::invalid_argument("l3 in pi Z: i is an eigenvalue on the imaginary axis");
  if (l3.is_rational())
    throw std::invalid_argument("rational l3 = a/b: i*b*pi is an eigenvalue on the imaginary axis");
}

StarProbe star_solve(long double b, long double sb, long double cb, long double sl, long double cl, long double l3) {
  if (std::fabs(b * b - 1) < 1e-15L) throw std::invalid_argument("beta^2 = 1 resonates with the centre mass");
  using M4 = Eigen::Matrix<lcplx, 4, 4>;
  using V4 = Eigen::Matrix<lcplx, 4, 1>;
  // unknowns a1 a2 a3 b (common value at the centre)
  M4 m = M4::Zero();
  V4 r = V4::Zero();
  m(0, 0) = 1, m(0, 3) = kI;                      // leaf: a1 = -i b
  m(1, 1) = sb, m(1, 3) = cb, r(1) = cb / (2 * b);  // y2(1) = 0
  m(2, 2) = sl, m(2, 3) = cl;                     // y3(l3) = 0
  // -(y1'(0) + y2'(0) + y3'(0)) = i beta p,  p = -i beta y(0) / (1 - beta^2)
  m(3, 0) = -b, m(3, 1) = -b, m(3, 2) = -b, m(3, 3) = -b * b / (1 - b * b), r(3) = -1 / (2 * b);
  Eigen::FullPivLU<M4> lu(m);
  if (!lu.isInvertible()) throw std::invalid_argument("star system singular at this beta");
  const V4 x = lu.solve(r);
  StarProbe s;
  s.beta = b;
  s.a1 = x(0), s.a2 = x(1), s.a3 = x(2), s.b = x(3);
  const lcplx p = -kI * b * s.b / (1 - b * b), q = kI * b * p;
  long double e = edge_energy({s.a1, 0}, {s.b, 0}, b, 1) + edge_energy({s.a2, 0}, {s.b, -1 / (2 * b)}, b, 1) +
                  edge_energy({s.a3, 0}, {s.b, 0}, b, l3) + std::norm(p) + std::norm(q);
  s.norm_z = std::sqrt(e);
  s.norm_f = std::sqrt(0.5L - std::sin(2 * b) / (4 * b));
  (void)sb;
  s.ratio = s.norm_z / s.norm_f;
  return s;
}

}  // namespace

StarProbe star_probe(long double beta, const Length& l3) {
  check_star_length(l3);
  const ProbeAngles a = direct_angles(beta, l3.value);
  return star_solve(beta, a.sb, a.cb, a.sl, a.cl, l3.value);
}

StarProbe star_probe(const ConvergentPair& pq, const Length& l3) {
  check_star_length(l3);
  const ProbeAngles a = probe_angles(pq, l3.value);
  StarProbe s = star_solve(a.beta, a.sb, a.cb, a.sl, a.cl, l3.value);
  s.pq = pq;
  return s;
}

StarGrowth star_growth(const std::vector<StarProbe>& probes) {
  StarGrowth g;
  for (const auto& p : probes) g.ratios.push_back(p.ratio);
  if (g.ratios.size() < 3) return g;
  const std::size_t tail = std::max<std::size_t>(3, g.ratios.size() / 2);
  const std::size_t start = g.ratios.size() - tail;
  bool nondecreasing = true;
  for (std::size_t i = start + 1; i < g.ratios.size(); ++i)
    if (g.ratios[i] < g.ratios[i - 1]) nondecreasing = false;
  g.unbounded = nondecreasing && g.ratios.back() >= 2 * g.ratios[start];
  return g;
}

}  // namespace wavenet
