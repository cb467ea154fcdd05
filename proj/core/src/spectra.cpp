#include "wavenet/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "wavenet/quadrature.hpp"

namespace wavenet {

namespace {

// value and lambda-derivative
struct Dual {
  cplx v, d;
};
Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }

// cosh(l x)
Dual ch(cplx l, double x) { return {std::cosh(l * x), x * std::sinh(l * x)}; }

// sinh(l x) / l, entire in l
Dual sh(cplx l, double x) {
  const cplx z = l * x;
  if (std::abs(z) < 0.25) {
    const cplx z2 = z * z;
    // x * sum z^{2n}/(2n+1)!  and its l-derivative
    double fact = 1;
    cplx term = 1, sum = 0, dsum = 0;
    cplx zp = 1;
    for (int n = 0; n < 8; ++n) {
      if (n > 0) fact *= (2.0 * n) * (2.0 * n + 1);
      sum += zp / fact;
      // d/dl (l x)^{2n} = 2n x (l x)^{2n-1}
      if (n > 0) dsum += 2.0 * n * x * term / fact;
      term = zp * z;  // z^{2n+1}
      zp *= z2;
    }
    return {x * sum, x * dsum};
  }
  const cplx s = std::sinh(z) / l;
  return {s, (x * std::cosh(z) - s) / l};
}

struct Entry {
  int col;
  Dual val;
};
using Row = std::vector<Entry>;

struct EdgeEnd {
  int edge;
  double x;
  int d;
};

std::vector<EdgeEnd> ends_at(const MetricGraph& g, int k) {
  std::vector<EdgeEnd> out;
  for (int j : g.vertices()[k].edges) {
    const Edge& e = g.edges()[j];
    if (e.tail == k) out.push_back({j, 0.0, -1});
    if (e.head == k) out.push_back({j, e.ell(), +1});
  }
  return out;
}

// Entire: cosh(lx), sinh(lx)/l.  Exp: exp(lx), exp(l(len-x)), bounded on the
// edge when Re l <= 0 and free of the cancellation that ruins the entire
// basis far into the left half plane.
enum class Basis { Entire, Exp };

struct BasisEval {
  Dual val[2], slope[2];
};

BasisEval basis_at(Basis b, cplx l, double x, double len) {
  BasisEval e;
  const Dual lam{l, 1.0};
  if (b == Basis::Entire) {
    const Dual c = ch(l, x), s = sh(l, x);
    const Dual l2{l * l, 2.0 * l};
    e.val[0] = c, e.val[1] = s;
    e.slope[0] = l2 * s, e.slope[1] = c;
  } else {
    const cplx a = std::exp(l * x), r = std::exp(l * (len - x));
    e.val[0] = {a, x * a};
    e.val[1] = {r, (len - x) * r};
    e.slope[0] = lam * e.val[0];
    e.slope[1] = Dual{-1.0, 0.0} * lam * e.val[1];
  }
  return e;
}

struct Builder {
  const MetricGraph& g;
  Basis basis;
  cplx l;

  BasisEval at(const EdgeEnd& e) const { return basis_at(basis, l, e.x, g.edges()[e.edge].ell()); }
  Row value_row(const EdgeEnd& e, Dual f) const {
    const BasisEval b = at(e);
    return {{2 * e.edge, f * b.val[0]}, {2 * e.edge + 1, f * b.val[1]}};
  }
  Row slope_row(const EdgeEnd& e, Dual f) const {
    const BasisEval b = at(e);
    return {{2 * e.edge, f * b.slope[0]}, {2 * e.edge + 1, f * b.slope[1]}};
  }
};

void append(Row& r, const Row& more) { r.insert(r.end(), more.begin(), more.end()); }

CharacteristicSystem build_system(const MetricGraph& g, cplx l, Basis basis) {
  const int n = 2 * g.edge_count();
  const Builder bld{g, basis, l};
  CharacteristicSystem cs;
  cs.lambda = l;
  cs.matrix = Eigen::MatrixXcd::Zero(n, n);
  cs.derivative = Eigen::MatrixXcd::Zero(n, n);
  const Dual one{1.0, 0.0}, lam{l, 1.0};
  const bool circuit = g.variant() == Variant::Circuit;
  std::vector<Row> rows;
  for (int k = 0; k < g.vertex_count(); ++k) {
    const auto ends = ends_at(g, k);
    const VertexKind& kind = g.vertices()[k].kind;
    switch (kind.type) {
      case VertexType::Root:
      case VertexType::FixedLeaf:
        for (const auto& e : ends) rows.push_back(bld.value_row(e, one));
        break;
      case VertexType::ControlledLeaf: {
        // d y' + l y = 0
        Row r = bld.slope_row(ends[0], Dual{double(ends[0].d), 0.0});
        append(r, bld.value_row(ends[0], lam));
        rows.push_back(r);
        break;
      }
      case VertexType::InteriorMass: {
        for (std::size_t i = 1; i < ends.size(); ++i) {
          Row r = bld.value_row(ends[0], one);
          append(r, bld.value_row(ends[i], Dual{-1.0, 0.0}));
          rows.push_back(r);
        }
        // (m l^2 + 1) sum d y' + l^2 y [+ l (m l^2 + 1) y] = 0
        const double m = kind.mass;
        const Dual den{m * l * l + 1.0, 2.0 * m * l};
        Row r;
        for (const auto& e : ends) append(r, bld.slope_row(e, den * Dual{double(e.d), 0.0}));
        Dual coef{l * l, 2.0 * l};
        if (circuit) coef = coef + lam * den;
        append(r, bld.value_row(ends[0], coef));
        rows.push_back(r);
        break;
      }
    }
  }
  if (static_cast<int>(rows.size()) != n) throw std::logic_error("characteristic system is not square");
  cs.row_scale = Eigen::VectorXd::Ones(n);
  for (int r = 0; r < n; ++r) {
    for (const Entry& e : rows[r]) {
      cs.matrix(r, e.col) += e.val.v;
      cs.derivative(r, e.col) += e.val.d;
    }
    const double mx = cs.matrix.row(r).cwiseAbs().maxCoeff();
    if (mx > 0) cs.row_scale[r] = 1 / mx;
  }
  return cs;
}

double max_length(const MetricGraph& g) {
  double m = 0;
  for (const auto& e : g.edges()) m = std::max(m, e.ell());
  return m;
}

double total_length(const MetricGraph& g) {
  double s = 0;
  for (const auto& e : g.edges()) s += e.ell();
  return s;
}

// det M = det E * prod_j ( -exp(-l len_j) / (2 l) ), so
// arg det M = arg det E + N pi - Im(l) sum len - N arg(l),
// d/dl log det M = tr(E^-1 E') - sum len - N / l.
bool use_exp(const MetricGraph& g, cplx l) { return std::fabs(l.real()) * max_length(g) > 1.0; }

struct LogDet {
  double phase = 0;     // arg det M
  double smallness = 0; // |det| of the equilibrated matrix in use
  cplx dlog = 0;        // d/dl log det M
  bool singular = false;
};

LogDet log_det(const MetricGraph& g, cplx l, bool with_derivative) {
  const bool ex = use_exp(g, l);
  const auto cs = build_system(g, l, ex ? Basis::Exp : Basis::Entire);
  const Eigen::MatrixXcd a = cs.row_scale.asDiagonal() * cs.matrix;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const cplx det = lu.determinant();
  LogDet out;
  out.smallness = std::abs(det);
  out.singular = !(out.smallness > 0) || !std::isfinite(out.smallness);
  out.phase = std::arg(det);
  const double n = g.edge_count();
  if (ex) out.phase += n * std::numbers::pi - l.imag() * total_length(g) - n * std::arg(l);
  if (with_derivative && !out.singular) {
    out.dlog = lu.solve(Eigen::MatrixXcd(cs.row_scale.asDiagonal() * cs.derivative)).trace();
    if (ex) out.dlog += -total_length(g) - n / l;
  }
  return out;
}

double wrap(double a) {
  while (a > std::numbers::pi) a -= 2 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2 * std::numbers::pi;
  return a;
}

}  // namespace

CharacteristicSystem char_matrix(const MetricGraph& g, cplx l) { return build_system(g, l, Basis::Entire); }

cplx char_det(const MetricGraph& g, cplx l) { return char_matrix(g, l).matrix.partialPivLu().determinant(); }

cplx normalized_det(const MetricGraph& g, cplx l) {
  const auto cs = char_matrix(g, l);
  return (cs.row_scale.asDiagonal() * cs.matrix).partialPivLu().determinant();
}

namespace {

struct ContourHit : std::runtime_error {
  ContourHit() : std::runtime_error("root on contour") {}
};

struct PhaseTracker {
  const MetricGraph& g;
  double step0;

  double f(cplx z) const {
    const LogDet v = log_det(g, z, false);
    if (v.singular || v.smallness < 1e-14) throw ContourHit();
    return v.phase;
  }

  double segment(cplx z0, double f0, cplx z1, double f1, int depth) const {
    const cplx zm = 0.5 * (z0 + z1);
    const double fm = f(zm);
    const double d1 = wrap(fm - f0), d2 = wrap(f1 - fm), d = wrap(f1 - f0);
    if (std::fabs(d1) < 0.5 && std::fabs(d2) < 0.5 && std::fabs(d1 + d2 - d) < 1e-9) return d1 + d2;
    if (depth > 48 || std::abs(z1 - z0) < 1e-13) throw ContourHit();
    return segment(z0, f0, zm, fm, depth + 1) + segment(zm, fm, z1, f1, depth + 1);
  }

  double side(cplx a, cplx b) const {
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / step0)));
    double total = 0;
    cplx za = a;
    double fa = f(a);
    for (int i = 1; i <= pieces; ++i) {
      const cplx zb = a + (b - a) * (double(i) / pieces);
      const double fb = f(zb);
      total += segment(za, fa, zb, fb, 0);
      za = zb;
      fa = fb;
    }
    return total;
  }

  int winding(const Box& b) const {
    const cplx c0(b.re0, b.im0), c1(b.re1, b.im0), c2(b.re1, b.im1), c3(b.re0, b.im1);
    const double phase = side(c0, c1) + side(c1, c2) + side(c2, c3) + side(c3, c0);
    const double turns = phase / (2 * std::numbers::pi);
    const long r = std::lround(turns);
    if (std::fabs(turns - r) > 0.05) throw ContourHit();
    return static_cast<int>(r);
  }
};

cplx newton_with_mult(const MetricGraph& g, cplx l, int mult, double tol, int max_iter, bool& ok) {
  ok = false;
  for (int it = 0; it < max_iter; ++it) {
    const LogDet v = log_det(g, l, true);
    if (v.singular || !std::isfinite(std::abs(v.dlog))) {
      ok = true;  // exactly singular
      return l;
    }
    if (std::abs(v.dlog) == 0) return l;
    const cplx dl = -double(mult) / v.dlog;
    l += dl;
    if (!std::isfinite(std::abs(l))) return l;
    if (std::abs(dl) <= tol * std::max(1.0, std::abs(l))) {
      ok = true;
      return l;
    }
  }
  return l;
}

Eigen::MatrixXcd equilibrated(const MetricGraph& g, cplx l) {
  const auto cs = build_system(g, l, use_exp(g, l) ? Basis::Exp : Basis::Entire);
  return cs.row_scale.asDiagonal() * cs.matrix;
}

int nullity(const Eigen::MatrixXcd& a, double rel) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& s = svd.singularValues();
  int k = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] <= rel * s[0]) ++k;
  return k;
}

}  // namespace

int winding_count(const MetricGraph& g, const Box& box) {
  PhaseTracker pt{g, 0.5 / (total_length(g) + 1)};
  return pt.winding(box);
}

cplx newton_refine(const MetricGraph& g, cplx l, double tol, int max_iter) {
  bool ok;
  return newton_with_mult(g, l, 1, tol, max_iter, ok);
}

EigenReport find_eigenvalues(const MetricGraph& g, const Box& box0, const SpectrumOptions& opt) {
  if (!(box0.re1 > box0.re0) || !(box0.im1 > box0.im0)) throw std::invalid_argument("empty search box");
  PhaseTracker pt{g, 0.5 / (total_length(g) + 1)};
  EigenReport rep;

  // perturb the outer box outward until its contour is clean
  Box box = box0;
  int count = 0;
  for (int attempt = 0;; ++attempt) {
    try {
      count = pt.winding(box);
      break;
    } catch (const ContourHit&) {
      if (attempt >= opt.max_retries) throw std::runtime_error("eigenvalue on the search contour");
      const double eps = 1e-6 * (attempt + 1) * std::max(box0.re1 - box0.re0, box0.im1 - box0.im0);
      box = {box0.re0 - eps * 0.73, box0.re1 + eps * 0.61, box0.im0 - eps * 0.89, box0.im1 + eps * 0.97};
    }
  }
  rep.box = box;
  rep.count = count;

  std::function<void(const Box&, int, int)> solve = [&](const Box& b, int cnt, int depth) {
    ++rep.boxes_examined;
    if (cnt <= 0) return;
    const double w = b.re1 - b.re0, h = b.im1 - b.im0;
    const bool tiny = std::max(w, h) < 1e-7 * std::max(1.0, std::abs(cplx(b.re1, b.im1)));
    if (cnt == 1 || tiny || depth >= opt.max_depth) {
      bool ok;
      const cplx c(0.5 * (b.re0 + b.re1), 0.5 * (b.im0 + b.im1));
      const cplx r = newton_with_mult(g, c, cnt, 1e-15, 80, ok);
      const double slack = 1e-9 * std::max(1.0, std::abs(c));
      const bool inside = r.real() >= b.re0 - slack && r.real() <= b.re1 + slack && r.imag() >= b.im0 - slack &&
                          r.imag() <= b.im1 + slack;
      if (ok && inside) {
        Root root;
        root.lambda = r;
        root.residual = log_det(g, r, false).smallness;
        root.multiplicity = cnt;
        root.null_dim = nullity(equilibrated(g, r), 1e-6);
        rep.roots.push_back(root);
        return;
      }
      if (tiny || depth >= opt.max_depth) throw std::runtime_error("Newton failed inside an isolating box");
    }
    for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
      const double frac = 0.5 + 0.0137 * (attempt % 2 ? -1 : 1) * (1 + attempt);
      Box b1 = b, b2 = b;
      if (w >= h) {
        const double s = b.re0 + frac * w;
        b1.re1 = s;
        b2.re0 = s;
      } else {
        const double s = b.im0 + frac * h;
        b1.im1 = s;
        b2.im0 = s;
      }
      int c1;
      try {
        c1 = pt.winding(b1);
      } catch (const ContourHit&) {
        continue;
      }
      solve(b1, c1, depth + 1);
      solve(b2, cnt - c1, depth + 1);
      return;
    }
    throw std::runtime_error("eigenvalue on a subdivision contour");
  };
  solve(box, count, 0);
  std::sort(rep.roots.begin(), rep.roots.end(), [](const Root& a, const Root& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return rep;
}

cplx Eigenfunction::y(int j, double x) const {
  return coeffs[2 * j] * ch(lambda, x).v + coeffs[2 * j + 1] * sh(lambda, x).v;
}

cplx Eigenfunction::dy(int j, double x) const {
  return coeffs[2 * j] * lambda * lambda * sh(lambda, x).v + coeffs[2 * j + 1] * ch(lambda, x).v;
}

double state_norm(const MetricGraph& g, const Eigenfunction& e) {
  double s = 0;
  for (int j = 0; j < g.edge_count(); ++j) {
    const double ell = g.edges()[j].ell();
    const int panels = std::max(4, static_cast<int>(std::ceil(2 * std::abs(e.lambda) * ell)));
    s += integrate([&](double x) { return std::norm(e.dy(j, x)) + std::norm(e.v(j, x)); }, 0, ell, panels, 12);
  }
  for (std::size_t m = 0; m < g.masses().size(); ++m)
    s += std::norm(e.p[m]) + g.vertices()[g.masses()[m]].kind.mass * std::norm(e.q[m]);
  return std::sqrt(s);
}

Eigenfunction eigenfunction(const MetricGraph& g, cplx l, double tol) {
  const auto cs = char_matrix(g, l);
  const Eigen::MatrixXcd a = cs.row_scale.asDiagonal() * cs.matrix;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const int n = static_cast<int>(sv.size());
  if (sv[n - 1] > std::max(tol, 1e-6) * sv[0])
    throw std::invalid_argument("lambda is not a characteristic root");
  Eigenfunction e;
  e.lambda = l;
  e.null_dim = nullity(a, 1e-6);
  e.coeffs = svd.matrixV().col(n - 1);
  e.residual = (a * e.coeffs).norm() / e.coeffs.norm();

  const auto& masses = g.masses();
  e.p = Eigen::VectorXcd::Zero(masses.size());
  e.q = Eigen::VectorXcd::Zero(masses.size());
  const bool circuit = g.variant() == Variant::Circuit;
  for (std::size_t m = 0; m < masses.size(); ++m) {
    const int k = masses[m];
    if (std::abs(l) == 0) continue;
    cplx flux = 0, yk = 0;
    for (int j : g.vertices()[k].edges) {
      const Edge& ed = g.edges()[j];
      const double x = ed.head == k ? ed.ell() : 0.0;
      flux += double(g.incidence(k, j)) * e.dy(j, x);
      yk = e.y(j, x);
    }
    e.p[m] = (flux + (circuit ? l * yk : cplx(0))) / l;
    e.q[m] = l * e.p[m];
  }
  const double nrm = state_norm(g, e);
  if (nrm > 0) {
    e.coeffs /= nrm;
    e.p /= nrm;
    e.q /= nrm;
  }
  return e;
}

}  // namespace wavenet
