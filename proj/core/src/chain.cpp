#include "wavenet/chain.hpp"

#include <cmath>
#include <stdexcept>

namespace wavenet {

void validate(const ChainSpec& c) {
  if (c.N() < 1) throw std::invalid_argument("chain needs at least one edge");
  if (static_cast<int>(c.masses.size()) != c.N() - 1) throw std::invalid_argument("chain with N edges needs N-1 masses");
  for (const auto& l : c.lengths)
    if (!(l.value > 0)) throw std::invalid_argument("nonpositive length");
  for (double m : c.masses)
    if (!(m > 0)) throw std::invalid_argument("nonpositive mass");
}

GraphSpec to_graph_spec(const ChainSpec& c) {
  validate(c);
  return chain_spec(c.lengths, c.masses);
}

double MassGroup::beta() const { return 1 / std::sqrt(mass); }

namespace {
bool same_mass(double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b)); }
}  // namespace

std::vector<MassGroup> mass_groups(const ChainSpec& c) {
  validate(c);
  std::vector<MassGroup> groups;
  for (int j = 2; j <= c.N(); ++j) {
    MassGroup* hit = nullptr;
    for (auto& g : groups)
      if (same_mass(g.mass, c.mass(j))) hit = &g;
    if (!hit) {
      groups.push_back({c.mass(j), {}});
      hit = &groups.back();
    }
    hit->nodes.push_back(j);
  }
  return groups;
}

Span span_of(const MassGroup& g, int r, const ChainSpec& c) {
  if (r < 1 || r > g.k()) throw std::out_of_range("group member index out of range");
  const int start = g.nodes[r - 1];
  const int stop = r < g.k() ? g.nodes[r] : c.N() + 1;
  return {start, stop - 1};
}

double c_coefficient(double beta, double m_j, double m) {
  if (same_mass(m_j, m)) throw std::logic_error("resonant mass inside a span");
  return 1 / (beta * (m - m_j));
}

double delta_closed(const std::vector<double>& x, const std::vector<double>& c) {
  const int L = static_cast<int>(x.size());
  if (L < 1) throw std::invalid_argument("empty span");
  if (static_cast<int>(c.size()) != L - 1) throw std::invalid_argument("span needs L-1 coefficients");
  if (L > 20) throw std::invalid_argument("span too long for the closed form");
  double total = 0;
  for (unsigned long mask = 0; mask < (1ul << (L - 1)); ++mask) {
    // breakpoints: edge indices t in 1..L-1 where a new factor starts
    double term = 1;
    int s = 0, start = 0;
    for (int t = 1; t <= L; ++t) {
      const bool cut = t == L || (mask >> (t - 1)) & 1ul;
      if (!cut) continue;
      double ang = 0;
      for (int q = start; q < t; ++q) ang += x[q];
      term *= std::sin(ang);
      if (t < L) term *= c[t - 1], ++s;
      start = t;
    }
    total += ((L + 1 + s) % 2 == 0 ? 1.0 : -1.0) * term;
  }
  return total;
}

double delta_closed(const MassGroup& g, int r, const ChainSpec& c, std::optional<double> beta) {
  const double b = beta.value_or(g.beta());
  const Span sp = span_of(g, r, c);
  std::vector<double> x, cc;
  for (int j = sp.first; j <= sp.last; ++j) {
    x.push_back(b * c.ell(j));
    if (j > sp.first) cc.push_back(c_coefficient(b, c.mass(j), g.mass));
  }
  return delta_closed(x, cc);
}

DeltaPair delta_recurrence(const std::vector<double>& x, const std::vector<double>& c) {
  if (x.empty()) throw std::invalid_argument("recurrence needs N >= 2");
  if (c.size() + 1 != x.size()) throw std::invalid_argument("recurrence needs one c per step");
  DeltaPair p{std::sin(x[0]), -std::cos(x[0])};
  for (std::size_t t = 1; t < x.size(); ++t) {
    const double s = std::sin(x[t]), co = std::cos(x[t]), cc = c[t - 1];
    const DeltaPair n{(-co + cc * s) * p.delta + s * p.m, (-s - cc * co) * p.delta - co * p.m};
    p = n;
  }
  return p;
}

ChainVerdict chain_stable(const ChainSpec& c, double tol) {
  ChainVerdict v;
  for (const MassGroup& g : mass_groups(c)) {
    const double b = g.beta();
    for (int r = 1; r <= g.k(); ++r) {
      const Span sp = span_of(g, r, c);
      std::vector<double> x, cc;
      for (int j = sp.first; j <= sp.last; ++j) {
        x.push_back(b * c.ell(j));
        if (j > sp.first) cc.push_back(c_coefficient(b, c.mass(j), g.mass));
      }
      const ChainWitness w{g.mass, r, delta_recurrence(x, cc).delta};
      v.table.push_back(w);
      if (std::fabs(w.delta) <= tol) v.witnesses.push_back(w);
    }
  }
  v.stable = v.witnesses.empty();
  return v;
}

}  // namespace wavenet
