#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wavenet/length.hpp"

namespace wavenet {

using lcplx = std::complex<long double>;

struct ConvergentPair {
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  bool operator==(const ConvergentPair&) const = default;
};

// Continued-fraction convergents with |q l - p| < 1/q, q strictly increasing.
// Refuses lengths that are exactly rational.
std::vector<ConvergentPair> dirichlet_convergents(const Length& l, int count);
std::vector<ConvergentPair> dirichlet_convergents(long double l, int count);

// beta_n = 2 pi q + 2 pi q^{-1/4}
long double probe_beta(std::uint64_t q);

// sin/cos of beta and beta*l; probe_angles reduces by the exact 2 pi q and 2 pi p.
struct ProbeAngles {
  long double beta = 0;
  long double sb = 0, cb = 0;   // sin, cos of beta
  long double sl = 0, cl = 0;   // sin, cos of beta * l
};
ProbeAngles probe_angles(const ConvergentPair& pq, long double l);
ProbeAngles direct_angles(long double beta, long double l);

struct CircuitCoefficients {
  lcplx A, B, C, F, G, H;
};
CircuitCoefficients circuit_coefficients(const ProbeAngles& a);

struct CircuitProbe {
  std::optional<ConvergentPair> pq;
  long double beta = 0;
  CircuitCoefficients coef;
  std::array<lcplx, 4> a{}, b{};      // edge coefficients, b2 = b3 = b1
  lcplx b1_eqcir;                     // scalar reduction (FB + AG) beta b1 = AH - F beta C
  long double eqcir_rel_diff = 0;     // |b1 - b1_eqcir| / |b1|
  bool singular = false;
  lcplx ratio;                        // beta b1 / ((-1+i) pi^3 q^{1/4}), needs pq
  lcplx ratio_eqcir;
};

// Solves the six printed boundary and transmission equations (l1 = l2 = l3 = 1,
// forcing -sin(beta x) on edge 2).
CircuitProbe circuit_solve(long double beta, long double l4);
CircuitProbe circuit_solve(const ConvergentPair& pq, long double l4);

// 0 < lambda_n < beta_n l4 - 2 pi p_n < mu_n < pi/2
struct Bracket {
  long double lambda_n = 0, angle = 0, mu_n = 0;
  bool holds = false;
};
Bracket bracketing(const ConvergentPair& pq, long double l4);

// Relative errors of A, B, C, F, G, H against their leading-order forms.
std::array<long double, 6> asymptotic_errors(const CircuitProbe& p, long double l4);

// 2 l (2 l + 1) / (l + 2)
long double growth_constant(long double l4);

enum class GrowthVerdict { NonExponential, Inconclusive };
const char* to_string(GrowthVerdict v);
GrowthVerdict growth_verdict_from_string(const std::string& s);

struct GrowthSummary {
  std::vector<lcplx> ratios;
  lcplx limit;               // extrapolated in q^{-1/4}
  lcplx limit_eqcir;
  long double predicted = 0;
  long double rel_error = 0;        // |limit - predicted| / predicted
  long double rel_error_eqcir = 0;
  bool monotone = true;             // |ratio - limit| shrinks along the tail
  GrowthVerdict verdict = GrowthVerdict::Inconclusive;
};

// Needs >= 3 probes with increasing q; refuses rational l4.
GrowthSummary growth_law(const std::vector<CircuitProbe>& probes, const Length& l4);

struct StarProbe {
  long double beta = 0;
  std::optional<ConvergentPair> pq;
  lcplx a1, a2, a3, b;     // y_j = a_j sin + b cos (edge 2 adds -x cos/(2 beta))
  long double norm_z = 0, norm_f = 0;
  long double ratio = 0;   // |z| / |f|, a lower bound for the resolvent norm
};

// Star: centre mass 1, edge 1 to a controlled leaf, edge 2 (length 1) and
// edge 3 (length l3) to fixed ends. Solves (i beta - A) z = f exactly.
// Throws for l3 in pi Z or rational l3 (eigenvalue on the axis) and at beta^2 = 1.
StarProbe star_probe(long double beta, const Length& l3);
StarProbe star_probe(const ConvergentPair& pq, const Length& l3);

struct StarGrowth {
  std::vector<long double> ratios;
  bool unbounded = false;   // tail nondecreasing and at least doubled
};
StarGrowth star_growth(const std::vector<StarProbe>& probes);

}  // namespace wavenet
