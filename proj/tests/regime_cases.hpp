#pragma once

// Hand-enumerated classifier cases and a seeded generator of valid window
// queries, shared by the unit tests and the acceptance binary.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nl4s/exact.hpp"
#include "nl4s/regimes.hpp"

namespace nl4s::testing {

struct RegimeCase {
  int d;
  const char* nu;
  const char* gamma;
  int mu;
  const char* beta;  // "" when absent
  const char* small; // "", "l2", "h2", "critical"
  regimes::Verdict expected;
  const char* tag;
  const char* why;
};

inline regimes::RegimeQuery to_query(const RegimeCase& c) {
  regimes::RegimeQuery q;
  q.d = c.d;
  q.nu = Real::parse(c.nu);
  q.gamma = Real::parse(c.gamma);
  q.mu = c.mu;
  if (*c.beta) q.beta = Real::parse(c.beta);
  const std::string s = c.small;
  q.small.l2 = s == "l2";
  q.small.h2 = s == "h2";
  q.small.critical = s == "critical";
  return q;
}

// Gamma_c noted per row; every verdict below was worked out by hand.
inline const std::vector<RegimeCase>& truth_table() {
  using V = regimes::Verdict;
  static const std::vector<RegimeCase> cases{
      // mass-subcritical global theory, gamma >= 0 and nu < 1 + 8/d
      {1, "3", "0", 1, "", "", V::global, "gwp-mass-subcritical", "Gc=-3/2, nu<9, defocusing"},
      {1, "3", "0", -1, "", "", V::global, "gwp-mass-subcritical", "focusing with nu<1+8/d"},
      {2, "3", "1", 1, "", "", V::global, "gwp-mass-subcritical", "gamma=d/2 still global for nu<5"},
      // energy-space global theory, nu >= 1 + 8/d and gamma >= 2
      {1, "9", "2", 1, "", "", V::global, "gwp-energy-space", "defocusing, Gc=0"},
      {5, "3", "2", 1, "", "", V::global, "gwp-energy-space", "d=5, 2.6<=nu<9"},
      {1, "9", "2", -1, "", "l2", V::global_conditional, "gwp-energy-space", "nu=1+8/d, small L2"},
      {1, "11", "2", -1, "", "h2", V::global_conditional, "gwp-energy-space", "small H2"},
      {1, "11", "2", -1, "", "", V::local_above_half_d, "lwp-above-half-dimension",
       "focusing without smallness falls back to local"},
      {5, "11", "3", 1, "", "", V::local_above_half_d, "lwp-above-half-dimension",
       "d=5, nu beyond the energy range"},
      // local theory
      {4, "3", "0", 1, "", "", V::local_critical, "lwp-critical-window", "Gc=0=gamma"},
      {1, "9", "0", 1, "", "", V::local_critical, "lwp-critical-window",
       "nu=1+8/d is critical, not global"},
      {4, "3", "0", 1, "", "critical", V::global_conditional, "gwp-small-critical-data",
       "small Hdot^Gc data"},
      {2, "7", "1/2", 1, "", "", V::local_subcritical, "lwp-subcritical-window", "Gc=1/3<1/2<1"},
      {2, "7", "1", -1, "", "", V::local_half_d, "lwp-half-dimension", "gamma=d/2, nu>=5"},
      {1, "11", "1", 1, "", "", V::local_above_half_d, "lwp-above-half-dimension",
       "gamma>1/2, gamma<2"},
      // regularity persistence
      {2, "7", "1/2", 1, "3", "", V::regularity_persists, "regularity", "beta>gamma>Gc=1/3"},
      {3, "5/2", "1/2", 1, "2", "", V::regularity_persists, "regularity",
       "non-odd nu, ceil(beta)=2<=5/2"},
      {2, "7", "1/3", 1, "1", "", V::local_critical, "lwp-critical-window",
       "gamma=Gc: persistence needs gamma>Gc"},
      // ill-posedness
      {4, "3", "-3", -1, "", "", V::illposed_discontinuous, "illposed-low-frequency",
       "Gc=0, gamma<=-2"},
      {1, "3", "-2", 1, "", "", V::illposed_discontinuous, "illposed-low-frequency",
       "Gc=-3/2, gamma<=-1/2"},
      {1, "5/2", "-3", 1, "", "", V::illposed_discontinuous, "illposed-low-frequency",
       "non-odd nu>=2 with k=1>1/2"},
      {1, "13", "1/10", 1, "", "", V::illposed_discontinuous, "illposed-norm-inflation",
       "Gc=1/6, 0<gamma<Gc"},
      {4, "5", "0", 1, "", "", V::illposed_not_uniformly_continuous, "illposed-L2-decoherence",
       "Gc=1>0, gamma=0"},
      // gaps no statement covers
      {1, "5", "-2/5", 1, "", "", V::uncovered, "none", "-d/2<gamma<0 above Gc=-1/2"},
      {3, "5/2", "-2", 1, "", "", V::uncovered, "none",
       "below Gc but nu=5/2 misses the ill-posedness smoothness"},
      {8, "5/2", "16/5", 1, "", "", V::uncovered, "none", "ceil(16/5)=4>5/2"},
  };
  return cases;
}

/// Random query inside the local window max(0, Gamma_c) <= gamma < d/2 with
/// rational nu and gamma, so that every identity is checked exactly.
struct WindowQueryGen {
  std::mt19937_64 rng;
  explicit WindowQueryGen(std::uint64_t seed) : rng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

  regimes::RegimeQuery next() {
    for (;;) {
      regimes::RegimeQuery q;
      q.d = uniform(1, 8);
      q.nu = Real(1) + Real(Rational(uniform(1, 40), uniform(1, 8)));
      q.mu = uniform(0, 1) ? 1 : -1;
      const Real gc = regimes::critical_exponent(q.d, q.nu);
      const Real lo = gc > Real(0) ? gc : Real(0);
      const Real hi(Rational(q.d, 2));
      const int den = uniform(1, 64);
      const Real frac(Rational(uniform(0, den - 1), den));
      q.gamma = lo + (hi - lo) * frac;
      if (!q.gamma.exact() || !(q.gamma < hi)) continue;
      return q;
    }
  }
};

}  // namespace nl4s::testing
