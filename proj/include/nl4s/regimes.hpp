#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nl4s/errors.hpp"
#include "nl4s/exact.hpp"

namespace nl4s::regimes {

/// Lebesgue exponent held through its reciprocal so that infinity is exact.
struct Exponent {
  Real inv;

  static Exponent infinity() { return {Real(0)}; }
  static Exponent from_reciprocal(Real r) { return {r}; }
  /// Accepts +inf.
  static Exponent from_value(double p) {
    if (std::isinf(p) && p > 0) return infinity();
    return {Real(1) / Real::from_double(p)};
  }
  static Exponent from_value(Real p) { return {Real(1) / p}; }

  bool is_infinite() const { return inv == Real(0); }
  double value() const {
    return is_infinite() ? std::numeric_limits<double>::infinity() : 1.0 / inv.value();
  }
  /// Hoelder conjugate: 1/p + 1/p' = 1.
  Exponent conjugate() const { return {Real(1) - inv}; }
};

/// Gamma_c = d/2 - 4/(nu - 1).
inline Real critical_exponent(int d, const Real& nu) {
  if (!(nu > Real(1))) throw ConfigError("critical_exponent: nu must be > 1");
  return Real(Rational(d, 2)) - Real(4) / (nu - Real(1));
}

/// gamma_{p,q} = d/2 - d/q - 4/p.
inline Real gamma_pq(int d, const Exponent& p, const Exponent& q) {
  return Real(Rational(d, 2)) - Real(d) * q.inv - Real(4) * p.inv;
}

inline double gamma_pq(int d, double p, double q) {
  return gamma_pq(d, Exponent::from_value(p), Exponent::from_value(q)).value();
}

/// p, q in [2, inf], 2/p + d/q <= d/2 and (p, q, d) != (2, inf, 2). With
/// `schrodinger_equality` the sum must equal d/2 instead.
inline bool is_admissible(int d, const Exponent& p, const Exponent& q,
                          bool schrodinger_equality = false) {
  const Real half(Rational(1, 2));
  if (p.inv < Real(0) || p.inv > half || q.inv < Real(0) || q.inv > half) return false;
  if (d == 2 && p.inv == half && q.is_infinite()) return false;
  const Real lhs = Real(2) * p.inv + Real(d) * q.inv;
  const Real rhs = Real(Rational(d, 2));
  return schrodinger_equality ? lhs == rhs : lhs <= rhs;
}

inline bool is_admissible(int d, double p, double q, bool schrodinger_equality = false) {
  return is_admissible(d, Exponent::from_value(p), Exponent::from_value(q), schrodinger_equality);
}

/// True iff both pairs are admissible and gamma_{p,q} = gamma_{a',b'} + 4.
inline bool strichartz_scaling_check(int d, const Exponent& p, const Exponent& q,
                                     const Exponent& a, const Exponent& b) {
  if (!is_admissible(d, p, q) || !is_admissible(d, a, b)) return false;
  return gamma_pq(d, p, q) == gamma_pq(d, a.conjugate(), b.conjugate()) + Real(4);
}

/// Ceiling condition on the nonlinearity, waived when nu is an odd integer.
/// With beta present the ceiling of beta is tested.
inline bool smoothness_condition(const Real& nu, const Real& gamma,
                                 const std::optional<Real>& beta = std::nullopt) {
  if (nu.is_odd_integer()) return true;
  const long long c = beta ? beta->ceil() : gamma.ceil();
  return Real(static_cast<int>(c)) <= nu;
}

/// Smoothness demanded by the ill-posedness statement: nu odd, or
/// nu >= k + 1 for some integer k > d/2.
inline bool illposed_smoothness(int d, const Real& nu) {
  if (nu.is_odd_integer()) return true;
  return nu >= Real(d / 2 + 2);
}

struct SmallData {
  bool l2 = false;
  bool h2 = false;
  bool critical = false;
};

struct RegimeQuery {
  int d = 1;
  Real nu = Real(3);
  Real gamma = Real(0);
  int mu = 1;
  std::optional<Real> beta;
  SmallData small;

  void validate() const {
    if (d < 1) throw ConfigError("d must be >= 1");
    if (!(nu > Real(1))) throw ConfigError("nu must be > 1");
    if (mu != 1 && mu != -1) throw ConfigError("mu must be +1 or -1");
    if (!std::isfinite(gamma.value()) || !std::isfinite(nu.value())) {
      throw ConfigError("nu and gamma must be finite");
    }
    if (beta && !(*beta > gamma)) throw ConfigError("beta must exceed gamma");
  }
};

struct ExponentReport {
  Real gamma_c;
  Real theta;
  /// Populated only inside the window 0 <= gamma < d/2, gamma >= Gamma_c.
  bool applicable = false;
  std::optional<Exponent> p, q, m, n;
  std::optional<Real> gamma_pq_check;
  bool smoothness_ok = false;
  bool admissible_ok = false;
  bool embedding_ok = false;
  std::string note;
};

/// Exponent bookkeeping of the subcritical/critical local theory.
inline ExponentReport working_exponents(const RegimeQuery& qy) {
  qy.validate();
  const int d = qy.d;
  const Real& nu = qy.nu;
  const Real& g = qy.gamma;
  const Real half_d(Rational(d, 2));
  if (g == half_d) {
    throw ConfigError("working_exponents: gamma = d/2 makes p degenerate; use the H^{d/2} theory");
  }
  ExponentReport r;
  r.gamma_c = critical_exponent(d, nu);
  r.theta = Real(1) - (nu - Real(1)) * (Real(d) - Real(2) * g) / Real(8);
  r.smoothness_ok = smoothness_condition(nu, g);
  if (g < Real(0) || g > half_d || g < r.gamma_c) {
    r.note = "outside the window 0 <= gamma < d/2, gamma >= Gamma_c";
    return r;
  }
  r.applicable = true;
  const Real nu1 = nu - Real(1);
  const Real dm2g = Real(d) - Real(2) * g;
  // p = 8(nu+1)/((nu-1)(d-2 gamma)), q = d(nu+1)/(d+(nu-1) gamma)
  r.p = Exponent::from_reciprocal(nu1 * dm2g / (Real(8) * (nu + Real(1))));
  r.q = Exponent::from_reciprocal((Real(d) + nu1 * g) / (Real(d) * (nu + Real(1))));
  // 1/p' = 1/m + (nu-1)/p and 1/q' = 1/q + (nu-1)/n
  r.m = Exponent::from_reciprocal(Real(1) - nu * r.p->inv);
  r.n = Exponent::from_reciprocal((Real(1) - Real(2) * r.q->inv) / nu1);
  r.gamma_pq_check = gamma_pq(d, *r.p, *r.q);
  r.admissible_ok = is_admissible(d, *r.p, *r.q);
  // Sobolev embedding: q <= n = dq/(d - gamma q)
  const Real n_embed_inv = r.q->inv - g / Real(d);
  r.embedding_ok = r.n->inv <= r.q->inv && r.n->inv == n_embed_inv;
  if (!(*r.gamma_pq_check == Real(0)) || !r.admissible_ok || !r.embedding_ok) {
    throw std::logic_error("working_exponents: internal consistency check failed");
  }
  return r;
}

enum class Verdict {
  local_subcritical,
  local_critical,
  local_half_d,
  local_above_half_d,
  global,
  global_conditional,
  regularity_persists,
  illposed_discontinuous,
  illposed_not_uniformly_continuous,
  uncovered,
};

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::local_subcritical: return "local-WP-subcritical";
    case Verdict::local_critical: return "local-WP-critical-Hdot^Gc";
    case Verdict::local_half_d: return "local-WP-H^{d/2}";
    case Verdict::local_above_half_d: return "local-WP-above-d/2";
    case Verdict::global: return "global-WP";
    case Verdict::global_conditional: return "global-WP-conditional";
    case Verdict::regularity_persists: return "regularity-persists";
    case Verdict::illposed_discontinuous: return "ill-posed-discontinuous";
    case Verdict::illposed_not_uniformly_continuous: return "ill-posed-not-uniformly-continuous";
    case Verdict::uncovered: return "uncovered";
  }
  return "uncovered";
}

inline bool is_well_posed(Verdict v) {
  return v != Verdict::uncovered && v != Verdict::illposed_discontinuous &&
         v != Verdict::illposed_not_uniformly_continuous;
}

inline bool is_ill_posed(Verdict v) {
  return v == Verdict::illposed_discontinuous || v == Verdict::illposed_not_uniformly_continuous;
}

struct RegimeVerdict {
  Verdict verdict = Verdict::uncovered;
  std::string theorem_tag = "none";
  std::vector<std::string> conditions;
  ExponentReport exponents;
};

namespace detail {

inline std::string str(const Real& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace detail

/// Deterministic verdict with the hypotheses that fired.
inline RegimeVerdict classify(const RegimeQuery& qy) {
  qy.validate();
  const int d = qy.d;
  const Real& nu = qy.nu;
  const Real& g = qy.gamma;
  const Real gc = critical_exponent(d, nu);
  const Real half_d(Rational(d, 2));
  const Real mass_critical = Real(1) + Real(8) / Real(d);

  RegimeVerdict out;
  if (!(g == half_d)) {
    out.exponents = working_exponents(qy);
  } else {
    out.exponents.gamma_c = gc;
    out.exponents.theta = Real(1) - (nu - Real(1)) * (Real(d) - Real(2) * g) / Real(8);
    out.exponents.smoothness_ok = smoothness_condition(nu, g);
    out.exponents.note = "gamma = d/2: existential Strichartz exponent p > max(nu-1, " +
                         std::string(d == 1 ? "4" : "2") + ")";
  }
  auto& c = out.conditions;
  auto fire = [&](Verdict v, std::string tag) {
    out.verdict = v;
    out.theorem_tag = std::move(tag);
    return out;
  };

  if (g < gc) {
    c.push_back("gamma < Gamma_c (" + detail::str(g) + " < " + detail::str(gc) + ")");
    if (!illposed_smoothness(d, nu)) {
      c.push_back("nu not odd and nu < floor(d/2) + 2");
      return fire(Verdict::uncovered, "none");
    }
    c.push_back(nu.is_odd_integer() ? "nu odd integer" : "nu >= k+1 for an integer k > d/2");
    if (g <= -half_d) {
      c.push_back("gamma <= -d/2");
      return fire(Verdict::illposed_discontinuous, "illposed-low-frequency");
    }
    if (g > Real(0)) {
      c.push_back("0 < gamma");
      return fire(Verdict::illposed_discontinuous, "illposed-norm-inflation");
    }
    if (g == Real(0)) {
      c.push_back("gamma = 0 and Gamma_c > 0");
      return fire(Verdict::illposed_not_uniformly_continuous, "illposed-L2-decoherence");
    }
    c.push_back("-d/2 < gamma < 0: no statement applies");
    return fire(Verdict::uncovered, "none");
  }

  c.push_back("gamma >= Gamma_c (" + detail::str(g) + " >= " + detail::str(gc) + ")");
  if (g < Real(0)) {
    c.push_back("gamma < 0: no statement applies");
    return fire(Verdict::uncovered, "none");
  }
  if (!smoothness_condition(nu, g, qy.beta)) {
    c.push_back(qy.beta ? "ceil(beta) > nu with nu not an odd integer"
                        : "ceil(gamma) > nu with nu not an odd integer");
    return fire(Verdict::uncovered, "none");
  }
  c.push_back(nu.is_odd_integer() ? "nu odd integer" : "ceiling condition holds");

  if (qy.beta) {
    if (g > gc) {
      c.push_back("beta > gamma >= 0 and gamma > Gamma_c");
      return fire(Verdict::regularity_persists, "regularity");
    }
    c.push_back("beta ignored: persistence needs gamma > Gamma_c");
  }

  if (nu < mass_critical) {
    c.push_back("1 < nu < 1 + 8/d");
    return fire(Verdict::global, "gwp-mass-subcritical");
  }

  const bool energy_range = d <= 4 || nu < Real(1) + Real(8) / Real(d - 4);
  if (g >= Real(2) && energy_range) {
    c.push_back("gamma >= 2 and nu >= 1 + 8/d in the energy range");
    if (qy.mu == 1) {
      c.push_back("mu = +1 (defocusing)");
      return fire(Verdict::global, "gwp-energy-space");
    }
    if (nu == mass_critical && qy.small.l2) {
      c.push_back("mu = -1, nu = 1 + 8/d, small L^2 data");
      return fire(Verdict::global_conditional, "gwp-energy-space");
    }
    if (qy.small.h2) {
      c.push_back("mu = -1, small H^2 data");
      return fire(Verdict::global_conditional, "gwp-energy-space");
    }
  }

  if (g == gc && g < half_d && qy.small.critical) {
    c.push_back("gamma = Gamma_c with small Hdot^{Gamma_c} data");
    return fire(Verdict::global_conditional, "gwp-small-critical-data");
  }

  if (g < half_d) {
    if (g == gc) {
      c.push_back("gamma = Gamma_c in [0, d/2)");
      return fire(Verdict::local_critical, "lwp-critical-window");
    }
    c.push_back("Gamma_c < gamma < d/2");
    return fire(Verdict::local_subcritical, "lwp-subcritical-window");
  }
  if (g == half_d) {
    c.push_back("gamma = d/2");
    return fire(Verdict::local_half_d, "lwp-half-dimension");
  }
  c.push_back("gamma > d/2");
  return fire(Verdict::local_above_half_d, "lwp-above-half-dimension");
}

}  // namespace nl4s::regimes
