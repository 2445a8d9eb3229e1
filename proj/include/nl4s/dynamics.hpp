#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nl4s/errors.hpp"
#include "nl4s/field.hpp"
#include "nl4s/spectral.hpp"

namespace nl4s {

/// i u_t + disp^4 Delta^2 u = -mu |u|^{nu-1} u on the periodic box.
/// disp = 1 is the fourth-order NLS itself, disp = 0 the dispersionless limit.
struct EquationParams {
  int dim = 1;
  double nu = 3.0;
  int mu = 1;
  double disp = 1.0;
  /// Test hook: drop the power nonlinearity entirely.
  bool nonlinear = true;

  void validate() const {
    if (!(nu > 1.0) || !std::isfinite(nu)) throw ConfigError("nu must be > 1");
    if (mu != 1 && mu != -1) throw ConfigError("mu must be +1 or -1");
    if (!(disp >= 0.0) || !std::isfinite(disp)) throw ConfigError("disp must be >= 0");
    if (dim < 1 || dim > 2) throw ConfigError("dim must be 1 or 2");
  }

  double disp4() const { return disp * disp * disp * disp; }
};

/// Sign of the exact nonlinear phase rotation: u(t) = u0 exp(i * kPhaseSign *
/// mu * t |u0|^{nu-1}). Substituting into i u_t = -mu |u|^{nu-1} u forces +1;
/// tests re-derive it from the equation residual.
inline constexpr int kPhaseSign = +1;

struct StepControl {
  double dt = 1e-3;
  double t_end = 1.0;
  bool guard = true;
  int record_every = 1;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be >= 0");
    if (record_every < 1) throw ConfigError("record_every must be >= 1");
  }
};

struct ConservedPair {
  double mass = 0.0;
  double energy = 0.0;
};

/// Non-finite state encountered; carries the last finite state.
class NonFiniteStateError : public NumericalGuardError {
public:
  NonFiniteStateError(const std::string& what, Field last_good, double t_last_good)
      : NumericalGuardError(what), last_good_(std::move(last_good)), t_(t_last_good) {}
  const Field& last_good() const { return last_good_; }
  double time() const { return t_; }

private:
  Field last_good_;
  double t_;
};

namespace detail {

inline std::vector<cplx> linear_symbol(const Grid& g, double t, double disp4) {
  std::vector<cplx> m(g.size());
  for_each_mode(g, [&](std::size_t idx, const Point& xi, int, int) {
    const double r2 = norm2(xi);
    m[idx] = std::polar(1.0, t * disp4 * r2 * r2);
  });
  return m;
}

inline void apply_phase(std::span<cplx> u, double t, const EquationParams& p) {
  if (!p.nonlinear) return;
  const double rate = kPhaseSign * p.mu * t;
  const double half_power = 0.5 * (p.nu - 1.0);
  const bool cubic = p.nu == 3.0;
  for (auto& z : u) {
    const double a2 = std::norm(z);
    const double w = cubic ? a2 : std::pow(a2, half_power);
    z *= std::polar(1.0, rate * w);
  }
}

/// F(u) = |u|^{nu-1} u.
inline void apply_power(std::span<cplx> u, double nu) {
  const double half_power = 0.5 * (nu - 1.0);
  for (auto& z : u) z *= std::pow(std::norm(z), half_power);
}

inline bool all_finite(std::span<const cplx> u) {
  for (const auto& z : u) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

/// Strang step with the half-step symbol cached for a fixed dt.
class SplitStepper {
public:
  SplitStepper(const Grid& g, const EquationParams& p, double dt)
      : grid_(g), params_(p), dt_(dt), half_(linear_symbol(g, 0.5 * dt, p.disp4())) {}

  /// Advances physical-space samples in place by one step.
  void step(std::vector<cplx>& u, bool guard) const {
    forward_in_place(grid_, u);
    if (guard) guard_fourier(u);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= half_[i];
    backward_in_place(grid_, u);
    apply_phase(u, dt_, params_);
    forward_in_place(grid_, u);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= half_[i];
    backward_in_place(grid_, u);
  }

  double dt() const { return dt_; }

private:
  void guard_fourier(std::span<const cplx> uh) const {
    const double frac = alias_fraction_of(grid_, uh);
    if (!(frac < kAliasTolerance)) {
      std::ostringstream os;
      os << "aliasing guard: top-third spectral mass fraction " << frac << " exceeds "
         << kAliasTolerance << "; "
         << spectrum_report(Field(grid_, std::vector<cplx>(uh.begin(), uh.end()), Space::fourier));
      throw NumericalGuardError(os.str());
    }
  }

  Grid grid_;
  EquationParams params_;
  double dt_;
  std::vector<cplx> half_;
};

}  // namespace detail

/// Exact linear group: u^(xi) -> exp(i t disp^4 |xi|^4) u^(xi).
inline Field linear_propagate(const Field& f, double t, const EquationParams& p) {
  const double d4 = p.disp4();
  return apply_multiplier(f, [t, d4](const Point& xi) {
    const double r2 = norm2(xi);
    return std::polar(1.0, t * d4 * r2 * r2);
  });
}

/// Exact flow of the dispersionless equation: pointwise unimodular rotation.
inline Field phase_flow(const Field& f, double t, const EquationParams& p) {
  if (f.space() != Space::physical) throw SpaceMismatch("phase_flow expects a physical-space field");
  std::vector<cplx> v(f.values().begin(), f.values().end());
  detail::apply_phase(v, t, p);
  return Field(f.grid(), std::move(v), Space::physical);
}

/// Half linear, full phase, half linear. Any nonzero dt, including negative.
inline Field strang_step(const Field& f, double dt, const EquationParams& p, bool guard = false) {
  p.validate();
  if (guard) check_alias_guard(f);
  const Field u = in_space(f, Space::physical);
  std::vector<cplx> v(u.values().begin(), u.values().end());
  detail::SplitStepper(u.grid(), p, dt).step(v, false);
  Field out(u.grid(), std::move(v), Space::physical);
  return f.space() == Space::physical ? out : to_fourier(out);
}

/// M(u) = \int |u|^2 and E(u) = \int disp^4 |Delta u|^2 / 2 + mu |u|^{nu+1} / (nu+1).
/// The potential term is omitted when the nonlinearity is disabled.
inline ConservedPair conserved(const Field& f, const EquationParams& p) {
  const Field u = in_space(f, Space::physical);
  ConservedPair c;
  c.mass = std::pow(l2_norm(u), 2);
  const double kinetic = 0.5 * p.disp4() * spectral_integral(u, [](const Point& xi) {
    const double r2 = norm2(xi);
    return r2 * r2;
  });
  double potential = 0.0;
  if (p.nonlinear) {
    potential = p.mu / (p.nu + 1.0) * std::pow(lq_norm(u, p.nu + 1.0), p.nu + 1.0);
  }
  c.energy = kinetic + potential;
  return c;
}

struct EvolveOptions {
  /// Sobolev exponent of the blowup monitor; no monitoring when unset.
  std::optional<double> monitor_gamma;
  bool monitor_homogeneous = false;
  /// Flag "blowup suspected" once the monitored norm exceeds this multiple of
  /// its initial value.
  double blowup_factor = 1e4;
  bool stop_on_blowup = true;
  bool keep_states = true;
  /// Called once per recorded sample, in time order, from the evolving thread.
  std::function<void(double, const Field&, const ConservedPair&)> on_record;
};

struct Trajectory {
  EquationParams params;
  StepControl control;
  std::vector<double> times;
  std::vector<Field> states;
  std::vector<ConservedPair> conserved;
  std::vector<double> monitor;
  bool blowup_suspected = false;
  double blowup_time = 0.0;

  const Field& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }
};

/// Repeated Strang steps to t_end with an exact final partial step; records
/// the state and conserved pair every `record_every` steps and at t_end.
inline Trajectory evolve(const Field& f0, const StepControl& ctrl, const EquationParams& p,
                         const EvolveOptions& opt = {}) {
  ctrl.validate();
  p.validate();
  if (f0.grid().dim() != p.dim) throw ConfigError("field dimension differs from equation dim");

  Trajectory traj;
  traj.params = p;
  traj.control = ctrl;

  const Grid& g = f0.grid();
  std::vector<cplx> u;
  {
    const Field phys = in_space(f0, Space::physical);
    u.assign(phys.values().begin(), phys.values().end());
  }

  const double ratio = ctrl.t_end / ctrl.dt;
  auto n_full = static_cast<long>(std::floor(ratio + 1e-9));
  double remainder = ctrl.t_end - static_cast<double>(n_full) * ctrl.dt;
  if (remainder <= 1e-12 * std::max(1.0, ctrl.t_end)) remainder = 0.0;

  double monitor0 = 0.0;
  auto record = [&](double t) {
    Field state(g, u, Space::physical);
    const ConservedPair c = conserved(state, p);
    traj.times.push_back(t);
    traj.conserved.push_back(c);
    if (opt.monitor_gamma) {
      const double m = sobolev_norm(state, {*opt.monitor_gamma, opt.monitor_homogeneous});
      traj.monitor.push_back(m);
      if (traj.monitor.size() == 1) {
        monitor0 = m;
      } else if (!traj.blowup_suspected && m > opt.blowup_factor * monitor0) {
        traj.blowup_suspected = true;
        traj.blowup_time = t;
      }
    }
    if (opt.on_record) opt.on_record(t, state, c);
    if (opt.keep_states) traj.states.push_back(std::move(state));
  };

  record(0.0);
  if (!opt.keep_states) traj.states.emplace_back(g, u, Space::physical);

  std::vector<cplx> last_good = u;
  double t_last_good = 0.0;
  auto advance = [&](const detail::SplitStepper& stepper, double t_new) {
    stepper.step(u, ctrl.guard);
    if (!detail::all_finite(u)) {
      throw NonFiniteStateError("non-finite state at t = " + std::to_string(t_new),
                                Field(g, last_good, Space::physical), t_last_good);
    }
    last_good = u;
    t_last_good = t_new;
  };

  const detail::SplitStepper stepper(g, p, ctrl.dt);
  for (long s = 1; s <= n_full; ++s) {
    const double t = static_cast<double>(s) * ctrl.dt;
    advance(stepper, t);
    const bool last = s == n_full && remainder == 0.0;
    if (s % ctrl.record_every == 0 || last) {
      record(last ? ctrl.t_end : t);
      if (traj.blowup_suspected && opt.stop_on_blowup) break;
    }
  }
  if (remainder > 0.0 && !(traj.blowup_suspected && opt.stop_on_blowup)) {
    const detail::SplitStepper partial(g, p, remainder);
    advance(partial, ctrl.t_end);
    record(ctrl.t_end);
  }
  if (!opt.keep_states) traj.states.back() = Field(g, u, Space::physical);
  return traj;
}

/// L^2 norm of u(t) - e^{itL}u0 - i sigma mu \int_0^t e^{i(t-s)L} F(u(s)) ds at
/// the final recorded time, with the integral taken by the trapezoid rule
/// over the recorded states.
inline double duhamel_residual(const Trajectory& traj, const EquationParams& p) {
  if (traj.states.size() != traj.times.size()) {
    throw ConfigError("duhamel_residual needs a trajectory with every recorded state kept");
  }
  if (traj.times.size() < 16) {
    throw ConfigError("duhamel_residual needs at least 16 recorded samples");
  }
  const Grid& g = traj.states.front().grid();
  const double t = traj.times.back();
  const double d4 = p.disp4();

  std::vector<double> omega(g.size());
  detail::for_each_mode(g, [&](std::size_t idx, const Point& xi, int, int) {
    const double r2 = norm2(xi);
    omega[idx] = d4 * r2 * r2;
  });

  const Field u0h = to_fourier(traj.states.front());
  const Field uth = to_fourier(traj.states.back());
  std::vector<cplx> integral(g.size(), 0.0);
  if (p.nonlinear) {
    const std::size_t n = traj.times.size();
    for (std::size_t j = 0; j < n; ++j) {
      double w = 0.0;
      if (j > 0) w += 0.5 * (traj.times[j] - traj.times[j - 1]);
      if (j + 1 < n) w += 0.5 * (traj.times[j + 1] - traj.times[j]);
      std::vector<cplx> fu(traj.states[j].values().begin(), traj.states[j].values().end());
      detail::apply_power(fu, p.nu);
      detail::forward_in_place(g, fu);
      const double lag = t - traj.times[j];
      for (std::size_t i = 0; i < fu.size(); ++i) {
        integral[i] += w * std::polar(1.0, lag * omega[i]) * fu[i];
      }
    }
  }
  const cplx coeff(0.0, static_cast<double>(kPhaseSign * p.mu));
  std::vector<cplx> r(g.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = uth[i] - std::polar(1.0, t * omega[i]) * u0h[i] - coeff * integral[i];
  }
  return l2_norm(Field(g, std::move(r), Space::fourier));
}

struct ScatteringProbe {
  std::vector<double> times;
  /// diffs[i] = ||e^{-it_{i+1}L}u(t_{i+1}) - e^{-it_i L}u(t_i)||_{H^gamma}.
  std::vector<double> diffs;
  std::vector<double> ratios;
  bool monotone = true;
  double min_ratio = 0.0;
};

/// Cauchy differences of the profile e^{-itL}u(t) between consecutive probe
/// times, which must coincide with recorded times.
inline ScatteringProbe scattering_probe(const Trajectory& traj, const EquationParams& p,
                                        double gamma, const std::vector<double>& probe_times) {
  if (traj.states.size() != traj.times.size()) {
    throw ConfigError("scattering_probe needs a trajectory with every recorded state kept");
  }
  ScatteringProbe out;
  out.times = probe_times;
  std::vector<Field> profiles;
  for (double tp : probe_times) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
      if (std::abs(traj.times[i] - tp) < std::abs(traj.times[best] - tp)) best = i;
    }
    if (std::abs(traj.times[best] - tp) > 1e-9 * std::max(1.0, tp)) {
      throw ConfigError("scattering_probe: time " + std::to_string(tp) + " was not recorded");
    }
    profiles.push_back(linear_propagate(to_fourier(traj.states[best]), -traj.times[best], p));
  }
  for (std::size_t i = 0; i + 1 < profiles.size(); ++i) {
    out.diffs.push_back(sobolev_norm(profiles[i + 1] - profiles[i], {gamma, false}));
  }
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < out.diffs.size(); ++i) {
    const double r = out.diffs[i + 1] > 0.0 ? out.diffs[i] / out.diffs[i + 1]
                                           : std::numeric_limits<double>::infinity();
    out.ratios.push_back(r);
    out.min_ratio = std::min(out.min_ratio, r);
    if (out.diffs[i + 1] > out.diffs[i]) out.monotone = false;
  }
  if (out.ratios.empty()) out.min_ratio = 0.0;
  return out;
}

}  // namespace nl4s
