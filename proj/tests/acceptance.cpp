// Acceptance suite: one PASS/FAIL line per criterion. Every verdict is
// recomputed here from raw study records with targets derived independently
// of the library, not read back from the studies' own checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nl4s/nl4s.hpp"
#include "regime_cases.hpp"

using namespace nl4s;
using namespace nl4s::experiments;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<json> series(const StudyResult& r, const std::string& name) {
  std::vector<json> out;
  for (const auto& rec : r.records) {
    if (rec.value("series", std::string()) == name) out.push_back(rec);
  }
  return out;
}

std::vector<double> column(const std::vector<json>& recs, const std::string& key) {
  std::vector<double> out;
  for (const auto& rec : recs) out.push_back(rec.at(key).get<double>());
  return out;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

double gamma_c(int d, double nu) { return 0.5 * d - 4.0 / (nu - 1.0); }

// 1. Gaussian norms and energy against Gaussian moments.
Outcome norm_oracles() {
  const Grid g = make_grid(1, 16.0, 256);
  const Field u = Field::sample(g, [](const Point& x) { return std::exp(-0.5 * x[0] * x[0]); });
  const double sp = std::sqrt(kPi);
  struct Row {
    const char* name;
    double got, want;
  };
  EquationParams pf;
  pf.mu = -1;
  const std::vector<Row> rows{
      {"L2", lq_norm(u, 2.0), std::pow(kPi, 0.25)},
      {"Hdot1", sobolev_norm(u, {1.0, true}), std::sqrt(sp / 2)},
      {"H11", weighted_norm(u, {1}), std::sqrt(1.5 * sp) + std::sqrt(sp / 2)},
      // 1/2 ||u''||^2 +- 1/4 \int e^{-2x^2}
      {"E(mu=1)", conserved(u, EquationParams{}).energy, 3 * sp / 8 + std::sqrt(kPi / 2) / 4},
      {"E(mu=-1)", conserved(u, pf).energy, 3 * sp / 8 - std::sqrt(kPi / 2) / 4},
  };
  Outcome o{true, ""};
  double worst = 0.0;
  for (const auto& r : rows) {
    const double e = rel(r.got, r.want);
    worst = std::max(worst, e);
    if (!(e < 1e-6)) {
      o.pass = false;
      o.detail += std::string(r.name) + " off by " + fmt(e) + "; ";
    }
  }
  o.detail += "worst relative error " + fmt(worst) + " (tol 1e-6)";
  return o;
}

// 2 and 5 share one scaling-invariance run.
const StudyResult& scaling_run() {
  static const StudyResult r = run_study("scaling-invariance", json::object());
  return r;
}

Outcome scaling_slopes() {
  const auto recs = series(scaling_run(), "initial-slope");
  std::set<std::pair<double, double>> seen;
  double worst = 0.0;
  for (const auto& rec : recs) {
    const double nu = rec["nu"], gamma = rec["gamma"];
    seen.insert({nu, gamma});
    worst = std::max(worst, std::abs(rec["slope"].get<double>() - (gamma_c(1, nu) - gamma)));
  }
  bool covered = true;
  for (double nu : {3.0, 5.0}) {
    for (double gamma : {0.0, 0.5, 1.0}) covered = covered && seen.count({nu, gamma});
  }
  return {covered && worst <= 1e-3,
          std::to_string(recs.size()) + " instances, worst |slope - target| " + fmt(worst) + " (tol 1e-3)" +
              (covered ? "" : "; missing instances")};
}

Outcome conservation() {
  const auto r = run_study("conservation", json::object());
  bool ok = r.config["t_end"] == 1.0 && r.config["nu"] == 3.0;
  double worst_mass = 0.0, lo = 1e300, hi = 0.0;
  for (int mu : {1, -1}) {
    std::vector<json> recs;
    for (const auto& rec : r.records) {
      if (rec["mu"] == mu) recs.push_back(rec);
    }
    ok = ok && recs.size() >= 2;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      worst_mass = std::max(worst_mass, recs[i]["mass_drift"].get<double>());
      if (i == 0) continue;
      const double ratio = recs[i - 1]["energy_drift"].get<double>() / recs[i]["energy_drift"].get<double>();
      ok = ok && std::abs(recs[i - 1]["dt"].get<double>() / recs[i]["dt"].get<double>() - 2.0) < 1e-12;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  ok = ok && worst_mass < 1e-10 && lo >= 3.0 && hi <= 5.0;
  return {ok, "mass drift " + fmt(worst_mass) + " (< 1e-10), energy ratios in [" + fmt(lo) + ", " + fmt(hi) +
                  "] (need [3, 5])"};
}

// 4 and 13 share one convergence run.
const StudyResult& convergence_run() {
  static const StudyResult r = run_study("convergence", json::object());
  return r;
}

Outcome richardson() {
  const auto recs = series(convergence_run(), "richardson");
  bool ok = !recs.empty();
  std::string orders;
  for (const auto& rec : recs) {
    // recompute the order from the two successive differences
    const double order = std::log2(rec["diff_coarse"].get<double>() / rec["diff_fine"].get<double>());
    ok = ok && order >= 1.8 && order <= 2.2;
    orders += fmt(order) + " ";
  }
  return {ok, "observed order " + orders + "(need [1.8, 2.2])"};
}

Outcome covariance() {
  const auto recs = series(scaling_run(), "covariance");
  std::set<double> lambdas;
  double worst = 0.0;
  for (const auto& rec : recs) {
    lambdas.insert(rec["lambda"].get<double>());
    worst = std::max(worst, rec["mismatch"].get<double>());
  }
  const bool ok = lambdas.count(0.5) && lambdas.count(2.0) && worst < 1e-6;
  return {ok, "worst co-scaled mismatch " + fmt(worst) + " over lambda in {1/2, 2} (< 1e-6)"};
}

Outcome small_dispersion() {
  const auto r = run_study("small-dispersion", json::object());
  std::vector<json> recs;
  for (const auto& rec : r.records) {
    if (rec["t"] == 1.0) recs.push_back(rec);
  }
  const auto deltas = column(recs, "delta");
  const bool grid_ok = deltas == std::vector<double>{0.2, 0.1, 0.05};
  const auto hk = fit_loglog(deltas, column(recs, "err_Hk"));
  const auto hkk = fit_loglog(deltas, column(recs, "err_Hkk"));
  const bool ok = grid_ok && hk.slope >= 2.75 && hk.r2 >= 0.99 && hkk.slope >= 2.75 && hkk.r2 >= 0.99;
  return {ok, "H^1 order " + fmt(hk.slope) + " r2 " + fmt(hk.r2) + ", H^{1,1} order " + fmt(hkk.slope) + " r2 " +
                  fmt(hkk.r2) + " (need >= 2.75, r2 >= 0.99)"};
}

Outcome initial_norm_law() {
  struct Instance {
    json params;
    double gamma;
    double nu;
  };
  const std::vector<Instance> inst{
      {json::object(), 1.0, 3.0},
      {{{"gamma", -2.0}, {"profile", "moment-vanishing"}}, -2.0, 3.0},
  };
  bool ok = true;
  std::string detail;
  for (const auto& in : inst) {
    const auto r = run_study("initial-norm-scaling", in.params);
    ok = ok && r.config["gamma"] == in.gamma && r.config["nu"] == in.nu;
    const auto lam = series(r, "lambda");
    const auto del = series(r, "delta");
    const double s_lam = fit_loglog(column(lam, "lambda"), column(lam, "norm")).slope;
    const double s_del = fit_loglog(column(del, "delta"), column(del, "norm")).slope;
    const double t_lam = gamma_c(1, in.nu) - in.gamma;
    const double t_del = in.gamma - 0.5;
    const double e1 = rel(s_lam, t_lam), e2 = rel(s_del, t_del);
    ok = ok && e1 <= 0.05 && e2 <= 0.05;
    detail += "gamma=" + fmt(in.gamma) + ": lambda " + fmt(s_lam) + "/" + fmt(t_lam) + ", delta " + fmt(s_del) +
              "/" + fmt(t_del) + "; ";
  }
  return {ok, detail + "(5% relative)"};
}

Outcome norm_inflation() {
  const auto r = run_study("norm-inflation", json::object());
  const double gamma = r.config["gamma"];
  std::vector<json> grid;
  for (const auto& rec : r.records) {
    if (rec.contains("norm_closed")) grid.push_back(rec);
  }
  const auto t = column(grid, "t");
  const double slope = fit_loglog(t, column(grid, "norm_closed")).slope;
  const auto ratios = column(grid, "lower_bound_ratio");
  const double spread = *std::max_element(ratios.begin(), ratios.end()) /
                        *std::min_element(ratios.begin(), ratios.end());
  const auto cs = r.reported.at("initial_C").get<std::vector<double>>();
  const double c_spread = *std::max_element(cs.begin(), cs.end()) / *std::min_element(cs.begin(), cs.end());
  bool dyadic = t.size() >= 3;
  for (std::size_t i = 1; i < t.size(); ++i) dyadic = dyadic && std::abs(t[i] / t[i - 1] - 2.0) < 1e-12;
  const bool ok = dyadic && rel(slope, gamma) <= 0.15 && spread < 2.0 && c_spread < 2.0 &&
                  std::all_of(ratios.begin(), ratios.end(), [](double v) { return v > 0.0; });
  return {ok, "t-slope " + fmt(slope) + " vs gamma " + fmt(gamma) + " (15%), lower-bound ratio spread " +
                  fmt(spread) + ", C spread " + fmt(c_spread) + " (< 2x)"};
}

Outcome low_frequency() {
  const auto r = run_study("low-frequency", json::object());
  const double gamma = r.config["gamma"];
  const bool instance = r.config["dim"] == 1.0 && r.config["nu"] == 3.0 && gamma == -2.0;
  const double slope =
      fit_loglog(column(r.records, "lambda_over_delta"), column(r.records, "norm_over_epsilon")).slope;
  const double target = gamma + 0.5;
  return {instance && rel(slope, target) <= 0.10,
          "growth slope " + fmt(slope) + " vs " + fmt(target) + " (10%)"};
}

Outcome uniform_discontinuity() {
  const auto r = run_study("uniform-discontinuity", json::object());
  const auto gaps = column(r.records, "gap");
  const auto init = column(r.records, "initial_difference");
  const auto ev = column(r.records, "evolved_difference");
  double mean = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) mean += init[i] / gaps[i] / gaps.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) worst = std::max(worst, rel(init[i] / gaps[i], mean));
  const double floor = *std::min_element(ev.begin(), ev.end());
  const double drop = 1.0 - floor / ev.front();
  const bool ok = gaps == std::vector<double>{0.5, 0.25, 0.125} && worst <= 0.20 && drop <= 0.30 && floor > 0.0;
  return {ok, "initial/gap deviation " + fmt(worst) + " (<= 0.2), evolved floor " + fmt(floor) + ", drop " +
                  fmt(std::max(drop, 0.0)) + " (<= 0.3)"};
}

Outcome truth_table() {
  const auto& cases = nl4s::testing::truth_table();
  int wrong = 0;
  std::string first;
  std::set<regimes::Verdict> seen;
  for (const auto& c : cases) {
    const auto v = regimes::classify(nl4s::testing::to_query(c));
    seen.insert(v.verdict);
    if (v.verdict != c.expected || v.theorem_tag != c.tag) {
      if (wrong++ == 0) first = std::string(" first mismatch: ") + c.why;
    }
  }
  return {wrong == 0 && cases.size() >= 25 && seen.size() == 10,
          std::to_string(cases.size()) + " queries, " + std::to_string(wrong) + " mismatches, " +
              std::to_string(seen.size()) + " verdicts covered" + first};
}

Outcome exponent_identities() {
  nl4s::testing::WindowQueryGen gen(0x5eed);
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto q = gen.next();
    const auto r = regimes::working_exponents(q);
    if (!r.applicable) {
      ++bad;
      continue;
    }
    const Real g = regimes::gamma_pq(q.d, *r.p, *r.q);
    // conjugates, written out: gamma_{p',q'} = d/2 - d (1 - 1/q) - 4 (1 - 1/p)
    const Real gconj = Real(Rational(q.d, 2)) - Real(q.d) * (Real(1) - r.q->inv) -
                       Real(4) * (Real(1) - r.p->inv);
    const double dg = std::abs(g.value());
    worst = std::max({worst, dg, std::abs((g - gconj - Real(4)).value())});
    const int theta_sign = r.theta > Real(0) ? 1 : (r.theta < Real(0) ? -1 : 0);
    const int gamma_sign = q.gamma > r.gamma_c ? 1 : (q.gamma < r.gamma_c ? -1 : 0);
    if (!(g == Real(0)) || !(g == gconj + Real(4)) || theta_sign != gamma_sign ||
        !regimes::strichartz_scaling_check(q.d, *r.p, *r.q, *r.p, *r.q)) {
      ++bad;
    }
  }
  return {bad == 0 && worst <= 1e-12,
          "1000 random queries, " + std::to_string(bad) + " violations, worst residual " + fmt(worst)};
}

Outcome duhamel() {
  const auto recs = series(convergence_run(), "duhamel");
  const auto f = fit_loglog(column(recs, "dt"), column(recs, "residual"));
  return {recs.size() >= 3 && f.slope >= 1.8, "residual order " + fmt(f.slope) + " (>= 1.8)"};
}

Outcome scattering() {
  const auto r = run_study("scattering-probe", json::object());
  const double gc = gamma_c(r.config["dim"].get<int>(), r.config["nu"].get<double>());
  const auto d = column(r.records, "cauchy_difference");
  const auto t0 = column(r.records, "t0");
  const auto t1 = column(r.records, "t1");
  bool ok = gc > 0.0 && d.size() >= 3 && t0.front() == 1.0 && t1.back() == 8.0;
  double min_ratio = 1e300;
  for (std::size_t i = 1; i < d.size(); ++i) {
    ok = ok && d[i] < d[i - 1];
    min_ratio = std::min(min_ratio, d[i - 1] / d[i]);
  }
  ok = ok && min_ratio >= 2.0;
  return {ok, "Gamma_c " + fmt(gc) + ", " + std::to_string(d.size()) + " dyadic steps, min decay " +
                  fmt(min_ratio) + " (>= 2, monotone)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> all{
      {1, "norm oracles", norm_oracles},
      {2, "scaling-law slopes", scaling_slopes},
      {3, "conservation", conservation},
      {4, "splitting self-convergence", richardson},
      {5, "solver scaling covariance", covariance},
      {6, "small-dispersion law", small_dispersion},
      {7, "initial-data norm law", initial_norm_law},
      {8, "norm inflation", norm_inflation},
      {9, "low-frequency growth", low_frequency},
      {10, "uniform discontinuity", uniform_discontinuity},
      {11, "classifier truth table", truth_table},
      {12, "exponent identities", exponent_identities},
      {13, "Duhamel residual order", duhamel},
      {14, "scattering probe", scattering},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s  [%2d] %-28s %s  (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
