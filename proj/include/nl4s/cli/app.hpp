#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nl4s/dynamics.hpp"
#include "nl4s/errors.hpp"
#include "nl4s/experiments/params.hpp"
#include "nl4s/experiments/profiles.hpp"
#include "nl4s/experiments/records.hpp"
#include "nl4s/experiments/result.hpp"
#include "nl4s/experiments/sweep.hpp"
#include "nl4s/field_io.hpp"
#include "nl4s/regimes.hpp"
#include "nl4s/spectral.hpp"

namespace nl4s::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kGuardAbort = 3,
  kBlowupFlagged = 4,
};

namespace detail {

namespace fs = std::filesystem;
using nlohmann::json;

inline json exponent_json(const std::optional<regimes::Exponent>& e) {
  if (!e) return nullptr;
  if (e->is_infinite()) return "inf";
  return e->value();
}

inline std::string real_str(const Real& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

inline json verdict_json(const regimes::RegimeQuery& q, const regimes::RegimeVerdict& v) {
  const auto& x = v.exponents;
  json ex{{"gamma_c", x.gamma_c.value()},
          {"p", exponent_json(x.p)},
          {"q", exponent_json(x.q)},
          {"m", exponent_json(x.m)},
          {"n", exponent_json(x.n)},
          {"theta", x.theta.value()}};
  json exact{{"gamma_c", real_str(x.gamma_c)}, {"theta", real_str(x.theta)}};
  if (x.p) exact["p"] = real_str(Real(1) / x.p->inv);
  if (x.q) exact["q"] = real_str(Real(1) / x.q->inv);
  json query{{"d", q.d}, {"nu", real_str(q.nu)}, {"gamma", real_str(q.gamma)}, {"mu", q.mu}};
  if (q.beta) query["beta"] = real_str(*q.beta);
  return {{"query", query},
          {"verdict", std::string(regimes::to_string(v.verdict))},
          {"theorem_tag", v.theorem_tag},
          {"exponents", ex},
          {"exact", exact},
          {"applicable_window", x.applicable},
          {"smoothness_ok", x.smoothness_ok},
          {"conditions", v.conditions}};
}

inline void apply_small_data(regimes::RegimeQuery& q, const std::string& spec) {
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    std::stringstream inner(tok);
    std::string t;
    while (std::getline(inner, t, '+')) {
      if (t == "l2" || t == "L2") {
        q.small.l2 = true;
      } else if (t == "h2" || t == "H2") {
        q.small.h2 = true;
      } else if (t == "critical" || t == "hdot-gc") {
        q.small.critical = true;
      } else if (!t.empty()) {
        throw ConfigError("unknown small-data flag '" + t + "' (use l2, h2, critical)");
      }
    }
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
  }
  return out;
}

/// Columns: d, nu, gamma, mu[, beta[, small_data]]; an optional header row
/// starting with "d" is skipped.
inline regimes::RegimeQuery parse_query_row(const std::vector<std::string>& cols) {
  if (cols.size() < 4 || cols.size() > 6) {
    throw ConfigError("expected 4 to 6 columns (d, nu, gamma, mu[, beta[, small_data]]), got " +
                      std::to_string(cols.size()));
  }
  regimes::RegimeQuery q;
  const Real d = Real::parse(cols[0]);
  const Real mu = Real::parse(cols[3]);
  if (!d.is_integer()) throw ConfigError("d must be an integer");
  if (!mu.is_integer()) throw ConfigError("mu must be +1 or -1");
  q.d = static_cast<int>(std::lround(d.value()));
  q.nu = Real::parse(cols[1]);
  q.gamma = Real::parse(cols[2]);
  q.mu = static_cast<int>(std::lround(mu.value()));
  if (cols.size() > 4 && !cols[4].empty()) q.beta = Real::parse(cols[4]);
  if (cols.size() > 5) apply_small_data(q, cols[5]);
  q.validate();
  return q;
}

inline void write_json_file(const fs::path& p, const json& j) {
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write " + p.string());
  os << std::setw(2) << j << '\n';
}

inline void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw ConfigError("output directory not writable: " + p.string());
}

inline std::vector<double> parse_number_list(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "inf" || tok == "infinity") {
        out.push_back(std::numeric_limits<double>::infinity());
      } else {
        out.push_back(Real::parse(tok).value());
      }
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct ClassifyArgs {
  int d = 1;
  std::string nu = "3";
  std::string gamma = "0";
  int mu = 1;
  std::string beta;
  std::string small;
  std::string batch;
  std::string out;
  bool json_batch = false;
};

inline int cmd_classify(const ClassifyArgs& a, std::ostream& out, std::ostream& err) {
  using detail::json;
  if (a.batch.empty()) {
    regimes::RegimeQuery q;
    q.d = a.d;
    q.nu = Real::parse(a.nu);
    q.gamma = Real::parse(a.gamma);
    q.mu = a.mu;
    if (!a.beta.empty()) q.beta = Real::parse(a.beta);
    detail::apply_small_data(q, a.small);
    const json j = detail::verdict_json(q, regimes::classify(q));
    if (a.out.empty()) {
      out << std::setw(2) << j << '\n';
    } else {
      detail::write_json_file(a.out, j);
    }
    return kOk;
  }

  std::ifstream is(a.batch);
  if (!is) throw ConfigError("cannot open batch file " + a.batch);
  std::vector<json> rows;
  std::string line;
  int row = 0;
  int bad = 0;
  while (std::getline(is, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cols = detail::split_csv_line(line);
    if (row == 1 && !cols.empty() && cols[0] == "d") continue;
    try {
      const auto q = detail::parse_query_row(cols);
      json j = detail::verdict_json(q, regimes::classify(q));
      j["row"] = row;
      rows.push_back(std::move(j));
    } catch (const std::exception& e) {
      ++bad;
      rows.push_back({{"row", row}, {"error", e.what()}});
      err << "row " << row << ": " << e.what() << '\n';
    }
  }
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw ConfigError("cannot write " + a.out);
  }
  std::ostream& os = a.out.empty() ? out : file;
  if (a.json_batch) {
    os << std::setw(2) << json(rows) << '\n';
  } else {
    std::vector<json> table;
    for (const auto& r : rows) {
      json t{{"row", r["row"]}};
      if (r.contains("error")) {
        t["error"] = r["error"];
      } else {
        t["d"] = r["query"]["d"];
        t["nu"] = r["query"]["nu"];
        t["gamma"] = r["query"]["gamma"];
        t["mu"] = r["query"]["mu"];
        t["beta"] = r["query"].value("beta", "");
        t["verdict"] = r["verdict"];
        t["theorem_tag"] = r["theorem_tag"];
        t["exponents"] = r["exponents"];
        t["conditions"] = r["conditions"];
      }
      table.push_back(std::move(t));
    }
    if (table.empty()) {
      os << "row,d,nu,gamma,mu,beta,verdict,theorem_tag\n";
    } else {
      experiments::write_csv(os, table);
    }
  }
  if (bad > 0) err << bad << " of " << rows.size() << " rows rejected\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct FieldSource {
  std::string field;
  std::string profile = "gaussian";
  int d = 1;
  double L = 16.0;
  int N = 256;

  Field load() const {
    if (!field.empty()) return io::load_field(field);
    return experiments::build_phi0(experiments::parse_profile(profile), make_grid(d, L, N));
  }
};

struct NormsArgs {
  FieldSource src;
  std::vector<std::string> gammas;
  bool homogeneous = false;
  std::vector<int> weighted;
  std::vector<std::string> lq;
  std::string out;
};

inline int cmd_norms(const NormsArgs& a, std::ostream& out, std::ostream& err) {
  const Field f = a.src.load();
  std::vector<detail::json> rows;
  auto add = [&](const std::string& kind, const std::string& param, double value) {
    rows.push_back({{"norm", kind}, {"parameter", param}, {"value", value}});
  };
  const auto gammas = detail::parse_number_list(a.gammas.empty() ? std::vector<std::string>{"0"}
                                                                  : a.gammas);
  for (double g : gammas) {
    try {
      add(a.homogeneous ? "Hdot" : "H", detail::real_str(Real::from_double(g)),
          sobolev_norm(f, {g, a.homogeneous}));
    } catch (const ZeroModeObstruction& e) {
      err << "error: " << e.what() << '\n';
      return kConfigError;
    }
  }
  for (int k : a.weighted) add("Hkk", std::to_string(k), weighted_norm(f, {k}));
  for (double q : detail::parse_number_list(a.lq)) {
    add("L", std::isinf(q) ? "inf" : detail::real_str(Real::from_double(q)), lq_norm(f, q));
  }
  std::ostringstream csv;
  csv << "norm,parameter,value\n";
  for (const auto& r : rows) {
    csv << r["norm"].get<std::string>() << ',' << experiments::csv_field(r["parameter"].get<std::string>())
        << ',' << std::setprecision(17) << r["value"].get<double>() << '\n';
  }
  if (a.out.empty()) {
    out << csv.str();
  } else {
    std::ofstream os(a.out);
    if (!os) throw ConfigError("cannot write " + a.out);
    os << csv.str();
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  FieldSource src;
  double nu = 3.0;
  int mu = 1;
  double disp = 1.0;
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 100;
  std::optional<double> monitor_gamma;
  bool monitor_homogeneous = false;
  double blowup_factor = 1e4;
  bool no_nonlinearity = false;
  bool no_guard = false;
  bool no_snapshots = false;
  double max_wall = 0.0;
  int seed = 0;
  std::string out = "nl4s-run";
};

inline int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  using detail::json;
  const Field u0 = a.src.load();
  EquationParams p;
  p.dim = u0.grid().dim();
  p.nu = a.nu;
  p.mu = a.mu;
  p.disp = a.disp;
  p.nonlinear = !a.no_nonlinearity;
  p.validate();
  StepControl c;
  c.dt = a.dt;
  c.t_end = a.t_end;
  c.record_every = a.record_every;
  c.guard = !a.no_guard;
  c.validate();

  const fs::path dir(a.out);
  detail::ensure_dir(dir);
  if (!a.no_snapshots) detail::ensure_dir(dir / "snapshots");

  json config{{"nu", p.nu},       {"mu", p.mu},       {"disp", p.disp},
              {"nonlinear", p.nonlinear}, {"dt", c.dt}, {"t_end", c.t_end},
              {"record_every", c.record_every}, {"guard", c.guard},
              {"source", a.src.field.empty() ? a.src.profile : a.src.field},
              {"blowup_factor", a.blowup_factor}};
  if (a.monitor_gamma) {
    config["monitor_gamma"] = *a.monitor_gamma;
    config["monitor_homogeneous"] = a.monitor_homogeneous;
  }
  const std::string hash = experiments::config_hash("simulate", config);
  const json grid = io::grid_json(u0.grid());

  std::ofstream traj_os(dir / "trajectory.jsonl");
  if (!traj_os) throw ConfigError("cannot write trajectory in " + dir.string());
  experiments::JsonlWriter traj(traj_os);
  const auto start = std::chrono::steady_clock::now();
  int snap = 0;

  EvolveOptions o;
  o.keep_states = false;
  o.monitor_gamma = a.monitor_gamma;
  o.monitor_homogeneous = a.monitor_homogeneous;
  o.blowup_factor = a.blowup_factor;
  bool have_c0 = false;
  ConservedPair c0;
  o.on_record = [&](double t, const Field& state, const ConservedPair& cp) {
    if (!have_c0) {
      c0 = cp;
      have_c0 = true;
    }
    json rec{{"t", t},
             {"mass", cp.mass},
             {"energy", cp.energy},
             {"mass_drift", std::abs(cp.mass - c0.mass) / c0.mass},
             {"config_hash", hash},
             {"seed", a.seed},
             {"grid", grid},
             {"dt", c.dt}};
    if (a.monitor_gamma) rec["monitor"] = sobolev_norm(state, {*a.monitor_gamma, a.monitor_homogeneous});
    if (!a.no_snapshots) {
      std::ostringstream name;
      name << "snapshots/state_" << std::setw(5) << std::setfill('0') << snap++ << ".bin";
      io::save_binary(dir / name.str(), state);
      rec["snapshot"] = name.str();
    }
    traj.write(rec);
    if (a.max_wall > 0.0) {
      const double el =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (el > a.max_wall) throw NumericalGuardError("wall-clock cap exceeded at t = " + std::to_string(t));
    }
  };

  json summary{{"config", config}, {"config_hash", hash}, {"seed", a.seed}, {"grid", grid}};
  try {
    const Trajectory tr = evolve(u0, c, p, o);
    io::save_binary(dir / "final.bin", tr.final_state());
    const auto& cf = tr.conserved;
    double md = 0.0, ed = 0.0;
    for (const auto& cp : cf) {
      md = std::max(md, std::abs(cp.mass - cf.front().mass) / cf.front().mass);
      ed = std::max(ed, std::abs(cp.energy - cf.front().energy) /
                            std::max(std::abs(cf.front().energy), 1e-300));
    }
    summary["status"] = tr.blowup_suspected ? "blowup-flagged" : "completed";
    summary["final_time"] = tr.final_time();
    summary["mass_drift"] = md;
    summary["energy_drift"] = ed;
    if (tr.blowup_suspected) summary["blowup_time"] = tr.blowup_time;
    detail::write_json_file(dir / "summary.json", summary);
    out << summary["status"].get<std::string>() << ": t = " << tr.final_time()
        << ", mass drift = " << md << ", energy drift = " << ed << '\n';
    return tr.blowup_suspected ? kBlowupFlagged : kOk;
  } catch (const NonFiniteStateError& e) {
    io::save_binary(dir / "last_good.bin", e.last_good());
    std::ofstream diag(dir / "spectrum_diagnostic.txt");
    diag << e.what() << "\nlast finite state at t = " << e.time() << "\n"
         << spectrum_report(e.last_good()) << '\n';
    summary["status"] = "guard-aborted";
    summary["message"] = e.what();
    detail::write_json_file(dir / "summary.json", summary);
    err << "guard abort: " << e.what() << '\n';
    return kGuardAbort;
  } catch (const NumericalGuardError& e) {
    std::ofstream diag(dir / "spectrum_diagnostic.txt");
    diag << e.what() << '\n';
    summary["status"] = "guard-aborted";
    summary["message"] = e.what();
    detail::write_json_file(dir / "summary.json", summary);
    err << "guard abort: " << e.what() << '\n';
    return kGuardAbort;
  }
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::string name;
  std::string config;
  std::string out;
  int workers = 0;
  std::vector<std::string> overrides;
  int seed = 0;
};

inline int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  using detail::json;
  const auto& reg = experiments::study_registry();
  if (!reg.count(a.name)) {
    std::string names;
    for (const auto& [k, v] : reg) names += " " + k;
    throw ConfigError("unknown experiment '" + a.name + "'; available:" + names);
  }
  experiments::RunPlan plan;
  if (!a.config.empty()) {
    plan = experiments::load_plan(a.config, a.name);
    for (auto& pt : plan.points) {
      if (pt.study != a.name) {
        throw ConfigError("config names study '" + pt.study + "' but '" + a.name + "' was requested");
      }
    }
  } else {
    plan.points.push_back({a.name, json::object()});
  }
  for (auto& pt : plan.points) {
    for (const auto& kv : a.overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      pt.params[kv.substr(0, eq)] = experiments::parse_value(kv.substr(eq + 1));
    }
    if (a.seed != 0) pt.params["seed"] = a.seed;
  }
  const int workers = a.workers > 0 ? a.workers : plan.workers;

  const fs::path dir(a.out.empty() ? "results/" + a.name : a.out);
  detail::ensure_dir(dir);
  const auto outcomes = experiments::run_sweep(plan, workers);

  std::ofstream rec_os(dir / "records.jsonl");
  std::ofstream fit_os(dir / "fits.csv");
  experiments::JsonlWriter recs(rec_os);
  std::vector<json> all_records;
  json summary = json::array();
  int code = kOk;
  bool header = false;
  for (const auto& o : outcomes) {
    json s{{"point", o.index}, {"status", std::string(experiments::to_string(o.status))},
           {"params", o.point.params}};
    if (o.result) {
      for (const auto& r : o.result->records) {
        json rr = r;
        rr["point"] = o.index;
        recs.write(rr);
        all_records.push_back(std::move(rr));
      }
      std::ostringstream fits;
      experiments::write_fit_csv(fits, *o.result);
      std::string text = fits.str();
      if (header) text = text.substr(text.find('\n') + 1);
      fit_os << text;
      header = true;
      s.update(o.result->summary());
      s["config"] = o.result->config;
      if (!o.result->pass() && code == kOk) code = kCheckFailed;
    } else {
      s["message"] = o.message;
      err << "point " << o.index << " (" << experiments::to_string(o.status) << "): " << o.message
          << '\n';
      if (o.status == experiments::PointStatus::config_error) {
        code = kConfigError;
      } else if (o.status == experiments::PointStatus::guard_error && code != kConfigError) {
        code = kGuardAbort;
      } else if (code == kOk) {
        code = kCheckFailed;
      }
    }
    summary.push_back(std::move(s));
  }
  {
    std::ofstream csv(dir / "records.csv");
    experiments::write_csv(csv, all_records);
  }
  detail::write_json_file(dir / "summary.json", summary);

  out << "experiment " << a.name << ": " << outcomes.size() << " point(s), output in "
      << dir.string() << '\n';
  for (const auto& o : outcomes) {
    if (!o.result) {
      out << "  point " << o.index << "  ERROR  " << o.message << '\n';
      continue;
    }
    out << "  point " << o.index << "  " << (o.result->pass() ? "PASS" : "FAIL") << "  hash "
        << o.result->config_hash << '\n';
    for (const auto& c : o.result->checks) {
      out << "    " << (c.pass ? "PASS" : "FAIL") << "  " << c.rule << "  measured "
          << std::setprecision(6) << c.measured << "  expected " << c.expected << '\n';
    }
    for (const auto& f : o.result->fits) {
      out << "    fit  " << f.name << "  slope " << f.fit.slope << "  r2 " << f.fit.r2 << '\n';
    }
  }
  return code;
}

// ---------------------------------------------------------------------------

inline void add_source_options(CLI::App* sc, FieldSource& s) {
  sc->add_option("--field", s.field, "input field (.bin or .json)");
  sc->add_option("--profile", s.profile,
                 "analytic profile, e.g. gaussian:amp=1,width=1 or moment-vanishing:m=2");
  sc->add_option("--d", s.d, "dimension (1 or 2)");
  sc->add_option("--L", s.L, "half-width of the periodic box [-L, L)^d");
  sc->add_option("--N", s.N, "points per axis (power of two)");
}

/// Parses `args` (program name first) and dispatches. Never throws.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nl4s: fourth-order nonlinear Schrodinger toolkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "classify a regime query");
  classify->add_option("--d", ca.d, "dimension >= 1");
  classify->add_option("--nu", ca.nu, "nonlinearity power (e.g. 3 or 7/3)");
  classify->add_option("--gamma", ca.gamma, "Sobolev exponent (e.g. 0.5 or -1/2)");
  classify->add_option("--mu", ca.mu, "+1 defocusing, -1 focusing");
  classify->add_option("--beta", ca.beta, "higher regularity beta > gamma");
  classify->add_option("--small-data", ca.small, "small-data flags: l2, h2, critical (joined by +)");
  classify->add_option("--batch", ca.batch, "CSV of queries: d,nu,gamma,mu[,beta[,small_data]]");
  classify->add_flag("--json", ca.json_batch, "batch output as a JSON array");
  classify->add_option("--out", ca.out, "write to file instead of stdout");

  NormsArgs na;
  auto* norms = app.add_subcommand("norms", "Sobolev, weighted and Lebesgue norms of a field");
  add_source_options(norms, na.src);
  norms->add_option("--gamma", na.gammas, "Sobolev exponents (comma list)");
  norms->add_flag("--homogeneous", na.homogeneous, "use |xi|^gamma instead of <xi>^gamma");
  norms->add_option("--weighted", na.weighted, "orders k of H^{k,k}");
  norms->add_option("--lq", na.lq, "Lebesgue orders (inf allowed)");
  norms->add_option("--out", na.out, "CSV output file");

  SimulateArgs sa;
  double monitor_gamma = std::numeric_limits<double>::quiet_NaN();
  auto* sim = app.add_subcommand("simulate", "evolve a field with the split-step solver");
  add_source_options(sim, sa.src);
  sim->add_option("--nu", sa.nu);
  sim->add_option("--mu", sa.mu);
  sim->add_option("--disp", sa.disp, "dispersion scale (0 = dispersionless)");
  sim->add_option("--dt", sa.dt);
  sim->add_option("--t-end", sa.t_end);
  sim->add_option("--record-every", sa.record_every, "steps between records");
  sim->add_option("--monitor-gamma", monitor_gamma, "Sobolev exponent of the blowup monitor");
  sim->add_flag("--monitor-homogeneous", sa.monitor_homogeneous);
  sim->add_option("--blowup-factor", sa.blowup_factor, "monitor growth that flags blowup");
  sim->add_flag("--no-nonlinearity", sa.no_nonlinearity, "linear flow only (testing)");
  sim->add_flag("--no-guard", sa.no_guard, "disable the aliasing guard");
  sim->add_flag("--no-snapshots", sa.no_snapshots, "skip binary snapshots");
  sim->add_option("--max-wall", sa.max_wall, "wall-clock cap in seconds (0 = none)");
  sim->add_option("--seed", sa.seed, "recorded seed");
  sim->add_option("--out", sa.out, "output directory");

  ExperimentArgs ea;
  auto* exp = app.add_subcommand("experiment", "run a study or a sweep of studies");
  exp->add_option("name", ea.name, "study name")->required();
  exp->add_option("--config", ea.config, "run plan (INI: [study], [params], [sweep])");
  exp->add_option("--out", ea.out, "output directory (default results/<name>)");
  exp->add_option("--workers", ea.workers, "worker threads for sweeps");
  exp->add_option("--set", ea.overrides, "parameter override key=value (repeatable)");
  exp->add_option("--seed", ea.seed, "seed recorded in every record");

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (*classify) return cmd_classify(ca, out, err);
    if (*norms) return cmd_norms(na, out, err);
    if (*sim) {
      if (!std::isnan(monitor_gamma)) sa.monitor_gamma = monitor_gamma;
      return cmd_simulate(sa, out, err);
    }
    if (*exp) return cmd_experiment(ea, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ZeroModeObstruction& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalGuardError& e) {
    err << "guard abort: " << e.what() << '\n';
    return kGuardAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace nl4s::cli
