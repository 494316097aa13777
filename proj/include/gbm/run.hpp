#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gbm/basis.hpp"
#include "gbm/compare.hpp"
#include "gbm/config.hpp"
#include "gbm/dissipativity.hpp"
#include "gbm/projector.hpp"
#include "gbm/resolvent.hpp"
#include "gbm/walk_io.hpp"

namespace gbm {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitStatistical = 4 };

struct RunOptions {
  unsigned workers = 1;
};

struct CheckResult {
  TestReport report;
  bool statistical = false;
};

namespace detail {

using ojson = nlohmann::ordered_json;

class Artifacts {
 public:
  explicit Artifacts(const RunConfig& c) : cfg_(c), hash_(config_hash(c)), dir_(c.output.dir) {
    std::filesystem::create_directories(dir_);
  }

  const std::string& hash() const noexcept { return hash_; }
  std::string seed_text() const { return cfg_.sim.seed ? std::to_string(*cfg_.sim.seed) : "none"; }

  std::ofstream open(const std::string& name) {
    const auto path = dir_ / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cannot write " + path.string());
    files_.push_back(name);
    return os;
  }

  // CSV files start with a comment line naming the run.
  std::ofstream open_csv(const std::string& name, const std::string& header) {
    auto os = open(name);
    os << "# config_hash=" << hash_ << " seed=" << seed_text() << "\n" << header << "\n";
    return os;
  }

  ojson header() const {
    ojson j;
    j["config_hash"] = hash_;
    if (cfg_.sim.seed)
      j["master_seed"] = *cfg_.sim.seed;
    else
      j["master_seed"] = nullptr;
    j["mode"] = to_string(cfg_.mode);
    j["config"] = serialize(cfg_);
    return j;
  }

  const std::vector<std::string>& files() const noexcept { return files_; }

 private:
  const RunConfig& cfg_;
  std::string hash_;
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

inline std::string point_label(const StatePoint& p) {
  if (p.side() == Side::plus && p.x() == 0.0) return "0+";
  if (p.side() == Side::minus && p.x() == 0.0) return "0-";
  return fmt(p.x());
}

inline std::vector<NamedFunction> functions_of(const RunConfig& c) {
  std::vector<NamedFunction> fs;
  for (const auto& name : c.functions) fs.push_back({name, basis_function(name, c.topology)});
  return fs;
}

inline ojson check_json(const CheckResult& c) {
  ojson j = to_json(c.report);
  j["kind"] = c.statistical ? "statistical" : "numeric";
  return j;
}

inline CheckResult numeric_check(std::string name, double estimate, double target, double tol) {
  return {make_report(std::move(name), estimate, target, tol), false};
}

inline CheckResult flag_check(std::string name, bool ok, double estimate) {
  return {TestReport{std::move(name), estimate, 0.0, 0.0, ok}, false};
}

inline CheckResult stat_check(std::string name, double estimate, double target, double tol) {
  return {make_report(std::move(name), estimate, target, tol), true};
}

inline int finish(Artifacts& art, ojson report, const std::vector<CheckResult>& checks, std::ostream& log) {
  bool numeric_ok = true, stat_ok = true;
  ojson list = ojson::array();
  for (const auto& c : checks) {
    list.push_back(check_json(c));
    if (!c.report.pass) (c.statistical ? stat_ok : numeric_ok) = false;
    log << (c.report.pass ? "PASS " : "FAIL ") << c.report.test_name << " estimate=" << fmt(c.report.estimate)
        << " target=" << fmt(c.report.target) << " tol=" << fmt(c.report.tolerance) << "\n";
  }
  const int code = !numeric_ok ? kExitNumeric : !stat_ok ? kExitStatistical : kExitOk;
  report["tests"] = list;
  report["pass"] = code == kExitOk;
  report["exit_code"] = code;
  auto os = art.open("report.json");
  os << report.dump(2) << "\n";
  return code;
}

inline ojson estimate_json(const EstimateWithError& e) {
  ojson j;
  j["value"] = e.value;
  j["std_error"] = e.std_error;
  j["n_samples"] = e.n_samples;
  j["ci95"] = {e.ci95.first, e.ci95.second};
  return j;
}

inline int run_simulate(const RunConfig& c, const RunOptions& o, std::ostream& log) {
  Artifacts art(c);
  const SimConfig sc = c.sim_config();
  const auto paths = simulate_batch(sc, *c.walk, c.sim.m, o.workers);
  {
    auto os = art.open("paths.jsonl");
    for (std::size_t i = 0; i < paths.size(); ++i) {
      auto j = path_to_json(paths[i]);
      j["config_hash"] = art.hash();
      j["master_seed"] = *c.sim.seed;
      j["index"] = i;
      os << j.dump() << "\n";
    }
  }
  if (c.output.paths_csv) {
    auto os = art.open_csv("paths.csv", "path,t,state");
    for (std::size_t i = 0; i < paths.size(); ++i)
      for (const Event& e : paths[i].events) os << i << ',' << fmt(e.t) << ',' << e.state.str() << "\n";
  }
  std::uint64_t alive = 0, killed = 0, truncated = 0;
  for (const auto& p : paths) {
    if (p.terminal == Terminal::alive) ++alive;
    if (p.terminal == Terminal::killed) ++killed;
    if (p.terminal == Terminal::truncated) ++truncated;
  }
  ojson rep = art.header();
  ojson s;
  s["paths"] = paths.size();
  s["alive"] = alive;
  s["killed"] = killed;
  s["truncated"] = truncated;
  if (truncated < paths.size()) s["survival"] = estimate_json(survival_probability(paths, c.sim.t));
  rep["summary"] = s;
  log << "simulated " << paths.size() << " paths: alive " << alive << ", killed " << killed << ", truncated "
      << truncated << "\n";
  return finish(art, rep, {}, log);
}

inline int run_pde(const RunConfig& c, std::ostream& log) {
  Artifacts art(c);
  const auto k = c.generator();
  Grid g(c.topology, c.numerics.h, c.numerics.radius);
  const auto fs = functions_of(c);
  EvolveOptions eo;
  eo.store_stride = static_cast<std::size_t>(c.numerics.store_every);
  const auto field = evolve_semigroup(g.sample(fs.front().f), k, c.sim.t, c.numerics.dt, g, eo);
  {
    auto os = art.open_csv("field.csv", "t,x,u");
    for (std::size_t j = 0; j < field.times.size(); ++j)
      for (std::size_t i = 0; i < g.size(); ++i)
        os << fmt(field.times[j]) << ',' << point_label(g.point(i)) << ',' << fmt(field.values[j][i]) << "\n";
  }
  ojson rep = art.header();
  ojson s;
  s["function"] = fs.front().name;
  s["steps"] = field.steps;
  s["fallback_steps"] = field.fallback_steps;
  s["max_norm_growth"] = field.max_norm_growth;
  s["min_value"] = field.min_value;
  s["value_at_u"] = semigroup_expectation(field, start_point(c.topology, c.sim.u), c.sim.t);
  rep["summary"] = s;
  std::vector<CheckResult> checks{flag_check("pde_contraction", field.contraction_ok, field.max_norm_growth),
                                  flag_check("pde_positivity", field.positivity_ok, field.min_value)};
  return finish(art, rep, checks, log);
}

inline int run_resolvent(const RunConfig& c, std::ostream& log) {
  Artifacts art(c);
  const auto k = c.generator();
  const auto fs = functions_of(c);
  ResolventOptions ro;
  ro.tol = c.numerics.quad_tol;
  const auto sol = resolvent(fs.front().f, c.numerics.lambda, k, ro);
  std::vector<StatePoint> pts;
  for (int i = -100; i <= 100; ++i) {
    const double x = 0.05 * i;
    if (c.topology == Topology::line)
      pts.push_back(StatePoint::on_line(x));
    else if (i < 0)
      pts.push_back(StatePoint::minus(x));
    else if (i == 0) {
      pts.push_back(StatePoint::origin_minus());
      pts.push_back(StatePoint::origin_plus());
    } else
      pts.push_back(StatePoint::plus(x));
  }
  {
    auto os = art.open_csv("resolvent.csv", "x,value");
    for (const auto& p : pts) os << point_label(p) << ',' << fmt(sol(p)) << "\n";
  }
  const auto id = verify_resolvent_identity(sol, fs.front().f, k);
  ojson rep = art.header();
  ojson s;
  s["function"] = fs.front().name;
  s["lambda"] = c.numerics.lambda;
  s["A"] = sol.A();
  s["B"] = sol.B();
  rep["summary"] = s;
  return finish(art, rep,
                {numeric_check("resolvent_boundary_residual", id.boundary_residual, 0.0, 1e-9),
                 numeric_check("resolvent_pde_residual", id.pde_residual, 0.0, 1e-5)},
                log);
}

inline void write_sweep(Artifacts& art, const std::vector<CompareRow>& rows, const std::vector<BiasFit>& fits) {
  auto os = art.open_csv("sweep.csv", "n,function,t,mc,se,pde,diff,bias_c,tolerance,pass,truncated");
  for (const auto& r : rows) {
    double c = 0.0;
    for (const auto& f : fits)
      if (f.function == r.function && f.t == r.t) c = f.c;
    os << r.n << ',' << r.function << ',' << fmt(r.t) << ',' << fmt(r.mc) << ',' << fmt(r.se) << ',' << fmt(r.pde) << ','
       << fmt(r.diff) << ',' << fmt(c) << ',' << fmt(r.tolerance) << ',' << (r.pass ? 1 : 0) << ',' << r.truncated << "\n";
  }
}

inline int run_compare(const RunConfig& c, const RunOptions& o, std::ostream& log) {
  Artifacts art(c);
  const auto k = c.generator();
  const auto fs = functions_of(c);
  const auto times = c.observe_times();
  OracleOptions oo{c.numerics.h, c.numerics.dt, c.numerics.radius};
  std::vector<int> ns = c.sim.sweep_n;
  const bool sweep = !ns.empty();
  if (!sweep) ns.push_back(c.sim.n);
  std::vector<CompareRow> rows;
  for (int n : ns) {
    SimConfig sc = c.sim_config();
    sc.n = n;
    // independent streams per n in a sweep
    if (sweep) sc.seed = derive_seed(*c.sim.seed, static_cast<std::uint64_t>(n));
    const auto r = compare_at(sc, *c.walk, k, fs, times, c.sim.u, c.sim.m, oo, o.workers);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  std::vector<BiasFit> fits;
  if (sweep) fits = fit_bias(rows);
  write_sweep(art, rows, fits);
  std::vector<CheckResult> checks;
  for (const auto& r : rows)
    checks.push_back({TestReport{"compare n=" + std::to_string(r.n) + " f=" + r.function + " t=" + fmt(r.t), r.mc, r.pde,
                                 r.tolerance, r.pass},
                      true});
  ojson rep = art.header();
  ojson fj = ojson::array();
  for (const auto& f : fits) {
    ojson j;
    j["function"] = f.function;
    j["t"] = f.t;
    j["bias_c"] = f.c;
    j["monotone"] = f.monotone;
    j["pass"] = f.pass;
    fj.push_back(j);
    checks.push_back({TestReport{"bias f=" + f.function + " t=" + fmt(f.t), f.c, 0.0, 0.0, f.pass}, true});
  }
  rep["bias_fits"] = fj;
  return finish(art, rep, checks, log);
}

inline std::vector<CheckResult> exit_checks(const RunConfig& c) {
  const auto e = exit_statistics(c.sim.n, c.exit.x, c.exit.h1, c.exit.h2, c.sim.m, *c.sim.seed);
  const double n = c.sim.n;
  return {stat_check("exit_p_right", e.p_right.value, c.exit.h1 / (c.exit.h1 + c.exit.h2),
                     3 * e.p_right.std_error + 2.0 / (n * std::min(c.exit.h1, c.exit.h2))),
          stat_check("exit_mean_time", e.mean_exit_time.value, c.exit.h1 * c.exit.h2,
                     3 * e.mean_exit_time.std_error + 5.0 / n)};
}

inline int run_exit_stats(const RunConfig& c, std::ostream& log) {
  Artifacts art(c);
  return finish(art, art.header(), exit_checks(c), log);
}

inline int run_validate(const RunConfig& c, std::ostream& log) {
  Artifacts art(c);
  const auto k = c.generator();
  const double lambda = c.numerics.lambda;
  std::vector<CheckResult> checks;
  ResolventOptions ro;
  ro.tol = c.numerics.quad_tol;
  for (const auto& nf : functions_of(c)) {
    const auto proj = project_to_domain(nf.f, k, 0.1);
    checks.push_back(numeric_check("projector_residual f=" + nf.name, boundary_residual(proj.function, k), 0.0, 1e-10));
    const auto d = dissipativity_check(proj.function, k, lambda, ProbeGrid{8.0, 1601});
    checks.push_back(flag_check("dissipativity f=" + nf.name, d.holds, d.margin));
    const auto sol = resolvent(nf.f, lambda, k, ro);
    const auto id = verify_resolvent_identity(sol, nf.f, k, ResolventGrid{3.0, 1e-3});
    checks.push_back(numeric_check("resolvent_boundary_residual f=" + nf.name, id.boundary_residual, 0.0, 1e-9));
    checks.push_back(numeric_check("resolvent_pde_residual f=" + nf.name, id.pde_residual, 0.0, 1e-5));
  }
  Grid g(c.topology, c.numerics.h, c.numerics.radius);
  const auto field = evolve_semigroup(g.sample(functions_of(c).front().f), k, c.sim.t, c.numerics.dt, g);
  checks.push_back(flag_check("pde_contraction", field.contraction_ok, field.max_norm_growth));
  checks.push_back(flag_check("pde_positivity", field.positivity_ok, field.min_value));
  for (auto& e : exit_checks(c)) checks.push_back(std::move(e));
  return finish(art, art.header(), checks, log);
}

}  // namespace detail

// Runs one configured experiment and writes its artifacts under
// output.dir. Returns the process exit code.
inline int run(const RunConfig& c, const RunOptions& o, std::ostream& log) {
  try {
    switch (c.mode) {
      case Mode::simulate: return detail::run_simulate(c, o, log);
      case Mode::pde: return detail::run_pde(c, log);
      case Mode::resolvent: return detail::run_resolvent(c, log);
      case Mode::compare: return detail::run_compare(c, o, log);
      case Mode::validate: return detail::run_validate(c, log);
      case Mode::exit_stats: return detail::run_exit_stats(c, log);
    }
  } catch (const InputError& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    log << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const StatisticsError& e) {
    log << "statistical failure: " << e.what() << "\n";
    return kExitStatistical;
  }
  return kExitConfig;
}

}  // namespace gbm
