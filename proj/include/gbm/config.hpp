#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gbm/basis.hpp"
#include "gbm/coeffs.hpp"
#include "gbm/error.hpp"
#include "gbm/format.hpp"
#include "gbm/walk.hpp"

namespace gbm {

enum class Mode { simulate, pde, resolvent, compare, validate, exit_stats };

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::pde: return "pde";
    case Mode::resolvent: return "resolvent";
    case Mode::compare: return "compare";
    case Mode::validate: return "validate";
    default: return "exit-stats";
  }
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  for (Mode m : {Mode::simulate, Mode::pde, Mode::resolvent, Mode::compare, Mode::validate, Mode::exit_stats})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

inline bool is_stochastic(Mode m) { return m == Mode::simulate || m == Mode::compare || m == Mode::validate || m == Mode::exit_stats; }

inline const char* to_string(SimEngine e) {
  switch (e) {
    case SimEngine::stepping: return "stepping";
    case SimEngine::excursion: return "excursion";
    default: return "automatic";
  }
}

// Coefficients exactly as written (the generator classes normalize).
struct CoeffsSection {
  double c1 = 0.0, c2_minus = 0.0, c2_plus = 0.0, c3 = 0.0;
  SideCoeffs plus, minus;
  friend bool operator==(const CoeffsSection&, const CoeffsSection&) = default;
};

struct SimSection {
  int n = 100;
  double t = 1.0;
  double u = 0.0;
  std::uint64_t m = 1000;
  std::optional<std::uint64_t> seed;
  double L = 0.0;
  RecordMode record_mode = RecordMode::boundary_events_only;
  SimEngine engine = SimEngine::automatic;
  std::vector<double> observe;  // empty: just t
  std::vector<int> sweep_n;
  friend bool operator==(const SimSection&, const SimSection&) = default;
};

struct NumericsSection {
  double h = 0.01;
  double dt = 0.01;
  double lambda = 1.0;
  double quad_tol = 1e-12;
  double radius = 10.0;
  double laplace_horizon = 30.0;
  int store_every = 10;
  friend bool operator==(const NumericsSection&, const NumericsSection&) = default;
};

struct ExitSection {
  double x = 1.0, h1 = 0.1, h2 = 0.3;
  friend bool operator==(const ExitSection&, const ExitSection&) = default;
};

struct OutputSection {
  std::string dir = "out";
  bool paths_csv = false;
  friend bool operator==(const OutputSection&, const OutputSection&) = default;
};

struct RunConfig {
  Mode mode = Mode::validate;
  Topology topology = Topology::two_half;
  std::optional<WalkParams> walk;
  std::optional<CoeffsSection> coefficients;
  SimSection sim;
  NumericsSection numerics;
  std::vector<std::string> functions;
  ExitSection exit;
  OutputSection output;

  // Explicit coefficients if given, else the limit of the walk.
  GeneratorCoeffs generator() const {
    if (coefficients) {
      const auto& c = *coefficients;
      if (topology == Topology::line) return GeneratorCoeffsLine::make(c.c1, c.c2_minus, c.c2_plus, c.c3);
      return GeneratorCoeffsTwoHalf::make(c.plus, c.minus);
    }
    if (!walk) throw ConfigError("coefficients", "neither [walk] nor [coefficients] is given");
    return coeffs_from_walk(*walk);
  }

  SimConfig sim_config() const {
    SimConfig c;
    c.n = sim.n;
    c.t_horizon = sim.t;
    c.start = sim.u;
    c.seed = sim.seed.value_or(0);
    c.L = sim.L;
    c.record_mode = sim.record_mode;
    c.engine = sim.engine;
    c.observe = observe_times();
    return c;
  }

  std::vector<double> observe_times() const {
    std::vector<double> t = sim.observe;
    if (t.empty()) t.push_back(sim.t);
    return t;
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct Overrides {
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
};

namespace detail {

using boost::property_tree::ptree;

inline std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_real(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(key, "malformed number '" + s + "'");
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  Int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError(key, "malformed integer '" + s + "'");
  return v;
}

inline std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Reads one section, rejecting keys it does not know.
class SectionReader {
 public:
  SectionReader(const ptree* node, std::string name, std::set<std::string> known)
      : node_(node), name_(std::move(name)) {
    if (!node_) return;
    for (const auto& [k, v] : *node_) {
      if (!known.count(k)) throw ConfigError(path(k), "unknown key");
      if (!v.empty()) throw ConfigError(path(k), "nested keys are not allowed");
    }
  }

  bool present() const noexcept { return node_ != nullptr; }
  std::string path(const std::string& k) const { return name_.empty() ? k : name_ + "." + k; }

  std::optional<std::string> raw(const std::string& k) const {
    if (!node_) return std::nullopt;
    if (auto v = node_->get_optional<std::string>(k)) return trim(*v);
    return std::nullopt;
  }

  std::string required(const std::string& k) const {
    auto v = raw(k);
    if (!v) throw ConfigError(path(k), "missing mandatory key");
    return *v;
  }

  void real(const std::string& k, double& out) const {
    if (auto v = raw(k)) out = parse_real(path(k), *v);
  }

  double rate(const std::string& k) const {
    const double v = parse_real(path(k), required(k));
    if (v < 0.0) throw ConfigError(path(k), "must be nonnegative");
    return v;
  }

  double coeff(const std::string& k) const {
    double v = 0.0;
    real(k, v);
    if (v < 0.0) throw ConfigError(path(k), "must be nonnegative");
    return v;
  }

 private:
  const ptree* node_;
  std::string name_;
};

inline const ptree* section(const ptree& root, const std::string& name) {
  auto it = root.find(name);
  return it == root.not_found() ? nullptr : &it->second;
}

inline void positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(key, "must be positive");
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text, const Overrides& ov = {}) {
  using namespace detail;
  ptree root;
  try {
    std::istringstream is(text);
    boost::property_tree::ini_parser::read_ini(is, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("", std::string("malformed configuration: ") + e.message() + " (line " +
                              std::to_string(e.line()) + ")");
  }
  static const std::set<std::string> sections{"walk", "coefficients", "sim", "numerics", "observable", "exit", "output"};
  for (const auto& [k, v] : root) {
    if (sections.count(k)) continue;
    if (k != "mode" && k != "topology") throw ConfigError(k, v.empty() ? "unknown key" : "unknown section");
    if (!v.empty()) throw ConfigError(k, "is a key, not a section");
  }

  RunConfig c;
  std::string mode = ov.mode ? *ov.mode : trim(root.get<std::string>("mode", ""));
  if (mode.empty()) throw ConfigError("mode", "missing mandatory key");
  auto m = parse_mode(mode);
  if (!m) throw ConfigError("mode", "unknown mode '" + mode + "'");
  c.mode = *m;
  const std::string topo = trim(root.get<std::string>("topology", ""));
  if (topo.empty()) throw ConfigError("topology", "missing mandatory key");
  if (topo == "line")
    c.topology = Topology::line;
  else if (topo == "two_half")
    c.topology = Topology::two_half;
  else
    throw ConfigError("topology", "must be line or two_half");
  const bool line = c.topology == Topology::line;

  const SectionReader walk(section(root, "walk"), "walk",
                           line ? std::set<std::string>{"a", "b_plus", "b_minus"}
                                : std::set<std::string>{"a_plus", "a_minus", "b_plus", "b_minus", "c_plus", "c_minus"});
  if (walk.present()) {
    if (line)
      c.walk = WalkParamsLine{walk.rate("a"), walk.rate("b_plus"), walk.rate("b_minus")};
    else
      c.walk = WalkParamsTwoHalf{walk.rate("a_plus"),  walk.rate("a_minus"), walk.rate("b_plus"),
                                 walk.rate("b_minus"), walk.rate("c_plus"),  walk.rate("c_minus")};
  }

  const SectionReader co(section(root, "coefficients"), "coefficients",
                         line ? std::set<std::string>{"c1", "c2_minus", "c2_plus", "c3"}
                              : std::set<std::string>{"c1_plus", "c1_minus", "a_plus", "a_minus", "c2_plus",
                                                      "c2_minus", "c3_plus", "c3_minus"});
  if (co.present()) {
    CoeffsSection k;
    if (line) {
      k.c1 = co.coeff("c1");
      k.c2_minus = co.coeff("c2_minus");
      k.c2_plus = co.coeff("c2_plus");
      k.c3 = co.coeff("c3");
    } else {
      k.plus = SideCoeffs{co.coeff("c1_plus"), co.coeff("a_plus"), co.coeff("c2_plus"), co.coeff("c3_plus")};
      k.minus = SideCoeffs{co.coeff("c1_minus"), co.coeff("a_minus"), co.coeff("c2_minus"), co.coeff("c3_minus")};
    }
    c.coefficients = k;
  }

  const SectionReader sim(section(root, "sim"), "sim",
                          {"n", "t", "u", "m", "seed", "L", "record_mode", "engine", "observe", "sweep_n"});
  if (auto v = sim.raw("n")) c.sim.n = parse_int<int>("sim.n", *v);
  sim.real("t", c.sim.t);
  sim.real("u", c.sim.u);
  if (auto v = sim.raw("m")) c.sim.m = parse_int<std::uint64_t>("sim.m", *v);
  if (auto v = sim.raw("seed")) c.sim.seed = parse_int<std::uint64_t>("sim.seed", *v);
  if (ov.seed) c.sim.seed = ov.seed;
  sim.real("L", c.sim.L);
  if (auto v = sim.raw("record_mode")) {
    bool ok = false;
    for (RecordMode r : {RecordMode::full_path, RecordMode::endpoints_only, RecordMode::boundary_events_only})
      if (*v == to_string(r)) c.sim.record_mode = r, ok = true;
    if (!ok) throw ConfigError("sim.record_mode", "unknown record mode '" + *v + "'");
  }
  if (auto v = sim.raw("engine")) {
    bool ok = false;
    for (SimEngine e : {SimEngine::automatic, SimEngine::stepping, SimEngine::excursion})
      if (*v == to_string(e)) c.sim.engine = e, ok = true;
    if (!ok) throw ConfigError("sim.engine", "unknown engine '" + *v + "'");
  }
  if (auto v = sim.raw("observe"))
    for (const auto& s : split_list(*v)) c.sim.observe.push_back(parse_real("sim.observe", s));
  if (auto v = sim.raw("sweep_n"))
    for (const auto& s : split_list(*v)) c.sim.sweep_n.push_back(parse_int<int>("sim.sweep_n", s));
  if (c.sim.n < 1) throw ConfigError("sim.n", "must be >= 1");
  positive("sim.t", c.sim.t);
  if (c.sim.m < 1) throw ConfigError("sim.m", "must be >= 1");
  if (c.sim.L < 0.0) throw ConfigError("sim.L", "must be nonnegative");
  for (double t : c.sim.observe)
    if (!(t >= 0.0 && t <= c.sim.t)) throw ConfigError("sim.observe", "times must lie in [0, t]");
  for (int n : c.sim.sweep_n)
    if (n < 1) throw ConfigError("sim.sweep_n", "entries must be >= 1");

  const SectionReader num(section(root, "numerics"), "numerics",
                          {"h", "dt", "lambda", "quad_tol", "radius", "laplace_horizon", "store_every"});
  num.real("h", c.numerics.h);
  num.real("dt", c.numerics.dt);
  num.real("lambda", c.numerics.lambda);
  num.real("quad_tol", c.numerics.quad_tol);
  num.real("radius", c.numerics.radius);
  num.real("laplace_horizon", c.numerics.laplace_horizon);
  if (auto v = num.raw("store_every")) c.numerics.store_every = parse_int<int>("numerics.store_every", *v);
  for (auto [k, v] : {std::pair{"numerics.h", c.numerics.h}, {"numerics.dt", c.numerics.dt}, {"numerics.lambda", c.numerics.lambda},
                      {"numerics.quad_tol", c.numerics.quad_tol}, {"numerics.radius", c.numerics.radius},
                      {"numerics.laplace_horizon", c.numerics.laplace_horizon}})
    positive(k, v);
  {
    const double cells = c.numerics.radius / c.numerics.h;
    if (std::abs(cells - std::round(cells)) > 1e-9 * cells || cells < 2)
      throw ConfigError("numerics.radius", "must be an integer multiple (>= 2) of numerics.h");
  }
  if (c.numerics.store_every < 1) throw ConfigError("numerics.store_every", "must be >= 1");

  const SectionReader obs(section(root, "observable"), "observable", {"functions"});
  if (auto v = obs.raw("functions")) c.functions = split_list(*v);
  if (c.functions.empty())
    for (const auto& name : basis_names())
      if (!(line && name == "side")) c.functions.push_back(name);
  for (const auto& name : c.functions) {
    try {
      basis_function(name, c.topology);
    } catch (const InvalidParameters& e) {
      throw ConfigError("observable.functions", e.what());
    }
  }

  const SectionReader ex(section(root, "exit"), "exit", {"x", "h1", "h2"});
  ex.real("x", c.exit.x);
  ex.real("h1", c.exit.h1);
  ex.real("h2", c.exit.h2);
  positive("exit.h1", c.exit.h1);
  positive("exit.h2", c.exit.h2);

  const SectionReader out(section(root, "output"), "output", {"dir", "paths_csv"});
  if (auto v = out.raw("dir")) c.output.dir = *v;
  if (auto v = out.raw("paths_csv")) {
    if (*v == "true")
      c.output.paths_csv = true;
    else if (*v == "false")
      c.output.paths_csv = false;
    else
      throw ConfigError("output.paths_csv", "must be true or false");
  }

  // Mode requirements.
  if (is_stochastic(c.mode) && !c.sim.seed) throw ConfigError("sim.seed", "missing mandatory key");
  if ((c.mode == Mode::simulate || c.mode == Mode::compare) && !c.walk)
    throw ConfigError("walk", "section required for mode " + std::string(to_string(c.mode)));
  if ((c.mode == Mode::pde || c.mode == Mode::resolvent || c.mode == Mode::validate) && !c.walk && !c.coefficients)
    throw ConfigError("coefficients", "mode " + std::string(to_string(c.mode)) + " needs [walk] or [coefficients]");
  if (c.mode == Mode::exit_stats && !ex.present()) throw ConfigError("exit", "section required for mode exit-stats");
  if (c.walk || c.coefficients) {
    try {
      c.generator();
    } catch (const InvalidCoefficients& e) {
      throw ConfigError(c.coefficients ? "coefficients" : "walk", e.what());
    }
  }
  if (c.walk && (c.mode == Mode::simulate || c.mode == Mode::compare)) {
    try {
      c.sim_config().validate(c.topology);
    } catch (const InvalidParameters& e) {
      throw ConfigError("sim", e.what());
    }
  }
  return c;
}

// Canonical text form with every default spelled out.
inline std::string serialize(const RunConfig& c) {
  std::ostringstream os;
  auto list = [](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      if constexpr (std::is_same_v<std::decay_t<decltype(v[i])>, double>)
        s += fmt(v[i]);
      else if constexpr (std::is_same_v<std::decay_t<decltype(v[i])>, int>)
        s += std::to_string(v[i]);
      else
        s += v[i];
    }
    return s;
  };
  os << "mode = " << to_string(c.mode) << "\n";
  os << "topology = " << to_string(c.topology) << "\n";
  if (c.walk) {
    os << "\n[walk]\n";
    if (auto* l = std::get_if<WalkParamsLine>(&*c.walk)) {
      os << "a = " << fmt(l->A) << "\nb_plus = " << fmt(l->B_plus) << "\nb_minus = " << fmt(l->B_minus) << "\n";
    } else {
      const auto& p = std::get<WalkParamsTwoHalf>(*c.walk);
      os << "a_plus = " << fmt(p.A_plus) << "\na_minus = " << fmt(p.A_minus) << "\nb_plus = " << fmt(p.B_plus)
         << "\nb_minus = " << fmt(p.B_minus) << "\nc_plus = " << fmt(p.C_plus) << "\nc_minus = " << fmt(p.C_minus) << "\n";
    }
  }
  if (c.coefficients) {
    const auto& k = *c.coefficients;
    os << "\n[coefficients]\n";
    if (c.topology == Topology::line)
      os << "c1 = " << fmt(k.c1) << "\nc2_minus = " << fmt(k.c2_minus) << "\nc2_plus = " << fmt(k.c2_plus)
         << "\nc3 = " << fmt(k.c3) << "\n";
    else
      os << "c1_plus = " << fmt(k.plus.c1) << "\nc1_minus = " << fmt(k.minus.c1) << "\na_plus = " << fmt(k.plus.a)
         << "\na_minus = " << fmt(k.minus.a) << "\nc2_plus = " << fmt(k.plus.c2) << "\nc2_minus = " << fmt(k.minus.c2)
         << "\nc3_plus = " << fmt(k.plus.c3) << "\nc3_minus = " << fmt(k.minus.c3) << "\n";
  }
  os << "\n[sim]\nn = " << c.sim.n << "\nt = " << fmt(c.sim.t) << "\nu = " << fmt(c.sim.u) << "\nm = " << c.sim.m << "\n";
  if (c.sim.seed) os << "seed = " << *c.sim.seed << "\n";
  os << "L = " << fmt(c.sim.L) << "\nrecord_mode = " << to_string(c.sim.record_mode)
     << "\nengine = " << to_string(c.sim.engine) << "\n";
  if (!c.sim.observe.empty()) os << "observe = " << list(c.sim.observe) << "\n";
  if (!c.sim.sweep_n.empty()) os << "sweep_n = " << list(c.sim.sweep_n) << "\n";
  os << "\n[numerics]\nh = " << fmt(c.numerics.h) << "\ndt = " << fmt(c.numerics.dt) << "\nlambda = "
     << fmt(c.numerics.lambda) << "\nquad_tol = " << fmt(c.numerics.quad_tol) << "\nradius = " << fmt(c.numerics.radius)
     << "\nlaplace_horizon = " << fmt(c.numerics.laplace_horizon) << "\nstore_every = " << c.numerics.store_every << "\n";
  os << "\n[observable]\nfunctions = " << list(c.functions) << "\n";
  os << "\n[exit]\nx = " << fmt(c.exit.x) << "\nh1 = " << fmt(c.exit.h1) << "\nh2 = " << fmt(c.exit.h2) << "\n";
  os << "\n[output]\ndir = " << c.output.dir << "\npaths_csv = " << (c.output.paths_csv ? "true" : "false") << "\n";
  return os.str();
}

// Hash of the canonical form with the output directory blanked, so the
// same run written to two places carries the same hash.
inline std::string config_hash(const RunConfig& c) {
  RunConfig k = c;
  k.output.dir.clear();
  return hex64(fnv1a(serialize(k)));
}

}  // namespace gbm
