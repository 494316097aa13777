#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gbm/pde.hpp"
#include "gbm/stats.hpp"

namespace gbm {

struct NamedFunction {
  std::string name;
  Observable f;
};

// Macroscopic start point matching LatticeState::from_macroscopic at u = 0.
inline StatePoint start_point(Topology topo, double u) {
  if (topo == Topology::line) return StatePoint::on_line(u);
  return u < 0.0 ? StatePoint::minus(u) : StatePoint::plus(u);
}

struct OracleOptions {
  double h = 0.01;
  double dt = 0.01;
  double radius = 10.0;
};

// PDE oracle E_u f(X_t): out[i][j] for function i at time j.
inline std::vector<std::vector<double>> pde_values(const GeneratorCoeffs& k, const std::vector<NamedFunction>& fs,
                                                   const std::vector<double>& times, double u,
                                                   const OracleOptions& o = {}) {
  const Topology topo = topology_of(k);
  Grid g(topo, o.h, o.radius);
  double t_end = 0.0;
  for (double t : times) t_end = std::max(t_end, t);
  const StatePoint x = start_point(topo, u);
  std::vector<std::vector<double>> out;
  for (const auto& nf : fs) {
    const auto field = evolve_semigroup(g.sample(nf.f), k, t_end, o.dt, g);
    std::vector<double> row;
    for (double t : times) row.push_back(semigroup_expectation(field, x, t));
    out.push_back(std::move(row));
  }
  return out;
}

struct CompareRow {
  int n = 0;
  std::string function;
  double t = 0.0;
  double mc = 0.0, se = 0.0, pde = 0.0;
  double diff = 0.0;       // mc - pde
  double tolerance = 0.0;
  bool pass = false;
  std::uint64_t truncated = 0;
};

// Monte Carlo E f(X_n(t)) for every (function, time) from one stream of m
// boundary-event paths.
inline std::vector<std::vector<SemigroupEstimate>> mc_values(const SimConfig& base, const WalkParams& p,
                                                             const std::vector<NamedFunction>& fs,
                                                             const std::vector<double>& times, std::uint64_t m,
                                                             unsigned workers) {
  SimConfig cfg = base;
  cfg.record_mode = RecordMode::boundary_events_only;
  cfg.observe = times;
  std::vector<SemigroupAccumulator::Query> q;
  for (const auto& nf : fs)
    for (double t : times) q.push_back({nf.f, t});
  const auto acc = simulate_fold(
      cfg, p, m, SemigroupAccumulator(q), [](SemigroupAccumulator& a, const PathRecord& r, std::uint64_t) { a.add(r); },
      [](SemigroupAccumulator& a, const SemigroupAccumulator& b) { a.merge(b); }, workers);
  std::vector<std::vector<SemigroupEstimate>> out(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = 0; j < times.size(); ++j) out[i].push_back(acc.result(i * times.size() + j));
  return out;
}

// One comparison at a single n: |mc - pde| <= 3 SE + 2/n.
inline std::vector<CompareRow> compare_at(const SimConfig& base, const WalkParams& p, const GeneratorCoeffs& k,
                                          const std::vector<NamedFunction>& fs, const std::vector<double>& times,
                                          double u, std::uint64_t m, const OracleOptions& o, unsigned workers) {
  const auto exact = pde_values(k, fs, times, u, o);
  const auto mc = mc_values(base, p, fs, times, m, workers);
  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = 0; j < times.size(); ++j) {
      CompareRow r;
      r.n = base.n;
      r.function = fs[i].name;
      r.t = times[j];
      r.mc = mc[i][j].estimate.value;
      r.se = mc[i][j].estimate.std_error;
      r.pde = exact[i][j];
      r.diff = r.mc - r.pde;
      r.tolerance = 3.0 * r.se + 2.0 / base.n;
      r.pass = std::abs(r.diff) <= r.tolerance;
      r.truncated = mc[i][j].truncated;
      rows.push_back(r);
    }
  return rows;
}

struct BiasFit {
  std::string function;
  double t = 0.0;
  double c = 0.0;  // bias(n) = |c| / n
  bool monotone = true;
  bool pass = false;
};

// Fits diff(n) ~ c/n by weighted least squares (weights 1/SE^2) for every
// (function, t) and rechecks each row against 3 SE + |c|/n.
inline std::vector<BiasFit> fit_bias(std::vector<CompareRow>& rows) {
  std::vector<BiasFit> fits;
  for (auto& r : rows) {
    bool seen = false;
    for (const auto& f : fits) seen = seen || (f.function == r.function && f.t == r.t);
    if (seen) continue;
    double num = 0.0, den = 0.0;
    std::vector<CompareRow*> group;
    for (auto& s : rows)
      if (s.function == r.function && s.t == r.t) group.push_back(&s);
    for (auto* s : group) {
      const double w = 1.0 / std::max(s->se * s->se, 1e-300);
      num += w * s->diff / s->n;
      den += w / (static_cast<double>(s->n) * s->n);
    }
    BiasFit f{r.function, r.t, den > 0.0 ? num / den : 0.0, true, true};
    std::sort(group.begin(), group.end(), [](auto* a, auto* b) { return a->n < b->n; });
    double prev = std::numeric_limits<double>::infinity();
    for (auto* s : group) {
      const double bias = std::abs(f.c) / s->n;
      f.monotone = f.monotone && bias <= prev;
      prev = bias;
      s->tolerance = 3.0 * s->se + bias;
      s->pass = std::abs(s->diff) <= s->tolerance;
      f.pass = f.pass && s->pass;
    }
    f.pass = f.pass && f.monotone;
    fits.push_back(f);
  }
  return fits;
}

}  // namespace gbm
