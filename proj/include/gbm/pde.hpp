#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>
#include <variant>
#include <vector>

#include "gbm/coeffs.hpp"
#include "gbm/domain_function.hpp"
#include "gbm/error.hpp"
#include "gbm/resolvent.hpp"
#include "gbm/state.hpp"

namespace gbm {

// Uniform grid on [-L, L]. The line grid has one origin node; the two-half
// grid has nodes -L..0- followed by 0+..L, so 0- and 0+ are neighbours in
// the unknown vector and the coupled system stays tridiagonal.
class Grid {
 public:
  Grid(Topology topo, double h, double L) : topo_(topo), h_(h), L_(L) {
    if (!(h > 0.0) || !(L > 0.0) || !std::isfinite(h) || !std::isfinite(L))
      throw InvalidParameters("grid needs h > 0 and L > 0");
    const double r = L / h;
    N_ = static_cast<long>(std::llround(r));
    if (N_ < 2 || std::abs(r - N_) > 1e-9 * std::max(1.0, r)) throw InvalidParameters("L/h must be an integer >= 2");
  }

  Topology topology() const noexcept { return topo_; }
  double h() const noexcept { return h_; }
  double L() const noexcept { return L_; }
  long half_nodes() const noexcept { return N_; }  // nodes strictly between one origin and L
  std::size_t size() const noexcept { return topo_ == Topology::line ? 2 * N_ + 1 : 2 * N_ + 2; }

  // Index of the origin node (line) or of 0- / 0+.
  std::size_t origin() const noexcept { return N_; }
  std::size_t origin_minus() const noexcept { return N_; }
  std::size_t origin_plus() const noexcept { return N_ + 1; }

  StatePoint point(std::size_t i) const {
    if (topo_ == Topology::line) return StatePoint::on_line((static_cast<long>(i) - N_) * h_);
    if (static_cast<long>(i) <= N_) return StatePoint::minus((static_cast<long>(i) - N_) * h_);
    return StatePoint::plus((static_cast<long>(i) - N_ - 1) * h_);
  }

  // Fractional node position of p along its branch, with the index range
  // of that branch.
  struct Locus {
    double pos;
    long lo, hi;
  };
  Locus locate(const StatePoint& p) const {
    if (p.is_cemetery()) throw UnsupportedQuery("no grid node at the cemetery");
    const double x = p.x();
    if (std::abs(x) > L_ * (1 + 1e-12)) throw UnsupportedQuery("point outside the grid");
    if (topo_ == Topology::line) return {x / h_ + N_, 0, 2 * N_};
    if (p.side() == Side::minus || (p.side() == Side::line && x < 0.0)) return {x / h_ + N_, 0, N_};
    return {x / h_ + N_ + 1, N_ + 1, 2 * N_ + 1};
  }

  std::vector<double> sample(const Observable& f) const {
    std::vector<double> u(size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = f(point(i));
    u.front() = 0.0;
    u.back() = 0.0;
    return u;
  }

 private:
  Topology topo_;
  double h_, L_;
  long N_;
};

// Stored slices u(t_j, .) of the semigroup on a grid.
struct SemigroupField {
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t fallback_steps = 0;  // Crank-Nicolson steps redone by implicit Euler
  bool contraction_ok = true;
  bool positivity_ok = true;
  double max_norm_growth = 0.0;  // largest ||u_{n+1}|| - ||u_n|| seen
  double min_value = 0.0;        // smallest value seen (relevant when u(0) >= 0)
};

enum class Scheme { crank_nicolson, implicit_euler };

struct EvolveOptions {
  Scheme scheme = Scheme::crank_nicolson;
  int startup_half_steps = 2;    // implicit Euler half steps replacing the first step
  std::size_t store_stride = 1;  // keep every k-th step (the last one always)
  double positivity_tol = 1e-8;  // relative undershoot allowed when u(0) >= 0
  // Called after every (sub)step with the time and the grid values.
  std::function<void(double, const std::vector<double>&)> on_step;
};

namespace detail {

// Tridiagonal rows M u' = K u (M diagonal).
struct Operator {
  std::vector<double> M, sub, diag, sup;
};

inline Operator assemble(const Grid& g, const GeneratorCoeffs& k) {
  const std::size_t n = g.size();
  const double h = g.h();
  Operator op{std::vector<double>(n, 1.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
              std::vector<double>(n, 0.0)};
  const double c = 0.5 / (h * h);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    op.sub[i] = c;
    op.diag[i] = -2.0 * c;
    op.sup[i] = c;
  }
  // Far-field Dirichlet rows stay u' = 0 with u = 0.
  if (auto* kl = std::get_if<GeneratorCoeffsLine>(&k)) {
    const std::size_t o = g.origin();
    const double c2 = kl->c2_plus() + kl->c2_minus();
    op.M[o] = kl->c3() + c2 * h;
    op.sub[o] = kl->c2_minus() / h;
    op.sup[o] = kl->c2_plus() / h;
    op.diag[o] = -(kl->c1() + c2 / h);
  } else {
    const auto& kt = std::get<GeneratorCoeffsTwoHalf>(k);
    const SideCoeffs& p = kt.plus();
    const SideCoeffs& m = kt.minus();
    const std::size_t om = g.origin_minus(), op_ = g.origin_plus();
    op.M[om] = m.c3 + m.c2 * h;
    op.sub[om] = m.c2 / h;
    op.diag[om] = -(m.c1 + m.a + m.c2 / h);
    op.sup[om] = m.a;
    op.M[op_] = p.c3 + p.c2 * h;
    op.sub[op_] = p.a;
    op.diag[op_] = -(p.c1 + p.a + p.c2 / h);
    op.sup[op_] = p.c2 / h;
  }
  return op;
}

// (M - w K) factorized for repeated Thomas solves.
class Implicit {
 public:
  Implicit(const Operator& op, double w) : a_(op.sub.size()), b_(op.sub.size()), c_(op.sub.size()) {
    const std::size_t n = a_.size();
    for (std::size_t i = 0; i < n; ++i) {
      a_[i] = -w * op.sub[i];
      b_[i] = op.M[i] - w * op.diag[i];
      c_[i] = -w * op.sup[i];
    }
    // forward elimination coefficients
    for (std::size_t i = 1; i < n; ++i) {
      const double f = a_[i] / b_[i - 1];
      b_[i] -= f * c_[i - 1];
      a_[i] = f;
    }
  }

  void solve(std::vector<double>& r) const {
    const std::size_t n = r.size();
    for (std::size_t i = 1; i < n; ++i) r[i] -= a_[i] * r[i - 1];
    r[n - 1] /= b_[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) r[i] = (r[i] - c_[i] * r[i + 1]) / b_[i];
  }

 private:
  std::vector<double> a_, b_, c_;
};

// r = (M + w K) u
inline void explicit_part(const Operator& op, double w, const std::vector<double>& u, std::vector<double>& r) {
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = op.M[i] * u[i] + w * op.diag[i] * u[i];
    if (i > 0) v += w * op.sub[i] * u[i - 1];
    if (i + 1 < n) v += w * op.sup[i] * u[i + 1];
    r[i] = v;
  }
}

inline double sup_norm(const std::vector<double>& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace detail

// Backward evolution u_t = u_xx / 2 with the Feller-Wentzell condition at
// the origin(s) as a dynamic boundary row, from u(0) = f0 to t_end.
inline SemigroupField evolve_semigroup(const std::vector<double>& f0, const GeneratorCoeffs& k, double t_end,
                                       double dt, const Grid& grid, const EvolveOptions& opt = {}) {
  if (grid.topology() != topology_of(k)) throw InvalidParameters("grid and coefficients disagree on topology");
  if (f0.size() != grid.size()) throw InvalidParameters("initial datum does not match the grid");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw InvalidParameters("t_end must be >= 0");
  if (!(dt > 0.0)) throw InvalidParameters("dt must be positive");
  for (double v : f0)
    if (!std::isfinite(v)) throw InvalidParameters("initial datum must be finite");

  SemigroupField field{grid, {0.0}, {f0}, 0.0, 0, 0, true, true, 0.0, 0.0};
  field.values[0].front() = field.values[0].back() = 0.0;
  const std::size_t steps = t_end > 0.0 ? static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9)) : 0;
  field.steps = steps;
  if (steps == 0) return field;
  const double tau = t_end / steps;
  field.dt = tau;

  const detail::Operator op = detail::assemble(grid, k);
  const bool cn = opt.scheme == Scheme::crank_nicolson;
  const detail::Implicit cn_solver(op, 0.5 * tau);
  const detail::Implicit ie_solver(op, tau);
  const int halves = cn ? std::max(0, opt.startup_half_steps) : 0;
  const detail::Implicit startup(op, halves > 0 ? tau / halves : tau);

  std::vector<double> u = field.values[0], next(u.size());
  const double norm0 = detail::sup_norm(u);
  const bool nonneg = std::all_of(u.begin(), u.end(), [](double v) { return v >= 0.0; });
  const double floor_tol = -opt.positivity_tol * std::max(norm0, 1e-300);
  double t = 0.0;
  double norm = norm0;
  field.min_value = *std::min_element(u.begin(), u.end());

  auto accept = [&](const std::vector<double>& v) {
    const double nv = detail::sup_norm(v);
    const bool contracts = nv <= norm * (1.0 + 1e-12) + 1e-300;
    const double lo = *std::min_element(v.begin(), v.end());
    const bool positive = !nonneg || lo >= floor_tol;
    return std::pair{contracts && positive, std::pair{nv, lo}};
  };
  auto commit = [&](double t_new, std::pair<double, double> stats) {
    field.max_norm_growth = std::max(field.max_norm_growth, stats.first - norm);
    field.min_value = std::min(field.min_value, stats.second);
    norm = stats.first;
    u.swap(next);
    t = t_new;
    if (opt.on_step) opt.on_step(t, u);
  };

  for (std::size_t s = 0; s < steps; ++s) {
    const double t_target = (s + 1 == steps) ? t_end : (s + 1) * tau;
    if (s == 0 && halves > 0) {
      for (int hs = 0; hs < halves; ++hs) {
        next = u;
        detail::explicit_part(op, 0.0, u, next);
        startup.solve(next);
        const auto [ok, st] = accept(next);
        if (!ok) throw StepRejected("implicit Euler startup step violated contraction or positivity");
        commit(hs + 1 == halves ? t_target : t + tau / halves, st);
      }
    } else {
      if (cn) {
        detail::explicit_part(op, 0.5 * tau, u, next);
        cn_solver.solve(next);
      } else {
        detail::explicit_part(op, 0.0, u, next);
        ie_solver.solve(next);
      }
      auto [ok, st] = accept(next);
      if (!ok && cn) {
        ++field.fallback_steps;
        detail::explicit_part(op, 0.0, u, next);
        ie_solver.solve(next);
        std::tie(ok, st) = accept(next);
      }
      if (!ok) {
        field.contraction_ok = st.first <= norm * (1.0 + 1e-12) + 1e-300;
        field.positivity_ok = !nonneg || st.second >= floor_tol;
        throw StepRejected("time step violated contraction or positivity");
      }
      commit(t_target, st);
    }
    const bool last = s + 1 == steps;
    if (last || (opt.store_stride > 0 && (s + 1) % opt.store_stride == 0)) {
      field.times.push_back(t);
      field.values.push_back(u);
    }
  }
  return field;
}

inline SemigroupField evolve_semigroup(const DomainFunction& f0, const GeneratorCoeffs& k, double t_end, double dt,
                                       const Grid& grid, const EvolveOptions& opt = {}) {
  if (f0.topology() != grid.topology()) throw InvalidParameters("function and grid disagree on topology");
  return evolve_semigroup(grid.sample([&](const StatePoint& p) { return f0(p); }), k, t_end, dt, grid, opt);
}

// u(t, x): linear in t between stored slices, cubic Lagrange in x on the
// branch carrying x (stencil kept on that branch).
inline double semigroup_expectation(const SemigroupField& field, const StatePoint& x, double t) {
  if (x.is_cemetery()) return 0.0;
  const auto& T = field.times;
  if (!(t >= 0.0) || t > T.back() * (1 + 1e-12)) throw UnsupportedQuery("time outside the field");
  const Grid& g = field.grid;
  const auto loc = g.locate(x);
  auto spatial = [&](const std::vector<double>& v) {
    const double near = std::round(loc.pos);
    if (std::abs(loc.pos - near) < 1e-9) return v[static_cast<std::size_t>(near)];
    long i0 = static_cast<long>(std::floor(loc.pos)) - 1;
    i0 = std::clamp(i0, loc.lo, loc.hi - 3);
    double s = 0.0;
    for (long a = 0; a < 4; ++a) {
      double w = 1.0;
      for (long b = 0; b < 4; ++b)
        if (b != a) w *= (loc.pos - (i0 + b)) / static_cast<double>(a - b);
      s += w * v[i0 + a];
    }
    return s;
  };
  auto it = std::lower_bound(T.begin(), T.end(), t);
  if (it == T.end()) it = T.end() - 1;
  const std::size_t j = static_cast<std::size_t>(it - T.begin());
  if (T[j] == t || j == 0) return spatial(field.values[j]);
  const double w = (t - T[j - 1]) / (T[j] - T[j - 1]);
  return (1.0 - w) * spatial(field.values[j - 1]) + w * spatial(field.values[j]);
}

struct LaplaceOptions {
  double dt = 1e-2;
  std::vector<double> probes = {-3.0, -2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 2.0, 3.0};
  EvolveOptions evolve = {};
  ResolventOptions resolvent = {};
};

struct LaplaceResult {
  double discrepancy = 0.0;
  SemigroupField field;  // slices at t = 0 and T only
};

// max over probe nodes of |int_0^T e^{-lambda t} u(t, x) dt - R_lambda f0(x)|,
// time integral by the trapezoid rule over every (sub)step. Probes are
// snapped to grid nodes; on G both origins are included.
inline LaplaceResult laplace_check_full(const Observable& f0, const GeneratorCoeffs& k, double lambda,
                                        const Grid& grid, double T, const LaplaceOptions& o = {}) {
  if (!(lambda > 0.0)) throw InvalidParameters("lambda must be positive");
  if (!(lambda * T >= 30.0)) throw HorizonTooShort("laplace check needs lambda * T >= 30");
  const std::vector<double> u0 = grid.sample(f0);
  std::vector<double> acc(u0.size(), 0.0), prev = u0;
  double t_prev = 0.0;
  EvolveOptions eo = o.evolve;
  eo.store_stride = 0;
  eo.on_step = [&](double t, const std::vector<double>& u) {
    const double wa = 0.5 * (t - t_prev) * std::exp(-lambda * t_prev);
    const double wb = 0.5 * (t - t_prev) * std::exp(-lambda * t);
    for (std::size_t i = 0; i < u.size(); ++i) acc[i] += wa * prev[i] + wb * u[i];
    prev = u;
    t_prev = t;
  };
  SemigroupField field = evolve_semigroup(u0, k, T, o.dt, grid, eo);
  const ResolventSolution R = resolvent(f0, lambda, k, o.resolvent);
  auto nodes_for = [&](double x) {
    std::vector<std::size_t> idx;
    const long i = std::lround(x / grid.h());
    if (grid.topology() == Topology::line) {
      idx.push_back(static_cast<std::size_t>(i + grid.half_nodes()));
    } else if (i > 0) {
      idx.push_back(grid.origin_plus() + i);
    } else if (i < 0) {
      idx.push_back(grid.origin_minus() + i);
    } else {
      idx.push_back(grid.origin_minus());
      idx.push_back(grid.origin_plus());
    }
    return idx;
  };
  double worst = 0.0;
  for (double x : o.probes) {
    if (std::abs(x) >= grid.L()) continue;
    for (std::size_t i : nodes_for(x)) worst = std::max(worst, std::abs(acc[i] - R(grid.point(i))));
  }
  return {worst, std::move(field)};
}

inline double laplace_check(const Observable& f0, const GeneratorCoeffs& k, double lambda, const Grid& grid,
                            double T, const LaplaceOptions& o = {}) {
  return laplace_check_full(f0, k, lambda, grid, T, o).discrepancy;
}

// Truncation radius putting the Gaussian tail beyond it well below 1e-10
// over [0, t] for data supported near [-support, support].
inline double suggested_radius(double t_end, double support = 5.0, double h = 1e-2) {
  const double L = support + 7.0 * std::sqrt(std::max(t_end, 1e-12)) + 2.0;
  return std::ceil(L / h) * h;
}

}  // namespace gbm
