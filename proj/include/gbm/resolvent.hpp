#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <variant>
#include <vector>

#include "gbm/boundary.hpp"
#include "gbm/coeffs.hpp"
#include "gbm/domain_function.hpp"
#include "gbm/quadrature.hpp"

namespace gbm {

struct ResolventOptions {
  double tol = 1e-12;          // absolute quadrature target per integral
  double radius_factor = 40.0; // kernel window half-width in units of 1/sqrt(2 lambda)
};

namespace detail {

inline double kernel_rate(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidParameters("lambda must be positive");
  return std::sqrt(2.0 * lambda);
}

// Integral of w(y) g(y) over [lo, hi] within the kernel window around x,
// split at x and at 0.
template <class W>
double kernel_integral(const W& w, double x, double lo, double hi, double s, const ResolventOptions& o) {
  const double R = o.radius_factor / s;
  const double a = std::max(lo, x - R), b = std::min(hi, x + R);
  if (!(b > a)) return 0.0;
  return quad::integrate_or_throw(w, a, b, {x, 0.0}, o.tol);
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace detail

// Free resolvent f_p(x) = int (1/s) exp(-s|x - y|) g(y) dy, s = sqrt(2 lambda).
// On G the integral runs over the half-line carrying x.
inline double free_resolvent(const Observable& g, double lambda, const StatePoint& x,
                             const ResolventOptions& o = {}) {
  if (x.is_cemetery()) return 0.0;
  const double s = detail::kernel_rate(lambda);
  const double xv = x.x();
  switch (x.side()) {
    case Side::plus:
      return detail::kernel_integral(
          [&](double y) { return std::exp(-s * std::abs(xv - y)) * g(StatePoint::plus(std::max(y, 0.0))); },
          xv, 0.0, detail::kInf, s, o) / s;
    case Side::minus:
      return detail::kernel_integral(
          [&](double y) { return std::exp(-s * std::abs(xv - y)) * g(StatePoint::minus(std::min(y, 0.0))); },
          xv, -detail::kInf, 0.0, s, o) / s;
    default:
      return detail::kernel_integral(
          [&](double y) { return std::exp(-s * std::abs(xv - y)) * g(StatePoint::on_line(y)); }, xv,
          -detail::kInf, detail::kInf, s, o) / s;
  }
}

inline double free_resolvent(const Observable& g, double lambda, double x, const ResolventOptions& o = {}) {
  return free_resolvent(g, lambda, StatePoint::on_line(x), o);
}

// Values of the free part and its one-sided derivatives at the origin(s).
// First derivatives come from the differentiated kernel, second ones from
// f_p'' = 2 lambda f_p - 2 g.
struct FreeBoundary {
  double f_plus = 0.0, f_minus = 0.0;
  double d1_plus = 0.0, d1_minus = 0.0;
  double d2_plus = 0.0, d2_minus = 0.0;
};

inline FreeBoundary free_boundary(const Observable& g, double lambda, Topology topo,
                                  const ResolventOptions& o = {}) {
  const double s = detail::kernel_rate(lambda);
  FreeBoundary b;
  if (topo == Topology::line) {
    const double f0 = free_resolvent(g, lambda, StatePoint::on_line(0.0), o);
    const double d1 = detail::kernel_integral(
        [&](double y) { return (y > 0.0 ? 1.0 : y < 0.0 ? -1.0 : 0.0) * std::exp(-s * std::abs(y)) * g(StatePoint::on_line(y)); },
        0.0, -detail::kInf, detail::kInf, s, o);
    const double g0 = g(StatePoint::on_line(0.0));
    b.f_plus = b.f_minus = f0;
    b.d1_plus = b.d1_minus = d1;
    b.d2_plus = b.d2_minus = 2.0 * lambda * f0 - 2.0 * g0;
    return b;
  }
  b.f_plus = free_resolvent(g, lambda, StatePoint::origin_plus(), o);
  b.f_minus = free_resolvent(g, lambda, StatePoint::origin_minus(), o);
  b.d1_plus = detail::kernel_integral(
      [&](double y) { return std::exp(-s * y) * g(StatePoint::plus(std::max(y, 0.0))); }, 0.0, 0.0,
      detail::kInf, s, o);
  b.d1_minus = -detail::kernel_integral(
      [&](double y) { return std::exp(s * y) * g(StatePoint::minus(std::min(y, 0.0))); }, 0.0,
      -detail::kInf, 0.0, s, o);
  b.d2_plus = 2.0 * lambda * b.f_plus - 2.0 * g(StatePoint::origin_plus());
  b.d2_minus = 2.0 * lambda * b.f_minus - 2.0 * g(StatePoint::origin_minus());
  return b;
}

// R_lambda g for the general Brownian motion with coefficients k:
//   f = f_p + A exp(-s|x|)           on the line,
//   f = f_p+ + A exp(-s x) on [0+, inf),  f_p- + B exp(s x) on (-inf, 0-].
class ResolventSolution {
 public:
  ResolventSolution(Observable g, double lambda, GeneratorCoeffs k, FreeBoundary fb, double A, double B,
                    ResolventOptions o)
      : g_(std::make_shared<Observable>(std::move(g))),
        lambda_(lambda),
        s_(detail::kernel_rate(lambda)),
        k_(std::move(k)),
        fb_(fb),
        A_(A),
        B_(B),
        opts_(o) {}

  double lambda() const noexcept { return lambda_; }
  Topology topology() const noexcept { return topology_of(k_); }
  const GeneratorCoeffs& coeffs() const noexcept { return k_; }
  double A() const noexcept { return A_; }
  double B() const noexcept { return B_; }  // zero on the line
  const FreeBoundary& free_part_at_origin() const noexcept { return fb_; }
  const ResolventOptions& options() const noexcept { return opts_; }

  double free_part(const StatePoint& p) const { return free_resolvent(*g_, lambda_, p, opts_); }

  double correction(const StatePoint& p) const {
    if (p.is_cemetery()) return 0.0;
    if (p.side() == Side::minus) return B_ * std::exp(s_ * p.x());
    return A_ * std::exp(-s_ * std::abs(p.x()));
  }

  double operator()(const StatePoint& p) const {
    if (p.is_cemetery()) return 0.0;
    return free_part(p) + correction(p);
  }

  // Same solution with the correction constants replaced.
  ResolventSolution with_correction(double A, double B = 0.0) const {
    ResolventSolution r = *this;
    r.A_ = A;
    r.B_ = B;
    return r;
  }

  // Boundary data of f assembled from the free-part quadratures and the
  // exact derivatives of the correction terms.
  BoundaryData boundary() const {
    BoundaryData b;
    const double two_lambda = 2.0 * lambda_;
    if (topology() == Topology::line) {
      b.f0_plus = b.f0_minus = fb_.f_plus + A_;
      b.f1_plus = fb_.d1_plus - s_ * A_;
      b.f1_minus = fb_.d1_minus + s_ * A_;
      b.f2_plus = b.f2_minus = fb_.d2_plus + two_lambda * A_;
    } else {
      b.f0_plus = fb_.f_plus + A_;
      b.f0_minus = fb_.f_minus + B_;
      b.f1_plus = fb_.d1_plus - s_ * A_;
      b.f1_minus = fb_.d1_minus + s_ * B_;
      b.f2_plus = fb_.d2_plus + two_lambda * A_;
      b.f2_minus = fb_.d2_minus + two_lambda * B_;
    }
    return b;
  }

  Observable observable() const {
    return [self = *this](const StatePoint& p) { return self(p); };
  }

  DomainFunction domain_function() const { return DomainFunction(topology(), observable(), boundary()); }

 private:
  std::shared_ptr<Observable> g_;
  double lambda_, s_;
  GeneratorCoeffs k_;
  FreeBoundary fb_;
  double A_, B_;
  ResolventOptions opts_;
};

inline ResolventSolution resolvent_line(const Observable& g, double lambda, const GeneratorCoeffsLine& k,
                                        const ResolventOptions& o = {}) {
  const double s = detail::kernel_rate(lambda);
  const FreeBoundary fb = free_boundary(g, lambda, Topology::line, o);
  const double den = k.c1() + s * (k.c2_minus() + k.c2_plus()) + lambda * k.c3();
  if (!(den > 0.0)) throw InvalidCoefficients("resolvent denominator vanishes");
  const double num = k.c1() * fb.f_plus + (k.c2_minus() - k.c2_plus()) * fb.d1_plus + 0.5 * k.c3() * fb.d2_plus;
  return ResolventSolution(g, lambda, k, fb, -num / den, 0.0, o);
}

// The 2x2 system  alpha A - a+ B = -beta,  -a- A + gamma B = -delta  by
// Cramer's rule.
inline ResolventSolution resolvent_two_half(const Observable& g, double lambda,
                                            const GeneratorCoeffsTwoHalf& k, const ResolventOptions& o = {}) {
  const double s = detail::kernel_rate(lambda);
  const FreeBoundary fb = free_boundary(g, lambda, Topology::two_half, o);
  const SideCoeffs& p = k.plus();
  const SideCoeffs& m = k.minus();
  const double alpha = p.c1 + p.a + s * p.c2 + lambda * p.c3;
  const double gamma = m.c1 + m.a + s * m.c2 + lambda * m.c3;
  const double beta = p.c1 * fb.f_plus + p.a * (fb.f_plus - fb.f_minus) - p.c2 * fb.d1_plus + 0.5 * p.c3 * fb.d2_plus;
  const double delta = m.c1 * fb.f_minus + m.a * (fb.f_minus - fb.f_plus) + m.c2 * fb.d1_minus + 0.5 * m.c3 * fb.d2_minus;
  const double det = alpha * gamma - p.a * m.a;
  if (!(det > 0.0)) throw InvalidCoefficients("resolvent system is singular");
  const double A = (-beta * gamma - p.a * delta) / det;
  const double B = (-delta * alpha - m.a * beta) / det;
  return ResolventSolution(g, lambda, k, fb, A, B, o);
}

inline ResolventSolution resolvent(const Observable& g, double lambda, const GeneratorCoeffs& k,
                                   const ResolventOptions& o = {}) {
  if (auto* l = std::get_if<GeneratorCoeffsLine>(&k)) return resolvent_line(g, lambda, *l, o);
  return resolvent_two_half(g, lambda, std::get<GeneratorCoeffsTwoHalf>(k), o);
}

struct ResolventGrid {
  double radius = 5.0;
  double h = 1e-3;
};

struct IdentityCheck {
  double pde_residual = 0.0;
  double boundary_residual = 0.0;
};

// max |lambda f - f''/2 - g| over interior nodes (central differences with
// step grid.h, never straddling the origin) and the boundary residual of
// the solution's boundary data.
inline IdentityCheck verify_resolvent_identity(const ResolventSolution& sol, const Observable& g,
                                               const GeneratorCoeffs& k, const ResolventGrid& grid = {}) {
  IdentityCheck out;
  const double h = grid.h;
  const int nodes = static_cast<int>(std::floor(grid.radius / h));
  const double lambda = sol.lambda();
  const Topology topo = sol.topology();
  for (int side : {1, -1}) {
    for (int i = 1; i <= nodes; ++i) {
      const double x = side * i * h;
      auto pt = [&](double y) {
        if (topo == Topology::line) return StatePoint::on_line(y);
        return side > 0 ? StatePoint::plus(y) : StatePoint::minus(y);
      };
      const double f0 = sol(pt(x));
      const double d2 = (sol(pt(x + h)) - 2.0 * f0 + sol(pt(x - h))) / (h * h);
      out.pde_residual = std::max(out.pde_residual, std::abs(lambda * f0 - 0.5 * d2 - g(pt(x))));
    }
  }
  const DomainFunction f(topo, sol.observable(), sol.boundary());
  out.boundary_residual = boundary_residual(f, k);
  return out;
}

}  // namespace gbm
