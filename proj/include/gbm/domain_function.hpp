#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "gbm/error.hpp"
#include "gbm/state.hpp"

namespace gbm {

// Values and one-sided derivatives at the origin(s). On the line
// f0_plus == f0_minus == f(0).
struct BoundaryData {
  double f0_plus = 0.0;
  double f0_minus = 0.0;
  double f1_plus = 0.0;
  double f1_minus = 0.0;
  double f2_plus = 0.0;
  double f2_minus = 0.0;
};

inline constexpr double kBoundaryStep = 1e-4;

namespace detail {

// Fourth-order one-sided stencils on samples f(j*s), j = 0..5, where the step
// s is +h (right side) or -h (left side).
inline double one_sided_first(const double* v, double s) {
  return (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * s);
}

inline double one_sided_second(const double* v, double h) {
  return (45.0 * v[0] - 154.0 * v[1] + 214.0 * v[2] - 156.0 * v[3] + 61.0 * v[4] - 10.0 * v[5]) /
         (12.0 * h * h);
}

}  // namespace detail

// Boundary data of `f` from one-sided finite differences with step h.
inline BoundaryData finite_difference_boundary(Topology topo, const Observable& f,
                                               double h = kBoundaryStep) {
  double right[6], left[6];
  for (int j = 0; j < 6; ++j) {
    if (topo == Topology::line) {
      right[j] = f(StatePoint::on_line(j * h));
      left[j] = f(StatePoint::on_line(-j * h));
    } else {
      right[j] = f(StatePoint::plus(j * h));
      left[j] = f(StatePoint::minus(-j * h));
    }
  }
  BoundaryData b;
  b.f0_plus = right[0];
  b.f0_minus = left[0];
  b.f1_plus = detail::one_sided_first(right, h);
  b.f1_minus = detail::one_sided_first(left, -h);
  b.f2_plus = detail::one_sided_second(right, h);
  b.f2_minus = detail::one_sided_second(left, h);
  return b;
}

// A function on R_Delta or G_Delta together with its boundary data at the
// origin. Evaluation at the cemetery is always zero.
class DomainFunction {
 public:
  DomainFunction(Topology topo, Observable f)
      : topo_(topo), f_(std::move(f)), boundary_(finite_difference_boundary(topo_, f_)) {}

  DomainFunction(Topology topo, Observable f, BoundaryData exact)
      : topo_(topo), f_(std::move(f)), boundary_(exact) {}

  // Attach an exact second derivative (used away from the origin).
  DomainFunction& with_second_derivative(Observable d2) {
    d2_ = std::move(d2);
    return *this;
  }

  static DomainFunction zero(Topology topo) {
    return DomainFunction(topo, [](const StatePoint&) { return 0.0; }, BoundaryData{});
  }

  double operator()(const StatePoint& p) const { return p.is_cemetery() ? 0.0 : f_(p); }

  // Coordinate evaluation; on G the side follows the sign and 0 means 0+.
  double at(double x) const { return (*this)(StatePoint::at(topo_, x)); }

  Topology topology() const noexcept { return topo_; }
  const BoundaryData& boundary() const noexcept { return boundary_; }
  const Observable& observable() const noexcept { return f_; }

  // f'' at p: the attached exact form, boundary data at the origins, or a
  // central difference elsewhere (one-sided second difference if the point
  // is within the stencil of the origin).
  double second_derivative(const StatePoint& p, double h = 1e-4) const {
    if (p.is_cemetery()) return 0.0;
    if (p.is_origin()) return p.side() == Side::minus ? boundary_.f2_minus : boundary_.f2_plus;
    if (d2_) return d2_(p);
    const double x = p.x();
    auto at_side = [&](double y) {
      switch (p.side()) {
        case Side::plus: return f_(StatePoint::plus(y));
        case Side::minus: return f_(StatePoint::minus(y));
        default: return f_(StatePoint::on_line(y));
      }
    };
    if (std::abs(x) > h)
      return (at_side(x + h) - 2.0 * at_side(x) + at_side(x - h)) / (h * h);
    // Near the origin: stencil pointing away from it, so it never crosses.
    const double step = x > 0.0 ? h : -h;
    return (at_side(x) - 2.0 * at_side(x + step) + at_side(x + 2.0 * step)) / (step * step);
  }

  // |f| < tol on a probe grid beyond `radius` (out to 4 * radius).
  bool decays(double radius = 50.0, double tol = 1e-6, int probes = 400) const {
    for (int i = 0; i <= probes; ++i) {
      const double x = radius * (1.0 + 3.0 * i / probes);
      const StatePoint right = topo_ == Topology::line ? StatePoint::on_line(x) : StatePoint::plus(x);
      const StatePoint left =
          topo_ == Topology::line ? StatePoint::on_line(-x) : StatePoint::minus(-x);
      if (std::abs((*this)(right)) >= tol || std::abs((*this)(left)) >= tol) return false;
    }
    return true;
  }

  // Largest discrepancy between the stored boundary data and one-sided
  // finite differences of the evaluator, each entry scaled by its magnitude.
  double boundary_mismatch(double h = 1e-3) const {
    const BoundaryData fd = finite_difference_boundary(topo_, f_, h);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    return std::max({rel(fd.f0_plus, boundary_.f0_plus), rel(fd.f0_minus, boundary_.f0_minus),
                     rel(fd.f1_plus, boundary_.f1_plus), rel(fd.f1_minus, boundary_.f1_minus),
                     rel(fd.f2_plus, boundary_.f2_plus), rel(fd.f2_minus, boundary_.f2_minus)});
  }

 private:
  Topology topo_;
  Observable f_;
  BoundaryData boundary_;
  Observable d2_;
};

}  // namespace gbm
