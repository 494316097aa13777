#pragma once

#include <cmath>
#include <memory>
#include <variant>

#include "gbm/boundary.hpp"
#include "gbm/coeffs.hpp"
#include "gbm/domain_function.hpp"
#include "gbm/quadrature.hpp"

namespace gbm {

// Slopes and curvatures of the cutoff polynomial
//   P(x) = a_plus x + b_plus x^2 (x >= 0),  a_minus x + b_minus x^2 (x <= 0).
// On the line b_plus == b_minus.
struct Correction {
  double a_plus = 0.0;
  double b_plus = 0.0;
  double a_minus = 0.0;
  double b_minus = 0.0;
};

struct ProjectedFunction {
  DomainFunction function;
  Correction correction;
};

namespace detail {

inline double bump_profile(double s) {
  return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0;
}

inline constexpr int kMollifierPanels = 6;

// Fixed composite rule over [lo, hi]; fixed panel count keeps the result a
// smooth function of the shift.
template <class F>
double fixed_rule(const F& f, double lo, double hi) {
  double s = 0.0;
  const double w = (hi - lo) / kMollifierPanels;
  for (int p = 0; p < kMollifierPanels; ++p) s += quad::gl16().apply(f, lo + p * w, lo + (p + 1) * w);
  return s;
}

inline double bump_mass() {
  static const double mass = fixed_rule(bump_profile, -1.0, 1.0);
  return mass;
}

// Smooth cutoff: 1 on |x| <= eps/2, 0 on |x| >= eps.
inline double cutoff(double x, double eps) {
  const double t = (std::abs(x) - 0.5 * eps) / (0.5 * eps);
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double u = std::exp(-1.0 / t), v = std::exp(-1.0 / (1.0 - t));
  return 1.0 - u / (u + v);
}

// (shifted * phi_r)(x) for a shifted profile with kinks at +-eps.
template <class Shifted>
double mollify(const Shifted& shifted, double x, double eps) {
  const double r = 0.5 * eps;
  auto integrand = [&](double y) { return bump_profile(y / r) * shifted(x - y); };
  double lo = -r, total = 0.0;
  for (double k : {x - eps, x + eps}) {
    if (k > lo && k < r) {
      total += fixed_rule(integrand, lo, k);
      lo = k;
    }
  }
  total += fixed_rule(integrand, lo, r);
  return total / (r * bump_mass());
}

// Minimum-norm solution of w . v = rhs.
template <std::size_t N>
std::array<double, N> min_norm(const std::array<double, N>& w, double rhs) {
  double nn = 0.0;
  for (double c : w) nn += c * c;
  if (!(nn > 0.0)) throw InvalidCoefficients("boundary correction is underdetermined");
  std::array<double, N> v{};
  for (std::size_t i = 0; i < N; ++i) v[i] = rhs * w[i] / nn;
  return v;
}

}  // namespace detail

// Domain projector g_eps = (shifted f) * phi_{eps/2} + P * cutoff_eps. The
// shift moves f away from the origin by eps holding f(0+-) on the collar;
// P solves the boundary equation(s) for g_eps exactly.
inline ProjectedFunction project_to_domain(const Observable& f, const GeneratorCoeffs& k,
                                           double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidParameters("eps must be positive");
  auto fp = std::make_shared<Observable>(f);

  if (auto* kl = std::get_if<GeneratorCoeffsLine>(&k)) {
    const double f0 = (*fp)(StatePoint::on_line(0.0));
    const auto v = detail::min_norm<3>({kl->c2_minus(), -kl->c2_plus(), kl->c3()}, -kl->c1() * f0);
    Correction c{v[1], v[2], v[0], v[2]};
    auto shifted = [fp, f0, eps](double x) {
      if (x >= eps) return (*fp)(StatePoint::on_line(x - eps));
      if (x <= -eps) return (*fp)(StatePoint::on_line(x + eps));
      return f0;
    };
    Observable g = [shifted, c, f0, eps](const StatePoint& p) {
      if (p.is_cemetery()) return 0.0;
      const double x = p.x();
      const double poly = x >= 0.0 ? c.a_plus * x + c.b_plus * x * x : c.a_minus * x + c.b_minus * x * x;
      const double smooth = std::abs(x) < 0.5 * eps ? f0 : detail::mollify(shifted, x, eps);
      return smooth + poly * detail::cutoff(x, eps);
    };
    BoundaryData b{f0, f0, c.a_plus, c.a_minus, 2.0 * c.b_plus, 2.0 * c.b_minus};
    return {DomainFunction(Topology::line, std::move(g), b), c};
  }

  const auto& kt = std::get<GeneratorCoeffsTwoHalf>(k);
  const double fplus = (*fp)(StatePoint::origin_plus());
  const double fminus = (*fp)(StatePoint::origin_minus());
  const SideCoeffs& p = kt.plus();
  const SideCoeffs& m = kt.minus();
  const auto vp = detail::min_norm<2>({-p.c2, p.c3}, -(p.c1 * fplus + p.a * (fplus - fminus)));
  const auto vm = detail::min_norm<2>({m.c2, m.c3}, -(m.c1 * fminus + m.a * (fminus - fplus)));
  Correction c{vp[0], vp[1], vm[0], vm[1]};
  // Each side is shifted, held constant on the collar and extended evenly.
  auto shifted_plus = [fp, fplus, eps](double x) {
    const double d = std::abs(x) - eps;
    return d > 0.0 ? (*fp)(StatePoint::plus(d)) : fplus;
  };
  auto shifted_minus = [fp, fminus, eps](double x) {
    const double d = std::abs(x) - eps;
    return d > 0.0 ? (*fp)(StatePoint::minus(-d)) : fminus;
  };
  Observable g = [shifted_plus, shifted_minus, c, fplus, fminus, eps](const StatePoint& s) {
    if (s.is_cemetery()) return 0.0;
    const double x = s.x();
    const bool minus = s.side() == Side::minus || (s.side() == Side::line && x < 0.0);
    const double poly = minus ? c.a_minus * x + c.b_minus * x * x : c.a_plus * x + c.b_plus * x * x;
    double smooth;
    if (std::abs(x) < 0.5 * eps)
      smooth = minus ? fminus : fplus;
    else
      smooth = minus ? detail::mollify(shifted_minus, x, eps) : detail::mollify(shifted_plus, x, eps);
    return smooth + poly * detail::cutoff(x, eps);
  };
  BoundaryData b{fplus, fminus, c.a_plus, c.a_minus, 2.0 * c.b_plus, 2.0 * c.b_minus};
  return {DomainFunction(Topology::two_half, std::move(g), b), c};
}

}  // namespace gbm
