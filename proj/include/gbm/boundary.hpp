#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <variant>

#include "gbm/coeffs.hpp"
#include "gbm/domain_function.hpp"

namespace gbm {

// Left-hand side of the line domain equation
//   c1 f(0) + c2- f'(0-) - c2+ f'(0+) + (c3/2) f''(0+).
inline double boundary_residual_line(const DomainFunction& f, const GeneratorCoeffsLine& k) {
  const BoundaryData& b = f.boundary();
  const double scale = std::max({1.0, std::abs(b.f0_plus), std::abs(b.f0_minus)});
  if (std::abs(b.f0_plus - b.f0_minus) > 1e-12 * scale)
    throw InvalidFunction("line function has f(0+) != f(0-)");
  return k.c1() * b.f0_plus + k.c2_minus() * b.f1_minus - k.c2_plus() * b.f1_plus +
         0.5 * k.c3() * b.f2_plus;
}

struct ResidualPair {
  double plus = 0.0;
  double minus = 0.0;
  double max_abs() const { return std::max(std::abs(plus), std::abs(minus)); }
};

// Left-hand sides of the two domain equations on G_Delta:
//   c1+ f(0+) + a+ (f(0+) - f(0-)) - c2+ f'(0+) + (c3+/2) f''(0+)
//   c1- f(0-) + a- (f(0-) - f(0+)) + c2- f'(0-) + (c3-/2) f''(0-)
inline ResidualPair boundary_residual_two_half(const DomainFunction& f,
                                               const GeneratorCoeffsTwoHalf& k) {
  const BoundaryData& b = f.boundary();
  const SideCoeffs& p = k.plus();
  const SideCoeffs& m = k.minus();
  return {p.c1 * b.f0_plus + p.a * (b.f0_plus - b.f0_minus) - p.c2 * b.f1_plus +
              0.5 * p.c3 * b.f2_plus,
          m.c1 * b.f0_minus + m.a * (b.f0_minus - b.f0_plus) + m.c2 * b.f1_minus +
              0.5 * m.c3 * b.f2_minus};
}

// Largest absolute boundary residual for either topology.
inline double boundary_residual(const DomainFunction& f, const GeneratorCoeffs& k) {
  if (auto* l = std::get_if<GeneratorCoeffsLine>(&k)) return std::abs(boundary_residual_line(f, *l));
  return boundary_residual_two_half(f, std::get<GeneratorCoeffsTwoHalf>(k)).max_abs();
}

}  // namespace gbm
