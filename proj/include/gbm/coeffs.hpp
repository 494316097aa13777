#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

#include "gbm/error.hpp"
#include "gbm/state.hpp"

namespace gbm {

namespace detail {

inline void require_rate(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0)
    throw InvalidParameters(std::string(name) + " must be finite and >= 0");
}

inline void require_coeff(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0)
    throw InvalidCoefficients(std::string(name) + " must be finite and >= 0");
}

}  // namespace detail

// Boundary-condition weights of the general Brownian motion on R_Delta:
//   c1 f(0) + c2- f'(0-) - c2+ f'(0+) + (c3/2) f''(0+) = 0.
// Stored normalized to unit sum; c1 = 1 is rejected.
class GeneratorCoeffsLine {
 public:
  static GeneratorCoeffsLine make(double c1, double c2_minus, double c2_plus, double c3) {
    detail::require_coeff(c1, "c1");
    detail::require_coeff(c2_minus, "c2_minus");
    detail::require_coeff(c2_plus, "c2_plus");
    detail::require_coeff(c3, "c3");
    const double rest = c2_minus + c2_plus + c3;
    if (!(rest > 0.0))
      throw InvalidCoefficients("c1 = 1 after normalization: need c2_minus + c2_plus + c3 > 0");
    const double s = c1 + rest;
    return GeneratorCoeffsLine(c1 / s, c2_minus / s, c2_plus / s, c3 / s);
  }

  double c1() const noexcept { return c1_; }
  double c2_minus() const noexcept { return c2m_; }
  double c2_plus() const noexcept { return c2p_; }
  double c3() const noexcept { return c3_; }
  double sum() const noexcept { return c1_ + c2m_ + c2p_ + c3_; }

  friend bool operator==(const GeneratorCoeffsLine&, const GeneratorCoeffsLine&) = default;

 private:
  GeneratorCoeffsLine(double c1, double c2m, double c2p, double c3)
      : c1_(c1), c2m_(c2m), c2p_(c2p), c3_(c3) {}
  double c1_, c2m_, c2p_, c3_;
};

// Weights of one side's equation on G_Delta:
//   c1 f(0s) + a (f(0s) - f(0s')) -/+ c2 f'(0s) + (c3/2) f''(0s) = 0
// with the minus sign on the plus side.
struct SideCoeffs {
  double c1 = 0.0;
  double a = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  double sum() const noexcept { return c1 + a + c2 + c3; }
  friend bool operator==(const SideCoeffs&, const SideCoeffs&) = default;
};

class GeneratorCoeffsTwoHalf {
 public:
  static GeneratorCoeffsTwoHalf make(SideCoeffs plus, SideCoeffs minus) {
    check_side(plus, "plus");
    check_side(minus, "minus");
    return GeneratorCoeffsTwoHalf(plus, minus);
  }

  static GeneratorCoeffsTwoHalf make(double c1_plus, double c1_minus, double a_plus, double a_minus,
                                     double c2_plus, double c2_minus, double c3_plus,
                                     double c3_minus) {
    return make(SideCoeffs{c1_plus, a_plus, c2_plus, c3_plus},
                SideCoeffs{c1_minus, a_minus, c2_minus, c3_minus});
  }

  const SideCoeffs& plus() const noexcept { return plus_; }
  const SideCoeffs& minus() const noexcept { return minus_; }

  // Canonical form: each side divided by its own coefficient sum.
  GeneratorCoeffsTwoHalf normalized() const {
    auto scale = [](SideCoeffs s) {
      const double t = s.sum();
      return SideCoeffs{s.c1 / t, s.a / t, s.c2 / t, s.c3 / t};
    };
    return GeneratorCoeffsTwoHalf(scale(plus_), scale(minus_));
  }

  friend bool operator==(const GeneratorCoeffsTwoHalf&, const GeneratorCoeffsTwoHalf&) = default;

 private:
  GeneratorCoeffsTwoHalf(SideCoeffs p, SideCoeffs m) : plus_(p), minus_(m) {}

  static void check_side(const SideCoeffs& s, const std::string& side) {
    detail::require_coeff(s.c1, ("c1_" + side).c_str());
    detail::require_coeff(s.a, ("a_" + side).c_str());
    detail::require_coeff(s.c2, ("c2_" + side).c_str());
    detail::require_coeff(s.c3, ("c3_" + side).c_str());
    if (!(std::max(s.c2, s.c3) > 0.0))
      throw InvalidCoefficients("max(c2_" + side + ", c3_" + side + ") must be > 0");
  }

  SideCoeffs plus_, minus_;
};

using GeneratorCoeffs = std::variant<GeneratorCoeffsLine, GeneratorCoeffsTwoHalf>;

inline Topology topology_of(const GeneratorCoeffs& k) {
  return std::holds_alternative<GeneratorCoeffsLine>(k) ? Topology::line : Topology::two_half;
}

// Lattice rates of the boundary random walk on R_{n,Delta}. At the origin
// the walk is killed at rate A and moves to +-1/n at rates n B+ and n B-.
struct WalkParamsLine {
  double A = 0.0;
  double B_plus = 0.0;
  double B_minus = 0.0;

  void validate() const {
    detail::require_rate(A, "A");
    detail::require_rate(B_plus, "B_plus");
    detail::require_rate(B_minus, "B_minus");
  }
  friend bool operator==(const WalkParamsLine&, const WalkParamsLine&) = default;
};

// Lattice rates on G_{n,Delta}: from 0+ the walk is killed at rate A+,
// moves to 1/n at rate n B+ and switches to 0- at rate C+ (mirror at 0-).
struct WalkParamsTwoHalf {
  double A_plus = 0.0;
  double A_minus = 0.0;
  double B_plus = 0.0;
  double B_minus = 0.0;
  double C_plus = 0.0;
  double C_minus = 0.0;

  void validate() const {
    detail::require_rate(A_plus, "A_plus");
    detail::require_rate(A_minus, "A_minus");
    detail::require_rate(B_plus, "B_plus");
    detail::require_rate(B_minus, "B_minus");
    detail::require_rate(C_plus, "C_plus");
    detail::require_rate(C_minus, "C_minus");
  }
  friend bool operator==(const WalkParamsTwoHalf&, const WalkParamsTwoHalf&) = default;
};

using WalkParams = std::variant<WalkParamsLine, WalkParamsTwoHalf>;

inline Topology topology_of(const WalkParams& p) {
  return std::holds_alternative<WalkParamsLine>(p) ? Topology::line : Topology::two_half;
}

// Limit of the walk on R_{n,Delta}: (c1, c2-, c2+, c3) = (A, B-, B+, 1),
// normalized to unit sum.
inline GeneratorCoeffsLine coeffs_from_walk_line(const WalkParamsLine& p) {
  p.validate();
  return GeneratorCoeffsLine::make(p.A, p.B_minus, p.B_plus, 1.0);
}

enum class Normalization { none, per_side };

// Limit of the walk on G_{n,Delta}: c1 = A, c2 = B, c3 = 1, a = C side by side.
inline GeneratorCoeffsTwoHalf coeffs_from_walk_two_half(const WalkParamsTwoHalf& p,
                                                       Normalization norm = Normalization::none) {
  p.validate();
  auto k = GeneratorCoeffsTwoHalf::make(SideCoeffs{p.A_plus, p.C_plus, p.B_plus, 1.0},
                                        SideCoeffs{p.A_minus, p.C_minus, p.B_minus, 1.0});
  return norm == Normalization::per_side ? k.normalized() : k;
}

inline GeneratorCoeffs coeffs_from_walk(const WalkParams& p) {
  if (auto* l = std::get_if<WalkParamsLine>(&p)) return coeffs_from_walk_line(*l);
  return coeffs_from_walk_two_half(std::get<WalkParamsTwoHalf>(p));
}

}  // namespace gbm
