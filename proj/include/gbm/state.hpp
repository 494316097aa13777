#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "gbm/error.hpp"

namespace gbm {

// The two state spaces: the real line with one origin, and two closed
// half-lines whose origins 0- and 0+ are distinct points.
enum class Topology { line, two_half };

inline const char* to_string(Topology t) { return t == Topology::line ? "line" : "two_half"; }

enum class Side : unsigned char { line, plus, minus, cemetery };

// A point of R_Delta or G_Delta. On G, `plus` carries x >= 0 and `minus`
// carries x <= 0; x = 0 on either side is the corresponding origin.
class StatePoint {
 public:
  static StatePoint on_line(double x) { return StatePoint(Side::line, x); }
  static StatePoint plus(double x) {
    if (!(x >= 0.0)) throw InvalidParameters("plus-side point needs x >= 0");
    return StatePoint(Side::plus, x);
  }
  static StatePoint minus(double x) {
    if (!(x <= 0.0)) throw InvalidParameters("minus-side point needs x <= 0");
    return StatePoint(Side::minus, x);
  }
  static StatePoint cemetery() { return StatePoint(); }
  static StatePoint origin_plus() { return StatePoint(Side::plus, 0.0); }
  static StatePoint origin_minus() { return StatePoint(Side::minus, 0.0); }

  // Point of `topo` at coordinate x; on G the side follows the sign, and
  // x = 0 is resolved by `zero_side`.
  static StatePoint at(Topology topo, double x, Side zero_side = Side::plus) {
    if (topo == Topology::line) return on_line(x);
    if (x > 0.0) return plus(x);
    if (x < 0.0) return minus(x);
    return zero_side == Side::minus ? origin_minus() : origin_plus();
  }

  Side side() const noexcept { return side_; }
  double x() const noexcept { return x_; }
  bool is_cemetery() const noexcept { return side_ == Side::cemetery; }
  bool is_origin() const noexcept { return side_ != Side::cemetery && x_ == 0.0; }

  friend bool operator==(const StatePoint& a, const StatePoint& b) {
    return a.side_ == b.side_ && (a.side_ == Side::cemetery || a.x_ == b.x_);
  }

  std::string str() const {
    switch (side_) {
      case Side::cemetery: return "D";
      case Side::plus: return x_ == 0.0 ? "0+" : std::to_string(x_);
      case Side::minus: return x_ == 0.0 ? "0-" : std::to_string(x_);
      default: return std::to_string(x_);
    }
  }

 private:
  StatePoint() : side_(Side::cemetery), x_(0.0) {}
  StatePoint(Side s, double x) : side_(s), x_(x) {
    if (!std::isfinite(x)) throw InvalidParameters("state coordinate must be finite");
  }

  Side side_;
  double x_;
};

// A real function on the state space. Every observable in this library is
// evaluated through this signature; the cemetery value is forced to zero by
// the wrappers that consume it.
using Observable = std::function<double(const StatePoint&)>;

// Lift a function of the coordinate alone (same formula on both sides).
inline Observable lift(std::function<double(double)> f) {
  return [f = std::move(f)](const StatePoint& p) { return p.is_cemetery() ? 0.0 : f(p.x()); };
}

// Lift a pair of side-wise formulas (plus side, minus side). On the line the
// plus formula is used for x >= 0.
inline Observable lift_sides(std::function<double(double)> on_plus,
                             std::function<double(double)> on_minus) {
  return [p = std::move(on_plus), m = std::move(on_minus)](const StatePoint& s) {
    switch (s.side()) {
      case Side::cemetery: return 0.0;
      case Side::plus: return p(s.x());
      case Side::minus: return m(s.x());
      default: return s.x() >= 0.0 ? p(s.x()) : m(s.x());
    }
  };
}

}  // namespace gbm
