#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gbm/domain_function.hpp"
#include "gbm/error.hpp"
#include "gbm/walk.hpp"

namespace gbm {

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::pair<double, double> ci95{0.0, 0.0};

  static EstimateWithError make(double value, double se, std::uint64_t n) {
    return {value, se, n, {value - 1.96 * se, value + 1.96 * se}};
  }
};

// Running mean and variance; merge is the pairwise (Chan) update.
class MeanAccumulator {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  void merge(const MeanAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
  }

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ > 1 ? std::max(0.0, m2_ / static_cast<double>(n_ - 1)) : 0.0; }

  EstimateWithError estimate() const {
    if (n_ == 0) throw NoData("no samples");
    return EstimateWithError::make(mean_, std::sqrt(variance() / static_cast<double>(n_)), n_);
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct SemigroupEstimate {
  EstimateWithError estimate;
  std::uint64_t truncated = 0;
  double truncated_fraction = 0.0;
};

// f evaluated at the state of the path at time t; the cemetery counts as 0.
inline double evaluate_at(const PathRecord& rec, const Observable& f, double t) {
  const LatticeState s = state_at(rec, t);
  if (s.is_cemetery()) return 0.0;
  return f(s.point(rec.n));
}

// Several functionals E f_i(X(t_i)) folded over one stream of paths.
// Truncated paths are left out of every mean and counted.
class SemigroupAccumulator {
 public:
  struct Query {
    Observable f;
    double t;
  };

  SemigroupAccumulator() = default;
  explicit SemigroupAccumulator(std::vector<Query> q) : queries_(std::move(q)), acc_(queries_.size()) {}

  void add(const PathRecord& rec) {
    ++seen_;
    if (rec.terminal == Terminal::truncated) {
      ++truncated_;
      return;
    }
    for (std::size_t i = 0; i < queries_.size(); ++i) acc_[i].add(evaluate_at(rec, queries_[i].f, queries_[i].t));
  }

  void merge(const SemigroupAccumulator& o) {
    for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i].merge(o.acc_[i]);
    seen_ += o.seen_;
    truncated_ += o.truncated_;
  }

  std::size_t size() const noexcept { return queries_.size(); }
  std::uint64_t seen() const noexcept { return seen_; }

  SemigroupEstimate result(std::size_t i) const {
    if (acc_.at(i).count() == 0) throw NoData("every path was truncated");
    return {acc_[i].estimate(), truncated_, seen_ ? static_cast<double>(truncated_) / seen_ : 0.0};
  }

 private:
  std::vector<Query> queries_;
  std::vector<MeanAccumulator> acc_;
  std::uint64_t seen_ = 0, truncated_ = 0;
};

inline SemigroupEstimate empirical_semigroup(const std::vector<PathRecord>& ensemble, const Observable& f, double t) {
  SemigroupAccumulator acc({{f, t}});
  for (const auto& r : ensemble) acc.add(r);
  return acc.result(0);
}

inline SemigroupEstimate empirical_semigroup(const std::vector<PathRecord>& ensemble, const DomainFunction& f,
                                             double t) {
  return empirical_semigroup(ensemble, f.observable(), t);
}

inline bool alive_at(const PathRecord& rec, double t) {
  if (!(t >= 0.0 && t <= rec.horizon)) throw UnsupportedQuery("time outside the record horizon");
  return !(rec.terminal == Terminal::killed && rec.end_time <= t);
}

// Fraction of non-truncated paths still alive at t.
inline EstimateWithError survival_probability(const std::vector<PathRecord>& ensemble, double t) {
  MeanAccumulator acc;
  for (const auto& r : ensemble)
    if (r.terminal != Terminal::truncated) acc.add(alive_at(r, t) ? 1.0 : 0.0);
  if (acc.count() == 0) throw NoData("no untruncated paths");
  return acc.estimate();
}

struct ExitStatistics {
  EstimateWithError p_right;
  EstimateWithError mean_exit_time;
};

namespace detail {

inline std::int64_t grid_index(double v, int n, const char* what) {
  const double s = v * n;
  const double r = std::round(s);
  if (!std::isfinite(s) || std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s)))
    throw InvalidWindow(std::string(what) + " is not on the 1/n grid");
  return static_cast<std::int64_t>(r);
}

}  // namespace detail

// Exit of the interior walk from (x - h1, x + h2); m independent paths,
// path i seeded with derive_seed(seed, i).
inline ExitStatistics exit_statistics(int n, double x_start, double h1, double h2, std::uint64_t m, std::uint64_t seed) {
  if (n < 1) throw InvalidParameters("n must be >= 1");
  if (m < 1) throw InvalidParameters("m must be >= 1");
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw InvalidWindow("h1 and h2 must be positive");
  const std::int64_t k = detail::grid_index(x_start, n, "x_start");
  const std::int64_t lo = k - detail::grid_index(h1, n, "h1");
  const std::int64_t hi = k + detail::grid_index(h2, n, "h2");
  if (lo <= 0 && hi >= 0) throw InvalidWindow("window touches the origin");
  if (!(lo < k && k < hi)) throw InvalidWindow("window is empty on the grid");
  MeanAccumulator right, time;
  for (std::uint64_t i = 0; i < m; ++i) {
    Engine64 g = make_engine(derive_seed(seed, i));
    const WindowExit e = sample_window_exit(g, k, lo, hi, n);
    right.add(e.right ? 1.0 : 0.0);
    time.add(e.time);
  }
  return {right.estimate(), time.estimate()};
}

// P(K > x) for the Kolmogorov distribution, 100 terms of the alternating series.
inline double kolmogorov_survival(double x) {
  if (!(x > 0.0)) return 1.0;
  if (x < 0.2) return 1.0;  // the series is 1 to double precision here and converges slowly
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

struct KsResult {
  double ks_stat = 0.0;
  double p_value = 1.0;
  std::size_t count = 0;
};

// One-sample KS test against a continuous CDF.
template <class Cdf>
KsResult ks_test(std::vector<double> xs, Cdf cdf) {
  if (xs.empty()) throw NoData("no samples");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return {d, kolmogorov_survival(std::sqrt(n) * d), xs.size()};
}

inline KsResult ks_exponential(std::vector<double> xs, double rate) {
  if (!(rate > 0.0)) throw InvalidParameters("rate must be positive");
  return ks_test(std::move(xs), [rate](double x) { return x > 0.0 ? -std::expm1(-rate * x) : 0.0; });
}

// Completed holds at the origin state of kind `at`. A hold still running at
// the end of the record is censored and left out.
inline std::vector<double> holding_times(const std::vector<PathRecord>& ensemble, LatticeState::Kind at) {
  std::vector<double> out;
  for (const auto& r : ensemble) {
    if (r.mode == RecordMode::endpoints_only) throw UnsupportedQuery("endpoint records carry no holding times");
    for (std::size_t i = 0; i + 1 < r.events.size(); ++i)
      if (r.events[i].state.kind() == at) out.push_back(r.events[i + 1].t - r.events[i].t);
  }
  return out;
}

inline KsResult holding_time_ks(const std::vector<PathRecord>& ensemble, LatticeState::Kind at, const WalkParams& p,
                                int n, std::size_t min_count = 100) {
  LatticeState s = LatticeState::zero();
  const Topology topo = topology_of(p);
  switch (at) {
    case LatticeState::Kind::zero: s = LatticeState::zero(); break;
    case LatticeState::Kind::zero_plus: s = LatticeState::zero_plus(); break;
    case LatticeState::Kind::zero_minus: s = LatticeState::zero_minus(); break;
    default: throw InvalidParameters("holding times are tested at an origin state");
  }
  if (s.topology() != topo) throw InvalidParameters("origin state does not match the walk topology");
  const double rate = detail::channels(s, p, n).total;
  auto xs = holding_times(ensemble, at);
  if (xs.size() < min_count) throw TooFewObservations("only " + std::to_string(xs.size()) + " holds observed");
  return ks_exponential(std::move(xs), rate);
}

struct OccupationStats {
  EstimateWithError frac_neg, frac_pos, frac_origin;
  EstimateWithError switches_pm, switches_mp;
  std::uint64_t truncated = 0;
};

struct PathOccupation {
  double neg = 0.0, pos = 0.0, origin = 0.0;
  int pm = 0, mp = 0;
};

// Time spent on each part of the space over [0, t], as fractions of t, and
// the counts of 0+ -> 0- and 0- -> 0+ jumps. Between recorded events the
// walk stays on one side, so boundary records suffice.
inline PathOccupation path_occupation(const PathRecord& r, double t) {
  if (r.mode == RecordMode::endpoints_only) throw UnsupportedQuery("endpoint records carry no occupation data");
  if (!(t > 0.0 && t <= r.horizon)) throw UnsupportedQuery("time outside the record horizon");
  PathOccupation o;
  const double end = std::min(t, r.end_time);
  const auto& ev = r.events;
  for (std::size_t i = 0; i < ev.size() && ev[i].t <= end; ++i) {
    if (i > 0 && ev[i].t <= t) {
      const auto a = ev[i - 1].state.kind(), b = ev[i].state.kind();
      if (a == LatticeState::Kind::zero_plus && b == LatticeState::Kind::zero_minus) ++o.pm;
      if (a == LatticeState::Kind::zero_minus && b == LatticeState::Kind::zero_plus) ++o.mp;
    }
    const double until = i + 1 < ev.size() ? std::min(ev[i + 1].t, end) : end;
    const double dt = std::max(0.0, until - ev[i].t);
    const LatticeState& s = ev[i].state;
    if (s.is_cemetery()) continue;
    if (s.is_origin())
      o.origin += dt;
    else if (s.sign() < 0)
      o.neg += dt;
    else
      o.pos += dt;
  }
  o.neg /= t;
  o.pos /= t;
  o.origin /= t;
  return o;
}

class OccupationAccumulator {
 public:
  explicit OccupationAccumulator(double t = 1.0) : t_(t) {}

  void add(const PathRecord& r) {
    if (r.terminal == Terminal::truncated) {
      ++truncated_;
      return;
    }
    const PathOccupation o = path_occupation(r, t_);
    neg_.add(o.neg);
    pos_.add(o.pos);
    origin_.add(o.origin);
    pm_.add(o.pm);
    mp_.add(o.mp);
  }

  void merge(const OccupationAccumulator& o) {
    neg_.merge(o.neg_);
    pos_.merge(o.pos_);
    origin_.merge(o.origin_);
    pm_.merge(o.pm_);
    mp_.merge(o.mp_);
    truncated_ += o.truncated_;
  }

  OccupationStats result() const {
    if (neg_.count() == 0) throw NoData("every path was truncated");
    return {neg_.estimate(), pos_.estimate(), origin_.estimate(), pm_.estimate(), mp_.estimate(), truncated_};
  }

 private:
  double t_;
  MeanAccumulator neg_, pos_, origin_, pm_, mp_;
  std::uint64_t truncated_ = 0;
};

inline OccupationStats occupation_and_switch(const std::vector<PathRecord>& ensemble, double t) {
  OccupationAccumulator acc(t);
  for (const auto& r : ensemble) acc.add(r);
  return acc.result();
}

// Mean and SE of frac_neg - frac_pos computed path by path.
inline EstimateWithError occupation_difference(const std::vector<PathRecord>& ensemble, double t) {
  MeanAccumulator acc;
  for (const auto& r : ensemble) {
    if (r.terminal == Terminal::truncated) continue;
    const PathOccupation o = path_occupation(r, t);
    acc.add(o.neg - o.pos);
  }
  return acc.estimate();
}

struct TestReport {
  std::string test_name;
  double estimate = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline TestReport make_report(std::string name, double estimate, double target, double tolerance) {
  return {std::move(name), estimate, target, tolerance, std::abs(estimate - target) <= tolerance};
}

inline nlohmann::ordered_json to_json(const TestReport& r) {
  nlohmann::ordered_json j;
  j["test_name"] = r.test_name;
  j["estimate"] = r.estimate;
  j["target"] = r.target;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  return j;
}

}  // namespace gbm
