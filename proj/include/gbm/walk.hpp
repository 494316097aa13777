#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "gbm/coeffs.hpp"
#include "gbm/error.hpp"
#include "gbm/rng.hpp"
#include "gbm/state.hpp"

namespace gbm {

// State of the walk on R_{n,Delta} or G_{n,Delta}. Sites carry the integer
// k of the point k/n; on G, k >= 1 is the positive half and k <= -1 the
// negative half. The origin is `zero` on the line and 0+/0- on G.
class LatticeState {
 public:
  enum class Kind : unsigned char { site, zero, zero_plus, zero_minus, cemetery };
  enum class Tag : unsigned char { line, pos_half, neg_half, none };

  static LatticeState site(Topology topo, std::int64_t k) {
    if (k == 0) return origin(topo, Side::plus);
    return LatticeState(Kind::site, topo, k);
  }
  static LatticeState zero() { return LatticeState(Kind::zero, Topology::line, 0); }
  static LatticeState zero_plus() { return LatticeState(Kind::zero_plus, Topology::two_half, 0); }
  static LatticeState zero_minus() { return LatticeState(Kind::zero_minus, Topology::two_half, 0); }
  static LatticeState cemetery(Topology topo) { return LatticeState(Kind::cemetery, topo, 0); }
  static LatticeState origin(Topology topo, Side s) {
    if (topo == Topology::line) return zero();
    return s == Side::minus ? zero_minus() : zero_plus();
  }

  // floor(u n)/n; on G a zero floor lands on 0+.
  static LatticeState from_macroscopic(Topology topo, double u, int n) {
    if (!std::isfinite(u)) throw InvalidParameters("start must be finite");
    return site(topo, static_cast<std::int64_t>(std::floor(u * n)));
  }

  // Parse "k", "0", "0+", "0-" or "D".
  static LatticeState parse(Topology topo, const std::string& s) {
    if (s == "D") return cemetery(topo);
    if (s == "0+" || s == "0-") {
      if (topo != Topology::two_half) throw InvalidParameters("state " + s + " needs two_half");
      return s == "0+" ? zero_plus() : zero_minus();
    }
    if (s == "0") {
      if (topo != Topology::line) throw InvalidParameters("state 0 needs line topology");
      return zero();
    }
    std::size_t used = 0;
    long long k = 0;
    try {
      k = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw InvalidParameters("bad lattice state '" + s + "'");
    }
    if (used != s.size()) throw InvalidParameters("bad lattice state '" + s + "'");
    return site(topo, k);
  }

  Kind kind() const noexcept { return kind_; }
  Topology topology() const noexcept { return topo_; }
  std::int64_t k() const noexcept { return k_; }

  Tag tag() const noexcept {
    if (kind_ != Kind::site) return Tag::none;
    if (topo_ == Topology::line) return Tag::line;
    return k_ > 0 ? Tag::pos_half : Tag::neg_half;
  }

  bool is_site() const noexcept { return kind_ == Kind::site; }
  bool is_origin() const noexcept {
    return kind_ == Kind::zero || kind_ == Kind::zero_plus || kind_ == Kind::zero_minus;
  }
  bool is_cemetery() const noexcept { return kind_ == Kind::cemetery; }

  // -1, 0 or +1: the half (or half-line) the state lies on. Origins are 0.
  int sign() const noexcept { return kind_ == Kind::site ? (k_ > 0 ? 1 : -1) : 0; }

  StatePoint point(int n) const {
    switch (kind_) {
      case Kind::cemetery: return StatePoint::cemetery();
      case Kind::zero: return StatePoint::on_line(0.0);
      case Kind::zero_plus: return StatePoint::origin_plus();
      case Kind::zero_minus: return StatePoint::origin_minus();
      default: break;
    }
    const double x = static_cast<double>(k_) / n;
    if (topo_ == Topology::line) return StatePoint::on_line(x);
    return k_ > 0 ? StatePoint::plus(x) : StatePoint::minus(x);
  }

  std::string str() const {
    switch (kind_) {
      case Kind::cemetery: return "D";
      case Kind::zero: return "0";
      case Kind::zero_plus: return "0+";
      case Kind::zero_minus: return "0-";
      default: return std::to_string(k_);
    }
  }

  friend bool operator==(const LatticeState&, const LatticeState&) = default;

 private:
  LatticeState(Kind kind, Topology topo, std::int64_t k) : kind_(kind), topo_(topo), k_(k) {}
  Kind kind_;
  Topology topo_;
  std::int64_t k_;
};

struct Transition {
  LatticeState target;
  double rate;
  friend bool operator==(const Transition&, const Transition&) = default;
};

namespace detail {

struct Channels {
  std::array<Transition, 3> out{Transition{LatticeState::zero(), 0.0},
                                Transition{LatticeState::zero(), 0.0},
                                Transition{LatticeState::zero(), 0.0}};
  int count = 0;
  double total = 0.0;

  void add(LatticeState s, double r) {
    if (!(r > 0.0)) return;
    out[count++] = Transition{s, r};
    total += r;
  }

  const LatticeState& choose(double u) const {
    double acc = 0.0;
    const double target = u * total;
    for (int i = 0; i + 1 < count; ++i) {
      acc += out[i].rate;
      if (target < acc) return out[i].target;
    }
    return out[count - 1].target;
  }
};

inline Channels channels(const LatticeState& s, const WalkParams& p, int n) {
  Channels c;
  const double nn = static_cast<double>(n) * n;
  const Topology topo = s.topology();
  switch (s.kind()) {
    case LatticeState::Kind::cemetery:
      break;
    case LatticeState::Kind::site:
      for (int d : {-1, 1}) {
        const std::int64_t j = s.k() + d;
        c.add(j == 0 ? LatticeState::origin(topo, s.k() > 0 ? Side::plus : Side::minus)
                     : LatticeState::site(topo, j),
              0.5 * nn);
      }
      break;
    case LatticeState::Kind::zero: {
      const auto& q = std::get<WalkParamsLine>(p);
      c.add(LatticeState::cemetery(topo), q.A);
      c.add(LatticeState::site(topo, 1), n * q.B_plus);
      c.add(LatticeState::site(topo, -1), n * q.B_minus);
      break;
    }
    case LatticeState::Kind::zero_plus: {
      const auto& q = std::get<WalkParamsTwoHalf>(p);
      c.add(LatticeState::cemetery(topo), q.A_plus);
      c.add(LatticeState::site(topo, 1), n * q.B_plus);
      c.add(LatticeState::zero_minus(), q.C_plus);
      break;
    }
    case LatticeState::Kind::zero_minus: {
      const auto& q = std::get<WalkParamsTwoHalf>(p);
      c.add(LatticeState::cemetery(topo), q.A_minus);
      c.add(LatticeState::site(topo, -1), n * q.B_minus);
      c.add(LatticeState::zero_plus(), q.C_minus);
      break;
    }
  }
  return c;
}

}  // namespace detail

// Jump targets and rates out of `s` (zero-rate targets omitted). Interior
// sites jump to each neighbour at n^2/2; at the origin the rates are A, n B
// and C, with n B- toward -1/n on the line.
inline std::vector<Transition> step_rates(const LatticeState& s, const WalkParams& p, int n) {
  if (n < 1) throw InvalidParameters("n must be >= 1");
  if (s.topology() != topology_of(p)) throw InvalidParameters("state and params disagree on topology");
  const auto c = detail::channels(s, p, n);
  return {c.out.begin(), c.out.begin() + c.count};
}

enum class RecordMode { full_path, endpoints_only, boundary_events_only };
enum class Terminal { alive, killed, truncated };

// Which sampler runs the path. `stepping` draws every jump; `excursion`
// skips interior excursions by sampling their durations and, when an
// excursion straddles an observation time, the position there. The
// excursion sampler is exact on the unbounded lattice and never truncates.
enum class SimEngine { automatic, stepping, excursion };

inline const char* to_string(RecordMode m) {
  switch (m) {
    case RecordMode::full_path: return "full_path";
    case RecordMode::endpoints_only: return "endpoints_only";
    default: return "boundary_events_only";
  }
}

inline const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::alive: return "alive";
    case Terminal::killed: return "killed";
    default: return "truncated";
  }
}

struct SimConfig {
  int n = 100;
  double t_horizon = 1.0;
  // Macroscopic start u (mapped to floor(u n)/n) or an explicit state.
  std::variant<double, LatticeState> start = 0.0;
  std::uint64_t seed = 0;
  double L = 0.0;  // truncation radius; <= 0 picks |u| + 10 sqrt(t) + 1
  RecordMode record_mode = RecordMode::full_path;
  SimEngine engine = SimEngine::automatic;
  // Times at which boundary/endpoint records keep a snapshot of the state.
  std::vector<double> observe;
  std::size_t event_cap = 100'000'000;

  LatticeState start_state(Topology topo) const {
    if (auto* s = std::get_if<LatticeState>(&start)) {
      if (s->topology() != topo) throw InvalidParameters("start state has the wrong topology");
      return *s;
    }
    return LatticeState::from_macroscopic(topo, std::get<double>(start), n);
  }

  double radius(Topology topo) const {
    if (L > 0.0) return L;
    const LatticeState s = start_state(topo);
    const double u = s.is_site() ? std::abs(static_cast<double>(s.k())) / n : 0.0;
    return u + 10.0 * std::sqrt(t_horizon) + 1.0;
  }

  void validate(Topology topo) const {
    if (n < 1) throw InvalidParameters("n must be >= 1");
    if (!(t_horizon > 0.0) || !std::isfinite(t_horizon))
      throw InvalidParameters("t_horizon must be positive");
    const LatticeState s = start_state(topo);
    if (s.is_site() && std::abs(static_cast<double>(s.k())) / n >= radius(topo))
      throw InvalidParameters("start lies outside the truncation radius");
    for (double t : observe)
      if (!(t >= 0.0 && t <= t_horizon)) throw InvalidParameters("observation time outside [0, t]");
  }
};

struct Event {
  double t;
  LatticeState state;
  friend bool operator==(const Event&, const Event&) = default;
};

// A trajectory. In full_path mode `events` is every jump. In
// boundary_events_only mode it keeps the start, arrivals at and departures
// from the origin(s), and absorption; `snapshots` hold the state at the
// requested observation times. endpoints_only keeps the start, the
// absorption event if any, and the snapshots.
struct PathRecord {
  Topology topology = Topology::line;
  int n = 1;
  double horizon = 0.0;
  RecordMode mode = RecordMode::full_path;
  std::uint64_t seed = 0;
  std::vector<Event> events;
  std::vector<Event> snapshots;
  Terminal terminal = Terminal::alive;
  LatticeState final_state = LatticeState::zero();
  double end_time = 0.0;  // absorption or truncation time, else the horizon

  friend bool operator==(const PathRecord&, const PathRecord&) = default;
};

namespace detail {

// J with P(J >= i) = C(2i, i) / 4^i: a first passage of the discrete walk
// from 1 to 0 takes 2J + 1 steps.
inline double sample_passage_half(Engine64& g) {
  const double u = open_uniform(g);
  double q = 1.0;
  for (int i = 0; i < 256; ++i) {
    q *= (2.0 * i + 1.0) / (2.0 * i + 2.0);
    if (!(q > u)) return i;
  }
  const double lu = std::log(u);
  auto logq = [](double i) {
    return -0.5 * std::log(std::numbers::pi * i) - 1.0 / (8.0 * i) + 1.0 / (192.0 * i * i * i);
  };
  double lo = 256.0, hi = 512.0;
  while (logq(hi) > lu) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    if (mid <= lo || mid >= hi) break;
    (logq(mid) > lu ? lo : hi) = mid;
  }
  return lo;
}

// Number of jumps of the discrete walk to reach 0 from distance d.
inline double sample_passage_steps(Engine64& g, std::int64_t d) {
  double steps = 0.0;
  for (std::int64_t i = 0; i < d; ++i) steps += 2.0 * sample_passage_half(g) + 1.0;
  return steps;
}

inline double sample_gamma(Engine64& g, double shape, double scale) {
  return std::gamma_distribution<double>(shape, scale)(g);
}

// C(m, a + k) / C(m, a): the share of m-step paths k -> j (a = up count)
// that touch 0, by reflection.
inline double reflected_share(std::int64_t m, std::int64_t k, std::int64_t j) {
  const std::int64_t a = (m + j - k) / 2;
  const std::int64_t b = a + k;
  if (b > m) return 0.0;
  if (k <= 64) {
    double r = 1.0;
    for (std::int64_t i = 0; i < k; ++i)
      r *= static_cast<double>(m - a - i) / static_cast<double>(a + i + 1);
    return r;
  }
  return std::exp(std::lgamma(a + 1.0) + std::lgamma(m - a + 1.0) - std::lgamma(b + 1.0) -
                  std::lgamma(m - b + 1.0));
}

// Distance from the origin after time `mu / n^2` for a walk started at
// distance d, conditioned on not reaching the origin meanwhile.
inline std::int64_t sample_surviving_distance(Engine64& g, std::int64_t d, double mu) {
  std::poisson_distribution<std::int64_t> jumps(mu);
  for (;;) {
    const std::int64_t m = jumps(g);
    std::int64_t disp;
    if (m <= 4096) {
      disp = rademacher_sum(g, m);
    } else {
      std::binomial_distribution<std::int64_t> ups(m, 0.5);
      disp = 2 * ups(g) - m;
    }
    const std::int64_t j = d + disp;
    if (j <= 0) continue;
    if (open_uniform(g) >= reflected_share(m, d, j)) return j;
  }
}

class Recorder {
 public:
  Recorder(PathRecord& rec, std::size_t cap) : rec_(rec), cap_(cap) {}

  void push(double t, const LatticeState& s) {
    if (rec_.events.size() >= cap_) throw EventCapExceeded("event cap exceeded");
    rec_.events.push_back(Event{t, s});
  }

  // Applies the record-mode filter to a jump from -> to.
  void jump(double t, const LatticeState& from, const LatticeState& to) {
    switch (rec_.mode) {
      case RecordMode::full_path: push(t, to); break;
      case RecordMode::boundary_events_only:
        if (from.is_origin() || to.is_origin() || to.is_cemetery()) push(t, to);
        break;
      case RecordMode::endpoints_only:
        if (to.is_cemetery()) push(t, to);
        break;
    }
  }

 private:
  PathRecord& rec_;
  std::size_t cap_;
};

class Observer {
 public:
  Observer(const SimConfig& cfg, PathRecord& rec) : rec_(rec) {
    if (rec.mode != RecordMode::full_path) {
      times_ = cfg.observe;
      std::sort(times_.begin(), times_.end());
      times_.erase(std::unique(times_.begin(), times_.end()), times_.end());
    }
  }

  // Next observation time strictly below `limit`, if any.
  std::optional<double> next_before(double limit) const {
    if (pos_ < times_.size() && times_[pos_] < limit) return times_[pos_];
    return std::nullopt;
  }

  // State s is held on [.., until): snapshot every observation time before it.
  void hold(const LatticeState& s, double until) {
    while (pos_ < times_.size() && times_[pos_] < until) snap(s);
  }

  void snap(const LatticeState& s) { rec_.snapshots.push_back(Event{times_[pos_++], s}); }

  void finish(const LatticeState& s) {
    while (pos_ < times_.size()) snap(s);
  }

 private:
  PathRecord& rec_;
  std::vector<double> times_;
  std::size_t pos_ = 0;
};

inline void run_stepping(const SimConfig& cfg, const WalkParams& p, Engine64& g, PathRecord& rec,
                         LatticeState s) {
  Recorder out(rec, cfg.event_cap);
  Observer obs(cfg, rec);
  const double T = cfg.t_horizon;
  const double nn = static_cast<double>(cfg.n) * cfg.n;
  const double kmax = cfg.radius(rec.topology) * cfg.n;
  const Topology topo = rec.topology;
  std::exponential_distribution<double> unit_exp(1.0);
  double t = 0.0;
  std::uint64_t bits = 0;
  int nbits = 0;
  for (;;) {
    if (s.is_cemetery()) {
      rec.terminal = Terminal::killed;
      rec.end_time = t;
      break;
    }
    LatticeState next = s;
    double hold;
    if (s.is_site()) {
      hold = unit_exp(g) / nn;
      if (nbits == 0) {
        bits = g();
        nbits = 64;
      }
      const std::int64_t j = s.k() + ((bits & 1) ? 1 : -1);
      bits >>= 1;
      --nbits;
      next = j == 0 ? LatticeState::origin(topo, s.k() > 0 ? Side::plus : Side::minus)
                    : LatticeState::site(topo, j);
    } else {
      const Channels c = channels(s, p, cfg.n);
      if (c.count == 0) {
        // Nothing leaves this origin: it holds until the horizon.
        hold = std::numeric_limits<double>::infinity();
      } else {
        hold = unit_exp(g) / c.total;
        next = c.choose(open_uniform(g));
      }
    }
    if (!(t + hold < T)) {
      obs.hold(s, T + 1.0);
      rec.terminal = Terminal::alive;
      rec.end_time = T;
      break;
    }
    obs.hold(s, t + hold);
    t += hold;
    out.jump(t, s, next);
    s = next;
    if (s.is_site() && std::abs(static_cast<double>(s.k())) > kmax) {
      rec.terminal = Terminal::truncated;
      rec.end_time = t;
      if (rec.mode == RecordMode::boundary_events_only) out.push(t, s);
      rec.final_state = s;
      return;
    }
  }
  obs.finish(s);
  rec.final_state = s;
}

inline void run_excursion(const SimConfig& cfg, const WalkParams& p, Engine64& g, PathRecord& rec,
                          LatticeState s) {
  Recorder out(rec, cfg.event_cap);
  Observer obs(cfg, rec);
  const double T = cfg.t_horizon;
  const double nn = static_cast<double>(cfg.n) * cfg.n;
  const Topology topo = rec.topology;
  std::exponential_distribution<double> unit_exp(1.0);
  double t = 0.0;
  for (;;) {
    if (s.is_cemetery()) {
      rec.terminal = Terminal::killed;
      rec.end_time = t;
      break;
    }
    if (s.is_origin()) {
      const Channels c = channels(s, p, cfg.n);
      const double hold = c.count == 0 ? std::numeric_limits<double>::infinity()
                                       : unit_exp(g) / c.total;
      if (!(t + hold < T)) {
        obs.hold(s, T + 1.0);
        rec.terminal = Terminal::alive;
        rec.end_time = T;
        break;
      }
      obs.hold(s, t + hold);
      t += hold;
      const LatticeState next = c.choose(open_uniform(g));
      out.jump(t, s, next);
      s = next;
      continue;
    }
    // Interior excursion from distance d on one side.
    const std::int64_t d = std::abs(s.k());
    const int side = s.sign();
    const auto stop = obs.next_before(T);
    const double r = stop ? *stop : T;
    // Observation exactly now: the state is known.
    if (stop && !(r > t)) {
      obs.snap(s);
      continue;
    }
    const double hit = sample_gamma(g, sample_passage_steps(g, d), 1.0 / nn);
    if (t + hit < r) {
      t += hit;
      const LatticeState next = LatticeState::origin(topo, side > 0 ? Side::plus : Side::minus);
      out.jump(t, s, next);
      s = next;
      continue;
    }
    const std::int64_t j = sample_surviving_distance(g, d, nn * (r - t));
    s = LatticeState::site(topo, side * j);
    t = r;
    if (stop) {
      obs.snap(s);
      continue;
    }
    rec.terminal = Terminal::alive;
    rec.end_time = T;
    break;
  }
  obs.finish(s);
  rec.final_state = s;
}

}  // namespace detail

struct WindowExit {
  bool right = false;
  double steps = 0.0;
  double time = 0.0;  // macroscopic
};

// Exit of the interior walk from the open site window (lo, hi), started
// at k. From distance d to the nearer edge the next d jumps cannot reach
// either edge before the last of them, so they are drawn at once.
inline WindowExit sample_window_exit(Engine64& g, std::int64_t k, std::int64_t lo, std::int64_t hi, int n) {
  if (!(lo < k && k < hi)) throw InvalidWindow("start must lie strictly inside the window");
  double steps = 0.0;
  while (k > lo && k < hi) {
    const std::int64_t d = std::min(k - lo, hi - k);
    k += rademacher_sum(g, d);
    steps += static_cast<double>(d);
  }
  const double nn = static_cast<double>(n) * n;
  return {k >= hi, steps, detail::sample_gamma(g, steps, 1.0 / nn)};
}

// One trajectory of the walk with the given seed (used verbatim).
inline PathRecord simulate_path(const SimConfig& cfg, const WalkParams& p) {
  const Topology topo = topology_of(p);
  std::visit([](const auto& q) { q.validate(); }, p);
  cfg.validate(topo);
  PathRecord rec;
  rec.topology = topo;
  rec.n = cfg.n;
  rec.horizon = cfg.t_horizon;
  rec.mode = cfg.record_mode;
  rec.seed = cfg.seed;
  const LatticeState s0 = cfg.start_state(topo);
  rec.events.push_back(Event{0.0, s0});
  Engine64 g = make_engine(cfg.seed);
  SimEngine engine = cfg.engine;
  if (engine == SimEngine::automatic)
    engine = cfg.record_mode == RecordMode::full_path ? SimEngine::stepping : SimEngine::excursion;
  if (engine == SimEngine::excursion && cfg.record_mode == RecordMode::full_path)
    throw InvalidParameters("the excursion engine cannot record full paths");
  if (engine == SimEngine::stepping)
    detail::run_stepping(cfg, p, g, rec, s0);
  else
    detail::run_excursion(cfg, p, g, rec, s0);
  return rec;
}

// Path i of a batch runs simulate_path with seed derive_seed(cfg.seed, i).
inline PathRecord simulate_indexed(const SimConfig& cfg, const WalkParams& p, std::uint64_t i) {
  SimConfig c = cfg;
  c.seed = derive_seed(cfg.seed, i);
  return simulate_path(c, p);
}

inline constexpr std::uint64_t kFoldChunk = 1024;

// Streaming reduction over paths 0..m-1. Paths are folded into per-chunk
// accumulators (fixed chunk size) which are merged in index order, so the
// result does not depend on the worker count.
template <class Acc, class Fold, class Merge>
Acc simulate_fold(const SimConfig& cfg, const WalkParams& p, std::uint64_t m, const Acc& init,
                  Fold fold, Merge merge, unsigned workers = 1) {
  if (m < 1) throw InvalidParameters("m must be >= 1");
  const std::uint64_t chunks = (m + kFoldChunk - 1) / kFoldChunk;
  std::vector<Acc> parts(chunks, init);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks || failed.load()) return;
      try {
        const std::uint64_t hi = std::min(m, (c + 1) * kFoldChunk);
        for (std::uint64_t i = c * kFoldChunk; i < hi; ++i) fold(parts[c], simulate_indexed(cfg, p, i), i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  Acc total = init;
  for (auto& part : parts) merge(total, part);
  return total;
}

// Ensemble of m paths in index order.
inline std::vector<PathRecord> simulate_batch(const SimConfig& cfg, const WalkParams& p,
                                              std::uint64_t m, unsigned workers = 1) {
  if (m < 1) throw InvalidParameters("m must be >= 1");
  std::vector<PathRecord> out(m);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= m || failed.load()) return;
      try {
        out[i] = simulate_indexed(cfg, p, i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::uint64_t>(m, 1024))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// State at time t, right-continuous. Boundary records answer at event
// times, observation times, the horizon, and whenever the walk sits at an
// origin or the cemetery; a time inside an unrecorded excursion is an
// unsupported query. Endpoint records answer at 0, observation times, the
// horizon and after absorption.
inline LatticeState state_at(const PathRecord& rec, double t) {
  if (!(t >= 0.0 && t <= rec.horizon)) throw UnsupportedQuery("time outside the record horizon");
  if (rec.terminal == Terminal::truncated && t > rec.end_time)
    throw UnsupportedQuery("path was truncated before this time");
  if (rec.terminal != Terminal::killed && t == rec.horizon) return rec.final_state;
  if (rec.terminal == Terminal::killed && t >= rec.end_time) return rec.final_state;
  const auto& ev = rec.events;
  auto it = std::upper_bound(ev.begin(), ev.end(), t, [](double v, const Event& e) { return v < e.t; });
  // it > begin since events[0] is at time 0.
  const Event& last = *(it - 1);
  if (rec.mode == RecordMode::full_path) return last.state;
  for (const Event& s : rec.snapshots)
    if (s.t == t) return s.state;
  if (last.t == t) return last.state;
  if (rec.mode == RecordMode::boundary_events_only && (last.state.is_origin() || last.state.is_cemetery()))
    return last.state;
  throw UnsupportedQuery("state at this time was not recorded");
}

}  // namespace gbm
