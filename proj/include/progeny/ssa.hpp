#pragma once

// Exact event-driven simulation of the chain (z, x):
//   (z, x) -> (z + 1, x + 1)  at rate z b(x)
//   (z, x) -> (z - 1, x)      at rate z d(x)
// States with z = 0 are absorbing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "progeny/error.hpp"
#include "progeny/models.hpp"
#include "progeny/rng.hpp"

namespace progeny::ssa {

using models::RateModel;

struct PopState {
  std::int64_t z = 1;  // population size
  std::int64_t x = 1;  // total progeny
  double t = 0.0;

  friend bool operator==(const PopState&, const PopState&) = default;
};

enum class EventKind : std::uint8_t { birth, death };

struct Event {
  double t;
  EventKind kind;
  std::int64_t z_after;
  std::int64_t x_after;

  friend bool operator==(const Event&, const Event&) = default;
};

struct SeedPath {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate = 0;
};

struct Caps {
  std::uint64_t max_events = 100'000'000;
  double max_time = std::numeric_limits<double>::infinity();
};

enum class Outcome { absorbed, event_cap, time_cap };

// Raised when a rate evaluation fails mid-path; carries the state reached.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& what, PopState state) : Error(what), state_(state) {}
  const PopState& state() const noexcept { return state_; }

 private:
  PopState state_;
};

struct Trajectory {
  PopState initial;
  std::vector<Event> events;
  bool absorbed = false;
  bool truncated = false;
  // Time up to which the path is known: infinity when absorbed, the time cap
  // or the last event time when truncated.
  double known_until = 0.0;
  SeedPath seed_path;

  PopState final_state() const {
    if (events.empty()) return initial;
    const auto& e = events.back();
    return {e.z_after, e.x_after, e.t};
  }
};

inline void check_initial_state(const PopState& init) {
  if (init.z < 1) throw DomainError("initial population must be at least 1");
  if (init.x < std::max<std::int64_t>(1, init.z))
    throw DomainError("initial total progeny must be at least max(1, z)");
  if (!(init.t >= 0.0) || !std::isfinite(init.t)) throw DomainError("initial time must be finite and >= 0");
}

// Runs one path, reporting to a sink with
//   on_start(const PopState&), on_event(const Event&), on_finish(Outcome, double known_until).
template <class Sink>
Outcome simulate(const RateModel& model, const PopState& init, random::Xoshiro256& rng, const Caps& caps,
                 Sink& sink) {
  check_initial_state(init);
  if (caps.max_events < 1 || !(caps.max_time > 0.0)) throw DomainError("simulation caps must be positive");
  std::int64_t z = init.z, x = init.x;
  double t = init.t;
  sink.on_start(init);

  double b = 0.0, d = 0.0;
  auto refresh_rates = [&] {
    try {
      b = models::birth_rate(model, static_cast<double>(x));
      d = models::death_rate(model, static_cast<double>(x));
    } catch (const Error& e) {
      throw SimulationError(std::string(e.what()) + " (state z=" + std::to_string(z) + ", x=" +
                                std::to_string(x) + ", t=" + std::to_string(t) + ")",
                            {z, x, t});
    }
    if (!(b + d > 0.0))
      throw SimulationError("birth and death rates both vanish at x=" + std::to_string(x), {z, x, t});
  };
  refresh_rates();

  for (std::uint64_t n = 0; n < caps.max_events; ++n) {
    const double total = static_cast<double>(z) * (b + d);
    const double dt = rng.exponential(total);
    if (t + dt > caps.max_time) {
      sink.on_finish(Outcome::time_cap, caps.max_time);
      return Outcome::time_cap;
    }
    t += dt;
    const bool birth = rng.uniform() * (b + d) < b;
    if (birth) {
      ++z;
      ++x;
    } else {
      --z;
    }
    sink.on_event(Event{t, birth ? EventKind::birth : EventKind::death, z, x});
    if (z == 0) {
      sink.on_finish(Outcome::absorbed, std::numeric_limits<double>::infinity());
      return Outcome::absorbed;
    }
    if (birth) refresh_rates();
  }
  sink.on_finish(Outcome::event_cap, t);
  return Outcome::event_cap;
}

namespace detail {

struct TrajectoryRecorder {
  Trajectory* traj;
  void on_start(const PopState& s) { traj->initial = s; }
  void on_event(const Event& e) { traj->events.push_back(e); }
  void on_finish(Outcome o, double known_until) {
    traj->absorbed = o == Outcome::absorbed;
    traj->truncated = !traj->absorbed;
    traj->known_until = known_until;
  }
};

}  // namespace detail

// Simulates and stores one full path.
inline Trajectory simulate_trajectory(const RateModel& model, const PopState& init, SeedPath seed,
                                      const Caps& caps = {}) {
  Trajectory traj;
  traj.seed_path = seed;
  auto rng = random::Xoshiro256::for_stream(seed.master_seed, seed.replicate);
  detail::TrajectoryRecorder rec{&traj};
  simulate(model, init, rng, caps, rec);
  return traj;
}

struct PathStats {
  std::int64_t z_max = 0;
  double t_first_max = 0.0;      // first time z reaches z_max
  std::optional<double> t_ext;   // absent when truncated
  std::int64_t x_final = 0;      // total progeny at absorption (or at truncation)
  double t_last_birth = 0.0;     // 0 if no birth occurred
  // last time the path entered level eps (t = 0 counts for the initial
  // level); absent when eps is never visited.
  std::vector<std::pair<std::int64_t, std::optional<double>>> last_visit;
  bool truncated = false;

  std::optional<double> last_visit_of(std::int64_t eps) const {
    for (const auto& [e, t] : last_visit)
      if (e == eps) return t;
    return std::nullopt;
  }
};

// Streaming accumulator for PathStats.
class StatsTracker {
 public:
  explicit StatsTracker(std::span<const std::int64_t> eps_list) {
    for (auto e : eps_list) {
      if (e < 1) throw DomainError("eps levels must be positive integers");
      stats_.last_visit.emplace_back(e, std::nullopt);
    }
  }

  void on_start(const PopState& s) {
    stats_.z_max = s.z;
    stats_.t_first_max = s.t;
    stats_.x_final = s.x;
    stats_.t_last_birth = 0.0;
    stats_.t_ext.reset();
    last_t_ = s.t;
    for (auto& [e, t] : stats_.last_visit) t = (s.z == e) ? std::optional<double>(s.t) : std::nullopt;
  }

  void on_event(const Event& ev) {
    if (ev.kind == EventKind::birth) stats_.t_last_birth = ev.t;
    if (ev.z_after > stats_.z_max) {
      stats_.z_max = ev.z_after;
      stats_.t_first_max = ev.t;
    }
    stats_.x_final = ev.x_after;
    for (auto& [e, t] : stats_.last_visit)
      if (ev.z_after == e) t = ev.t;
    last_t_ = ev.t;
  }

  void on_finish(Outcome o, double) {
    stats_.truncated = o != Outcome::absorbed;
    if (!stats_.truncated) stats_.t_ext = last_t_;
  }

  const PathStats& stats() const { return stats_; }

 private:
  PathStats stats_;
  double last_t_ = 0.0;
};

// Samples (z, x) as right-continuous step functions at grid times. Entries
// beyond the known part of a truncated path are NaN.
class GridSampler {
 public:
  explicit GridSampler(std::span<const double> grid) : grid_(grid), z_(grid.size()), x_(grid.size()) {}

  void on_start(const PopState& s) {
    next_ = 0;
    z_cur_ = s.z;
    x_cur_ = s.x;
    while (next_ < grid_.size() && grid_[next_] < s.t) {
      z_[next_] = x_[next_] = std::nan("");
      ++next_;
    }
  }

  void on_event(const Event& e) {
    while (next_ < grid_.size() && grid_[next_] < e.t) record();
    z_cur_ = e.z_after;
    x_cur_ = e.x_after;
  }

  void on_finish(Outcome, double known_until) {
    while (next_ < grid_.size() && grid_[next_] <= known_until) record();
    for (; next_ < grid_.size(); ++next_) z_[next_] = x_[next_] = std::nan("");
  }

  const std::vector<double>& z() const { return z_; }
  const std::vector<double>& x() const { return x_; }

 private:
  void record() {
    z_[next_] = static_cast<double>(z_cur_);
    x_[next_] = static_cast<double>(x_cur_);
    ++next_;
  }

  std::span<const double> grid_;
  std::vector<double> z_, x_;
  std::size_t next_ = 0;
  std::int64_t z_cur_ = 0, x_cur_ = 0;
};

template <class... Sinks>
struct SinkTee {
  std::tuple<Sinks&...> sinks;
  void on_start(const PopState& s) {
    std::apply([&](auto&... k) { (k.on_start(s), ...); }, sinks);
  }
  void on_event(const Event& e) {
    std::apply([&](auto&... k) { (k.on_event(e), ...); }, sinks);
  }
  void on_finish(Outcome o, double t) {
    std::apply([&](auto&... k) { (k.on_finish(o, t), ...); }, sinks);
  }
};

template <class Sink>
void replay(const Trajectory& traj, Sink& sink) {
  sink.on_start(traj.initial);
  for (const auto& e : traj.events) sink.on_event(e);
  sink.on_finish(traj.absorbed ? Outcome::absorbed : Outcome::time_cap, traj.known_until);
}

inline PathStats trajectory_stats(const Trajectory& traj, std::span<const std::int64_t> eps_list = {}) {
  StatsTracker tracker(eps_list);
  replay(traj, tracker);
  return tracker.stats();
}

// Signed relative difference (sim - fluid) / sim.
inline double relative_difference(double sim_mean, double fluid_value) {
  if (sim_mean == 0.0) throw DomainError("relative difference undefined for a zero simulated mean");
  return (sim_mean - fluid_value) / sim_mean;
}

}  // namespace progeny::ssa
