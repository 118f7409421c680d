#pragma once

// Replicate ensembles. Replicate i always draws from substream
// (master_seed, i); per-replicate results are stored and reduced in index
// order, so summaries do not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "progeny/error.hpp"
#include "progeny/numerics/summation.hpp"
#include "progeny/ssa.hpp"

namespace progeny::ssa {

using numerics::MeanSe;

struct EnsembleSummary {
  std::size_t n_reps = 0;
  std::size_t n_absorbed = 0;
  std::size_t n_truncated = 0;

  // Over absorbed replicates.
  MeanSe z_max, t_first_max, t_ext, x_final, t_last_birth;
  // Over absorbed replicates that visited the level.
  std::map<std::int64_t, MeanSe> last_visit;

  std::vector<double> grid;
  // Per grid time, over replicates whose state is known there.
  std::vector<MeanSe> z_grid, x_grid;

  double absorbed_fraction() const {
    return n_reps == 0 ? 0.0 : static_cast<double>(n_absorbed) / static_cast<double>(n_reps);
  }
};

// A replicate failed; `replicate()` is the lowest failing index.
class ReplicateError : public Error {
 public:
  ReplicateError(const std::string& what, std::uint64_t replicate) : Error(what), replicate_(replicate) {}
  std::uint64_t replicate() const noexcept { return replicate_; }

 private:
  std::uint64_t replicate_;
};

// Worker count: PROGENY_THREADS when set, else the hardware concurrency.
inline unsigned default_threads() {
  if (const char* env = std::getenv("PROGENY_THREADS")) {
    unsigned v = 0;
    const auto res = std::from_chars(env, env + std::char_traits<char>::length(env), v);
    if (res.ec == std::errc{} && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

// Runs body(i) for i in [0, n) on `threads` workers. Exceptions are collected
// per index; the lowest failing index is rethrown after all workers finish.
template <class Body>
void parallel_for_index(std::size_t n, unsigned threads, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1, std::memory_order_relaxed)) < n;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw ReplicateError("replicate " + std::to_string(i) + ": " + e.what(), i);
    }
  }
}

struct ReplicateRecord {
  PathStats stats;
  std::vector<double> z, x;
};

inline std::vector<MeanSe> grid_reduce(std::span<const ReplicateRecord> recs, std::size_t n_grid, bool use_z) {
  std::vector<MeanSe> out(n_grid);
  std::vector<double> column;
  column.reserve(recs.size());
  for (std::size_t g = 0; g < n_grid; ++g) {
    column.clear();
    for (const auto& r : recs) {
      const double v = use_z ? r.z[g] : r.x[g];
      if (!std::isnan(v)) column.push_back(v);
    }
    out[g] = numerics::mean_and_se(column);
  }
  return out;
}

inline void check_grid(std::span<const double> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("time grid must be strictly increasing");
}

}  // namespace detail

struct EnsembleSpec {
  PopState init{};
  std::size_t n_reps = 1;
  std::uint64_t master_seed = 0;
  Caps caps{};
  std::vector<double> grid;
  std::vector<std::int64_t> eps_list;
  unsigned threads = 0;  // 0 selects default_threads()
};

inline EnsembleSummary run_ensemble(const RateModel& model, const EnsembleSpec& spec) {
  if (spec.n_reps < 1) throw DomainError("an ensemble needs at least one replicate");
  detail::check_grid(spec.grid);
  check_initial_state(spec.init);
  const unsigned threads = spec.threads == 0 ? default_threads() : spec.threads;

  std::vector<detail::ReplicateRecord> recs(spec.n_reps);
  detail::parallel_for_index(spec.n_reps, threads, [&](std::size_t i) {
    auto rng = random::Xoshiro256::for_stream(spec.master_seed, i);
    StatsTracker tracker(spec.eps_list);
    GridSampler sampler(spec.grid);
    SinkTee<StatsTracker, GridSampler> tee{{tracker, sampler}};
    simulate(model, spec.init, rng, spec.caps, tee);
    recs[i].stats = tracker.stats();
    recs[i].z = sampler.z();
    recs[i].x = sampler.x();
  });

  EnsembleSummary s;
  s.n_reps = spec.n_reps;
  s.grid = spec.grid;
  std::vector<double> zmax, tfm, text, xf, tlb;
  std::map<std::int64_t, std::vector<double>> visits;
  for (const auto& r : recs) {
    if (r.stats.truncated) {
      ++s.n_truncated;
      continue;
    }
    ++s.n_absorbed;
    zmax.push_back(static_cast<double>(r.stats.z_max));
    tfm.push_back(r.stats.t_first_max);
    text.push_back(*r.stats.t_ext);
    xf.push_back(static_cast<double>(r.stats.x_final));
    tlb.push_back(r.stats.t_last_birth);
    for (const auto& [e, t] : r.stats.last_visit) {
      auto& v = visits[e];
      if (t) v.push_back(*t);
    }
  }
  s.z_max = numerics::mean_and_se(zmax);
  s.t_first_max = numerics::mean_and_se(tfm);
  s.t_ext = numerics::mean_and_se(text);
  s.x_final = numerics::mean_and_se(xf);
  s.t_last_birth = numerics::mean_and_se(tlb);
  for (auto e : spec.eps_list) s.last_visit[e] = numerics::mean_and_se(visits[e]);
  s.z_grid = detail::grid_reduce(recs, spec.grid.size(), true);
  s.x_grid = detail::grid_reduce(recs, spec.grid.size(), false);
  return s;
}

// Pointwise means of stored trajectories at grid times: (mean_z, mean_x).
inline std::pair<std::vector<MeanSe>, std::vector<MeanSe>> grid_average(std::span<const Trajectory> trajs,
                                                                        std::span<const double> grid) {
  detail::check_grid(grid);
  for (const auto& t : trajs)
    if (!(t.initial == trajs.front().initial)) throw DomainError("trajectories must share the initial state");
  std::vector<detail::ReplicateRecord> recs(trajs.size());
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    GridSampler sampler(grid);
    replay(trajs[i], sampler);
    recs[i].z = sampler.z();
    recs[i].x = sampler.x();
  }
  return {detail::grid_reduce(recs, grid.size(), true), detail::grid_reduce(recs, grid.size(), false)};
}

// Exact text form of a summary (hexadecimal floats), for reproducibility checks.
inline std::string serialize(const EnsembleSummary& s) {
  auto hex = [](double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
    return std::string(buf, r.ptr);
  };
  auto stat = [&](const char* name, const MeanSe& m) {
    return std::string(name) + " " + hex(m.mean) + " " + hex(m.se) + " " + std::to_string(m.n) + "\n";
  };
  std::string out = "n_reps " + std::to_string(s.n_reps) + "\nn_absorbed " + std::to_string(s.n_absorbed) +
                    "\nn_truncated " + std::to_string(s.n_truncated) + "\n";
  out += stat("z_max", s.z_max) + stat("t_first_max", s.t_first_max) + stat("t_ext", s.t_ext) +
         stat("x_final", s.x_final) + stat("t_last_birth", s.t_last_birth);
  for (const auto& [e, m] : s.last_visit) out += stat(("last_visit_" + std::to_string(e)).c_str(), m);
  for (std::size_t g = 0; g < s.grid.size(); ++g)
    out += "grid " + hex(s.grid[g]) + " " + stat("z", s.z_grid[g]) + "grid " + hex(s.grid[g]) + " " +
           stat("x", s.x_grid[g]);
  return out;
}

}  // namespace progeny::ssa
