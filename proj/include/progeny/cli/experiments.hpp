#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "progeny/cli/config.hpp"
#include "progeny/cli/csv.hpp"
#include "progeny/cli/svg.hpp"
#include "progeny/discrete.hpp"
#include "progeny/ensemble.hpp"
#include "progeny/fluid.hpp"

namespace progeny::cli {

struct RunOptions {
  unsigned threads = 0;  // 0: PROGENY_THREADS or hardware concurrency
};

struct Report {
  std::vector<std::filesystem::path> files;
  std::string text;
  bool ok = true;  // false when a numeric condition should be reported as failure
};

struct ComparisonRow {
  Cell param;
  std::string stat;
  std::optional<double> sim_mean{}, sim_se{}, fluid{}, rel_diff{};

  Row cells() const {
    auto opt = [](const std::optional<double>& v) -> Cell {
      if (v) return *v;
      return std::monostate{};
    };
    return {param, stat, opt(sim_mean), opt(sim_se), opt(fluid), opt(rel_diff)};
  }
  bool is_error() const { return stat.rfind("error:", 0) == 0; }
};

inline std::vector<Row> to_rows(const std::vector<ComparisonRow>& rows) {
  std::vector<Row> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.cells());
  return out;
}

namespace detail {

inline ComparisonRow compare_stat(const Cell& param, const std::string& stat, const ssa::MeanSe& sim,
                                  const std::function<double()>& fluid_value) {
  ComparisonRow row{param, stat};
  if (sim.n == 0) {
    row.stat = "error:" + stat + ": no replicate contributed to this statistic";
    return row;
  }
  row.sim_mean = sim.mean;
  row.sim_se = sim.se;
  try {
    const double f = fluid_value();
    row.rel_diff = ssa::relative_difference(sim.mean, f);
    row.fluid = f;
  } catch (const Error& e) {
    row.stat = "error:" + stat + ": " + e.what();
  }
  return row;
}

inline ssa::EnsembleSpec ensemble_spec(const SimConfig& sim, const RunOptions& run) {
  ssa::EnsembleSpec spec;
  spec.init = sim.init;
  spec.n_reps = sim.replicates;
  spec.master_seed = sim.master_seed;
  spec.caps = sim.caps;
  spec.grid = sim.grid;
  spec.eps_list = sim.eps_list;
  spec.threads = run.threads;
  return spec;
}

inline std::string param_text(const Cell& c) { return format_cell(c); }

}  // namespace detail

// Fluid quantities are those of the process started from a single individual
// with no prior progeny.
inline bool fluid_applicable(const SimConfig& sim) { return sim.init.z == 1 && sim.init.x == 1; }

// One row per statistic: the simulated ensemble against its fluid counterpart.
inline std::vector<ComparisonRow> comparison_rows(const Cell& param, const models::RateModel& m,
                                                  const ssa::EnsembleSummary& s,
                                                  const std::vector<std::int64_t>& eps_list,
                                                  const fluid::NumericOptions& opts, bool with_fluid = true) {
  std::optional<fluid::FluidSummary> fs;
  std::string fluid_error = "fluid values assume an initial state z = x = 1";
  if (with_fluid) {
    try {
      fs = fluid::fluid_summary(m, opts);
    } catch (const Error& e) {
      fluid_error = e.what();
    }
  }
  auto compare_stat = [&](const Cell& p, const std::string& stat, const ssa::MeanSe& sim,
                          const std::function<double()>& f) {
    if (!with_fluid) return detail::compare_stat(p, stat, sim, [&]() -> double { throw DomainError(fluid_error); });
    return detail::compare_stat(p, stat, sim, f);
  };
  auto need = [&](double fluid::FluidSummary::*field) {
    return [&, field]() -> double {
      if (!fs) throw NumericError(NumericError::Kind::tolerance, fluid_error);
      return (*fs).*field;
    };
  };
  std::vector<ComparisonRow> rows;
  rows.push_back(compare_stat(param, "z_max", s.z_max, need(&fluid::FluidSummary::y1_tmax)));
  rows.push_back(compare_stat(param, "x_final", s.x_final, need(&fluid::FluidSummary::y2_inf)));
  rows.push_back(compare_stat(param, "t_first_max", s.t_first_max, need(&fluid::FluidSummary::t_max)));
  rows.push_back(compare_stat(param, "t_last_birth", s.t_last_birth,
                              [&] { return fluid::t_ext_star(m, opts).t_anchor; }));
  rows.push_back(compare_stat(param, "t_ext_eps1", s.t_ext, [&] { return fluid::t_ext_eps(m, 1.0, opts).t_ext; }));
  rows.push_back(compare_stat(param, "t_ext_eps2", s.t_ext, [&] { return fluid::t_ext_eps(m, 2.0, opts).t_ext; }));
  rows.push_back(compare_stat(param, "t_ext_star", s.t_ext, [&] { return fluid::t_ext_star(m, opts).t_ext; }));
  for (auto e : eps_list) {
    rows.push_back(compare_stat(param, "last_visit_" + std::to_string(e), s.last_visit.at(e),
                                [&] { return fluid::t_eps(m, static_cast<double>(e), opts).t; }));
  }
  return rows;
}

// Default time grid: 201 points up to 1.2 times the fluid extinction-time estimate.
inline std::vector<double> default_grid(const models::RateModel& m, const fluid::NumericOptions& opts) {
  try {
    const double end = 1.2 * fluid::t_ext_star(m, opts).t_ext;
    if (!std::isfinite(end) || !(end > 0.0)) return {};
    std::vector<double> g;
    for (int i = 0; i <= 200; ++i) g.push_back(end * i / 200.0);
    return g;
  } catch (const Error&) {
    return {};
  }
}

namespace detail {

inline std::filesystem::path numbered(const std::filesystem::path& dir, const std::string& stem, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%03zu.csv", i);
  return dir / (stem + buf);
}

inline Row trajectory_row(double t, std::int64_t z, std::int64_t x) { return {t, z, x}; }

inline std::vector<Row> trajectory_rows(const ssa::Trajectory& tr) {
  std::vector<Row> rows;
  rows.reserve(tr.events.size() + 1);
  rows.push_back(trajectory_row(tr.initial.t, tr.initial.z, tr.initial.x));
  for (const auto& e : tr.events) rows.push_back(trajectory_row(e.t, e.z_after, e.x_after));
  return rows;
}

inline Series series_of(std::string name, const std::vector<double>& x, const std::vector<double>& y,
                        bool dashed = false) {
  return Series{std::move(name), x, y, dashed};
}

inline std::vector<double> means(const std::vector<ssa::MeanSe>& v) {
  std::vector<double> out;
  for (const auto& m : v) out.push_back(m.n ? m.mean : NAN);
  return out;
}

inline std::string describe(const ssa::EnsembleSummary& s) {
  std::ostringstream os;
  os << "replicates " << s.n_reps << ", absorbed " << s.n_absorbed << ", truncated " << s.n_truncated << "\n";
  auto line = [&](const char* name, const ssa::MeanSe& m) {
    os << "  " << name << " = " << format_real(m.mean) << " +- " << format_real(m.se) << "\n";
  };
  line("z_max", s.z_max);
  line("x_final", s.x_final);
  line("t_first_max", s.t_first_max);
  line("t_last_birth", s.t_last_birth);
  line("t_ext", s.t_ext);
  return os.str();
}

}  // namespace detail

// Runs the configured ensemble once (any sweep block is ignored) and writes
//   grid_means.csv, summary.csv, trajectory_NNN.csv and, with svg on,
//   population.svg and progeny.svg.
inline Report cmd_simulate(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out_dir = {},
                           const RunOptions& run = {}) {
  const auto dir = out_dir.value_or(cfg.outputs.directory);
  auto spec = detail::ensemble_spec(cfg.sim, run);
  if (spec.grid.empty() && fluid_applicable(cfg.sim)) spec.grid = default_grid(cfg.model, cfg.numeric);
  const auto s = ssa::run_ensemble(cfg.model, spec);

  Report rep;
  rep.text = "simulate " + models::model_name(cfg.model) + ": " + detail::describe(s);
  if (cfg.outputs.csv) {
    std::vector<Row> rows;
    for (std::size_t g = 0; g < s.grid.size(); ++g) {
      const auto& z = s.z_grid[g];
      const auto& x = s.x_grid[g];
      rows.push_back({s.grid[g], z.mean, z.se, x.mean, x.se});
    }
    write_csv(rows, schema::grid_means, dir / "grid_means.csv");
    rep.files.push_back(dir / "grid_means.csv");

    const auto cmp = comparison_rows(std::monostate{}, cfg.model, s, cfg.sim.eps_list, cfg.numeric,
                                     fluid_applicable(cfg.sim));
    write_csv(to_rows(cmp), schema::comparison, dir / "summary.csv");
    rep.files.push_back(dir / "summary.csv");

    const std::size_t n_traj = std::min(cfg.sim.trajectories, cfg.sim.replicates);
    for (std::size_t r = 0; r < n_traj; ++r) {
      const auto tr = ssa::simulate_trajectory(cfg.model, cfg.sim.init, {cfg.sim.master_seed, r}, cfg.sim.caps);
      const auto path = detail::numbered(dir, "trajectory", r);
      write_csv(detail::trajectory_rows(tr), schema::trajectory, path);
      rep.files.push_back(path);
    }
  }
  if (cfg.outputs.svg && !s.grid.empty()) {
    std::optional<fluid::FluidCurve> fc;
    if (fluid_applicable(cfg.sim) && s.grid.back() > 0.0) {
      try {
        fc = fluid::integrate_fluid(cfg.model, s.grid.back(), cfg.numeric, s.grid);
      } catch (const Error&) {
      }
    }
    Chart pop{"Population size", "t", "z", {detail::series_of("simulation mean", s.grid, detail::means(s.z_grid))}};
    Chart prog{"Total progeny", "t", "x", {detail::series_of("simulation mean", s.grid, detail::means(s.x_grid))}};
    if (fc) {
      pop.series.push_back(detail::series_of("fluid y1", fc->times, fc->y1, true));
      prog.series.push_back(detail::series_of("fluid y2", fc->times, fc->y2, true));
    }
    write_svg(pop, dir / "population.svg");
    write_svg(prog, dir / "progeny.svg");
    rep.files.push_back(dir / "population.svg");
    rep.files.push_back(dir / "progeny.svg");
  }
  return rep;
}

// Values of the swept parameter, or the single configured model when there is
// no sweep block.
struct SweepPoint {
  Cell param;
  double value = NAN;
  models::RateModel model;
};

inline std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> pts;
  if (!cfg.sweep) {
    pts.push_back({std::monostate{}, NAN, cfg.model});
    return pts;
  }
  for (double v : cfg.sweep->values) pts.push_back({v, v, set_parameter(cfg.model, cfg.sweep->parameter, v)});
  return pts;
}

namespace detail {

// Runs one sweep point; invalid models and failed ensembles become an error row.
inline std::optional<ssa::EnsembleSummary> run_point(const SweepPoint& p, const ExperimentConfig& cfg,
                                                     const RunOptions& run, std::vector<ComparisonRow>& rows) {
  const auto violations = models::validate(p.model);
  if (!violations.empty()) {
    std::string msg = "error:model:";
    for (const auto& v : violations) msg += " " + v.message + ";";
    msg.pop_back();
    rows.push_back({p.param, msg});
    return std::nullopt;
  }
  try {
    return ssa::run_ensemble(p.model, ensemble_spec(cfg.sim, run));
  } catch (const Error& e) {
    rows.push_back({p.param, std::string("error:simulation: ") + e.what()});
    return std::nullopt;
  }
}

// One chart per statistic: simulated mean and fluid value against the swept
// parameter.
inline std::vector<Chart> sweep_charts(const std::string& parameter, const std::vector<ComparisonRow>& rows) {
  std::vector<std::string> stats;
  for (const auto& r : rows)
    if (!r.is_error() && std::find(stats.begin(), stats.end(), r.stat) == stats.end()) stats.push_back(r.stat);
  std::vector<Chart> charts;
  for (const auto& st : stats) {
    Series sim{"simulation mean"}, fl{"fluid", {}, {}, true};
    for (const auto& r : rows) {
      if (r.stat != st || !std::holds_alternative<double>(r.param)) continue;
      const double p = std::get<double>(r.param);
      sim.x.push_back(p);
      sim.y.push_back(*r.sim_mean);
      fl.x.push_back(p);
      fl.y.push_back(*r.fluid);
    }
    charts.push_back(Chart{st + " against " + parameter, parameter, st, {sim, fl}});
  }
  return charts;
}

}  // namespace detail

// Simulation against fluid for every swept value: comparison.csv plus one SVG
// per statistic.
inline Report cmd_compare(const ExperimentConfig& cfg, const RunOptions& run = {}) {
  if (!cfg.sweep) throw ConfigError("compare needs a [sweep] block");
  if (!fluid_applicable(cfg.sim)) throw ConfigError("compare needs the initial state z = x = 1");
  std::vector<ComparisonRow> rows;
  Report rep;
  std::size_t errors = 0;
  for (const auto& p : sweep_points(cfg)) {
    const std::size_t before = rows.size();
    if (auto s = detail::run_point(p, cfg, run, rows)) {
      auto r = comparison_rows(p.param, p.model, *s, cfg.sim.eps_list, cfg.numeric);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    for (std::size_t i = before; i < rows.size(); ++i) errors += rows[i].is_error() ? 1 : 0;
  }
  const auto& dir = cfg.outputs.directory;
  if (cfg.outputs.csv) {
    write_csv(to_rows(rows), schema::comparison, dir / "comparison.csv");
    rep.files.push_back(dir / "comparison.csv");
  }
  if (cfg.outputs.svg) {
    for (const auto& chart : detail::sweep_charts(cfg.sweep->parameter, rows)) {
      const auto path = dir / ("compare_" + chart.y_label + ".svg");
      write_svg(chart, path);
      rep.files.push_back(path);
    }
  }
  rep.text = "compare " + models::model_name(cfg.model) + " over " + cfg.sweep->parameter + ": " +
             std::to_string(cfg.sweep->values.size()) + " points, " + std::to_string(rows.size()) + " rows, " +
             std::to_string(errors) + " error rows\n";
  return rep;
}

// Extinction-time estimators. "epsK" anchors the pure-death phase at the
// descending crossing of level K; "star" anchors it at the last birth.
struct ExtinctionMethodSpec {
  std::string name;
  std::optional<double> eps;  // absent for star
};

inline std::vector<ExtinctionMethodSpec> parse_methods(std::string_view list) {
  std::vector<ExtinctionMethodSpec> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    std::string item(list.substr(pos, comma - pos));
    pos = comma + 1;
    if (item == "star") {
      out.push_back({item, std::nullopt});
      continue;
    }
    if (item.rfind("eps", 0) == 0 && item.size() > 3) {
      std::int64_t k = 0;
      const char* first = item.data() + 3;
      const auto res = std::from_chars(first, item.data() + item.size(), k);
      if (res.ec == std::errc{} && res.ptr == item.data() + item.size() && k >= 1) {
        out.push_back({item, static_cast<double>(k)});
        continue;
      }
    }
    throw ConfigError("unknown extinction method '" + item + "' (expected star or epsK with integer K >= 1)");
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (out[i].name == out[j].name) throw ConfigError("extinction method '" + out[i].name + "' listed twice");
  return out;
}

inline double extinction_estimate(const models::RateModel& m, const ExtinctionMethodSpec& method,
                                  const fluid::NumericOptions& opts) {
  return method.eps ? fluid::t_ext_eps(m, *method.eps, opts).t_ext : fluid::t_ext_star(m, opts).t_ext;
}

// Mean simulated extinction time against each estimator: extinction.csv, and
// a note naming the closest estimator at every point.
inline Report cmd_extinction(const ExperimentConfig& cfg, const std::vector<ExtinctionMethodSpec>& methods,
                             const RunOptions& run = {}) {
  if (methods.empty()) throw ConfigError("no extinction methods given");
  if (!fluid_applicable(cfg.sim)) throw ConfigError("extinction needs the initial state z = x = 1");
  std::vector<ComparisonRow> rows;
  std::ostringstream text;
  for (const auto& p : sweep_points(cfg)) {
    const auto s = detail::run_point(p, cfg, run, rows);
    if (!s) continue;
    std::string best;
    double best_gap = INFINITY;
    for (const auto& method : methods) {
      auto row = detail::compare_stat(p.param, "t_ext_" + method.name, s->t_ext,
                                      [&] { return extinction_estimate(p.model, method, cfg.numeric); });
      if (!row.is_error() && std::abs(*row.sim_mean - *row.fluid) < best_gap) {
        best_gap = std::abs(*row.sim_mean - *row.fluid);
        best = method.name;
      }
      rows.push_back(std::move(row));
    }
    text << (cfg.sweep ? cfg.sweep->parameter + "=" + detail::param_text(p.param) : std::string("point"))
         << ": mean t_ext " << format_real(s->t_ext.mean) << ", closest " << (best.empty() ? "none" : best)
         << "\n";
  }
  Report rep;
  const auto& dir = cfg.outputs.directory;
  if (cfg.outputs.csv) {
    write_csv(to_rows(rows), schema::comparison, dir / "extinction.csv");
    rep.files.push_back(dir / "extinction.csv");
  }
  if (cfg.outputs.svg && cfg.sweep) {
    Chart chart{"Mean extinction time", cfg.sweep->parameter, "t_ext", {}};
    Series sim{"simulation mean"};
    for (const auto& method : methods) {
      Series est{"t_ext " + method.name, {}, {}, true};
      for (const auto& r : rows) {
        if (r.is_error() || r.stat != "t_ext_" + method.name) continue;
        est.x.push_back(std::get<double>(r.param));
        est.y.push_back(*r.fluid);
        if (&method == &methods.front()) {
          sim.x.push_back(std::get<double>(r.param));
          sim.y.push_back(*r.sim_mean);
        }
      }
      chart.series.push_back(std::move(est));
    }
    chart.series.insert(chart.series.begin(), std::move(sim));
    write_svg(chart, dir / "extinction.svg");
    rep.files.push_back(dir / "extinction.svg");
  }
  rep.text = text.str();
  return rep;
}

struct FluidRequest {
  std::string model;  // model1 or model2
  double lambda = NAN;
  std::optional<double> alpha;
  double mu = NAN;
  std::optional<double> t_end;
  std::size_t points = 1001;
};

inline models::RateModel fluid_model(const FluidRequest& req) {
  models::RateModel m;
  if (req.model == "model1") {
    if (req.alpha) throw ConfigError("--alpha applies to model2 only");
    m = models::Model1{req.lambda, req.mu};
  } else if (req.model == "model2") {
    if (!req.alpha) throw ConfigError("model2 needs --alpha");
    m = models::Model2{req.lambda, *req.alpha, req.mu};
  } else {
    throw ConfigError("unknown fluid model '" + req.model + "' (expected model1 or model2)");
  }
  const auto v = models::validate(m);
  if (!v.empty()) {
    std::string msg = "invalid " + req.model + " parameters:";
    for (const auto& x : v) msg += "\n  - " + x.message;
    throw ConfigError(msg);
  }
  return m;
}

// Fluid curve on a uniform grid over [0, t_end]; t_end defaults to 1.2 times
// the time at which the fluid progeny reaches y2(inf) - 1.
inline Report cmd_fluid(const FluidRequest& req, const std::filesystem::path& csv,
                        const fluid::NumericOptions& opts = {}) {
  const auto m = fluid_model(req);
  const auto s = fluid::fluid_summary(m, opts);
  double t_end;
  if (req.t_end) {
    if (!(*req.t_end > 0.0) || !std::isfinite(*req.t_end)) throw ConfigError("--t-end must be positive");
    t_end = *req.t_end;
  } else {
    if (!(s.y2_inf > 2.0)) throw DomainError("progeny at extinction is too small to pick t_end; pass --t-end");
    t_end = 1.2 * fluid::time_of_y2(m, s.y2_inf - 1.0, opts);
  }
  std::vector<double> grid;
  for (std::size_t i = 0; i < req.points; ++i)
    grid.push_back(t_end * static_cast<double>(i) / static_cast<double>(req.points - 1));
  grid.back() = t_end;
  const auto curve = fluid::integrate_fluid(m, t_end, opts, grid);
  std::vector<Row> rows;
  for (std::size_t i = 0; i < curve.times.size(); ++i) rows.push_back({curve.times[i], curve.y1[i], curve.y2[i]});
  write_csv(rows, schema::fluid_curve, csv);
  Report rep;
  rep.files.push_back(csv);
  rep.text = "fluid " + models::model_name(m) + ": y1_tmax " + format_real(s.y1_tmax) + ", t_max " +
             format_real(s.t_max) + ", y2_tmax " + format_real(s.y2_tmax) + ", y2_inf " + format_real(s.y2_inf) +
             "\n";
  return rep;
}

struct MinimizeOutput {
  fluid::MinimizeResult result;
  std::vector<Row> curve;
};

// Objective sampled on 100 points either side of the minimiser, over
// [max(lower bound, y/2), 3y/2]; the minimiser itself is a sample.
inline MinimizeOutput minimize_with_curve(double alpha, double mu, double eps, const fluid::NumericOptions& opts = {}) {
  if (!(eps >= 1.0)) throw DomainError("eps must be >= 1");
  MinimizeOutput out;
  out.result = fluid::minimize_t_eps(alpha, mu, eps, opts);
  const double y = out.result.y2star;
  const double lb = fluid::y2star_lower_bound(alpha, mu, eps, opts);
  const double lo = std::max(lb + 1e-6 * std::max(1.0, lb), 0.5 * y);
  const double hi = 1.5 * y;
  constexpr int side = 100;
  auto sample = [&](double v) {
    out.curve.push_back({v, fluid::lambda_of_y2star(alpha, mu, eps, v), fluid::t_eps_of_y2star(alpha, mu, eps, v, opts)});
  };
  if (lo < y)
    for (int i = 0; i < side; ++i) sample(lo + (y - lo) * i / side);
  sample(y);
  for (int i = 1; i <= side; ++i) sample(y + (hi - y) * i / side);
  return out;
}

inline Report cmd_minimize(double alpha, double mu, double eps, const std::optional<std::filesystem::path>& csv,
                           const std::optional<std::filesystem::path>& svg = {},
                           const fluid::NumericOptions& opts = {}) {
  const auto out = minimize_with_curve(alpha, mu, eps, opts);
  Report rep;
  if (csv) {
    write_csv(out.curve, schema::minimize_curve, *csv);
    rep.files.push_back(*csv);
  }
  if (svg) {
    Series s{"t_eps"};
    for (const auto& r : out.curve) {
      s.x.push_back(std::get<double>(r[0]));
      s.y.push_back(std::get<double>(r[2]));
    }
    write_svg(Chart{"t_eps against y2*", "y2*", "t_eps", {s}}, *svg);
    rep.files.push_back(*svg);
  }
  const auto& r = out.result;
  rep.text = "y2star " + format_real(r.y2star) + "\nlambda " + format_real(r.lambda) + "\nt_eps " +
             format_real(r.t_eps) + "\n";
  if (!r.interior) {
    rep.ok = false;
    rep.text += "objective is monotone over the search range; no interior minimum\n";
  }
  return rep;
}

inline std::vector<Row> generation_rows(const ssa::GenerationSeries& s) {
  std::vector<Row> rows;
  for (const auto& g : s.generations) {
    Row r{g.index, g.population, g.progeny};
    if (s.mode == ssa::DiscreteMode::progeny) {
      r.push_back(std::sqrt(static_cast<double>(g.progeny)));
      r.push_back(s.k_const);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<std::string> generation_schema(ssa::DiscreteMode mode) {
  if (mode == ssa::DiscreteMode::progeny) return schema::generations;
  return {schema::generations.begin(), schema::generations.begin() + 3};
}

inline Report cmd_demo_discrete(ssa::DiscreteMode mode, double k, std::int64_t n_gens, std::uint64_t seed,
                                const std::filesystem::path& csv, const std::optional<std::filesystem::path>& svg = {}) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("K must be positive");
  if (n_gens < 0) throw ConfigError("generation count must be >= 0");
  const auto s = ssa::simulate_discrete_generations(mode, k, n_gens, seed);
  Report rep;
  write_csv(generation_rows(s), generation_schema(mode), csv);
  rep.files.push_back(csv);
  if (svg) {
    Series pop{"population"}, root{"sqrt(progeny)"}, kline{"K", {}, {}, true};
    for (const auto& g : s.generations) {
      const double i = static_cast<double>(g.index);
      pop.x.push_back(i);
      pop.y.push_back(static_cast<double>(g.population));
      root.x.push_back(i);
      root.y.push_back(std::sqrt(static_cast<double>(g.progeny)));
      kline.x.push_back(i);
      kline.y.push_back(k);
    }
    Chart chart{mode == ssa::DiscreteMode::progeny ? "Binary splitting, progeny-dependent"
                                                   : "Binary splitting, population-dependent",
                "generation", "count", {pop}};
    if (mode == ssa::DiscreteMode::progeny) chart.series.push_back(root);
    chart.series.push_back(kline);
    write_svg(chart, *svg);
    rep.files.push_back(*svg);
  }
  std::int64_t peak = 0, peak_gen = 0;
  for (const auto& g : s.generations)
    if (g.population > peak) peak = g.population, peak_gen = g.index;
  rep.text = "generations " + std::to_string(s.generations.size()) + ", peak population " + std::to_string(peak) +
             " at generation " + std::to_string(peak_gen) +
             (s.generations.empty() ? std::string() : ", final total progeny " +
                                                          std::to_string(s.generations.back().progeny)) +
             "\n";
  return rep;
}

}  // namespace progeny::cli
