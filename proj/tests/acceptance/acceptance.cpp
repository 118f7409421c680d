// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "progeny/cli/config.hpp"
#include "progeny/cli/experiments.hpp"
#include "progeny/ensemble.hpp"
#include "progeny/fluid.hpp"

#ifndef PROGENY_CONFIG_DIR
#define PROGENY_CONFIG_DIR "configs"
#endif

using namespace progeny;
namespace fs = std::filesystem;
using models::LinearBdp;
using models::Model1;
using models::Model2;
using models::RateModel;
using models::Sir;

namespace tol {
constexpr double c1_rel = 0.03;
constexpr double c1_fluid = 500.0005;
constexpr double c2_rel = 0.02;
constexpr double c2_fluid = 2000.0005;
constexpr double c3_rel = 0.05;
constexpr double c3_tmax_ref = 1.38529;
constexpr double c3_tmax_ref_tol = 5e-6;
constexpr double c4_abs = 1e-3;
constexpr double c5_ratio = 0.5;
constexpr int c8_required = 4;
constexpr int c9_required = 2;
constexpr double c10_residual = 1e-6;
constexpr double c10_inverse = 1e-8;
constexpr double c11_abs = 1e-12;
constexpr double c12_peak = 1e-9;
constexpr double c13_se = 3.0;
constexpr double c7_y2star = 888.44, c7_y2star_tol = 0.5;
constexpr double c7_lambda = 813.3, c7_lambda_tol = 1.0;
}  // namespace tol

namespace budget {  // seconds
constexpr double c1 = 30, c4 = 1, c5 = 5, c6 = 5, c7 = 5, c8 = 180, c9 = 180, c10 = 10, c12 = 10, c13 = 10;
}

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, const std::string& name, const std::function<Outcome()>& check, double budget_s = INFINITY) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = seconds_since(t0);
  if (s > budget_s) {
    o.pass = false;
    o.detail += "; over runtime budget " + cli::format_real(budget_s) + " s";
  }
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d %-34s %8.2f s  ", o.pass ? "PASS" : "FAIL", id, name.c_str(), s);
  std::printf("%s%s\n", head, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.9g", v);
  return b;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// stat -> sim_mean from a comparison CSV without quoted fields.
std::map<std::string, double> sim_means(const fs::path& csv) {
  std::map<std::string, double> out;
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() >= 3 && !f[2].empty()) out[f[1]] = std::stod(f[2]);
  }
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

fs::path work_dir() {
  const fs::path p = fs::temp_directory_path() / "progeny_acceptance";
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Exact sum_{j=1}^{n} C(n,j) (-1)^{j-1} / j over the common denominator lcm(1..20).
double alternating_sum(int n) {
  __extension__ using int128 = __int128;
  int128 denom = 1;
  for (int j = 1; j <= 20; ++j) denom = std::lcm(static_cast<long long>(denom), static_cast<long long>(j));
  int128 numer = 0, binom = 1;
  for (int j = 1; j <= n; ++j) {
    binom = binom * (n - j + 1) / j;
    numer += (j % 2 ? 1 : -1) * binom * (denom / j);
  }
  return static_cast<double>(numer) / static_cast<double>(denom);
}

}  // namespace

int main() {
  const fs::path work = work_dir();
  const fs::path config = fs::path(PROGENY_CONFIG_DIR) / "model1_peak.toml";
  const fs::path run1 = work / "workers1", run8 = work / "workers8";

  // Criteria 1-3 and 14 share a single configuration, run at 1 and 8 workers.
  double run1_seconds = 0.0;
  std::string run_error;
  try {
    const auto cfg = cli::load_config(config);
    const auto t0 = std::chrono::steady_clock::now();
    (void)cli::cmd_simulate(cfg, run1, {1});
    run1_seconds = seconds_since(t0);
    (void)cli::cmd_simulate(cfg, run8, {8});
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  auto shared = [&](auto&& body) {
    return [&, body]() -> Outcome {
      if (!run_error.empty()) return {false, "simulation failed: " + run_error};
      return body(sim_means(run1 / "summary.csv"));
    };
  };

  report(1, "Model 1 peak size", shared([&](const std::map<std::string, double>& m) -> Outcome {
           const double z = m.at("z_max"), r = std::abs(z - tol::c1_fluid) / z;
           bool ok = r < tol::c1_rel && run1_seconds < budget::c1;
           return {ok, "mean z_max " + num(z) + ", rel diff " + num(r) + " < " + num(tol::c1_rel) +
                           ", 5000 reps in " + num(run1_seconds) + " s at 1 worker"};
         }));

  report(2, "Model 1 progeny at extinction", shared([&](const std::map<std::string, double>& m) -> Outcome {
           const double x = m.at("x_final"), r = std::abs(x - tol::c2_fluid) / tol::c2_fluid;
           return {r < tol::c2_rel, "mean x_final " + num(x) + ", rel diff " + num(r) + " < " + num(tol::c2_rel)};
         }));

  report(3, "Model 1 time to peak", shared([&](const std::map<std::string, double>& m) -> Outcome {
           const double fluid = fluid::t_max(Model1{1000.0, 1.0});
           const double t = m.at("t_first_max"), r = std::abs(t - fluid) / fluid;
           const bool ref_ok = std::abs(fluid - tol::c3_tmax_ref) < tol::c3_tmax_ref_tol;
           return {r < tol::c3_rel && ref_ok, "mean t_first_max " + num(t) + ", fluid t_max " + num(fluid) +
                                                  ", rel diff " + num(r) + " < " + num(tol::c3_rel)};
         }));

  report(4, "Peak time limit, Model 1", [] {
    const double lim = fluid::t_max(Model1{1e6, 1.0});
    const double gap = std::abs(lim - 2.0 * std::log(2.0));
    bool mono = true;
    double prev = -INFINITY;
    for (int k = 0; k < 10; ++k) {
      const double tm = fluid::t_max(Model1{1e3 * std::pow(10.0, 0.5 * k), 1.0});
      mono = mono && tm > prev;
      prev = tm;
    }
    return Outcome{gap < tol::c4_abs && mono, "|t_max(1e6) - 2 ln 2| = " + num(gap) + ", monotone on 1e3..1e7.5: " +
                                                  (mono ? "yes" : "no")};
  }, budget::c4);

  report(5, "Peak time decay, Model 2", [] {
    bool mono = true;
    double prev = INFINITY;
    for (int k = 3; k <= 12; ++k) {
      const double tm = fluid::t_max(Model2{std::pow(10.0, k), 100.0, 1.0});
      mono = mono && tm < prev;
      prev = tm;
    }
    const double first = fluid::t_max(Model2{1e3, 100.0, 1.0});
    const bool halved = prev < tol::c5_ratio * first;
    return Outcome{mono && halved, "t_max(1e3) " + num(first) + ", t_max(1e12) " + num(prev) +
                                       ", strictly decreasing: " + (mono ? "yes" : "no")};
  }, budget::c5);

  report(6, "Crossing progeny monotone", [] {
    int bad = 0, total = 0;
    double worst = INFINITY;
    for (double eps : {1.0, 2.0, 5.0}) {
      for (double lambda = 200.0; lambda <= 5000.0; lambda += 200.0) {
        const double h = 1e-3 * lambda;
        const double d = (fluid::t_eps(Model2{lambda + h, 100.0, 1.0}, eps).y2 -
                          fluid::t_eps(Model2{lambda - h, 100.0, 1.0}, eps).y2) / (2.0 * h);
        worst = std::min(worst, d);
        bad += d > 0.0 ? 0 : 1;
        ++total;
      }
    }
    return Outcome{bad == 0, std::to_string(total) + " central differences, smallest " + num(worst)};
  }, budget::c6);

  report(7, "Minimisation of t_eps", [] {
    const auto r = fluid::minimize_t_eps(100.0, 1.0, 1.0);
    const bool ok = r.interior && std::abs(r.y2star - tol::c7_y2star) <= tol::c7_y2star_tol &&
                    std::abs(r.lambda - tol::c7_lambda) <= tol::c7_lambda_tol;
    return Outcome{ok, "y2* " + num(r.y2star) + ", lambda " + num(r.lambda) + ", t_eps " + num(r.t_eps)};
  }, budget::c7);

  report(8, "Extinction ranking, Model 1", [] {
    int wins = 0;
    std::string detail;
    for (double lambda : {200.0, 400.0, 600.0, 800.0, 1000.0}) {
      const RateModel m = Model1{lambda, 1.0};
      ssa::EnsembleSpec spec;
      spec.n_reps = 10000;
      spec.master_seed = 8001;
      const double sim = ssa::run_ensemble(m, spec).t_ext.mean;
      const double e1 = std::abs(sim - fluid::t_ext_eps(m, 1.0).t_ext);
      const double e2 = std::abs(sim - fluid::t_ext_eps(m, 2.0).t_ext);
      wins += e2 < e1 ? 1 : 0;
      detail += " " + num(lambda) + (e2 < e1 ? ":eps2" : ":eps1");
    }
    return Outcome{wins >= tol::c8_required, "eps2 closer at " + std::to_string(wins) + "/5 (" + detail.substr(1) + ")"};
  }, budget::c8);

  report(9, "Extinction ranking, Model 2", [] {
    int wins = 0;
    std::string detail;
    for (double lambda : {500.0, 1000.0, 2000.0}) {
      const RateModel m = Model2{lambda, 100.0, 1.0};
      ssa::EnsembleSpec spec;
      spec.n_reps = 10000;
      spec.master_seed = 9001;
      const double sim = ssa::run_ensemble(m, spec).t_ext.mean;
      const double e1 = std::abs(sim - fluid::t_ext_eps(m, 1.0).t_ext);
      const double e2 = std::abs(sim - fluid::t_ext_eps(m, 2.0).t_ext);
      const double es = std::abs(sim - fluid::t_ext_star(m).t_ext);
      const bool star = es < e1 && es < e2;
      wins += star ? 1 : 0;
      detail += " " + num(lambda) + (star ? ":star" : (e2 < e1 ? ":eps2" : ":eps1"));
    }
    return Outcome{wins >= tol::c9_required, "star closest at " + std::to_string(wins) + "/3 (" + detail.substr(1) + ")"};
  }, budget::c9);

  report(10, "Fluid oracle equivalence", [] {
    double worst_res = 0.0, worst_inv = 0.0;
    std::vector<RateModel> models = {Model1{10.0, 1.0}, Model1{1000.0, 1.0}};
    for (double lambda : {10.0, 1000.0})
      for (double alpha : {10.0, 100.0}) models.push_back(Model2{lambda, alpha, 1.0});
    for (const auto& m : models) {
      const double sup = fluid::y2_at_extinction(m);
      const double t_top = fluid::time_of_y2(m, sup - 1.0);
      const auto c = fluid::integrate_fluid(m, 1.5 * t_top);
      for (std::size_t i = 0; i < c.times.size(); ++i) {
        worst_res = std::max(worst_res, std::abs(c.y1[i] - fluid::y1_of_y2(m, std::min(c.y2[i], sup))));
        if (c.times[i] > 0.0 && c.times[i] <= t_top)
          worst_inv = std::max(worst_inv, rel(fluid::time_of_y2(m, c.y2[i]), c.times[i]));
      }
    }
    return Outcome{worst_res < tol::c10_residual && worst_inv < tol::c10_inverse,
                   "max residual " + num(worst_res) + ", max inverse rel error " + num(worst_inv) + " over 6 models"};
  }, budget::c10);

  report(11, "Harmonic identity", [] {
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n) {
      worst = std::max(worst, std::abs(alternating_sum(n) - fluid::harmonic(n)));
    }
    return Outcome{worst < tol::c11_abs, "max |alternating sum - H(n)| " + num(worst) + " for n <= 20"};
  });

  report(12, "SIR special case", [] {
    const std::int64_t n = 1000;
    const RateModel m = Sir{2.0, 1.0, n};
    std::size_t violations = 0, events = 0;
    for (std::uint64_t r = 0; r < 1000; ++r) {
      const auto tr = ssa::simulate_trajectory(m, {}, {1201, r});
      for (const auto& e : tr.events) {
        const std::int64_t s = n - e.x_after, i = e.z_after, rec = e.x_after - e.z_after;
        violations += (s + i + rec != n || s < 0 || i < 0 || rec < 0) ? 1 : 0;
        ++events;
      }
    }
    const double peak = fluid::y2_at_tmax(m);
    return Outcome{violations == 0 && std::abs(peak - 500.0) < tol::c12_peak,
                   std::to_string(violations) + " conservation violations in " + std::to_string(events) +
                       " events; fluid peak progeny " + num(peak)};
  }, budget::c12);

  report(13, "Linear birth-death validation", [] {
    ssa::EnsembleSpec spec;
    spec.n_reps = 10000;
    spec.master_seed = 1301;
    spec.caps.max_events = 10000;
    const auto sup = ssa::run_ensemble(LinearBdp{2.0, 1.0}, spec);
    const double frac = sup.absorbed_fraction();
    const double bse = std::sqrt(0.25 / static_cast<double>(spec.n_reps));
    spec.init = {5, 5, 0.0};
    spec.master_seed = 1302;
    spec.caps = {};
    const auto death = ssa::run_ensemble(LinearBdp{0.0, 1.0}, spec);
    const double h5 = 137.0 / 60.0;
    const bool ok = std::abs(frac - 0.5) < tol::c13_se * bse && std::abs(death.t_ext.mean - h5) < tol::c13_se * death.t_ext.se;
    return Outcome{ok, "extinct fraction " + num(frac) + " (SE " + num(bse) + "), pure-death mean " +
                           num(death.t_ext.mean) + " vs " + num(h5) + " (SE " + num(death.t_ext.se) + ")"};
  }, budget::c13);

  report(14, "Reproducibility across workers", [&]() -> Outcome {
    if (!run_error.empty()) return {false, "simulation failed: " + run_error};
    std::size_t files = 0, differ = 0;
    for (const auto& entry : fs::directory_iterator(run1)) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      const auto other = run8 / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differ;
    }
    std::size_t files8 = 0;
    for (const auto& entry : fs::directory_iterator(run8)) files8 += entry.path().extension() == ".csv" ? 1 : 0;
    return {files > 0 && differ == 0 && files8 == files,
            std::to_string(files) + " CSV files compared between 1 and 8 workers, " + std::to_string(differ) + " differ"};
  });

  std::printf("%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
