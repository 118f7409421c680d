#pragma once

// Fluid (deterministic) approximation of a total-progeny-dependent
// birth-and-death process started from one individual:
//
//   y1' = y1 (b(y2) - d(y2)),   y2' = y1 b(y2),   y1(0) = y2(0) = 1.
//
// Dividing the equations gives y1 as a function of y2 alone,
//   y1(y2) = y2 - integral_1^y2 d(u)/b(u) du,
// and the time to reach a given progeny, t(y2) = integral_1^y2 du / (y1(u) b(u)).
// Model 1 and Model 2 use their closed forms; other models are handled by
// quadrature, root finding and ODE integration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "progeny/error.hpp"
#include "progeny/models.hpp"
#include "progeny/numerics/ode.hpp"
#include "progeny/numerics/quadrature.hpp"
#include "progeny/numerics/roots.hpp"

namespace progeny::fluid {

using models::RateModel;

struct NumericOptions {
  double quad_rel_tol = 1e-10;
  double root_tol = 1e-12;
  double ode_rel_tol = 1e-10;
  double bracket_growth = 2.0;
  std::size_t max_iters = 200;

  void check() const {
    auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in_unit(quad_rel_tol) || !in_unit(root_tol) || !in_unit(ode_rel_tol))
      throw DomainError("numeric tolerances must lie in (0, 1)");
    if (!(bracket_growth > 1.0)) throw DomainError("bracket_growth must exceed 1");
    if (max_iters < 1) throw DomainError("max_iters must be at least 1");
  }

  numerics::QuadOptions quad() const { return {quad_rel_tol, 0.0, 4000}; }
  numerics::RootOptions root() const { return {root_tol, 0.0, max_iters}; }
  numerics::OdeOptions ode() const { return {ode_rel_tol, ode_rel_tol * 1e-3, 0.0, 10000000}; }
};

struct FluidCurve {
  std::vector<double> times;
  std::vector<double> y1;  // population
  std::vector<double> y2;  // total progeny
  double tolerance = 0.0;
};

struct FluidSummary {
  double y2_tmax;  // progeny at the population peak
  double y1_tmax;  // peak population
  double t_max;    // time of the peak
  double y2_inf;   // progeny at extinction
};

enum class ExtinctionMethod { epsilon, star };

struct ExtinctionEstimate {
  ExtinctionMethod method;
  double eps = 0.0;           // population level, epsilon method only
  double t_anchor = 0.0;      // t_eps, or t(z) for the star method
  double y2_anchor = 0.0;     // y2(t_eps), or z = y2(inf) - 1
  double pop_at_anchor = 0.0; // eps, or y1(t(z))
  double tail_mean = 0.0;     // expected pure-death clearing time
  double t_ext = 0.0;         // t_anchor + tail_mean
};

struct EpsCrossing {
  double t;   // t_eps
  double y2;  // y2(t_eps), also called y2*
};

// Model 1 time map with an explicit choice of the root c of c^2 = 1 + lambda^2/mu^2.
struct Model1Analytic {
  double lambda;
  double mu;
  double c;

  static Model1Analytic with_positive_root(double lambda, double mu) {
    return {lambda, mu, std::hypot(1.0, lambda / mu)};
  }
  static Model1Analytic with_negative_root(double lambda, double mu) {
    return {lambda, mu, -std::hypot(1.0, lambda / mu)};
  }

  // t(y2) for 1 <= y2 < y2(inf). c - r and r + c are formed without
  // cancellation using c^2 - r^2 = 1.
  double time_of_y2(double y2) const {
    const double r = lambda / mu;
    const double diff = c > 0.0 ? 1.0 / (c + r) : c - r;  // c - r
    const double sum = c > 0.0 ? r + c : -1.0 / (r - c);  // r + c
    const double w_minus = diff / c;                      // 1 - r/c
    const double w_plus = sum / c;                        // 1 + r/c
    const double first = std::log((1.0 + diff) / (y2 + diff));
    const double second = std::log((sum - 1.0) / (sum - y2));
    return (w_minus * first + w_plus * second) / mu;
  }
};

namespace detail {

inline double clamp_to_domain(const RateModel& m, double x) {
  return std::clamp(x, 1.0, models::domain_max(m));
}

inline bool is_model1(const RateModel& m) { return std::holds_alternative<models::Model1>(m); }
inline bool is_model2(const RateModel& m) { return std::holds_alternative<models::Model2>(m); }

// y1 as a function of y2, no range check.
inline double y1_unchecked(const RateModel& m, double y2, const NumericOptions& opts) {
  if (const auto* p = std::get_if<models::Model1>(&m)) {
    const double k = p->mu / (2.0 * p->lambda);
    return y2 - k * (y2 * y2 - 1.0);
  }
  if (const auto* p = std::get_if<models::Model2>(&m)) {
    const double k = p->alpha * p->mu / p->lambda;
    return y2 - k * std::exp(1.0 / p->alpha) * std::expm1((y2 - 1.0) / p->alpha);
  }
  if (y2 == 1.0) return 1.0;
  auto ratio = [&m](double u) {
    return models::detail::death_unchecked(m, u) / models::detail::birth_unchecked(m, u);
  };
  return y2 - numerics::integrate(ratio, 1.0, y2, opts.quad()).value;
}

inline double general_y2_at_tmax(const RateModel& m, const NumericOptions& opts) {
  auto net = [&m](double x) { return models::birth_rate(m, x) - models::death_rate(m, x); };
  const double f1 = net(1.0);
  if (f1 < 0.0)
    throw NumericError(NumericError::Kind::subcritical,
                       "birth rate is below death rate at x=1: the fluid population never grows");
  if (f1 == 0.0) return 1.0;
  const double limit = models::domain_max(m);
  const auto [lo, hi] = numerics::grow_bracket_upward(net, 1.0, std::min(2.0, limit), opts.bracket_growth,
                                                      opts.max_iters, limit, true);
  return numerics::brent_root(net, lo, hi, opts.root()).root;
}

// dt/dy2 = 1 / (y1 b) and dy1/dy2 = 1 - d/b integrated in y2.
inline double general_time_of_y2(const RateModel& m, double y2, const NumericOptions& opts) {
  auto rhs = [&m](double u, const numerics::OdeState<2>& s) {
    const double b = models::detail::birth_unchecked(m, u);
    const double d = models::detail::death_unchecked(m, u);
    return numerics::OdeState<2>{1.0 - d / b, 1.0 / (s[0] * b)};
  };
  numerics::OdeOptions o{opts.quad_rel_tol, opts.quad_rel_tol * 1e-3, 0.0, 10000000};
  const auto end = numerics::dopri5<2>(rhs, 1.0, {1.0, 0.0}, y2, o, [](const auto&) {});
  return end[1];
}

}  // namespace detail

// Total progeny at the population peak, where b(y2) = d(y2).
inline double y2_at_tmax(const RateModel& m, const NumericOptions& opts = {}) {
  if (const auto* p = std::get_if<models::Model1>(&m)) {
    if (p->lambda < p->mu)
      throw NumericError(NumericError::Kind::subcritical,
                         "lambda < mu: the fluid population never grows");
    return p->lambda / p->mu;
  }
  if (const auto* p = std::get_if<models::Model2>(&m)) {
    const double y = p->alpha * std::log(p->lambda / p->mu);
    if (y < 1.0)
      throw NumericError(NumericError::Kind::subcritical,
                         "lambda exp(-1/alpha) < mu: the fluid population never grows");
    return y;
  }
  return detail::general_y2_at_tmax(m, opts);
}

// Total progeny at extinction, the root of y1(y2) = 0 above the peak.
inline double y2_at_extinction(const RateModel& m, const NumericOptions& opts = {}) {
  if (const auto* p = std::get_if<models::Model1>(&m)) return (p->lambda + std::hypot(p->lambda, p->mu)) / p->mu;
  if (models::birth_rate(m, 1.0) == 0.0) return 1.0;
  const bool grows = models::birth_rate(m, 1.0) > models::death_rate(m, 1.0);
  const double lo = grows ? y2_at_tmax(m, opts) : 1.0;
  auto h = [&m, &opts](double y) { return detail::y1_unchecked(m, y, opts); };
  const double limit = models::domain_max(m);
  const double hi0 = std::isfinite(limit) ? lo + 0.5 * (limit - lo) : 2.0 * lo;
  std::pair<double, double> br;
  try {
    br = numerics::grow_bracket_upward(h, lo, hi0, opts.bracket_growth, opts.max_iters, limit, false);
  } catch (const NumericError& e) {
    throw NumericError(NumericError::Kind::divergence,
                       std::string("fluid population never reaches zero: ") + e.what());
  }
  if (br.first == br.second) return br.first;
  return numerics::brent_root(h, br.first, br.second, opts.root()).root;
}

// Population as a function of progeny, for 1 <= y2 <= y2(inf).
inline double y1_of_y2(const RateModel& m, double y2, const NumericOptions& opts = {}) {
  if (!(y2 >= 1.0)) throw DomainError("y2=" + std::to_string(y2) + " is below 1");
  const double sup = y2_at_extinction(m, opts);
  if (y2 > sup)
    throw DomainError("y2=" + std::to_string(y2) + " exceeds the progeny at extinction " +
                      std::to_string(sup));
  return detail::y1_unchecked(m, y2, opts);
}

inline double y1_at_tmax(const RateModel& m, const NumericOptions& opts = {}) {
  const double y2 = y2_at_tmax(m, opts);
  if (const auto* p = std::get_if<models::Model1>(&m)) return p->lambda / (2.0 * p->mu) + p->mu / (2.0 * p->lambda);
  return detail::y1_unchecked(m, y2, opts);
}

// Time at which the fluid progeny reaches y2. Diverges as y2 -> y2(inf).
inline double time_of_y2(const RateModel& m, double y2, const NumericOptions& opts = {}) {
  if (!(y2 >= 1.0)) throw DomainError("y2=" + std::to_string(y2) + " is below 1");
  const double sup = y2_at_extinction(m, opts);
  if (!(y2 < sup))
    throw DomainError("y2=" + std::to_string(y2) + " is not below the progeny at extinction " +
                      std::to_string(sup) + "; the fluid time is infinite there");
  if (y2 == 1.0) return 0.0;
  if (const auto* p = std::get_if<models::Model1>(&m))
    return Model1Analytic::with_positive_root(p->lambda, p->mu).time_of_y2(y2);
  if (const auto* p = std::get_if<models::Model2>(&m)) {
    const double lambda = p->lambda, alpha = p->alpha, mu = p->mu;
    auto integrand = [=](double u) {
      return 1.0 / (lambda * u * std::exp(-u / alpha) + alpha * mu * std::expm1(-(u - 1.0) / alpha));
    };
    return numerics::integrate(integrand, 1.0, y2, opts.quad()).value;
  }
  return detail::general_time_of_y2(m, y2, opts);
}

inline double t_max(const RateModel& m, const NumericOptions& opts = {}) {
  return time_of_y2(m, y2_at_tmax(m, opts), opts);
}

// Descending crossing of population level eps: y1(t_eps) = eps, t_eps >= t_max.
inline EpsCrossing t_eps(const RateModel& m, double eps, const NumericOptions& opts = {}) {
  if (!(eps >= 1.0)) throw DomainError("eps must be >= 1");
  const double peak = y1_at_tmax(m, opts);
  if (eps > peak)
    throw DomainError("eps=" + std::to_string(eps) + " exceeds the fluid peak population " +
                      std::to_string(peak));
  double y2;
  if (const auto* p = std::get_if<models::Model1>(&m)) {
    const double l = p->lambda, mu = p->mu;
    const double disc = std::max(0.0, l * l + mu * mu - 2.0 * eps * mu * l);
    y2 = (l + std::sqrt(disc)) / mu;
  } else {
    const double lo = y2_at_tmax(m, opts);
    const double hi = y2_at_extinction(m, opts);
    auto f = [&](double y) { return detail::y1_unchecked(m, y, opts) - eps; };
    y2 = numerics::brent_root(f, lo, hi, opts.root()).root;
  }
  return {time_of_y2(m, y2, opts), y2};
}

// Harmonic function H(x) = psi(x + 1) + gamma; sum_{j<=n} 1/j at integers.
inline double harmonic(double x) {
  if (!(x > -1.0)) throw DomainError("harmonic function requires x > -1");
  if (x == std::floor(x) && x <= 1e7) {
    double s = 0.0;
    for (long j = static_cast<long>(x); j >= 1; --j) s += 1.0 / static_cast<double>(j);
    return s;
  }
  return boost::math::digamma(x + 1.0) + 0.57721566490153286060651209008240243;
}

// Expected maximum of n i.i.d. exponentials with the given rate, H(n)/rate.
// Non-integer n uses the continuous interpolation of H.
inline double expected_max_exponentials(double n, double rate) {
  if (!(n > 0.0)) throw DomainError("number of exponentials must be positive");
  if (!(rate > 0.0)) throw DomainError("exponential rate must be positive");
  return harmonic(n) / rate;
}

// t_eps followed by a pure-death phase of eps individuals.
inline ExtinctionEstimate t_ext_eps(const RateModel& m, double eps, const NumericOptions& opts = {}) {
  const auto cross = t_eps(m, eps, opts);
  ExtinctionEstimate e{ExtinctionMethod::epsilon};
  e.eps = eps;
  e.t_anchor = cross.t;
  e.y2_anchor = cross.y2;
  e.pop_at_anchor = eps;
  e.tail_mean = expected_max_exponentials(eps, models::death_rate(m, cross.y2));
  e.t_ext = e.t_anchor + e.tail_mean;
  return e;
}

// Anchored at the last birth, z = y2(inf) - 1, followed by a pure-death phase
// of the (real-valued) fluid population y1(t(z)).
inline ExtinctionEstimate t_ext_star(const RateModel& m, const NumericOptions& opts = {}) {
  const double sup = y2_at_extinction(m, opts);
  if (!(sup > 2.0))
    throw DomainError("progeny at extinction " + std::to_string(sup) + " is not above 2");
  ExtinctionEstimate e{ExtinctionMethod::star};
  e.y2_anchor = sup - 1.0;
  e.t_anchor = time_of_y2(m, e.y2_anchor, opts);
  e.pop_at_anchor = detail::y1_unchecked(m, e.y2_anchor, opts);
  if (!(e.pop_at_anchor > 0.0))
    throw DomainError("fluid population at the last-birth anchor is not positive");
  e.tail_mean = expected_max_exponentials(e.pop_at_anchor, models::death_rate(m, e.y2_anchor));
  e.t_ext = e.t_anchor + e.tail_mean;
  return e;
}

inline FluidSummary fluid_summary(const RateModel& m, const NumericOptions& opts = {}) {
  FluidSummary s;
  s.y2_tmax = y2_at_tmax(m, opts);
  s.y1_tmax = y1_at_tmax(m, opts);
  s.t_max = time_of_y2(m, s.y2_tmax, opts);
  s.y2_inf = y2_at_extinction(m, opts);
  return s;
}

// Solves the fluid ODEs on [0, t_end]. With an output grid the curve is
// sampled there through the dense output; otherwise every accepted step is
// recorded.
inline FluidCurve integrate_fluid(const RateModel& m, double t_end, const NumericOptions& opts = {},
                                  std::span<const double> grid = {}) {
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || grid[i] > t_end) throw DomainError("output grid must lie within [0, t_end]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("output grid must be strictly increasing");
  }
  auto rhs = [&m](double, const numerics::OdeState<2>& y) {
    const double x = detail::clamp_to_domain(m, y[1]);
    const double b = models::detail::birth_unchecked(m, x);
    const double d = models::detail::death_unchecked(m, x);
    return numerics::OdeState<2>{y[0] * (b - d), y[0] * b};
  };
  FluidCurve curve;
  curve.tolerance = opts.ode_rel_tol;
  std::size_t next = 0;
  auto push = [&curve](double t, const numerics::OdeState<2>& y) {
    curve.times.push_back(t);
    curve.y1.push_back(y[0]);
    curve.y2.push_back(y[1]);
  };
  if (grid.empty()) {
    push(0.0, {1.0, 1.0});
  } else {
    while (next < grid.size() && grid[next] == 0.0) push(grid[next++], {1.0, 1.0});
  }
  numerics::dopri5<2>(rhs, 0.0, {1.0, 1.0}, t_end, opts.ode(),
                      [&](const numerics::DenseStep<2>& step) {
                        if (grid.empty()) {
                          push(step.t1, step.y1);
                          return;
                        }
                        while (next < grid.size() && grid[next] <= step.t1) {
                          push(grid[next], grid[next] == step.t1 ? step.y1 : step(grid[next]));
                          ++next;
                        }
                      });
  return curve;
}

// lambda for which the descending crossing of eps happens at progeny y2star
// (Model 2 with parameters alpha, mu).
inline double lambda_of_y2star(double alpha, double mu, double eps, double y2star) {
  if (!(y2star > 1.0) || !(y2star > eps))
    throw DomainError("y2star must exceed max(1, eps)");
  return alpha * mu * std::exp(1.0 / alpha) * std::expm1((y2star - 1.0) / alpha) / (y2star - eps);
}

// t_eps expressed through y2star instead of lambda: integral over [1, y2star]
// of (y2* - eps) / (alpha mu) / [ (y2* - u - eps) e^{(1-u)/alpha}
//   + u e^{(y2* - u)/alpha} - (y2* - eps) ], evaluated here after scaling
// numerator and denominator by e^{-(y2* - u)/alpha}.
inline double t_eps_of_y2star(double alpha, double mu, double eps, double y2star,
                              const NumericOptions& opts = {}) {
  if (!(y2star > 1.0) || !(y2star > eps))
    throw DomainError("y2star must exceed max(1, eps)");
  const double span = y2star - eps;
  auto f = [=](double u) {
    const double damp = std::exp(-(y2star - u) / alpha);
    const double denom = (y2star - u - eps) * std::exp((1.0 - y2star) / alpha) + u - span * damp;
    return span * damp / (alpha * mu * denom);
  };
  return numerics::integrate(f, 1.0, y2star, opts.quad()).value;
}

struct MinimizeResult {
  double y2star = 0.0;
  double lambda = 0.0;
  double t_eps = 0.0;
  bool interior = false;  // false: the objective was monotone over the search range
};

// Smallest y2star on the descending branch: eps equals the peak population
// there, i.e. y2* - eps = alpha (1 - e^{(1 - y2*)/alpha}).
inline double y2star_lower_bound(double alpha, double /*mu*/, double eps, const NumericOptions& opts = {}) {
  auto g = [=](double y) { return y - eps + alpha * std::expm1((1.0 - y) / alpha); };
  const double lo = std::max(1.0, eps);
  if (g(lo) >= 0.0) return lo;
  const auto [a, b] = numerics::grow_bracket_upward(g, lo, lo + 1.0, opts.bracket_growth, opts.max_iters);
  return numerics::brent_root(g, a, b, opts.root()).root;
}

// Minimises t_eps over y2star (equivalently over lambda, since y2star
// increases with lambda) for Model 2.
inline MinimizeResult minimize_t_eps(double alpha, double mu, double eps, const NumericOptions& opts = {}) {
  if (!(eps >= 1.0)) throw DomainError("eps must be >= 1");
  if (!(alpha > 0.0) || !(mu > 0.0)) throw DomainError("alpha and mu must be positive");
  const double base = y2star_lower_bound(alpha, mu, eps, opts);
  auto objective = [&](double y) { return t_eps_of_y2star(alpha, mu, eps, y, opts); };
  // The objective vanishes at the lower bound, rises to a local maximum and
  // may then dip again. Scan points base + offset * r^k and stop at the first
  // sampled V: f(k-1) below both neighbours.
  const double offset = std::max(1.0, 0.01 * alpha);
  const double ratio = std::sqrt(opts.bracket_growth);
  std::vector<std::pair<double, double>> window;
  double last_y = base, last_f = 0.0;
  for (std::size_t k = 0; k < 4 * opts.max_iters; ++k) {
    const double y = base + offset * std::pow(ratio, static_cast<double>(k));
    if (!std::isfinite(y) || !std::isfinite(lambda_of_y2star(alpha, mu, eps, y))) break;
    double f;
    try {
      f = objective(y);
    } catch (const NumericError&) {
      if (!window.empty()) break;
      continue;
    }
    window.emplace_back(y, f);
    last_y = y;
    last_f = f;
    if (window.size() > 3) window.erase(window.begin());
    if (window.size() == 3 && window[1].second < window[0].second && window[1].second < window[2].second) {
      const auto best = numerics::golden_section(objective, window[0].first, window[2].first, 1e-10,
                                                 opts.max_iters);
      return {best.x, lambda_of_y2star(alpha, mu, eps, best.x), best.value, true};
    }
  }
  return {last_y, lambda_of_y2star(alpha, mu, eps, last_y), last_f, false};
}

}  // namespace progeny::fluid
