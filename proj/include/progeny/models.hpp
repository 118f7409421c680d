#pragma once

// Rate models for total-progeny-dependent birth-and-death processes.
//
// Each individual gives birth at rate b(x) and dies at rate d(x), where x is
// the total progeny (the number of individuals ever born). Rates are defined
// for real x >= 1; the SIR model is further restricted to x <= N.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "progeny/error.hpp"
#include "progeny/expr.hpp"

namespace progeny::models {

// b(x) = lambda / x, d(x) = mu
struct Model1 {
  double lambda;
  double mu;
};

// b(x) = lambda exp(-x / alpha), d(x) = mu
struct Model2 {
  double lambda;
  double alpha;
  double mu;
};

// b(x) = beta (1 - x / N), d(x) = gamma. z counts infectives, x counts cases.
struct Sir {
  double beta;
  double gamma;
  std::int64_t n_pop;
};

// Constant per-capita rates.
struct LinearBdp {
  double b;
  double d;
};

// User-supplied expressions in x, optionally restricted to x <= x_max.
struct Custom {
  RateExpr b_expr;
  RateExpr d_expr;
  double x_max = std::numeric_limits<double>::infinity();

  static Custom from_strings(std::string_view b, std::string_view d,
                             double x_max = std::numeric_limits<double>::infinity()) {
    return Custom{RateExpr::parse(b), RateExpr::parse(d), x_max};
  }
};

using RateModel = std::variant<Model1, Model2, Sir, LinearBdp, Custom>;

inline std::string model_name(const RateModel& m) {
  switch (m.index()) {
    case 0: return "model1";
    case 1: return "model2";
    case 2: return "sir";
    case 3: return "linear";
    default: return "custom";
  }
}

// Largest admissible total progeny.
inline double domain_max(const RateModel& m) {
  if (const auto* s = std::get_if<Sir>(&m)) return static_cast<double>(s->n_pop);
  if (const auto* c = std::get_if<Custom>(&m)) return c->x_max;
  return std::numeric_limits<double>::infinity();
}

namespace detail {

inline void check_domain(const RateModel& m, double x) {
  if (!(x >= 1.0)) throw DomainError("total progeny x=" + std::to_string(x) + " is below 1");
  if (x > domain_max(m))
    throw DomainError("total progeny x=" + std::to_string(x) + " exceeds the model domain bound " +
                      std::to_string(domain_max(m)));
}

inline double checked(double v, double x, const char* which) {
  if (!std::isfinite(v) || v < 0.0)
    throw EvaluationError(std::string(which) + " evaluated to " + std::to_string(v) + " at x=" +
                              std::to_string(x),
                          x);
  return v;
}

// Rates without the domain check, for hot loops whose state is known valid.
inline double birth_unchecked(const RateModel& m, double x) {
  switch (m.index()) {
    case 0: {
      const auto& p = std::get<Model1>(m);
      return p.lambda / x;
    }
    case 1: {
      const auto& p = std::get<Model2>(m);
      return p.lambda * std::exp(-x / p.alpha);
    }
    case 2: {
      const auto& p = std::get<Sir>(m);
      return p.beta * (1.0 - x / static_cast<double>(p.n_pop));
    }
    case 3: return std::get<LinearBdp>(m).b;
    default: return checked(std::get<Custom>(m).b_expr(x), x, "birth rate");
  }
}

inline double death_unchecked(const RateModel& m, double x) {
  switch (m.index()) {
    case 0: return std::get<Model1>(m).mu;
    case 1: return std::get<Model2>(m).mu;
    case 2: return std::get<Sir>(m).gamma;
    case 3: return std::get<LinearBdp>(m).d;
    default: return checked(std::get<Custom>(m).d_expr(x), x, "death rate");
  }
}

}  // namespace detail

inline double birth_rate(const RateModel& m, double x) {
  detail::check_domain(m, x);
  return detail::birth_unchecked(m, x);
}

inline double death_rate(const RateModel& m, double x) {
  detail::check_domain(m, x);
  return detail::death_unchecked(m, x);
}

struct Violation {
  std::string field;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {

inline void require_positive(std::vector<Violation>& out, const char* field, double v) {
  if (!(v > 0.0) || !std::isfinite(v))
    out.push_back({field, std::string(field) + " must be finite and > 0, got " + std::to_string(v)});
}

inline void require_non_negative(std::vector<Violation>& out, const char* field, double v) {
  if (!(v >= 0.0) || !std::isfinite(v))
    out.push_back({field, std::string(field) + " must be finite and >= 0, got " + std::to_string(v)});
}

// Probe points 1, 1.5, 1.5^2, ... up to 1e6, clipped to the domain, plus the
// declared upper bound.
inline std::vector<double> probe_grid(double x_max) {
  std::vector<double> grid;
  for (double x = 1.0; x <= 1e6 && x <= x_max; x *= 1.5) grid.push_back(x);
  if (std::isfinite(x_max) && x_max >= 1.0 && (grid.empty() || grid.back() != x_max))
    grid.push_back(x_max);
  return grid;
}

}  // namespace detail

// Best-effort validation. For custom models the rates are probed on a finite
// grid, which cannot prove positivity everywhere.
inline std::vector<Violation> validate(const RateModel& m) {
  std::vector<Violation> out;
  std::visit(
      [&out](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Model1>) {
          detail::require_positive(out, "lambda", p.lambda);
          detail::require_positive(out, "mu", p.mu);
        } else if constexpr (std::is_same_v<T, Model2>) {
          detail::require_positive(out, "lambda", p.lambda);
          detail::require_positive(out, "alpha", p.alpha);
          detail::require_positive(out, "mu", p.mu);
        } else if constexpr (std::is_same_v<T, Sir>) {
          detail::require_positive(out, "beta", p.beta);
          detail::require_positive(out, "gamma", p.gamma);
          if (p.n_pop < 1)
            out.push_back({"n_pop", "n_pop must be >= 1, got " + std::to_string(p.n_pop)});
        } else if constexpr (std::is_same_v<T, LinearBdp>) {
          detail::require_non_negative(out, "b", p.b);
          detail::require_non_negative(out, "d", p.d);
          if (p.b + p.d <= 0.0) out.push_back({"d", "b and d cannot both be zero"});
        } else {
          if (!(p.x_max >= 1.0))
            out.push_back({"x_max", "x_max must be >= 1, got " + std::to_string(p.x_max)});
          bool b_bad = false, d_bad = false, both_zero = false;
          for (double x : detail::probe_grid(p.x_max)) {
            const double b = p.b_expr(x);
            const double d = p.d_expr(x);
            if (!b_bad && !(std::isfinite(b) && b >= 0.0)) {
              b_bad = true;
              out.push_back({"b_expr", "birth rate is " + std::string(std::isfinite(b) ? "negative" : "non-finite") +
                                           " at probe x=" + std::to_string(x)});
            }
            if (!d_bad && !(std::isfinite(d) && d >= 0.0)) {
              d_bad = true;
              out.push_back({"d_expr", "death rate is " + std::string(std::isfinite(d) ? "negative" : "non-finite") +
                                           " at probe x=" + std::to_string(x)});
            }
            if (!both_zero && b == 0.0 && d == 0.0) {
              both_zero = true;
              out.push_back({"d_expr", "birth and death rates both vanish at probe x=" + std::to_string(x)});
            }
          }
        }
      },
      m);
  return out;
}

inline void require_valid(const RateModel& m) {
  const auto v = validate(m);
  if (v.empty()) return;
  std::string msg = "invalid " + model_name(m) + " model:";
  for (const auto& e : v) msg += " " + e.message + ";";
  throw ConfigError(msg);
}

namespace detail {
inline std::string number_text(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}
}  // namespace detail

// Expression strings computing the same rates as a built-in, for use with Custom.
inline std::pair<std::string, std::string> as_expressions(const RateModel& m) {
  using detail::number_text;
  return std::visit(
      [](const auto& p) -> std::pair<std::string, std::string> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Model1>) {
          return {number_text(p.lambda) + "/x", number_text(p.mu)};
        } else if constexpr (std::is_same_v<T, Model2>) {
          return {number_text(p.lambda) + "*exp(-x/" + number_text(p.alpha) + ")", number_text(p.mu)};
        } else if constexpr (std::is_same_v<T, Sir>) {
          return {number_text(p.beta) + "*(1-x/" + std::to_string(p.n_pop) + ")", number_text(p.gamma)};
        } else if constexpr (std::is_same_v<T, LinearBdp>) {
          return {number_text(p.b), number_text(p.d)};
        } else {
          return {p.b_expr.render(), p.d_expr.render()};
        }
      },
      m);
}

}  // namespace progeny::models
