#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "progeny/error.hpp"

namespace progeny::numerics {

struct RootOptions {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  std::size_t max_iters = 200;
};

struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
};

// Brent-Dekker root finding on a sign-changing bracket [lo, hi]: inverse
// quadratic or secant steps when they stay inside the bracket and shrink it
// fast enough, bisection otherwise.
template <class F>
RootResult brent_root(F&& f, double lo, double hi, const RootOptions& opts = {}) {
  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return {a, 0.0, 0};
  if (fb == 0.0) return {b, 0.0, 0};
  if ((fa > 0.0) == (fb > 0.0))
    throw NumericError(NumericError::Kind::no_bracket,
                       "root not bracketed: f(" + std::to_string(lo) + ")=" + std::to_string(fa) +
                           ", f(" + std::to_string(hi) + ")=" + std::to_string(fb));

  double c = a, fc = fa, d = b - a, e = d;
  for (std::size_t iter = 1; iter <= opts.max_iters; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                       0.5 * std::max(opts.abs_tol, opts.rel_tol * std::abs(b));
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return {b, fb, iter};

    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0)
        q = -q;
      else
        p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  throw NumericError(NumericError::Kind::max_iterations,
                     "root solve exceeded " + std::to_string(opts.max_iters) + " iterations");
}

// Moves the upper end of [lo, hi] outward (hi - lo multiplied by `growth`
// each attempt, never past `limit`) until f changes sign. Returns the bracket.
// With `limit_inclusive` the limit itself may be probed; otherwise probes
// approach it geometrically.
template <class F>
std::pair<double, double> grow_bracket_upward(F&& f, double lo, double hi, double growth,
                                              std::size_t max_iters,
                                              double limit = std::numeric_limits<double>::infinity(),
                                              bool limit_inclusive = false) {
  const double flo = f(lo);
  if (flo == 0.0) return {lo, lo};
  double width = hi - lo;
  for (std::size_t i = 0; i < max_iters && std::isfinite(hi); ++i) {
    const double fhi = f(hi);
    if (fhi == 0.0 || (fhi > 0.0) != (flo > 0.0)) return {lo, hi};
    width *= growth;
    double next = lo + width;
    if (next >= limit) {
      next = limit_inclusive ? limit : hi + 0.5 * (limit - hi);
      if (!(next > hi)) break;
    }
    lo = hi;
    hi = next;
  }
  throw NumericError(NumericError::Kind::no_bracket,
                     "no sign change found above x=" + std::to_string(lo) + " (last probe " +
                         std::to_string(hi) + ")");
}

struct MinimumResult {
  double x = 0.0;
  double value = 0.0;
  std::size_t iterations = 0;
};

// Golden-section search for the minimum of a unimodal function on [a, b].
template <class F>
MinimumResult golden_section(F&& f, double a, double b, double rel_tol, std::size_t max_iters) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  std::size_t iter = 0;
  while (iter < max_iters && (b - a) > rel_tol * (std::abs(x1) + std::abs(x2))) {
    ++iter;
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? MinimumResult{x1, f1, iter} : MinimumResult{x2, f2, iter};
}

}  // namespace progeny::numerics
