#pragma once

// Globally adaptive 7/15-point Gauss-Kronrod quadrature. The interval with the
// largest error estimate is halved until the summed estimate meets the
// requested tolerance.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

#include "progeny/error.hpp"

namespace progeny::numerics {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
};

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_intervals = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kronrod_weights[7];
  double gauss = fc * gauss_weights[3];
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * kronrod_nodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kronrod_weights[i] * pair;
    if (i % 2 == 1) gauss += gauss_weights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opts = {}) {
  QuadResult out;
  if (a == b) return out;
  if (!std::isfinite(a) || !std::isfinite(b))
    throw DomainError("integration limits must be finite");
  if (a > b) {
    out = integrate(f, b, a, opts);
    out.value = -out.value;
    return out;
  }

  std::priority_queue<detail::Segment> work;
  work.push(detail::gauss_kronrod_15(f, a, b));
  out.evaluations = 15;
  double total = work.top().value;
  double error = work.top().error;

  while (true) {
    if (!std::isfinite(total))
      throw NumericError(NumericError::Kind::tolerance, "integrand is not finite on the interval");
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    if (error <= target) break;
    if (work.size() >= opts.max_intervals)
      throw NumericError(NumericError::Kind::tolerance,
                         "quadrature did not converge: error estimate " + std::to_string(error) +
                             " exceeds target " + std::to_string(target));
    const detail::Segment worst = work.top();
    work.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw NumericError(NumericError::Kind::tolerance, "quadrature interval became too small");
    const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    work.push(left);
    work.push(right);
  }

  // Re-sum from scratch to shed accumulated update round-off.
  std::vector<detail::Segment> segs;
  segs.reserve(work.size());
  while (!work.empty()) {
    segs.push_back(work.top());
    work.pop();
  }
  std::sort(segs.begin(), segs.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  out.value = 0.0;
  out.error = 0.0;
  for (const auto& s : segs) {
    out.value += s.value;
    out.error += s.error;
  }
  out.intervals = segs.size();
  return out;
}

}  // namespace progeny::numerics
