#pragma once

// Dormand-Prince 5(4) integrator with step-size control and the
// fourth-order continuous extension for dense output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "progeny/error.hpp"

namespace progeny::numerics {

template <std::size_t N>
using OdeState = std::array<double, N>;

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 selects automatically
  std::size_t max_steps = 1000000;
};

// One accepted step [t0, t1] with its interpolant.
template <std::size_t N>
struct DenseStep {
  double t0, t1;
  OdeState<N> y0, y1;
  std::array<OdeState<N>, 5> coeffs;

  OdeState<N> operator()(double t) const {
    const double h = t1 - t0;
    const double theta = h == 0.0 ? 1.0 : (t - t0) / h;
    const double theta1 = 1.0 - theta;
    OdeState<N> out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = coeffs[0][i] +
               theta * (coeffs[1][i] + theta1 * (coeffs[2][i] + theta * (coeffs[3][i] + theta1 * coeffs[4][i])));
    return out;
  }
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

namespace detail {

template <std::size_t N>
double error_norm(const OdeState<N>& err, const OdeState<N>& y0, const OdeState<N>& y1,
                  const OdeOptions& o) {
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = o.abs_tol + o.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    acc += (err[i] / sc) * (err[i] / sc);
  }
  return std::sqrt(acc / static_cast<double>(N));
}

}  // namespace detail

// Integrates y' = rhs(t, y) from t0 to t_end, calling on_step(DenseStep) for
// each accepted step. Returns the state at t_end.
template <std::size_t N, class Rhs, class OnStep>
OdeState<N> dopri5(Rhs&& rhs, double t0, OdeState<N> y, double t_end, const OdeOptions& opts,
                   OnStep&& on_step, OdeStats* stats = nullptr) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  OdeStats local;
  OdeStats& st = stats ? *stats : local;
  using S = OdeState<N>;
  auto axpy = [](const S& base, double h, std::initializer_list<std::pair<double, const S*>> terms) {
    S out = base;
    for (const auto& [c, k] : terms)
      for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    return out;
  };

  double t = t0;
  if (t_end <= t0) return y;
  S k1 = rhs(t, y);
  ++st.evaluations;

  double h = opts.initial_step;
  if (h <= 0.0) {
    // Hairer & Wanner's starting-step heuristic.
    double d0 = 0.0, dd1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opts.abs_tol + opts.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      dd1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    dd1 = std::sqrt(dd1 / N);
    double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
    h0 = std::min(h0, t_end - t0);
    const S y1 = axpy(y, h0, {{1.0, &k1}});
    const S f1 = rhs(t + h0, y1);
    ++st.evaluations;
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opts.abs_tol + opts.rel_tol * std::abs(y[i]);
      d2 += ((f1[i] - k1[i]) / sc) * ((f1[i] - k1[i]) / sc);
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double dm = std::max(dd1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min(100.0 * h0, h1);
  }

  double err_prev = 1e-4;
  bool last_rejected = false;
  while (t < t_end) {
    if (st.accepted + st.rejected >= opts.max_steps)
      throw NumericError(NumericError::Kind::max_iterations,
                         "ODE integration exceeded " + std::to_string(opts.max_steps) + " steps");
    const bool final_step = t + h >= t_end;
    if (final_step) h = t_end - t;
    if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::abs(t))
      throw NumericError(NumericError::Kind::stiffness,
                         "step size underflow at t=" + std::to_string(t) + " (problem may be stiff)");

    const S k2 = rhs(t + c2 * h, axpy(y, h, {{a21, &k1}}));
    const S k3 = rhs(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const S k4 = rhs(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const S k5 = rhs(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const S k6 = rhs(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const S y_new = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const S k7 = rhs(t + h, y_new);
    st.evaluations += 6;

    S err;
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double en = detail::error_norm(err, y, y_new, opts);
    bool finite = std::isfinite(en);
    for (double v : y_new) finite = finite && std::isfinite(v);

    if (finite && en <= 1.0) {
      DenseStep<N> step;
      step.t0 = t;
      step.t1 = final_step ? t_end : t + h;
      step.y0 = y;
      step.y1 = y_new;
      for (std::size_t i = 0; i < N; ++i) {
        const double dy = y_new[i] - y[i];
        const double bspl = h * k1[i] - dy;
        step.coeffs[0][i] = y[i];
        step.coeffs[1][i] = dy;
        step.coeffs[2][i] = bspl;
        step.coeffs[3][i] = dy - h * k7[i] - bspl;
        step.coeffs[4][i] =
            h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      on_step(static_cast<const DenseStep<N>&>(step));
      ++st.accepted;
      t = step.t1;
      y = y_new;
      k1 = k7;
      // PI step-size controller
      double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h *= fac;
      err_prev = std::max(en, 1e-4);
      last_rejected = false;
    } else {
      ++st.rejected;
      h *= finite ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.25;
      last_rejected = true;
    }
  }
  return y;
}

}  // namespace progeny::numerics
