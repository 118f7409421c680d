#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace progeny::numerics {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean; 0 when n < 2
  std::size_t n = 0;
};

// Two-pass mean and standard error with compensated sums, in input order.
inline MeanSe mean_and_se(std::span<const double> values) {
  MeanSe out;
  out.n = values.size();
  if (out.n == 0) return out;
  CompensatedSum s;
  for (double v : values) s.add(v);
  out.mean = s.value() / static_cast<double>(out.n);
  if (out.n < 2) return out;
  CompensatedSum ss;
  for (double v : values) ss.add((v - out.mean) * (v - out.mean));
  const double var = ss.value() / static_cast<double>(out.n - 1);
  out.se = std::sqrt(var / static_cast<double>(out.n));
  return out;
}

}  // namespace progeny::numerics
