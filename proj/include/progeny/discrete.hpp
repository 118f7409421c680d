#pragma once

// Discrete-generation binary splitting: each individual has two children
// with probability p2 and none otherwise.
//   progeny mode: p2 = K / (K + sqrt(x))
//   popsize mode: p2 = K / (K + z)
// The argument is frozen at its start-of-generation value.

#include <cmath>
#include <cstdint>
#include <vector>

#include "progeny/error.hpp"
#include "progeny/rng.hpp"

namespace progeny::ssa {

enum class DiscreteMode { progeny, popsize };

struct Generation {
  std::int64_t index;
  std::int64_t population;
  std::int64_t progeny;

  friend bool operator==(const Generation&, const Generation&) = default;
};

struct GenerationSeries {
  DiscreteMode mode;
  double k_const;
  std::vector<Generation> generations;
};

inline double two_child_probability(DiscreteMode mode, double k, std::int64_t population, std::int64_t progeny) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("K must be positive and finite");
  const double arg = mode == DiscreteMode::progeny ? std::sqrt(static_cast<double>(progeny))
                                                   : static_cast<double>(population);
  return k / (k + arg);
}

// Generations 0 .. n_gens-1, starting from one individual with progeny 1.
inline GenerationSeries simulate_discrete_generations(DiscreteMode mode, double k, std::int64_t n_gens,
                                                      std::uint64_t seed) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("K must be positive and finite");
  if (n_gens < 0) throw DomainError("number of generations must be non-negative");
  GenerationSeries out{mode, k, {}};
  out.generations.reserve(static_cast<std::size_t>(n_gens));
  auto rng = random::Xoshiro256::for_stream(seed, 0);
  std::int64_t z = 1, x = 1;
  for (std::int64_t g = 0; g < n_gens; ++g) {
    out.generations.push_back({g, z, x});
    const double p2 = two_child_probability(mode, k, z, x);
    std::int64_t splitting = 0;
    for (std::int64_t i = 0; i < z; ++i) splitting += rng.bernoulli(p2) ? 1 : 0;
    z = 2 * splitting;
    x += z;
  }
  return out;
}

}  // namespace progeny::ssa
