// optimize.hpp
// Multi-start derivative-free maximization (Hooke-Jeeves pattern search) over
// unconstrained angle vectors.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace lpow {

struct OptimizerConfig {
  int restarts = 64;
  int max_iterations = 500;
  double step_tolerance = 1e-9;
  double value_tolerance = 1e-10;
  std::uint64_t seed = 20240601;

  void validate() const {
    if (restarts < 1) throw std::invalid_argument("OptimizerConfig: restarts must be >= 1");
    if (max_iterations < 1) throw std::invalid_argument("OptimizerConfig: max_iterations must be >= 1");
    if (!(step_tolerance > 0.0) || !(value_tolerance > 0.0)) {
      throw std::invalid_argument("OptimizerConfig: tolerances must be > 0");
    }
  }
};

struct OptimizationResult {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> x;
  bool converged = false;  // at least one restart met step_tolerance
  int restarts_used = 0;
  int converged_restarts = 0;
};

/// SplitMix64 finalizer; used to derive independent seeds from (seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace detail {

template <class Objective>
double explore(Objective& f, std::vector<double>& x, double fx, double step, double tol) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + step;
    double trial = f(x);
    if (trial > fx + tol) {
      fx = trial;
      continue;
    }
    x[i] = orig - step;
    trial = f(x);
    if (trial > fx + tol) {
      fx = trial;
      continue;
    }
    x[i] = orig;
  }
  return fx;
}

/// One Hooke-Jeeves run from x. Returns true when the step fell below tolerance.
template <class Objective>
bool pattern_search(Objective& f, std::vector<double>& x, double& fx, double step, int max_iterations,
                    double step_tol, double value_tol) {
  int iter = 0;
  while (iter < max_iterations) {
    std::vector<double> y = x;
    double fy = explore(f, y, fx, step, value_tol);
    ++iter;
    if (!(fy > fx + value_tol)) {
      step *= 0.5;
      if (step < step_tol) return true;
      continue;
    }
    // Pattern moves: extrapolate along y - x while that keeps paying off.
    for (;;) {
      std::vector<double> z(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) z[i] = 2.0 * y[i] - x[i];
      x = std::move(y);
      fx = fy;
      if (iter >= max_iterations) break;
      const double fz = explore(f, z, f(z), step, value_tol);
      ++iter;
      if (!(fz > fx + value_tol)) break;
      y = std::move(z);
      fy = fz;
    }
  }
  return false;
}

}  // namespace detail

/// Maximizes f over R^dim from `restarts` uniform starts in [0, 2pi)^dim.
/// Restart r draws its start from mix_seed(cfg.seed, r), so results depend only
/// on the config.
template <class Objective>
OptimizationResult maximize(Objective f, std::size_t dim, const OptimizerConfig& cfg,
                            double initial_step = std::numbers::pi / 4.0) {
  cfg.validate();
  OptimizationResult best;
  for (int r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    std::vector<double> x(dim);
    for (auto& xi : x) xi = 2.0 * std::numbers::pi * unit_uniform(rng);
    double fx = f(x);
    const bool ok = detail::pattern_search(f, x, fx, initial_step, cfg.max_iterations, cfg.step_tolerance,
                                           cfg.value_tolerance);
    ++best.restarts_used;
    if (ok) ++best.converged_restarts;
    if (fx > best.value) {
      best.value = fx;
      best.x = x;
    }
  }
  best.converged = best.converged_restarts > 0;
  return best;
}

}  // namespace lpow
