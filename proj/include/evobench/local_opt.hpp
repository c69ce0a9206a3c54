#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "evobench/objective.hpp"

namespace evobench {

struct LocalOptSettings {
  std::size_t memory_pairs = 5;
  double fitness_tol = 1e-8;    // stop when |f_k - f_{k-1}| drops below
  double gradient_tol = 1e-8;   // or when max |g_i| drops below
  std::size_t max_iterations = 5000;
  double sufficient_decrease = 1e-4;  // Armijo constant c1
  double curvature = 0.9;             // strong-Wolfe constant c2
  std::size_t max_line_search_evals = 40;

  void validate() const;
};

enum class LocalOptStatus { Converged, MaxIterations, LineSearchFailure };

std::string_view to_string(LocalOptStatus status);

struct LocalOptResult {
  std::vector<double> x;
  double value = 0.0;
  LocalOptStatus status = LocalOptStatus::Converged;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
};

// Called once per accepted iterate (iteration 0 is the start point).
struct IterationInfo {
  std::size_t iteration;
  double value;
  double previous_value;
  double step_length;
  double directional_derivative;  // g_k . d_k at the start of the step
  std::span<const double> x;
};
using IterationObserver = std::function<void(const IterationInfo&)>;

// Limited-memory BFGS with a strong-Wolfe line search. Unconstrained: box
// containment is left to the objective (harmonic walls). The returned value
// never exceeds f(x0). Throws NonFiniteError on a NaN/inf value or gradient.
LocalOptResult minimize(const Objective& f, std::span<const double> x0,
                        const LocalOptSettings& settings = {},
                        const IterationObserver& observer = {});

}  // namespace evobench
