#pragma once

// Self-checks behind `evobench validate`: gradients against central
// differences, values at the known minima, and pool invariants over a short run.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "evobench/functions.hpp"
#include "evobench/ga.hpp"

namespace evobench {

struct CheckResult {
  std::string suite;
  std::string subject;
  bool pass = false;
  std::string detail;
};

// max_i |g_i - fd_i| / max(max_i |fd_i|, floor), central differences with a
// per-coordinate step h * max(1, |x_i|).
double gradient_relative_error(const Objective& f, std::span<const double> x, double h = 1e-6,
                               double floor = 1e-8);

// Worst relative error over `points` uniform draws from the function's box.
CheckResult check_gradient(const FunctionSpec& f, std::size_t points, std::uint64_t seed,
                           double tolerance = 1e-5);
CheckResult check_known_minimum(const FunctionSpec& f);
// Short run auditing the pool after every step (sortedness, size, diversity,
// monotone best, niche occupancy, cached fitness).
CheckResult check_pool_invariants(const FunctionSpec& f, CrossoverKind kind, std::size_t steps,
                                  std::uint64_t seed, bool locopt, const NichingConfig& niching = {});
// Loads and validates a landscape file; failures become a failed check.
CheckResult check_landscape_file(const std::filesystem::path& path);

// Dimension used for a function when none is requested.
std::size_t default_check_dimension(std::string_view function);

}  // namespace evobench
