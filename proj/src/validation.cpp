#include "evobench/validation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evobench/errors.hpp"
#include "evobench/grunge.hpp"
#include "evobench/rng.hpp"

namespace evobench {

double gradient_relative_error(const Objective& f, std::span<const double> x, double h, double floor) {
  std::vector<double> g(x.size()), probe(x.begin(), x.end());
  f.gradient(x, g);
  double err = 0.0, scale = floor;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + step;
    const double up = f.value(probe);
    probe[i] = x[i] - step;
    const double down = f.value(probe);
    probe[i] = x[i];
    const double fd = (up - down) / (2.0 * step);
    err = std::max(err, std::abs(g[i] - fd));
    scale = std::max(scale, std::abs(fd));
  }
  return err / scale;
}

CheckResult check_gradient(const FunctionSpec& f, std::size_t points, std::uint64_t seed, double tolerance) {
  CheckResult r{"gradient", f.name() + " " + std::to_string(f.dimension()) + "-D", true, ""};
  Rng rng(seed);
  std::vector<double> x(f.dimension());
  double worst = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    for (double& v : x) v = rng.uniform(f.bounds().lower, f.bounds().upper);
    worst = std::max(worst, gradient_relative_error(f, x));
  }
  r.pass = worst < tolerance;
  std::ostringstream d;
  d << points << " points, worst relative error " << worst;
  r.detail = d.str();
  return r;
}

CheckResult check_known_minimum(const FunctionSpec& f) {
  CheckResult r{"minimum", f.name() + " " + std::to_string(f.dimension()) + "-D", false, ""};
  if (!f.target_value() || !f.target_point()) {
    r.detail = "no known minimum";
    return r;
  }
  const double v = f.value(*f.target_point());
  const double gap = std::abs(v - *f.target_value());
  r.pass = gap <= f.target_tolerance();
  std::ostringstream d;
  d << "f(argmin) = " << v << ", expected " << *f.target_value() << " +- " << f.target_tolerance();
  r.detail = d.str();
  return r;
}

CheckResult check_pool_invariants(const FunctionSpec& f, CrossoverKind kind, std::size_t steps,
                                  std::uint64_t seed, bool locopt, const NichingConfig& niching) {
  CheckResult r{"pool", f.name() + " " + kind.name() + (locopt ? " locopt" : ""), true, ""};
  PoolConfig config;
  config.pool_size = 100;
  config.max_steps = steps;
  config.termination_epsilon = 0.0;
  RunOptions options;
  options.locopt = locopt;
  options.niching = niching;
  options.seed = seed;
  double last_best = std::numeric_limits<double>::infinity();
  std::size_t step = 0;
  options.on_step = [&](const Pool& pool, const StepOutcome&) {
    ++step;
    if (!r.pass) return;
    std::optional<std::string> problem = pool.audit();
    if (!problem && pool.size() != config.pool_size) problem = "pool size changed";
    if (!problem && pool.best().fitness > last_best) problem = "best fitness increased";
    if (!problem && locopt) problem = audit_fitness_cache(pool, f, 1e-9 * (1.0 + std::abs(pool.worst().fitness)));
    last_best = pool.best().fitness;
    if (problem) {
      r.pass = false;
      r.detail = "step " + std::to_string(step) + ": " + *problem;
    }
  };
  const RunRecord rec = run(f, kind, config, options);
  if (r.pass) r.detail = std::to_string(rec.steps) + " steps audited";
  return r;
}

CheckResult check_landscape_file(const std::filesystem::path& path) {
  CheckResult r{"landscape", path.filename().string(), false, ""};
  try {
    const GrungeLandscape l = grunge_load(path);
    l.validate();
    r.pass = true;
    r.detail = l.name();
  } catch (const std::exception& e) {
    r.detail = e.what();
  }
  return r;
}

std::size_t default_check_dimension(std::string_view function) {
  if (function == "schafferf6") return 2;
  return 5;
}

}  // namespace evobench
