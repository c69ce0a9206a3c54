#include <doctest.h>

#include <cmath>
#include <limits>

#include "evobench/errors.hpp"
#include "evobench/functions.hpp"
#include "evobench/local_opt.hpp"

using namespace evobench;

namespace {

// Ill-conditioned diagonal quadratic sum a_i (x_i - c_i)^2.
class Quadratic final : public Objective {
 public:
  std::vector<double> a, c;
  std::size_t dimension() const override { return a.size(); }
  double value(std::span<const double> x) const override {
    double f = 0;
    for (std::size_t i = 0; i < a.size(); ++i) f += a[i] * (x[i] - c[i]) * (x[i] - c[i]);
    return f;
  }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    for (std::size_t i = 0; i < a.size(); ++i) g[i] = 2 * a[i] * (x[i] - c[i]);
  }
};

class Rosenbrock final : public Objective {
 public:
  std::size_t dimension() const override { return 2; }
  double value(std::span<const double> x) const override {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  }
  void gradient(std::span<const double> x, std::span<double> g) const override {
    g[0] = -400 * x[0] * (x[1] - x[0] * x[0]) - 2 * (1 - x[0]);
    g[1] = 200 * (x[1] - x[0] * x[0]);
  }
};

class Poisoned final : public Objective {
 public:
  std::size_t dimension() const override { return 1; }
  double value(std::span<const double> x) const override {
    return x[0] < 0.5 ? std::numeric_limits<double>::quiet_NaN() : x[0] * x[0];
  }
  void gradient(std::span<const double> x, std::span<double> g) const override { g[0] = 2 * x[0]; }
};

}  // namespace

TEST_CASE("quadratic minimum is found exactly") {
  Quadratic q;
  q.a = {1, 10, 100, 1000, 0.5};
  q.c = {1, -2, 3, 0.25, -7};
  const auto r = minimize(q, std::vector<double>(5, 4.0));
  CHECK(r.status == LocalOptStatus::Converged);
  for (std::size_t i = 0; i < 5; ++i) CHECK(r.x[i] == doctest::Approx(q.c[i]).epsilon(1e-5));
  CHECK(r.value < 1e-9);
}

TEST_CASE("Rosenbrock valley") {
  Rosenbrock f;
  LocalOptSettings s;
  s.fitness_tol = 1e-14;
  s.gradient_tol = 1e-10;
  const auto r = minimize(f, std::vector<double>{-1.2, 1.0}, s);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("never worse than the start, iterates monotone") {
  const FunctionSpec f = lookup_function("rastrigin", 8);
  for (double start : {-4.9, -1.3, 0.7, 2.2, 5.0}) {
    std::vector<double> x0(8);
    for (std::size_t i = 0; i < 8; ++i) x0[i] = start + 0.11 * i;
    double last = std::numeric_limits<double>::infinity();
    bool monotone = true;
    const auto r = minimize(f, x0, {}, [&](const IterationInfo& it) {
      monotone = monotone && it.value <= last;
      last = it.value;
    });
    CHECK(monotone);
    CHECK(r.value <= f.value(x0));
    CHECK(r.value == f.value(r.x));
  }
}

TEST_CASE("local minimum of Rastrigin is a stationary point") {
  const FunctionSpec f = lookup_function("rastrigin", 6);
  const auto r = minimize(f, std::vector<double>{1.1, -2.1, 0.9, 3.2, -0.1, 4.0});
  const auto g = f.gradient(r.x);
  for (double v : g) CHECK(std::abs(v) < 1e-4);
  // basins of integer lattice points
  for (double v : r.x) CHECK(std::abs(v - std::round(v)) < 0.05);
}

TEST_CASE("non-finite values raise") {
  Poisoned f;
  bool raised = false;
  try {
    minimize(f, std::vector<double>{3.0});
  } catch (const NonFiniteError& e) {
    raised = true;
    CHECK(e.iterate().size() == 1);
  }
  CHECK(raised);
}

TEST_CASE("settings validation") {
  LocalOptSettings s;
  s.memory_pairs = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.curvature = 1e-5;  // below c1
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.fitness_tol = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.max_iterations = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_NOTHROW(LocalOptSettings{}.validate());
}

TEST_CASE("iteration cap") {
  const FunctionSpec f = lookup_function("ackley", 20);
  LocalOptSettings s;
  s.max_iterations = 3;
  const auto r = minimize(f, std::vector<double>(20, 13.3), s);
  CHECK(r.iterations <= 3);
  CHECK(r.status == LocalOptStatus::MaxIterations);
}

TEST_CASE("status names") {
  CHECK(to_string(LocalOptStatus::Converged) == "converged");
}
