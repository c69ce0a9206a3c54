#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "evobench/errors.hpp"
#include "evobench/functions.hpp"
#include "evobench/ga.hpp"
#include "evobench/grunge.hpp"
#include "evobench/rng.hpp"

using namespace evobench;

namespace {

PoolConfig small_pool(std::size_t steps = 200000) {
  PoolConfig c;
  c.pool_size = 50;
  c.max_steps = steps;
  return c;
}

void same_run(const RunRecord& a, const RunRecord& b) {
  CHECK(a.steps == b.steps);
  CHECK(a.success == b.success);
  CHECK(a.best_value == b.best_value);
  CHECK(a.best_genes == b.best_genes);
  CHECK(a.accepted_steps == b.accepted_steps);
  CHECK(a.init.draws == b.init.draws);
}

}  // namespace

TEST_CASE("initial pool") {
  const FunctionSpec f = lookup_function("rastrigin", 4);
  PoolConfig c = small_pool();
  InitStats stats;
  const Pool p = initialize_pool(f, c, std::nullopt, {}, 3, 1, &stats);
  CHECK(p.full());
  CHECK_FALSE(p.audit());
  CHECK_FALSE(audit_fitness_cache(p, f));
  CHECK(stats.draws >= 50);
  for (const auto& g : p.members())
    for (double v : g.genes) CHECK(f.bounds().contains(v));
  // identical for a seed, independent of the evaluation workers
  const Pool q = initialize_pool(f, c, std::nullopt, {}, 3, 4);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == q[i]);
}

TEST_CASE("initial pool with local optimization") {
  const FunctionSpec f = lookup_function("rastrigin", 3);
  PoolConfig c = small_pool();
  InitStats stats;
  const Pool p = initialize_pool(f, c, LocalOptSettings{}, {}, 1, 1, &stats);
  CHECK(stats.locopt_calls == stats.draws);
  CHECK(stats.locopt_iterations > 0);
  for (const auto& g : p.members()) {
    const auto grad = f.gradient(g.genes);
    for (double v : grad) CHECK(std::abs(v) < 1e-3);
  }
}

TEST_CASE("fill budget") {
  // F6 takes values in [0, 1]; 500 members 0.01 apart cannot exist.
  const FunctionSpec f = lookup_function("schafferf6", 2);
  PoolConfig c;
  c.pool_size = 500;
  c.fitness_diversity = 0.01;
  c.max_fill_draws_per_slot = 3;
  CHECK_THROWS_AS(initialize_pool(f, c, std::nullopt, {}, 1), InitializationError);
  c.fill_diversity = false;
  CHECK_NOTHROW(initialize_pool(f, c, std::nullopt, {}, 1));
}

TEST_CASE("global step keeps the invariants") {
  const FunctionSpec f = lookup_function("ackley", 6);
  PoolConfig c = small_pool();
  Pool p = initialize_pool(f, c, std::nullopt, {}, 2);
  Rng rng(2);
  double best = p.best().fitness;
  std::size_t accepted = 0;
  for (int s = 0; s < 3000; ++s) {
    const StepOutcome o = global_step(p, f, CrossoverKind::portugal(2), c, std::nullopt, rng);
    accepted += o.accepted;
    CHECK(o.accepted == (o.insert == InsertResult::Inserted));
    REQUIRE_FALSE(p.audit());
    REQUIRE(p.size() == c.pool_size);
    REQUIRE(p.best().fitness <= best);
    CHECK(o.best_fitness == p.best().fitness);
    best = p.best().fitness;
  }
  CHECK(accepted > 0);
  CHECK_FALSE(audit_fitness_cache(p, f));
  Pool empty(5, 0.0);
  CHECK_THROWS_AS(global_step(empty, f, CrossoverKind::germany(), c, std::nullopt, rng), ConfigError);
}

TEST_CASE("runs reach the target and are reproducible") {
  const FunctionSpec f = lookup_function("rastrigin", 4);
  const PoolConfig c = small_pool();
  RunOptions o;
  o.locopt = true;
  o.seed = 17;
  const RunRecord a = run(f, CrossoverKind::germany(), c, o);
  const RunRecord b = run(f, CrossoverKind::germany(), c, o);
  CHECK(a.success);
  CHECK(a.best_value <= a.target_value + c.termination_epsilon);
  CHECK(f.value(a.best_genes) == a.best_value);
  CHECK(a.function == "rastrigin");
  CHECK(a.dim == 4);
  CHECK(a.algorithm == "Germany");
  CHECK(a.locopt);
  CHECK(a.seed == 17);
  same_run(a, b);
  o.seed = 18;
  const RunRecord d = run(f, CrossoverKind::germany(), c, o);
  CHECK((d.best_genes != a.best_genes || d.steps != a.steps));
}

TEST_CASE("step budget") {
  const FunctionSpec f = lookup_function("schwefel", 10);
  PoolConfig c = small_pool(300);
  RunOptions o;
  const RunRecord r = run(f, CrossoverKind::holland(), c, o);
  CHECK_FALSE(r.success);
  CHECK(r.steps == 300);
}

TEST_CASE("a pool that already meets the target needs no steps") {
  const FunctionSpec f = lookup_function("ackley", 3);
  PoolConfig c = small_pool();
  c.termination_epsilon = 100.0;
  const RunRecord r = run(f, CrossoverKind::germany(), c, {});
  CHECK(r.success);
  CHECK(r.steps == 0);
}

TEST_CASE("several workers share one pool") {
  const FunctionSpec f = lookup_function("rastrigin", 5);
  PoolConfig c = small_pool();
  RunOptions o;
  o.locopt = true;
  o.workers = 4;
  std::size_t observed = 0;
  bool healthy = true;
  o.on_step = [&](const Pool& p, const StepOutcome&) {
    ++observed;
    healthy = healthy && !p.audit() && p.full();
  };
  const RunRecord r = run(f, CrossoverKind::portugal(1), c, o);
  CHECK(r.success);
  CHECK(healthy);
  CHECK(observed == r.steps);
}

TEST_CASE("niching during a run") {
  const FunctionSpec f = lookup_function("lunacek", 2);
  PoolConfig c = small_pool(3000);
  RunOptions o;
  o.niching = {true, 4, 5, true};
  std::size_t worst_cell = 0;
  o.on_step = [&](const Pool& p, const StepOutcome&) {
    REQUIRE_FALSE(p.audit());
    worst_cell = std::max(worst_cell, p.niching()->max_occupancy());
  };
  run(f, CrossoverKind::germany(), c, o);
  CHECK(worst_cell <= 5);
}

TEST_CASE("landscapes need a target") {
  const auto path = std::filesystem::temp_directory_path() / "evobench_engine_landscape.txt";
  grunge_save(grunge_generate(2, 5, 1), path);
  const FunctionSpec f = lookup_function("grunge:" + path.string(), 0);
  CHECK_FALSE(f.target_value());
  CHECK_THROWS_AS(run(f, CrossoverKind::germany(), small_pool(), {}), ConfigError);
  const auto cat = grunge_enumerate(dynamic_cast<const GrungeLandscape&>(f.objective()), 30);
  RunOptions o;
  o.locopt = true;
  PoolConfig c = small_pool();
  c.pool_size = 4;
  c.fill_diversity = false;
  c.termination_epsilon = 1e-8;
  const RunRecord r = run(f.with_target(cat.best().value), CrossoverKind::germany(), c, o);
  CHECK(r.success);
  std::filesystem::remove(path);
}
