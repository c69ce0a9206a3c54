#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "evobench/errors.hpp"
#include "evobench/ga.hpp"

namespace evobench {

namespace {

struct Evaluation {
  bool ok = true;
  std::size_t locopt_iterations = 0;
};

// Relaxes (when locopt is set) and scores a genome in place.
Evaluation evaluate(Genome& genome, const FunctionSpec& f, const std::optional<LocalOptSettings>& locopt) {
  Evaluation ev;
  try {
    if (locopt) {
      auto r = minimize(f, genome.genes, *locopt);
      genome.genes = std::move(r.x);
      genome.fitness = r.value;
      ev.locopt_iterations = r.iterations;
    } else {
      genome.fitness = f.value(genome.genes);
    }
  } catch (const NonFiniteError&) {
    ev.ok = false;
  }
  if (ev.ok && !std::isfinite(genome.fitness)) ev.ok = false;
  return ev;
}

struct Offspring {
  Genome child;
  bool ok = true;
  std::size_t locopt_iterations = 0;
};

// Crossing, mutation and optional relaxation of both children; returns the
// fitter one (child1 on ties).
Offspring breed(const Genome& mother, const Genome& father, const FunctionSpec& f, CrossoverKind kind,
                const PoolConfig& config, const std::optional<LocalOptSettings>& locopt, Rng& rng) {
  auto [child1, child2] = crossover(mother, father, kind, config, rng);
  mutate(child1, f.bounds(), config.mutation_probability, rng);
  mutate(child2, f.bounds(), config.mutation_probability, rng);
  const Evaluation e1 = evaluate(child1, f, locopt);
  const Evaluation e2 = evaluate(child2, f, locopt);
  Offspring out;
  out.locopt_iterations = e1.locopt_iterations + e2.locopt_iterations;
  if (e1.ok && (!e2.ok || !(child2.fitness < child1.fitness))) {
    out.child = std::move(child1);
  } else if (e2.ok) {
    out.child = std::move(child2);
  } else {
    out.ok = false;
  }
  return out;
}

StepOutcome offer(Pool& pool, Offspring&& offspring) {
  StepOutcome outcome;
  outcome.locopt_iterations = offspring.locopt_iterations;
  if (!offspring.ok) {
    outcome.error = true;
    outcome.child_fitness = std::numeric_limits<double>::quiet_NaN();
  } else {
    outcome.child_fitness = offspring.child.fitness;
    outcome.insert = pool.try_insert(std::move(offspring.child));
    outcome.accepted = outcome.insert == InsertResult::Inserted;
  }
  outcome.best_fitness = pool.best().fitness;
  return outcome;
}

std::optional<LocalOptSettings> locopt_of(const RunOptions& options) {
  if (!options.locopt) return std::nullopt;
  return options.locopt_settings;
}

}  // namespace

StepOutcome global_step(Pool& pool, const FunctionSpec& f, CrossoverKind kind, const PoolConfig& config,
                        const std::optional<LocalOptSettings>& locopt, Rng& rng) {
  if (!pool.full()) throw ConfigError("global_step: pool is not initialized");
  const ParentPick pick = select_parents(pool, config, rng);
  Offspring offspring = breed(pool[pick.mother], pool[pick.father], f, kind, config, locopt, rng);
  return offer(pool, std::move(offspring));
}

Pool initialize_pool(const FunctionSpec& f, const PoolConfig& config,
                     const std::optional<LocalOptSettings>& locopt, const NichingConfig& niching,
                     std::uint64_t seed, unsigned workers, InitStats* stats) {
  config.validate();
  niching.validate();
  if (locopt) locopt->validate();
  std::optional<NichingGrid> grid;
  if (niching.enabled) grid.emplace(niching, f.bounds(), f.dimension());
  Pool pool(config.pool_size, config.fitness_diversity, std::move(grid));

  Rng rng(seed);
  const std::size_t budget = config.pool_size * config.max_fill_draws_per_slot;
  const std::size_t dim = f.dimension();
  const Bounds b = f.bounds();
  InitStats local;
  workers = std::max(1u, workers);

  std::vector<Genome> batch;
  std::vector<Evaluation> evals;
  while (!pool.full()) {
    if (local.draws >= budget) {
      throw InitializationError("could not fill a pool of " + std::to_string(config.pool_size) +
                                " distinct individuals within " + std::to_string(budget) +
                                " draws; the relaxed fitness may take too few distinct values"
                                " (disable fill diversity, or shrink the pool)");
    }
    // Candidates are drawn serially so the pool does not depend on the
    // worker count; only the evaluation fans out.
    const std::size_t want = std::min(config.pool_size - pool.size(), budget - local.draws);
    batch.assign(want, Genome{});
    for (auto& g : batch) {
      g.genes.resize(dim);
      for (double& v : g.genes) v = rng.uniform(b.lower, b.upper);
    }
    evals.assign(want, Evaluation{});
    if (workers == 1 || want < 2) {
      for (std::size_t i = 0; i < want; ++i) evals[i] = evaluate(batch[i], f, locopt);
    } else {
      std::atomic<std::size_t> next{0};
      auto work = [&] {
        for (std::size_t i = next++; i < want; i = next++) evals[i] = evaluate(batch[i], f, locopt);
      };
      std::vector<std::jthread> threads;
      for (unsigned w = 0; w < std::min<std::size_t>(workers, want); ++w) threads.emplace_back(work);
    }
    for (std::size_t i = 0; i < want; ++i) {
      ++local.draws;
      if (locopt) {
        ++local.locopt_calls;
        local.locopt_iterations += evals[i].locopt_iterations;
      }
      if (evals[i].ok) pool.try_fill(std::move(batch[i]), config.fill_diversity);
      if (pool.full()) break;
    }
  }
  if (stats) *stats = local;
  return pool;
}

RunRecord run(const FunctionSpec& f, CrossoverKind kind, const PoolConfig& config, const RunOptions& options) {
  config.validate();
  options.niching.validate();
  if (!f.target_value()) {
    throw ConfigError(f.name() + ": no target value known; enumerate the landscape first");
  }
  const auto start = std::chrono::steady_clock::now();
  const auto locopt = locopt_of(options);

  RunRecord record;
  record.function = f.name();
  record.dim = f.dimension();
  record.algorithm = kind.name();
  record.locopt = options.locopt;
  record.niche_cells = options.niching.enabled ? options.niching.cells_per_dim : 0;
  record.mnic = options.niching.enabled ? options.niching.mnic : 0;
  record.seed = options.seed;
  record.target_value = *f.target_value();
  record.termination_epsilon = config.termination_epsilon;
  const double threshold = *f.target_value() + config.termination_epsilon;

  Pool pool = initialize_pool(f, config, locopt, options.niching, options.seed, options.workers, &record.init);

  auto finish = [&](std::size_t steps, bool success) {
    record.steps = steps;
    record.success = success;
    record.best_value = pool.best().fitness;
    record.best_genes = pool.best().genes;
    record.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return record;
  };

  if (pool.best().fitness <= threshold) return finish(0, true);

  const unsigned workers = std::max(1u, options.workers);
  if (workers == 1) {
    Rng rng(derive_seed(options.seed, 1));
    for (std::size_t step = 1; step <= config.max_steps; ++step) {
      const StepOutcome outcome = global_step(pool, f, kind, config, locopt, rng);
      record.step_errors += outcome.error ? 1 : 0;
      record.accepted_steps += outcome.accepted ? 1 : 0;
      if (options.on_step) options.on_step(pool, outcome);
      if (outcome.best_fitness <= threshold) return finish(step, true);
    }
    return finish(config.max_steps, false);
  }

  // Shared pool: selection and insertion are serialized, breeding is not.
  std::mutex mutex;
  std::atomic<std::size_t> issued{0};
  std::atomic<bool> done{false};
  std::size_t completed = 0, solved_at = 0;
  auto worker = [&](unsigned index) {
    Rng rng(derive_seed(options.seed, index + 1));
    while (!done.load(std::memory_order_relaxed)) {
      if (++issued > config.max_steps) break;
      Genome mother, father;
      {
        std::lock_guard lock(mutex);
        const ParentPick pick = select_parents(pool, config, rng);
        mother = pool[pick.mother];
        father = pool[pick.father];
      }
      Offspring offspring = breed(mother, father, f, kind, config, locopt, rng);
      std::lock_guard lock(mutex);
      if (done.load()) break;
      const StepOutcome outcome = offer(pool, std::move(offspring));
      // Steps are counted in completion order, so the count matches what
      // on_step observed.
      ++completed;
      record.step_errors += outcome.error ? 1 : 0;
      record.accepted_steps += outcome.accepted ? 1 : 0;
      if (options.on_step) options.on_step(pool, outcome);
      if (outcome.best_fitness <= threshold) {
        solved_at = completed;
        done = true;
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker, w);
  }
  if (done) return finish(solved_at, true);
  return finish(config.max_steps, false);
}

}  // namespace evobench
