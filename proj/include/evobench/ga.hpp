#pragma once

// Pool-based (steady-state) genetic algorithm.
//
// The pool holds a fixed number of genomes sorted by fitness. Each global
// step picks a mother uniformly and a father biased toward the best ranks,
// crosses them, mutates both children, optionally relaxes both with L-BFGS,
// and offers the fitter child to the pool. The child is inserted only when it
// beats the current worst member, keeps the fitness-diversity gap to every
// member and, with niching on, fits into its grid cell.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "evobench/functions.hpp"
#include "evobench/local_opt.hpp"
#include "evobench/rng.hpp"

namespace evobench {

struct Genome {
  std::vector<double> genes;
  double fitness = 0.0;

  bool operator==(const Genome&) const = default;
};

enum class CrossoverFamily { Holland, Germany, Portugal };

// Holland: no cut. Germany: one cut drawn from a normal centered on the
// middle of the genome. Portugal:k: k distinct uniformly placed cuts.
struct CrossoverKind {
  CrossoverFamily family = CrossoverFamily::Germany;
  std::size_t cuts = 1;

  static CrossoverKind holland() { return {CrossoverFamily::Holland, 0}; }
  static CrossoverKind germany() { return {CrossoverFamily::Germany, 1}; }
  static CrossoverKind portugal(std::size_t k) { return {CrossoverFamily::Portugal, k}; }

  // "Holland", "Germany", "Portugal:3"
  std::string name() const;
  // Case-insensitive; accepts the names above and "portugal3".
  static CrossoverKind parse(std::string_view text);

  bool operator==(const CrossoverKind&) const = default;
};

// Holland, Germany, Portugal:1/3/5/7.
std::vector<CrossoverKind> standard_algorithms();

struct PoolConfig {
  std::size_t pool_size = 1000;
  double fitness_diversity = 1e-8;
  double mutation_probability = 0.05;
  double father_rank_shape = 0.1;
  double germany_cut_shape = 0.3;
  double termination_epsilon = 1e-6;
  std::size_t max_steps = 10'000'000;
  // Initial fill gives up after this many draws per pool slot.
  std::size_t max_fill_draws_per_slot = 50;
  // When off, the initial fill admits members regardless of the fitness gap
  // (needed where relaxed fitness collapses onto few levels, e.g. radially
  // symmetric objectives). Steps still apply the rule.
  bool fill_diversity = true;

  void validate() const;
};

struct NichingConfig {
  bool enabled = false;
  std::size_t cells_per_dim = 10;
  std::size_t mnic = 100;  // maximum number of individuals per cell
  // A full cell admits a candidate that beats its worst member, evicting that
  // member. When off, full cells reject outright.
  bool replace_in_cell = true;

  void validate() const;
};

using CellKey = std::vector<std::int32_t>;

struct CellKeyHash {
  std::size_t operator()(const CellKey& key) const noexcept;
};

// Static grid over the principal search box with sparse occupancy counts.
class NichingGrid {
 public:
  NichingGrid(const NichingConfig& config, Bounds bounds, std::size_t dims);

  // Coordinates outside the box clamp into the edge cells.
  CellKey cell_of(std::span<const double> x) const;
  std::size_t occupancy(const CellKey& key) const;
  void add(const CellKey& key);
  void remove(const CellKey& key);

  std::size_t tracked() const noexcept { return tracked_; }
  std::size_t max_occupancy() const;
  std::size_t occupied_cells() const noexcept { return counts_.size(); }
  const NichingConfig& config() const noexcept { return config_; }

 private:
  NichingConfig config_;
  Bounds bounds_;
  std::size_t dims_;
  std::unordered_map<CellKey, std::size_t, CellKeyHash> counts_;
  std::size_t tracked_ = 0;
};

enum class InsertResult { Inserted, RejectedWorse, RejectedDiversity, RejectedNiche };

std::string_view to_string(InsertResult r);

class Pool;

enum class NicheVerdict { Admit, AdmitReplacing, Reject };

struct NicheDecision {
  NicheVerdict verdict = NicheVerdict::Admit;
  std::size_t member = 0;  // rank to evict for AdmitReplacing
};

NicheDecision niche_check(const NichingGrid& grid, const Pool& pool, const Genome& candidate);

class Pool {
 public:
  Pool(std::size_t capacity, double fitness_diversity, std::optional<NichingGrid> niching = std::nullopt);

  std::size_t size() const noexcept { return members_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool full() const noexcept { return members_.size() == capacity_; }
  double fitness_diversity() const noexcept { return diversity_; }

  // Rank 0 is the fittest.
  const Genome& operator[](std::size_t rank) const { return members_[rank]; }
  const Genome& best() const { return members_.front(); }
  const Genome& worst() const { return members_.back(); }
  std::span<const Genome> members() const noexcept { return members_; }

  const std::optional<NichingGrid>& niching() const noexcept { return grid_; }
  const CellKey& cell(std::size_t rank) const { return cells_[rank]; }

  // True when some member other than `ignore` lies within the diversity gap.
  bool violates_diversity(double fitness, std::optional<std::size_t> ignore = std::nullopt) const;

  // Initial fill: adds without evicting while below capacity (a full niche
  // cell may still swap out its worst member). `check_diversity` off skips
  // the fitness-gap rule.
  InsertResult try_fill(Genome candidate, bool check_diversity = true);
  // Steady-state insertion into a full pool.
  InsertResult try_insert(Genome candidate);

  // First violated invariant (sortedness, size, diversity, niche counts), if any.
  std::optional<std::string> audit() const;

 private:
  InsertResult place(Genome candidate, std::optional<std::size_t> victim);

  std::size_t capacity_;
  double diversity_;
  std::vector<Genome> members_;
  std::vector<CellKey> cells_;
  std::optional<NichingGrid> grid_;
};

// Fitness cached in every member matches the objective at its genes.
std::optional<std::string> audit_fitness_cache(const Pool& pool, const Objective& f, double tol = 1e-12);

// ----------------------------------------------------------------- operators

struct ParentPick {
  std::size_t mother = 0;
  std::size_t father = 0;
};

// floor(|g| * shape * pool_size), clamped to the worst rank.
std::size_t father_rank(double g, double shape, std::size_t pool_size);
ParentPick select_parents(const Pool& pool, const PoolConfig& config, Rng& rng);

// clamp(round(L/2 + g * shape * L), 0, L-1)
std::size_t germany_cut(std::size_t length, double shape, double g);
// k distinct sorted cut indices from {1, .., L-1}.
std::vector<std::size_t> portugal_cuts(std::size_t length, std::size_t k, Rng& rng);

// Children alternate parent segments at the (sorted) cuts; child1 starts
// with the mother, child2 is the complement. Children carry no fitness yet.
std::pair<Genome, Genome> crossover_at(const Genome& mother, const Genome& father,
                                       std::span<const std::size_t> cuts);
std::pair<Genome, Genome> crossover(const Genome& mother, const Genome& father, CrossoverKind kind,
                                    const PoolConfig& config, Rng& rng);

// With the given probability, replaces one uniformly chosen gene with a
// uniform draw from the bounds. Returns whether a gene changed.
bool mutate(Genome& genome, const Bounds& bounds, double probability, Rng& rng);

// ---------------------------------------------------------------- stepping

struct StepOutcome {
  bool accepted = false;
  InsertResult insert = InsertResult::RejectedWorse;
  bool error = false;  // non-finite fitness; the step still counts
  double child_fitness = 0.0;
  double best_fitness = 0.0;
  std::size_t locopt_iterations = 0;
};

StepOutcome global_step(Pool& pool, const FunctionSpec& f, CrossoverKind kind, const PoolConfig& config,
                        const std::optional<LocalOptSettings>& locopt, Rng& rng);

struct InitStats {
  std::size_t draws = 0;
  std::size_t locopt_calls = 0;
  std::size_t locopt_iterations = 0;

  bool operator==(const InitStats&) const = default;
};

// Uniform random genomes (locally optimized when `locopt` is set) until the
// pool is full. Deterministic for a seed. Throws InitializationError when the
// draw budget runs out.
Pool initialize_pool(const FunctionSpec& f, const PoolConfig& config,
                     const std::optional<LocalOptSettings>& locopt, const NichingConfig& niching,
                     std::uint64_t seed, unsigned workers = 1, InitStats* stats = nullptr);

struct RunOptions {
  bool locopt = false;
  LocalOptSettings locopt_settings{};
  NichingConfig niching{};
  std::uint64_t seed = 1;
  // 1 gives bitwise-reproducible runs; more workers share the pool.
  unsigned workers = 1;
  // Called after every step (under the pool lock when workers > 1).
  std::function<void(const Pool&, const StepOutcome&)> on_step;
};

// One GA run's configuration and outcome.
struct RunRecord {
  std::string function;
  std::size_t dim = 0;
  std::string algorithm;
  bool locopt = false;
  std::size_t niche_cells = 0;  // 0 when niching is off
  std::size_t mnic = 0;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  bool success = false;
  double best_value = 0.0;
  double wall_ms = 0.0;  // informational only

  std::vector<double> best_genes;
  double target_value = 0.0;
  double termination_epsilon = 0.0;
  std::size_t step_errors = 0;
  std::size_t accepted_steps = 0;
  InitStats init{};

  bool operator==(const RunRecord&) const = default;
};

// Steps until the best fitness reaches target + epsilon or max_steps pass.
// A pool that already meets the target after initialization succeeds at 0 steps.
RunRecord run(const FunctionSpec& f, CrossoverKind kind, const PoolConfig& config, const RunOptions& options);

}  // namespace evobench
