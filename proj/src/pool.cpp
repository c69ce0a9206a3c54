#include <algorithm>
#include <cmath>
#include <sstream>

#include "evobench/errors.hpp"
#include "evobench/ga.hpp"

namespace evobench {

void PoolConfig::validate() const {
  if (pool_size < 2) throw ConfigError("pool_size must be >= 2");
  if (!(fitness_diversity >= 0.0)) throw ConfigError("fitness_diversity must be >= 0");
  if (!(mutation_probability >= 0.0 && mutation_probability <= 1.0)) {
    throw ConfigError("mutation_probability must lie in [0, 1]");
  }
  if (!(father_rank_shape > 0.0) || !(germany_cut_shape > 0.0)) {
    throw ConfigError("father_rank_shape and germany_cut_shape must be positive");
  }
  if (!(termination_epsilon >= 0.0)) throw ConfigError("termination_epsilon must be >= 0");
  if (max_fill_draws_per_slot < 1) throw ConfigError("max_fill_draws_per_slot must be >= 1");
}

void NichingConfig::validate() const {
  if (!enabled) return;
  if (cells_per_dim < 1) throw ConfigError("niching: cells_per_dim must be >= 1");
  if (mnic < 1) throw ConfigError("niching: mnic must be >= 1");
}

std::string_view to_string(InsertResult r) {
  switch (r) {
    case InsertResult::Inserted: return "inserted";
    case InsertResult::RejectedWorse: return "rejected-worse";
    case InsertResult::RejectedDiversity: return "rejected-diversity";
    case InsertResult::RejectedNiche: return "rejected-niche";
  }
  return "unknown";
}

// ------------------------------------------------------------ NichingGrid

std::size_t CellKeyHash::operator()(const CellKey& key) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (std::int32_t v : key) {
    h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(v));
    h *= 0x100000001b3ULL;
  }
  return h;
}

NichingGrid::NichingGrid(const NichingConfig& config, Bounds bounds, std::size_t dims)
    : config_(config), bounds_(bounds), dims_(dims) {
  config_.validate();
  bounds_.validate();
  if (dims_ == 0) throw ConfigError("niching: dimension must be positive");
}

CellKey NichingGrid::cell_of(std::span<const double> x) const {
  if (x.size() != dims_) throw DimensionError("niching: coordinate count mismatch");
  CellKey key(dims_);
  const double cells = static_cast<double>(config_.cells_per_dim);
  const auto last = static_cast<std::int32_t>(config_.cells_per_dim - 1);
  for (std::size_t j = 0; j < dims_; ++j) {
    const double pos = std::floor((x[j] - bounds_.lower) / bounds_.width() * cells);
    // Clamp in double first so far-away penalty-region points cannot overflow.
    const double clamped = std::clamp(pos, 0.0, static_cast<double>(last));
    key[j] = static_cast<std::int32_t>(clamped);
  }
  return key;
}

std::size_t NichingGrid::occupancy(const CellKey& key) const {
  const auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

void NichingGrid::add(const CellKey& key) {
  ++counts_[key];
  ++tracked_;
}

void NichingGrid::remove(const CellKey& key) {
  auto it = counts_.find(key);
  if (it == counts_.end() || it->second == 0) throw std::logic_error("niching: removing from an empty cell");
  if (--it->second == 0) counts_.erase(it);
  --tracked_;
}

std::size_t NichingGrid::max_occupancy() const {
  std::size_t m = 0;
  for (const auto& [key, count] : counts_) m = std::max(m, count);
  return m;
}

NicheDecision niche_check(const NichingGrid& grid, const Pool& pool, const Genome& candidate) {
  const CellKey key = grid.cell_of(candidate.genes);
  if (grid.occupancy(key) < grid.config().mnic) return {NicheVerdict::Admit, 0};
  if (!grid.config().replace_in_cell) return {NicheVerdict::Reject, 0};
  // Members are sorted, so the first match from the back is the cell's worst.
  for (std::size_t rank = pool.size(); rank-- > 0;) {
    if (pool.cell(rank) == key) {
      if (candidate.fitness < pool[rank].fitness) return {NicheVerdict::AdmitReplacing, rank};
      return {NicheVerdict::Reject, 0};
    }
  }
  return {NicheVerdict::Reject, 0};
}

// -------------------------------------------------------------------- Pool

Pool::Pool(std::size_t capacity, double fitness_diversity, std::optional<NichingGrid> niching)
    : capacity_(capacity), diversity_(fitness_diversity), grid_(std::move(niching)) {
  if (capacity_ < 2) throw ConfigError("pool capacity must be >= 2");
  members_.reserve(capacity_);
  cells_.reserve(capacity_);
}

bool Pool::violates_diversity(double fitness, std::optional<std::size_t> ignore) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), fitness - diversity_,
                             [](const Genome& g, double f) { return g.fitness < f; });
  for (; it != members_.end() && it->fitness <= fitness + diversity_; ++it) {
    const auto rank = static_cast<std::size_t>(it - members_.begin());
    if (ignore && *ignore == rank) continue;
    if (std::abs(it->fitness - fitness) < diversity_) return true;
  }
  return false;
}

InsertResult Pool::place(Genome candidate, std::optional<std::size_t> victim) {
  if (victim) {
    if (grid_) grid_->remove(cells_[*victim]);
    members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(*victim));
    cells_.erase(cells_.begin() + static_cast<std::ptrdiff_t>(*victim));
  }
  // Equal fitness goes behind existing members.
  auto pos = std::upper_bound(members_.begin(), members_.end(), candidate.fitness,
                              [](double f, const Genome& g) { return f < g.fitness; });
  const auto offset = pos - members_.begin();
  CellKey key = grid_ ? grid_->cell_of(candidate.genes) : CellKey{};
  if (grid_) grid_->add(key);
  members_.insert(pos, std::move(candidate));
  cells_.insert(cells_.begin() + offset, std::move(key));
  return InsertResult::Inserted;
}

InsertResult Pool::try_fill(Genome candidate, bool check_diversity) {
  if (full()) return try_insert(std::move(candidate));
  std::optional<std::size_t> victim;
  if (grid_) {
    const NicheDecision d = niche_check(*grid_, *this, candidate);
    if (d.verdict == NicheVerdict::Reject) return InsertResult::RejectedNiche;
    if (d.verdict == NicheVerdict::AdmitReplacing) victim = d.member;
  }
  if (check_diversity && violates_diversity(candidate.fitness, victim)) return InsertResult::RejectedDiversity;
  return place(std::move(candidate), victim);
}

InsertResult Pool::try_insert(Genome candidate) {
  if (!full()) return try_fill(std::move(candidate));
  if (!(candidate.fitness < worst().fitness)) return InsertResult::RejectedWorse;
  std::size_t victim = members_.size() - 1;
  if (grid_) {
    const NicheDecision d = niche_check(*grid_, *this, candidate);
    if (d.verdict == NicheVerdict::Reject) return InsertResult::RejectedNiche;
    if (d.verdict == NicheVerdict::AdmitReplacing) victim = d.member;
  }
  if (violates_diversity(candidate.fitness, victim)) return InsertResult::RejectedDiversity;
  return place(std::move(candidate), victim);
}

std::optional<std::string> Pool::audit() const {
  std::ostringstream msg;
  if (members_.size() > capacity_) {
    msg << "pool holds " << members_.size() << " members, capacity " << capacity_;
    return msg.str();
  }
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (!std::isfinite(members_[i].fitness)) {
      msg << "member " << i << " has non-finite fitness";
      return msg.str();
    }
    if (i > 0) {
      if (members_[i].fitness < members_[i - 1].fitness) {
        msg << "members " << i - 1 << " and " << i << " are out of order";
        return msg.str();
      }
      // Sorted order makes adjacent pairs the closest ones.
      if (members_[i].fitness - members_[i - 1].fitness < diversity_) {
        msg << "members " << i - 1 << " and " << i << " violate the fitness diversity";
        return msg.str();
      }
    }
  }
  if (grid_) {
    if (grid_->tracked() != members_.size()) {
      msg << "niching grid tracks " << grid_->tracked() << " members, pool holds " << members_.size();
      return msg.str();
    }
    std::unordered_map<CellKey, std::size_t, CellKeyHash> recount;
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (grid_->cell_of(members_[i].genes) != cells_[i]) {
        msg << "member " << i << " is filed under the wrong cell";
        return msg.str();
      }
      ++recount[cells_[i]];
    }
    for (const auto& [key, count] : recount) {
      if (grid_->occupancy(key) != count) return std::string("niching occupancy out of sync");
      if (count > grid_->config().mnic) {
        msg << "a cell holds " << count << " members, mnic is " << grid_->config().mnic;
        return msg.str();
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> audit_fitness_cache(const Pool& pool, const Objective& f, double tol) {
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double v = f.value(pool[i].genes);
    if (std::abs(v - pool[i].fitness) > tol) {
      std::ostringstream msg;
      msg << "member " << i << " caches fitness " << pool[i].fitness << " but evaluates to " << v;
      return msg.str();
    }
  }
  return std::nullopt;
}

}  // namespace evobench
