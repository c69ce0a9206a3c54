#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "evobench/errors.hpp"
#include "evobench/ga.hpp"

namespace evobench {

std::string CrossoverKind::name() const {
  switch (family) {
    case CrossoverFamily::Holland: return "Holland";
    case CrossoverFamily::Germany: return "Germany";
    case CrossoverFamily::Portugal: return "Portugal:" + std::to_string(cuts);
  }
  return "unknown";
}

CrossoverKind CrossoverKind::parse(std::string_view text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "holland") return holland();
  if (lower == "germany") return germany();
  constexpr std::string_view kPortugal = "portugal";
  if (lower.starts_with(kPortugal)) {
    std::string_view rest = std::string_view(lower).substr(kPortugal.size());
    if (rest.starts_with(':')) rest.remove_prefix(1);
    if (rest.empty()) return portugal(1);
    std::size_t k = 0;
    const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), k);
    if (res.ec != std::errc() || res.ptr != rest.data() + rest.size()) k = 0;
    if (k >= 1) return portugal(k);
  }
  throw ConfigError("unknown crossover algorithm '" + std::string(text) +
                    "' (expected holland, germany or portugal:<k>)");
}

std::vector<CrossoverKind> standard_algorithms() {
  return {CrossoverKind::holland(),     CrossoverKind::germany(),     CrossoverKind::portugal(1),
          CrossoverKind::portugal(3), CrossoverKind::portugal(5), CrossoverKind::portugal(7)};
}

std::size_t father_rank(double g, double shape, std::size_t pool_size) {
  const double scaled = std::floor(std::abs(g) * shape * static_cast<double>(pool_size));
  const double last = static_cast<double>(pool_size - 1);
  return static_cast<std::size_t>(std::min(scaled, last));
}

ParentPick select_parents(const Pool& pool, const PoolConfig& config, Rng& rng) {
  ParentPick pick;
  pick.mother = rng.index(pool.size());
  pick.father = father_rank(rng.normal(), config.father_rank_shape, pool.size());
  return pick;
}

std::size_t germany_cut(std::size_t length, double shape, double g) {
  const double len = static_cast<double>(length);
  const double pos = std::round(0.5 * len + g * shape * len);
  return static_cast<std::size_t>(std::clamp(pos, 0.0, len - 1.0));
}

std::vector<std::size_t> portugal_cuts(std::size_t length, std::size_t k, Rng& rng) {
  if (length < 2 || k > length - 1) {
    throw OperatorError("Portugal:" + std::to_string(k) + " cannot place distinct cuts in a genome of length " +
                        std::to_string(length));
  }
  // Floyd's sampling of k distinct values from {1, .., L-1}.
  const std::size_t span = length - 1;
  std::vector<std::size_t> cuts;
  cuts.reserve(k);
  for (std::size_t j = span - k; j < span; ++j) {
    const std::size_t t = 1 + rng.index(j + 1);
    if (std::find(cuts.begin(), cuts.end(), t) == cuts.end()) {
      cuts.push_back(t);
    } else {
      cuts.push_back(j + 1);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

std::pair<Genome, Genome> crossover_at(const Genome& mother, const Genome& father,
                                       std::span<const std::size_t> cuts) {
  const std::size_t length = mother.genes.size();
  if (father.genes.size() != length) throw OperatorError("crossover: parents differ in length");
  Genome child1{mother.genes, 0.0};
  Genome child2{father.genes, 0.0};
  bool swapped = false;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= cuts.size(); ++k) {
    const std::size_t end = k < cuts.size() ? cuts[k] : length;
    if (end < start || end > length) throw OperatorError("crossover: cut indices must be sorted and in range");
    if (swapped) {
      for (std::size_t i = start; i < end; ++i) {
        child1.genes[i] = father.genes[i];
        child2.genes[i] = mother.genes[i];
      }
    }
    swapped = !swapped;
    start = end;
  }
  return {std::move(child1), std::move(child2)};
}

std::pair<Genome, Genome> crossover(const Genome& mother, const Genome& father, CrossoverKind kind,
                                    const PoolConfig& config, Rng& rng) {
  const std::size_t length = mother.genes.size();
  switch (kind.family) {
    case CrossoverFamily::Holland:
      return crossover_at(mother, father, {});
    case CrossoverFamily::Germany: {
      const std::size_t cut = germany_cut(length, config.germany_cut_shape, rng.normal());
      return crossover_at(mother, father, std::span<const std::size_t>(&cut, 1));
    }
    case CrossoverFamily::Portugal: {
      if (kind.cuts < 1) throw OperatorError("Portugal needs at least one cut");
      const auto cuts = portugal_cuts(length, kind.cuts, rng);
      return crossover_at(mother, father, cuts);
    }
  }
  throw OperatorError("unknown crossover family");
}

bool mutate(Genome& genome, const Bounds& bounds, double probability, Rng& rng) {
  if (genome.genes.empty() || !rng.bernoulli(probability)) return false;
  const std::size_t i = rng.index(genome.genes.size());
  genome.genes[i] = rng.uniform(bounds.lower, bounds.upper);
  return true;
}

}  // namespace evobench
