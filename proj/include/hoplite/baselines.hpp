#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hoplite/pattern.hpp"
#include "hoplite/scoring.hpp"

namespace hoplite {

/// R-BH: a uniform K-subset.
IlluminationPattern pattern_random(std::size_t cell_count, std::size_t beams, std::mt19937_64& rng);

/// P-BH: {(slot * K + m) mod N : m < K}.
IlluminationPattern pattern_periodic(std::size_t cell_count, std::size_t beams,
                                     std::uint64_t slot_index);

/// G-BH: the K largest queues, ties to the lower id.
IlluminationPattern pattern_greedy(std::span<const double> queue_packets, std::size_t beams);
IlluminationPattern pattern_greedy(std::span<const std::int64_t> queue_packets, std::size_t beams);

struct GaConfig {
  std::size_t population_size = 500;
  std::size_t generations = 50;
  double crossover_rate = 0.9;
  double mutation_rate = 0.05;  // per member
  std::uint64_t rng_seed = 1;
  ScorerKind fitness_scorer = ScorerKind::bruteforce;

  void validate() const;
};

struct GaResult {
  IlluminationPattern best;
  double best_fitness = 0.0;
  /// Best fitness seen after the initial population (index 0) and after each
  /// generation.
  std::vector<double> best_by_generation;
};

/// GA-BH over K-subsets: binary tournament, set-mix crossover repaired to K,
/// swap mutation, one elite carried forward. `seed_population` individuals
/// are used first; the rest of the initial population is random.
GaResult run_ga(const ScoreContext& ctx, const GaConfig& cfg,
                std::span<const IlluminationPattern> seed_population = {});

IlluminationPattern pattern_ga(const ScoreContext& ctx, const GaConfig& cfg);

}  // namespace hoplite
