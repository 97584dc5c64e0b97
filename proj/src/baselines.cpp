#include "hoplite/baselines.hpp"

#include <algorithm>
#include <numeric>

namespace hoplite {

namespace {

void require_fits(std::size_t cell_count, std::size_t beams) {
  if (beams > cell_count) throw Error("more beams than cells");
}

template <class T>
IlluminationPattern greedy_impl(std::span<const T> queue, std::size_t beams) {
  require_fits(queue.size(), beams);
  std::vector<CellId> ids(queue.size());
  std::iota(ids.begin(), ids.end(), CellId{0});
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(beams), ids.end(),
                    [&](CellId a, CellId b) {
                      if (queue[a] != queue[b]) return queue[a] > queue[b];
                      return a < b;
                    });
  ids.resize(beams);
  return IlluminationPattern(std::move(ids));
}

using Genome = std::vector<CellId>;  // sorted, K distinct ids

class GeneticSearch {
 public:
  GeneticSearch(const ScoreContext& ctx, const GaConfig& cfg)
      : cfg_(cfg),
        n_(ctx.grid->size()),
        k_(ctx.beams),
        scorer_(ctx, cfg.fitness_scorer),
        rng_(cfg.rng_seed),
        marks_(n_, 0) {}

  GaResult run(std::span<const IlluminationPattern> seeds) {
    std::vector<Genome> pop;
    pop.reserve(cfg_.population_size);
    for (const auto& p : seeds) {
      if (pop.size() == cfg_.population_size) break;
      require_valid_pattern(p, n_, k_);
      pop.emplace_back(p.begin(), p.end());
    }
    while (pop.size() < cfg_.population_size) pop.push_back(random_genome());

    std::vector<double> fit = evaluate(pop);
    GaResult result;
    track_best(pop, fit, result);

    for (std::size_t g = 0; g < cfg_.generations; ++g) {
      const std::size_t elite = best_index(fit);
      std::vector<Genome> next;
      next.reserve(pop.size());
      next.push_back(pop[elite]);
      while (next.size() < pop.size()) {
        const Genome& a = pop[tournament(fit)];
        const Genome& b = pop[tournament(fit)];
        Genome child = unit(rng_) < cfg_.crossover_rate ? crossover(a, b) : a;
        mutate(child);
        next.push_back(std::move(child));
      }
      pop = std::move(next);
      fit = evaluate(pop);
      track_best(pop, fit, result);
    }
    return result;
  }

 private:
  Genome random_genome() {
    Genome all(n_);
    std::iota(all.begin(), all.end(), CellId{0});
    for (std::size_t i = 0; i < k_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n_ - 1);
      std::swap(all[i], all[pick(rng_)]);
    }
    all.resize(k_);
    std::sort(all.begin(), all.end());
    return all;
  }

  std::vector<double> evaluate(const std::vector<Genome>& pop) {
    std::vector<double> fit(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = scorer_.score(std::span<const CellId>(pop[i]));
    return fit;
  }

  static std::size_t best_index(const std::vector<double>& fit) {
    return static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
  }

  void track_best(const std::vector<Genome>& pop, const std::vector<double>& fit, GaResult& r) {
    const std::size_t i = best_index(fit);
    if (r.best_by_generation.empty() || fit[i] > r.best_fitness) {
      r.best_fitness = fit[i];
      r.best = IlluminationPattern(pop[i]);
    }
    r.best_by_generation.push_back(r.best_fitness);
  }

  std::size_t tournament(const std::vector<double>& fit) {
    std::uniform_int_distribution<std::size_t> pick(0, fit.size() - 1);
    const std::size_t a = pick(rng_);
    const std::size_t b = pick(rng_);
    return fit[b] > fit[a] ? b : a;
  }

  // Cells common to both parents survive; the rest are drawn from the
  // symmetric difference until the child has K cells again.
  Genome crossover(const Genome& a, const Genome& b) {
    Genome child;
    Genome pool;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(child));
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(pool));
    const std::size_t need = k_ - child.size();
    for (std::size_t i = 0; i < need; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng_)]);
      child.push_back(pool[i]);
    }
    std::sort(child.begin(), child.end());
    return child;
  }

  void mutate(Genome& g) {
    if (k_ == n_) return;
    bool changed = false;
    for (CellId c : g) marks_[c] = 1;
    for (auto& gene : g) {
      if (unit(rng_) >= cfg_.mutation_rate) continue;
      std::uniform_int_distribution<CellId> pick(0, static_cast<CellId>(n_ - 1));
      CellId repl = pick(rng_);
      while (marks_[repl]) repl = pick(rng_);
      marks_[gene] = 0;
      marks_[repl] = 1;
      gene = repl;
      changed = true;
    }
    for (CellId c : g) marks_[c] = 0;
    if (changed) std::sort(g.begin(), g.end());
  }

  const GaConfig& cfg_;
  std::size_t n_;
  std::size_t k_;
  PatternScorer scorer_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  std::vector<std::uint8_t> marks_;
};

}  // namespace

IlluminationPattern pattern_random(std::size_t cell_count, std::size_t beams,
                                   std::mt19937_64& rng) {
  require_fits(cell_count, beams);
  std::vector<CellId> ids(cell_count);
  std::iota(ids.begin(), ids.end(), CellId{0});
  for (std::size_t i = 0; i < beams; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, cell_count - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(beams);
  return IlluminationPattern(std::move(ids));
}

IlluminationPattern pattern_periodic(std::size_t cell_count, std::size_t beams,
                                     std::uint64_t slot_index) {
  require_fits(cell_count, beams);
  if (cell_count == 0) return {};
  std::vector<CellId> ids;
  ids.reserve(beams);
  const std::uint64_t base = (slot_index % cell_count) * beams;
  for (std::size_t m = 0; m < beams; ++m) {
    ids.push_back(static_cast<CellId>((base + m) % cell_count));
  }
  return IlluminationPattern(std::move(ids));
}

IlluminationPattern pattern_greedy(std::span<const double> queue_packets, std::size_t beams) {
  return greedy_impl(queue_packets, beams);
}

IlluminationPattern pattern_greedy(std::span<const std::int64_t> queue_packets,
                                   std::size_t beams) {
  return greedy_impl(queue_packets, beams);
}

void GaConfig::validate() const {
  if (population_size < 2) throw Error("GA population must be at least 2");
  if (!(crossover_rate >= 0 && crossover_rate <= 1) ||
      !(mutation_rate >= 0 && mutation_rate <= 1)) {
    throw Error("GA rates must lie in [0, 1]");
  }
}

GaResult run_ga(const ScoreContext& ctx, const GaConfig& cfg,
                std::span<const IlluminationPattern> seed_population) {
  cfg.validate();
  ctx.validate();
  GeneticSearch search(ctx, cfg);
  return search.run(seed_population);
}

IlluminationPattern pattern_ga(const ScoreContext& ctx, const GaConfig& cfg) {
  return run_ga(ctx, cfg).best;
}

}  // namespace hoplite
