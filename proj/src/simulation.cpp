#include "hoplite/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <string>

namespace hoplite {

namespace {

CellGrid grid_for(const ModelConfig& cfg) {
  const double d = cfg.cell_diameter_km > 0 ? cfg.cell_diameter_km : default_cell_diameter_km();
  return CellGrid::generate(cfg.rings, d);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t slot) {
  // splitmix64 finalizer over the pair.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (slot + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::size_t default_beams(std::size_t cells) { return std::max<std::size_t>(1, cells / 4); }

SystemModel::SystemModel(const ModelConfig& cfg)
    : SystemModel(grid_for(cfg), cfg.beams, cfg.link, cfg.traffic,
                  cfg.interference_threshold_cells) {}

SystemModel::SystemModel(CellGrid grid, std::size_t beams, const LinkParams& link,
                         const TrafficParams& traffic, double interference_threshold_cells)
    : grid_(std::move(grid)),
      budget_(grid_, link),
      traffic_(traffic),
      beams_(beams == 0 ? default_beams(grid_.size()) : beams),
      ds_km_(interference_threshold_cells * grid_.cell_diameter_km()) {
  traffic_.validate();
  if (beams_ > grid_.size()) throw Error("more beams than cells");
  if (!(interference_threshold_cells >= 0)) throw Error("D_s must be nonnegative");
}

double SystemModel::beam_capacity_packets() const {
  return budget_.noise_limited_capacity_bps() * traffic_.slot_seconds / traffic_.packet_bits;
}

ScoreContext SystemModel::score_context(std::span<const std::int64_t> queue_totals) const {
  return score_context(queue_totals, ds_km_);
}

ScoreContext SystemModel::score_context(std::span<const std::int64_t> queue_totals,
                                        double ds_km) const {
  return ScoreContext::build(grid_, budget_, queue_totals, beams_, traffic_, ds_km);
}

double SystemModel::mean_rate_for_load(double load) const {
  return load * static_cast<double>(beams_) * beam_capacity_packets() /
         static_cast<double>(grid_.size());
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "random") return Algorithm::random;
  if (name == "periodic") return Algorithm::periodic;
  if (name == "greedy") return Algorithm::greedy;
  if (name == "ga") return Algorithm::ga;
  if (name == "mcts") return Algorithm::mcts;
  throw Error("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::random: return "random";
    case Algorithm::periodic: return "periodic";
    case Algorithm::greedy: return "greedy";
    case Algorithm::ga: return "ga";
    case Algorithm::mcts: return "mcts";
  }
  return "?";
}

PatternPolicy make_policy(Algorithm algorithm, const SystemModel& model,
                          const AlgorithmSettings& settings, std::uint64_t seed) {
  const std::size_t n = model.cells();
  const std::size_t k = model.beams();
  switch (algorithm) {
    case Algorithm::random: {
      auto rng = std::make_shared<std::mt19937_64>(seed);
      return [rng, n, k](const QueueState&, std::size_t) { return pattern_random(n, k, *rng); };
    }
    case Algorithm::periodic:
      return [n, k](const QueueState&, std::size_t slot) { return pattern_periodic(n, k, slot); };
    case Algorithm::greedy:
      return [k](const QueueState& q, std::size_t) { return pattern_greedy(q.totals(), k); };
    case Algorithm::ga:
      return [&model, cfg = settings.ga, seed](const QueueState& q, std::size_t slot) {
        GaConfig c = cfg;
        c.rng_seed = mix_seed(seed, slot);
        const auto totals = q.totals();
        return pattern_ga(model.score_context(totals), c);
      };
    case Algorithm::mcts:
      return [&model, cfg = settings.mcts, seed](const QueueState& q, std::size_t slot) {
        MctsConfig c = cfg;
        c.rng_seed = mix_seed(seed, slot);
        const auto totals = q.totals();
        return compute_pattern_mcts(model.score_context(totals), c);
      };
  }
  throw Error("unknown algorithm");
}

RunResult run_closed_loop(const SystemModel& model, std::span<const double> arrival_rates,
                          std::size_t slots, const PatternPolicy& policy) {
  if (arrival_rates.size() != model.cells()) throw Error("demand vector has wrong length");
  RunResult result;
  QueueState queue = initial_queue(arrival_rates, model.traffic());
  for (std::size_t t = 0; t < slots; ++t) {
    SlotRecord rec;
    rec.queued_before = queue.total_packets();
    const auto start = std::chrono::steady_clock::now();
    rec.pattern = policy(queue, t);
    rec.pattern_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    require_valid_pattern(rec.pattern, model.cells(), model.beams());

    const auto caps = pattern_capacities(rec.pattern, model.budget());
    SlotOutcome out =
        advance_slot(queue, rec.pattern, caps, model.traffic().slot_seconds, model.beams());
    rec.served_bits = out.total_served_bits();
    for (std::size_t n = 0; n < model.cells(); ++n) {
      rec.served_packets += out.served_packets[n];
      rec.arrived_packets += out.arrived_packets[n];
    }
    rec.dropped_packets = out.total_dropped();
    queue = std::move(out.queue_after);
    rec.queued_after = queue.total_packets();

    result.total_served_bits += rec.served_bits;
    result.total_dropped += rec.dropped_packets;
    result.bhtp.push_back(rec.pattern);
    result.slots.push_back(std::move(rec));
  }
  return result;
}

RunResult replay_bhtp(const SystemModel& model, std::span<const double> arrival_rates,
                      const Bhtp& bhtp) {
  return run_closed_loop(model, arrival_rates, bhtp.size(),
                         [&bhtp](const QueueState&, std::size_t slot) { return bhtp[slot]; });
}

}  // namespace hoplite
