#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "hoplite/baselines.hpp"
#include "hoplite/channel.hpp"
#include "hoplite/geometry.hpp"
#include "hoplite/mcts.hpp"
#include "hoplite/pattern.hpp"
#include "hoplite/scoring.hpp"
#include "hoplite/traffic.hpp"

namespace hoplite {

struct ModelConfig {
  int rings = 3;
  std::size_t beams = 0;  // 0 means floor(N / 4)
  double cell_diameter_km = 0.0;  // 0 means the 1.5 degree footprint
  double interference_threshold_cells = 1.0;  // D_s in cell diameters
  LinkParams link;
  TrafficParams traffic;
};

/// Grid, link budget and traffic constants for one scenario. Score contexts
/// borrow from it, so it is neither copyable nor movable.
class SystemModel {
 public:
  explicit SystemModel(const ModelConfig& cfg);
  SystemModel(CellGrid grid, std::size_t beams, const LinkParams& link,
              const TrafficParams& traffic, double interference_threshold_cells);
  SystemModel(const SystemModel&) = delete;
  SystemModel& operator=(const SystemModel&) = delete;

  const CellGrid& grid() const { return grid_; }
  const LinkBudget& budget() const { return budget_; }
  const TrafficParams& traffic() const { return traffic_; }
  std::size_t cells() const { return grid_.size(); }
  std::size_t beams() const { return beams_; }
  double interference_threshold_km() const { return ds_km_; }

  /// C_max: packets one interference-free beam drains per slot.
  double beam_capacity_packets() const;

  ScoreContext score_context(std::span<const std::int64_t> queue_totals) const;
  ScoreContext score_context(std::span<const std::int64_t> queue_totals, double ds_km) const;

  /// Per-slot arrivals that offer `load` times the K-beam capacity on
  /// average across cells.
  double mean_rate_for_load(double load) const;

 private:
  CellGrid grid_;
  LinkBudget budget_;
  TrafficParams traffic_;
  std::size_t beams_;
  double ds_km_;
};

std::size_t default_beams(std::size_t cells);

enum class Algorithm { random, periodic, greedy, ga, mcts };

Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm a);

struct AlgorithmSettings {
  MctsConfig mcts;
  GaConfig ga;
};

/// Chooses the pattern for `slot` given the queues at the start of it.
using PatternPolicy = std::function<IlluminationPattern(const QueueState&, std::size_t slot)>;

PatternPolicy make_policy(Algorithm algorithm, const SystemModel& model,
                          const AlgorithmSettings& settings, std::uint64_t seed);

struct SlotRecord {
  IlluminationPattern pattern;
  double served_bits = 0.0;
  std::int64_t served_packets = 0;
  std::int64_t dropped_packets = 0;
  std::int64_t arrived_packets = 0;
  std::int64_t queued_before = 0;
  std::int64_t queued_after = 0;
  double pattern_seconds = 0.0;  // wall time of the pattern computation
};

struct RunResult {
  Bhtp bhtp;
  std::vector<SlotRecord> slots;
  double total_served_bits = 0.0;
  std::int64_t total_dropped = 0;
};

/// Builds a BHTP slot by slot: each pattern is chosen against the queues left
/// by serving the previous slots, then the queues advance under full
/// co-channel interference.
RunResult run_closed_loop(const SystemModel& model, std::span<const double> arrival_rates,
                          std::size_t slots, const PatternPolicy& policy);

/// Serves a fixed BHTP against the given arrivals.
RunResult replay_bhtp(const SystemModel& model, std::span<const double> arrival_rates,
                      const Bhtp& bhtp);

}  // namespace hoplite
