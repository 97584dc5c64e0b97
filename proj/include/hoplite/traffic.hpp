#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hoplite/geometry.hpp"
#include "hoplite/pattern.hpp"

namespace hoplite {

struct TrafficParams {
  int ttl_slots = 20;
  double packet_bits = 1500.0 * 8.0;
  double slot_seconds = 0.1;

  void validate() const;
};

/// Per-cell packet queues bucketed by age (1..ttl slots waited).
class QueueState {
 public:
  QueueState() = default;
  /// Empty queues with the given per-slot integer arrivals.
  QueueState(std::vector<std::int64_t> arrivals_per_slot, int ttl_slots, double packet_bits);

  std::size_t cell_count() const { return arrivals_.size(); }
  int ttl_slots() const { return ttl_; }
  double packet_bits() const { return packet_bits_; }

  /// Packets of `cell` that have waited `age` slots, 1 <= age <= ttl.
  std::int64_t bucket(CellId cell, int age) const;
  void set_bucket(CellId cell, int age, std::int64_t packets);

  /// d_t^n, the sum of the age buckets.
  std::int64_t total(CellId cell) const;
  std::vector<std::int64_t> totals() const;
  std::int64_t total_packets() const;

  std::span<const std::int64_t> arrivals() const { return arrivals_; }
  std::int64_t arrival_rate(CellId cell) const { return arrivals_.at(cell); }
  void set_arrivals(std::vector<std::int64_t> arrivals_per_slot);

  /// Adds one slot of arrivals at age 1.
  void inject_arrivals();

 private:
  std::int64_t& at(CellId cell, int age) { return buckets_[cell * ttl_ + (age - 1)]; }
  std::int64_t at(CellId cell, int age) const { return buckets_[cell * ttl_ + (age - 1)]; }

  std::vector<std::int64_t> buckets_;  // [cell][age-1]
  std::vector<std::int64_t> arrivals_;
  int ttl_ = 0;
  double packet_bits_ = 0.0;
};

/// Queue state plus the integer arrival rates derived from a real-valued
/// demand vector, holding one initial batch of arrivals.
QueueState initial_queue(std::span<const double> arrival_rates, const TrafficParams& traffic);

std::vector<std::int64_t> round_arrivals(std::span<const double> arrival_rates);

struct SlotOutcome {
  std::vector<double> served_bits;            // omega_t^n
  std::vector<std::int64_t> served_packets;
  std::vector<std::int64_t> dropped_packets;  // TTL expiries
  std::vector<std::int64_t> arrived_packets;
  QueueState queue_after;

  double total_served_bits() const;
  std::int64_t total_dropped() const;
};

/// min(C * T_slot, d * Lambda)
double throughput_for_cell(double capacity_bps, double queue_packets, double slot_seconds,
                           double packet_bits);

/// Whole packets a served cell can drain in one slot: floor(C * T_slot / Lambda).
std::int64_t service_packets(double capacity_bps, double slot_seconds, double packet_bits);

/// One slot of queue evolution: serve oldest packets first, age the rest,
/// expire anything older than the TTL, then add the next slot's arrivals.
/// Throws Error if the pattern does not have `beams` cells or an unserved cell
/// has nonzero capacity.
SlotOutcome advance_slot(const QueueState& state, const IlluminationPattern& pattern,
                         std::span<const double> capacities_bps, double slot_seconds,
                         std::size_t beams);

/// Per-cell arrival rates (packets/slot). Non-hotspot cells are uniform in
/// [0.5, 1.5] * mean_rate; `hotspot_count` randomly chosen cells get
/// mean_rate * hotspot_multiplier. Deterministic under `seed`.
std::vector<double> generate_demand(const CellGrid& grid, double mean_rate,
                                    std::size_t hotspot_count, double hotspot_multiplier,
                                    std::uint64_t seed);

}  // namespace hoplite
