#include "hoplite/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace hoplite {

void TrafficParams::validate() const {
  if (ttl_slots < 1 || !(packet_bits > 0) || !(slot_seconds > 0)) {
    throw Error("traffic parameters must be positive");
  }
}

QueueState::QueueState(std::vector<std::int64_t> arrivals_per_slot, int ttl_slots,
                       double packet_bits)
    : buckets_(arrivals_per_slot.size() * static_cast<std::size_t>(std::max(ttl_slots, 0)), 0),
      arrivals_(std::move(arrivals_per_slot)),
      ttl_(ttl_slots),
      packet_bits_(packet_bits) {
  if (ttl_ < 1) throw Error("TTL must be at least one slot");
  if (!(packet_bits_ > 0)) throw Error("packet size must be positive");
  for (auto a : arrivals_) {
    if (a < 0) throw Error("arrival rates must be nonnegative");
  }
}

std::int64_t QueueState::bucket(CellId cell, int age) const {
  if (cell >= cell_count() || age < 1 || age > ttl_) throw Error("queue bucket out of range");
  return at(cell, age);
}

void QueueState::set_bucket(CellId cell, int age, std::int64_t packets) {
  if (cell >= cell_count() || age < 1 || age > ttl_) throw Error("queue bucket out of range");
  if (packets < 0) throw Error("packet counts must be nonnegative");
  at(cell, age) = packets;
}

std::int64_t QueueState::total(CellId cell) const {
  if (cell >= cell_count()) throw Error("cell id out of range");
  const auto* row = buckets_.data() + cell * ttl_;
  return std::accumulate(row, row + ttl_, std::int64_t{0});
}

std::vector<std::int64_t> QueueState::totals() const {
  std::vector<std::int64_t> out(cell_count());
  for (CellId n = 0; n < cell_count(); ++n) out[n] = total(n);
  return out;
}

std::int64_t QueueState::total_packets() const {
  return std::accumulate(buckets_.begin(), buckets_.end(), std::int64_t{0});
}

void QueueState::set_arrivals(std::vector<std::int64_t> arrivals_per_slot) {
  if (arrivals_per_slot.size() != cell_count()) throw Error("arrival vector has wrong length");
  for (auto a : arrivals_per_slot) {
    if (a < 0) throw Error("arrival rates must be nonnegative");
  }
  arrivals_ = std::move(arrivals_per_slot);
}

void QueueState::inject_arrivals() {
  for (CellId n = 0; n < cell_count(); ++n) at(n, 1) += arrivals_[n];
}

std::vector<std::int64_t> round_arrivals(std::span<const double> arrival_rates) {
  std::vector<std::int64_t> out(arrival_rates.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(arrival_rates[i] >= 0)) throw Error("arrival rates must be nonnegative");
    out[i] = std::llround(arrival_rates[i]);
  }
  return out;
}

QueueState initial_queue(std::span<const double> arrival_rates, const TrafficParams& traffic) {
  traffic.validate();
  QueueState q(round_arrivals(arrival_rates), traffic.ttl_slots, traffic.packet_bits);
  q.inject_arrivals();
  return q;
}

double SlotOutcome::total_served_bits() const {
  return std::accumulate(served_bits.begin(), served_bits.end(), 0.0);
}

std::int64_t SlotOutcome::total_dropped() const {
  return std::accumulate(dropped_packets.begin(), dropped_packets.end(), std::int64_t{0});
}

double throughput_for_cell(double capacity_bps, double queue_packets, double slot_seconds,
                           double packet_bits) {
  return std::min(capacity_bps * slot_seconds, queue_packets * packet_bits);
}

std::int64_t service_packets(double capacity_bps, double slot_seconds, double packet_bits) {
  return static_cast<std::int64_t>(std::floor(capacity_bps * slot_seconds / packet_bits));
}

SlotOutcome advance_slot(const QueueState& state, const IlluminationPattern& pattern,
                         std::span<const double> capacities_bps, double slot_seconds,
                         std::size_t beams) {
  const std::size_t n_cells = state.cell_count();
  require_valid_pattern(pattern, n_cells, beams);
  if (capacities_bps.size() != n_cells) throw Error("capacity vector has wrong length");

  SlotOutcome out;
  out.served_bits.assign(n_cells, 0.0);
  out.served_packets.assign(n_cells, 0);
  out.dropped_packets.assign(n_cells, 0);
  out.arrived_packets.assign(state.arrivals().begin(), state.arrivals().end());
  out.queue_after = state;
  QueueState& q = out.queue_after;
  const int ttl = state.ttl_slots();

  for (CellId n = 0; n < n_cells; ++n) {
    const double cap = capacities_bps[n];
    const bool served = pattern.contains(n);
    if (!served && cap != 0.0) throw Error("unserved cell has nonzero capacity");
    if (cap < 0) throw Error("capacity must be nonnegative");

    // Oldest first.
    std::int64_t budget = served ? service_packets(cap, slot_seconds, state.packet_bits()) : 0;
    for (int age = ttl; age >= 1 && budget > 0; --age) {
      const std::int64_t take = std::min(budget, q.bucket(n, age));
      q.set_bucket(n, age, q.bucket(n, age) - take);
      budget -= take;
      out.served_packets[n] += take;
    }
    out.served_bits[n] = static_cast<double>(out.served_packets[n]) * state.packet_bits();

    out.dropped_packets[n] = q.bucket(n, ttl);
    for (int age = ttl; age > 1; --age) q.set_bucket(n, age, q.bucket(n, age - 1));
    q.set_bucket(n, 1, 0);
  }
  q.inject_arrivals();
  return out;
}

std::vector<double> generate_demand(const CellGrid& grid, double mean_rate,
                                    std::size_t hotspot_count, double hotspot_multiplier,
                                    std::uint64_t seed) {
  const std::size_t n = grid.size();
  if (hotspot_count > n) throw Error("more hotspots than cells");
  if (!(mean_rate >= 0) || !(hotspot_multiplier >= 0)) {
    throw Error("demand parameters must be nonnegative");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> band(0.5 * mean_rate, 1.5 * mean_rate);
  std::vector<double> rates(n);
  for (auto& r : rates) r = band(rng);

  std::vector<CellId> ids(n);
  std::iota(ids.begin(), ids.end(), CellId{0});
  for (std::size_t i = 0; i < hotspot_count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(ids[i], ids[pick(rng)]);
    rates[ids[i]] = mean_rate * hotspot_multiplier;
  }
  return rates;
}

}  // namespace hoplite
