#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "hoplite/channel.hpp"
#include "hoplite/geometry.hpp"
#include "hoplite/pattern.hpp"
#include "hoplite/traffic.hpp"

namespace hoplite {

enum class ScorerKind { bruteforce, sliding };

ScorerKind parse_scorer_kind(std::string_view name);
std::string_view to_string(ScorerKind kind);

/// Everything a pattern score depends on: static geometry and link budget
/// (borrowed, must outlive the context) plus a queue snapshot.
struct ScoreContext {
  const CellGrid* grid = nullptr;
  const LinkBudget* budget = nullptr;
  std::vector<double> queue_packets;  // d_t^n
  std::vector<double> demand_bits;    // d_t^n * Lambda
  std::size_t beams = 0;
  double slot_seconds = 0.1;
  double interference_threshold_km = 0.0;  // D_s
  double omega_max_bits = 0.0;
  /// Drop window pairs outside the Euclidean disc of radius D_s.
  bool euclidean_filter = false;

  static ScoreContext build(const CellGrid& grid, const LinkBudget& budget,
                            std::span<const std::int64_t> queue_totals, std::size_t beams,
                            const TrafficParams& traffic, double interference_threshold_km);

  void validate() const;
};

/// K * B log2(1 + SNR_boresight) * T_slot: the throughput of K interference-free
/// beams, used to normalize scores.
double best_case_pattern_bits(const LinkBudget& budget, std::size_t beams, double slot_seconds);

/// Served cells and, for each, the co-served cells inside the interference
/// window. Symmetric by construction, never contains self entries.
class InterferenceMap {
 public:
  explicit InterferenceMap(std::span<const CellId> served);

  void add_pair(CellId a, CellId b);
  const std::vector<CellId>& interferers(CellId cell) const;
  std::size_t size() const { return lists_.size(); }
  /// Unordered pairs as (min, max).
  std::set<std::pair<CellId, CellId>> pairs() const;

 private:
  std::map<CellId, std::vector<CellId>> lists_;
};

struct WindowStats {
  std::size_t slow_steps = 0;
  std::size_t fast_steps = 0;
  std::size_t temp_steps = 0;
};

namespace detail {

struct NoSlowHook {
  void operator()(std::size_t) const {}
};

/// Three-pointer window scan over `len` positions whose coordinates are
/// already in ascending x order. The window [s, f) holds positions within `ds`
/// of position s along x. Every candidate (s, t), s < t < f, is passed to
/// `on_candidate` together with whether it also passes the y gate;
/// `on_slow_done(s)` runs after the last candidate of s.
template <class OnCandidate, class OnSlowDone = NoSlowHook>
WindowStats scan_window(std::size_t len, const double* xs, const double* ys, double ds,
                        OnCandidate&& on_candidate, OnSlowDone&& on_slow_done = {}) {
  WindowStats stats;
  std::size_t s = 0;
  std::size_t f = 0;
  while (s < len) {
    const double xs_s = xs[s];
    const double ys_s = ys[s];
    while (f < len && std::abs(xs[f] - xs_s) <= ds) ++f;
    for (std::size_t t = s + 1; t < f; ++t) {
      on_candidate(s, t, std::abs(ys[t] - ys_s) <= ds);
    }
    on_slow_done(s);
    stats.temp_steps += f - s - 1;
    ++s;
    if (f < s) f = s;
  }
  stats.slow_steps = s;
  stats.fast_steps = f;
  return stats;
}

}  // namespace detail

/// Served cells in ascending (x, id) order via a mark pass over the pattern
/// and a scan of the grid's pre-sorted sequence.
std::vector<CellId> mark_and_extract_sorted(const IlluminationPattern& pattern,
                                            const CellGrid& grid);

/// Pairs of served cells with |dx| <= ds and |dy| <= ds, found with the
/// sliding window. Throws Error if `ordered` is not x-sorted.
InterferenceMap interference_cells_sliding_window(std::span<const CellId> ordered,
                                                  const CellGrid& grid, double ds_km,
                                                  WindowStats* stats = nullptr,
                                                  bool euclidean_filter = false);

/// Reusable scorer with preallocated scratch space. Not thread-safe; use one
/// per thread.
class PatternScorer {
 public:
  PatternScorer(const ScoreContext& ctx, ScorerKind kind);

  /// Normalized throughput of a pattern given as ascending distinct ids.
  /// No validation on this path.
  double score(std::span<const CellId> sorted_cells);
  /// Validates cardinality first.
  double score(const IlluminationPattern& pattern);

  ScorerKind kind() const { return kind_; }
  const ScoreContext& context() const { return *ctx_; }

 private:
  double bruteforce(std::span<const CellId> cells) const;
  double sliding(std::span<const CellId> cells);

  const ScoreContext* ctx_;
  ScorerKind kind_;
  std::vector<std::uint64_t> marks_;  // bitset over positions in sorted_by_x
  std::vector<CellId> ordered_;
  std::vector<double> sorted_x_;
  std::vector<double> sorted_y_;
  std::vector<double> interference_;
};

/// sum_n omega_t^n / omega_max with every co-served beam interfering.
double score_bruteforce(const IlluminationPattern& pattern, const ScoreContext& ctx);
/// Same, with interferers restricted to the sliding-window neighbourhood.
double score_sliding_window(const IlluminationPattern& pattern, const ScoreContext& ctx);
double score_pattern(const IlluminationPattern& pattern, const ScoreContext& ctx, ScorerKind kind);

}  // namespace hoplite
