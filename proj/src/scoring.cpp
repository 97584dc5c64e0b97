#include "hoplite/scoring.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace hoplite {

ScorerKind parse_scorer_kind(std::string_view name) {
  if (name == "bruteforce") return ScorerKind::bruteforce;
  if (name == "sliding") return ScorerKind::sliding;
  throw Error("unknown scorer backend '" + std::string(name) + "'");
}

std::string_view to_string(ScorerKind kind) {
  return kind == ScorerKind::bruteforce ? "bruteforce" : "sliding";
}

double best_case_pattern_bits(const LinkBudget& budget, std::size_t beams, double slot_seconds) {
  return static_cast<double>(beams) * budget.noise_limited_capacity_bps() * slot_seconds;
}

ScoreContext ScoreContext::build(const CellGrid& grid, const LinkBudget& budget,
                                 std::span<const std::int64_t> queue_totals, std::size_t beams,
                                 const TrafficParams& traffic, double interference_threshold_km) {
  if (queue_totals.size() != grid.size()) throw Error("queue snapshot has wrong length");
  ScoreContext ctx;
  ctx.grid = &grid;
  ctx.budget = &budget;
  ctx.beams = beams;
  ctx.slot_seconds = traffic.slot_seconds;
  ctx.interference_threshold_km = interference_threshold_km;
  ctx.omega_max_bits = best_case_pattern_bits(budget, beams, traffic.slot_seconds);
  ctx.queue_packets.resize(queue_totals.size());
  ctx.demand_bits.resize(queue_totals.size());
  for (std::size_t n = 0; n < queue_totals.size(); ++n) {
    ctx.queue_packets[n] = static_cast<double>(queue_totals[n]);
    ctx.demand_bits[n] = ctx.queue_packets[n] * traffic.packet_bits;
  }
  ctx.validate();
  return ctx;
}

void ScoreContext::validate() const {
  if (grid == nullptr || budget == nullptr) throw Error("score context is missing grid or budget");
  if (budget->size() != grid->size()) throw Error("link budget does not match grid");
  if (demand_bits.size() != grid->size() || queue_packets.size() != grid->size()) {
    throw Error("demand snapshot does not match grid");
  }
  if (beams == 0 || beams > grid->size()) throw Error("beam count must be in 1..N");
  if (!(omega_max_bits > 0)) throw Error("omega_max must be positive");
  if (!(interference_threshold_km >= 0)) throw Error("D_s must be nonnegative");
  if (!(slot_seconds > 0)) throw Error("slot length must be positive");
}

InterferenceMap::InterferenceMap(std::span<const CellId> served) {
  for (CellId c : served) lists_.try_emplace(c);
}

void InterferenceMap::add_pair(CellId a, CellId b) {
  if (a == b) return;
  lists_.at(a).push_back(b);
  lists_.at(b).push_back(a);
}

const std::vector<CellId>& InterferenceMap::interferers(CellId cell) const {
  const auto it = lists_.find(cell);
  if (it == lists_.end()) throw Error("cell is not in the interference map");
  return it->second;
}

std::set<std::pair<CellId, CellId>> InterferenceMap::pairs() const {
  std::set<std::pair<CellId, CellId>> out;
  for (const auto& [cell, list] : lists_) {
    for (CellId other : list) out.emplace(std::min(cell, other), std::max(cell, other));
  }
  return out;
}

std::vector<CellId> mark_and_extract_sorted(const IlluminationPattern& pattern,
                                            const CellGrid& grid) {
  std::vector<std::uint8_t> marks(grid.size(), 0);
  for (CellId c : pattern) {
    if (c >= grid.size()) throw Error("cell id out of range");
    marks[c] = 1;
  }
  std::vector<CellId> ordered;
  ordered.reserve(pattern.size());
  for (CellId id : grid.sorted_by_x()) {
    if (marks[id]) ordered.push_back(id);
  }
  return ordered;
}

InterferenceMap interference_cells_sliding_window(std::span<const CellId> ordered,
                                                  const CellGrid& grid, double ds_km,
                                                  WindowStats* stats, bool euclidean_filter) {
  if (!(ds_km >= 0)) throw Error("D_s must be nonnegative");
  const auto xs = grid.xs();
  const auto ys = grid.ys();
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (ordered[i] >= grid.size()) throw Error("cell id out of range");
    if (i > 0 && xs[ordered[i - 1]] > xs[ordered[i]]) {
      throw Error("interference scan needs cells sorted by x");
    }
  }
  InterferenceMap map(ordered);
  std::vector<double> ox(ordered.size());
  std::vector<double> oy(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    ox[i] = xs[ordered[i]];
    oy[i] = ys[ordered[i]];
  }
  const WindowStats st =
      detail::scan_window(ordered.size(), ox.data(), oy.data(), ds_km, [&](std::size_t i, std::size_t j, bool in_range) {
        if (!in_range) return;
        const CellId a = ordered[i];
        const CellId b = ordered[j];
        if (euclidean_filter && grid.distance(a, b) > ds_km) return;
        map.add_pair(a, b);
      });
  if (stats != nullptr) *stats = st;
  return map;
}

PatternScorer::PatternScorer(const ScoreContext& ctx, ScorerKind kind)
    : ctx_(&ctx),
      kind_(kind),
      marks_((ctx.grid->size() + 63) / 64, 0),
      ordered_(ctx.grid->size(), 0),
      sorted_x_(ctx.grid->size(), 0.0),
      sorted_y_(ctx.grid->size(), 0.0),
      interference_(ctx.grid->size(), 0.0) {
  ctx.validate();
}

double PatternScorer::score(std::span<const CellId> sorted_cells) {
  return kind_ == ScorerKind::bruteforce ? bruteforce(sorted_cells) : sliding(sorted_cells);
}

double PatternScorer::score(const IlluminationPattern& pattern) {
  require_valid_pattern(pattern, ctx_->grid->size(), ctx_->beams);
  return score(pattern.cells());
}

double PatternScorer::bruteforce(std::span<const CellId> cells) const {
  const LinkBudget& budget = *ctx_->budget;
  const double noise = budget.noise_power_w();
  const double bandwidth = budget.params().bandwidth_hz;
  double total = 0.0;
  for (CellId n : cells) {
    const double* rx = budget.rx_power_row(n);
    double interference = 0.0;
    for (CellId l : cells) {
      if (l != n) interference += rx[l];
    }
    const double cap = bandwidth * std::log2(1.0 + rx[n] / (noise + interference));
    total += std::min(cap * ctx_->slot_seconds, ctx_->demand_bits[n]);
  }
  return total / ctx_->omega_max_bits;
}

double PatternScorer::sliding(std::span<const CellId> cells) {
  const CellGrid& grid = *ctx_->grid;
  const LinkBudget& budget = *ctx_->budget;

  // Pass 1: mark served cells at their positions in the pre-sorted sequence.
  const std::uint32_t* rank = grid.x_rank().data();
  for (CellId c : cells) {
    const std::uint32_t r = rank[c];
    marks_[r >> 6] |= std::uint64_t{1} << (r & 63);
    interference_[c] = 0.0;
  }
  // Pass 2: walk the sequence (64 positions per word), picking marked cells in order.
  const CellId* seq = grid.sorted_by_x().data();
  const double* sx = grid.sorted_xs().data();
  const double* sy = grid.sorted_ys().data();
  std::size_t k = 0;
  for (std::size_t w = 0; w < marks_.size(); ++w) {
    for (std::uint64_t bits = marks_[w]; bits != 0; bits &= bits - 1) {
      const std::size_t r = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
      ordered_[k] = seq[r];
      sorted_x_[k] = sx[r];
      sorted_y_[k] = sy[r];
      ++k;
    }
    marks_[w] = 0;
  }

  const double ds = ctx_->interference_threshold_km;
  const CellId* ord = ordered_.data();
  double* acc = interference_.data();
  if (ctx_->euclidean_filter) {
    detail::scan_window(k, sorted_x_.data(), sorted_y_.data(), ds,
                        [&](std::size_t i, std::size_t j, bool in_range) {
                          const CellId a = ord[i];
                          const CellId b = ord[j];
                          if (!in_range || grid.distance_row(a)[b] > ds) return;
                          acc[a] += budget.rx_power_row(a)[b];
                          acc[b] += budget.rx_power_row(b)[a];
                        });
  } else {
    // Out-of-range candidates add zero rather than branch. The slow cell's
    // share stays in a register until its window is done.
    double own = 0.0;
    detail::scan_window(
        k, sorted_x_.data(), sorted_y_.data(), ds,
        [&](std::size_t i, std::size_t j, bool in_range) {
          const CellId a = ord[i];
          const CellId b = ord[j];
          const double w = in_range ? 1.0 : 0.0;
          own += w * budget.rx_power_row(a)[b];
          acc[b] += w * budget.rx_power_row(b)[a];
        },
        [&](std::size_t i) {
          acc[ord[i]] += own;
          own = 0.0;
        });
  }

  const double noise = budget.noise_power_w();
  const double bandwidth = budget.params().bandwidth_hz;
  double total = 0.0;
  for (CellId n : cells) {
    const double cap =
        bandwidth * std::log2(1.0 + budget.rx_power_row(n)[n] / (noise + interference_[n]));
    total += std::min(cap * ctx_->slot_seconds, ctx_->demand_bits[n]);
  }
  return total / ctx_->omega_max_bits;
}

double score_pattern(const IlluminationPattern& pattern, const ScoreContext& ctx,
                     ScorerKind kind) {
  PatternScorer scorer(ctx, kind);
  return scorer.score(pattern);
}

double score_bruteforce(const IlluminationPattern& pattern, const ScoreContext& ctx) {
  return score_pattern(pattern, ctx, ScorerKind::bruteforce);
}

double score_sliding_window(const IlluminationPattern& pattern, const ScoreContext& ctx) {
  return score_pattern(pattern, ctx, ScorerKind::sliding);
}

}  // namespace hoplite
