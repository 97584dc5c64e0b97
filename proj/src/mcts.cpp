#include "hoplite/mcts.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hoplite {

namespace {

/// Scratch space shared by expansion and rollout so the hot loop does not
/// allocate.
struct Workspace {
  explicit Workspace(std::size_t n) : marks(n, 0), mu(n, 0.0), dist_sum(n, 0.0) {
    candidates.reserve(n);
    pattern.reserve(n);
  }
  std::vector<std::uint8_t> marks;
  std::vector<double> mu;
  std::vector<double> dist_sum;
  std::vector<CellId> candidates;
  std::vector<CellId> pattern;
};

std::mt19937_64 stage_rng(std::uint64_t seed, std::size_t stage) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage)};
  return std::mt19937_64(seq);
}

void compute_actions(std::span<const CellId> selected, std::span<const double> queue_packets,
                     const CellGrid& grid, std::size_t width, bool pruning, Workspace& ws,
                     std::vector<CellId>& out) {
  const std::size_t n = grid.size();
  out.clear();
  for (CellId c : selected) ws.marks[c] = 1;

  if (!pruning) {
    for (CellId i = 0; i < n; ++i) {
      if (!ws.marks[i]) out.push_back(i);
    }
  } else {
    const SelectionNormalizers norms = selection_normalizers(queue_packets, grid, selected.size());
    std::fill(ws.dist_sum.begin(), ws.dist_sum.end(), 0.0);
    for (CellId j : selected) {
      const double* row = grid.distance_row(j);
      for (std::size_t i = 0; i < n; ++i) ws.dist_sum[i] += row[i];
    }
    for (CellId i = 0; i < n; ++i) {
      if (ws.marks[i]) continue;
      double mu = 0.0;
      if (norms.max_queue > 0) mu += queue_packets[i] / norms.max_queue;
      if (norms.max_distance > 0) mu += ws.dist_sum[i] / norms.max_distance;
      ws.mu[i] = mu;
      out.push_back(i);
    }
    const auto by_value = [&](CellId a, CellId b) {
      if (ws.mu[a] != ws.mu[b]) return ws.mu[a] > ws.mu[b];
      return a < b;
    };
    const std::size_t keep = std::min(width, out.size());
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(keep), out.end(),
                      by_value);
    out.resize(keep);
  }

  for (CellId c : selected) ws.marks[c] = 0;
}

double rollout(std::span<const CellId> selected, std::size_t beams, PatternScorer& scorer,
               std::mt19937_64& rng, Workspace& ws) {
  const std::size_t n = ws.marks.size();
  ws.pattern.assign(selected.begin(), selected.end());
  if (ws.pattern.size() < beams) {
    for (CellId c : selected) ws.marks[c] = 1;
    ws.candidates.clear();
    for (CellId i = 0; i < n; ++i) {
      if (!ws.marks[i]) ws.candidates.push_back(i);
    }
    for (CellId c : selected) ws.marks[c] = 0;

    const std::size_t need = beams - ws.pattern.size();
    for (std::size_t i = 0; i < need; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, ws.candidates.size() - 1);
      std::swap(ws.candidates[i], ws.candidates[pick(rng)]);
      ws.pattern.push_back(ws.candidates[i]);
    }
  }
  std::sort(ws.pattern.begin(), ws.pattern.end());
  return scorer.score(std::span<const CellId>(ws.pattern));
}

}  // namespace

CommitRule parse_commit_rule(std::string_view name) {
  if (name == "mean" || name == "max_mean") return CommitRule::max_mean;
  if (name == "visits" || name == "max_visits") return CommitRule::max_visits;
  throw Error("unknown commit rule '" + std::string(name) + "'");
}

void MctsConfig::validate() const {
  if (max_iterations < 1) throw Error("MCTS needs at least one iteration");
  if (!(exploration >= 0)) throw Error("exploration constant must be nonnegative");
}

SearchTree::SearchTree(std::vector<CellId> fixed_prefix, std::size_t beams)
    : prefix_(std::move(fixed_prefix)), beams_(beams) {
  if (prefix_.size() > beams_) throw Error("fixed prefix longer than the beam count");
  SearchNode root;
  root.depth = static_cast<std::uint32_t>(prefix_.size());
  nodes_.push_back(root);
}

std::vector<NodeId> SearchTree::children(NodeId id) const {
  const SearchNode& n = node(id);
  std::vector<NodeId> out;
  out.reserve(n.child_count);
  for (std::uint32_t i = 0; i < n.child_count; ++i) out.push_back(n.first_child + i);
  return out;
}

std::vector<CellId> SearchTree::selected_prefix(NodeId id) const {
  std::vector<CellId> path;
  for (NodeId cur = id; cur != root(); cur = node(cur).parent) path.push_back(node(cur).action);
  std::vector<CellId> out(prefix_);
  out.insert(out.end(), path.rbegin(), path.rend());
  return out;
}

void SearchTree::expand(NodeId id, std::span<const CellId> actions) {
  if (node(id).expanded) return;
  if (is_terminal(id)) throw Error("cannot expand a terminal node");
  std::vector<CellId> sorted(actions.begin(), actions.end());
  std::sort(sorted.begin(), sorted.end());

  const auto first = static_cast<NodeId>(nodes_.size());
  const std::uint32_t depth = nodes_[id].depth + 1;
  for (CellId a : sorted) {
    SearchNode child;
    child.action = a;
    child.parent = id;
    child.depth = depth;
    nodes_.push_back(child);
  }
  SearchNode& parent = nodes_[id];
  parent.expanded = true;
  parent.first_child = sorted.empty() ? kNoNode : first;
  parent.child_count = static_cast<std::uint32_t>(sorted.size());
}

void SearchTree::backup(NodeId leaf, double score) {
  for (NodeId cur = leaf;; cur = nodes_[cur].parent) {
    SearchNode& n = nodes_.at(cur);
    n.score_sum += score;
    ++n.visit_count;
    if (cur == root()) break;
  }
}

NodeId uct_select(const SearchTree& tree, NodeId node, double exploration) {
  const SearchNode& parent = tree.node(node);
  if (parent.child_count == 0) throw Error("node has no children to select from");
  const double log_parent = std::log(static_cast<double>(std::max<std::int64_t>(parent.visit_count, 1)));
  NodeId best = kNoNode;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 0; i < parent.child_count; ++i) {
    const NodeId id = parent.first_child + i;
    const SearchNode& child = tree.node(id);
    if (child.visit_count == 0) return id;
    const double visits = static_cast<double>(child.visit_count);
    const double value = child.score_sum / visits + exploration * std::sqrt(log_parent / visits);
    if (value > best_value) {
      best_value = value;
      best = id;
    }
  }
  return best;
}

double simulate(const SearchTree& tree, NodeId node, PatternScorer& scorer, std::mt19937_64& rng) {
  Workspace ws(scorer.context().grid->size());
  const std::vector<CellId> selected = tree.selected_prefix(node);
  return rollout(selected, tree.beams(), scorer, rng, ws);
}

SelectionNormalizers selection_normalizers(std::span<const double> queue_packets,
                                           const CellGrid& grid, std::size_t selected_count) {
  SelectionNormalizers norms;
  for (double q : queue_packets) norms.max_queue = std::max(norms.max_queue, q);
  norms.max_distance = grid.max_pair_distance_km() * static_cast<double>(selected_count);
  return norms;
}

double selection_value(CellId cell, std::span<const CellId> selected,
                       std::span<const double> queue_packets, const CellGrid& grid,
                       const SelectionNormalizers& norms) {
  if (cell >= grid.size() || queue_packets.size() != grid.size()) {
    throw Error("cell id or queue snapshot does not match the grid");
  }
  if (std::find(selected.begin(), selected.end(), cell) != selected.end()) {
    throw Error("selection value is only defined for unselected cells");
  }
  double mu = 0.0;
  if (norms.max_queue > 0) mu += queue_packets[cell] / norms.max_queue;
  if (norms.max_distance > 0) {
    double sum = 0.0;
    for (CellId j : selected) sum += grid.distance(j, cell);
    mu += sum / norms.max_distance;
  }
  return mu;
}

std::vector<CellId> pruned_actions(std::span<const CellId> selected,
                                   std::span<const double> queue_packets, const CellGrid& grid,
                                   std::size_t prune_width, bool pruning_enabled) {
  if (queue_packets.size() != grid.size()) throw Error("queue snapshot does not match the grid");
  if (pruning_enabled && prune_width < 1) throw Error("prune width must be at least 1");
  for (CellId c : selected) {
    if (c >= grid.size()) throw Error("cell id out of range");
  }
  Workspace ws(grid.size());
  std::vector<CellId> out;
  compute_actions(selected, queue_packets, grid, prune_width, pruning_enabled, ws, out);
  return out;
}

std::vector<double> MctsTrace::aggregate() const {
  std::size_t len = 0;
  for (const auto& s : stage_best) len = std::max(len, s.size());
  std::vector<double> out(len, 0.0);
  if (stage_best.empty()) return out;
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& s : stage_best) sum += s.empty() ? 0.0 : s[std::min(i, s.size() - 1)];
    out[i] = sum / static_cast<double>(stage_best.size());
  }
  return out;
}

IlluminationPattern compute_pattern_mcts(const ScoreContext& ctx, const MctsConfig& cfg,
                                         MctsTrace* trace) {
  cfg.validate();
  if (ctx.grid != nullptr && ctx.beams > ctx.grid->size()) {
    throw Error("more beams than cells");
  }
  ctx.validate();
  const CellGrid& grid = *ctx.grid;
  const std::size_t beams = ctx.beams;
  const std::size_t width = cfg.prune_width == 0 ? beams : cfg.prune_width;

  PatternScorer scorer(ctx, cfg.scorer);
  Workspace ws(grid.size());
  std::vector<CellId> committed;
  std::vector<CellId> selected;
  std::vector<CellId> actions;
  if (trace != nullptr) trace->stage_best.assign(beams, {});

  for (std::size_t stage = 0; stage < beams; ++stage) {
    std::mt19937_64 rng = stage_rng(cfg.rng_seed, stage);
    SearchTree tree(committed, beams);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double>* stage_trace = trace != nullptr ? &trace->stage_best[stage] : nullptr;
    if (stage_trace != nullptr) stage_trace->reserve(cfg.max_iterations);

    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
      selected.assign(committed.begin(), committed.end());
      NodeId node = tree.root();
      while (!tree.is_terminal(node)) {
        if (!tree.node(node).expanded) {
          compute_actions(selected, ctx.queue_packets, grid, width, cfg.pruning_enabled, ws,
                          actions);
          tree.expand(node, actions);
        }
        node = uct_select(tree, node, cfg.exploration);
        selected.push_back(tree.node(node).action);
        if (tree.node(node).visit_count == 0) break;
      }
      const double score = rollout(selected, beams, scorer, rng, ws);
      tree.backup(node, score);
      best = std::max(best, score);
      if (stage_trace != nullptr) stage_trace->push_back(best);
    }

    const SearchNode& root = tree.node(tree.root());
    NodeId pick = root.first_child;
    for (std::uint32_t i = 1; i < root.child_count; ++i) {
      const NodeId id = root.first_child + i;
      const SearchNode& cand = tree.node(id);
      const SearchNode& cur = tree.node(pick);
      const bool better = cfg.commit == CommitRule::max_mean
                              ? cand.mean_score() > cur.mean_score()
                              : cand.visit_count > cur.visit_count;
      if (better) pick = id;
    }
    committed.push_back(tree.node(pick).action);
  }
  return IlluminationPattern(std::move(committed));
}

}  // namespace hoplite
