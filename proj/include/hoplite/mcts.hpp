#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "hoplite/geometry.hpp"
#include "hoplite/pattern.hpp"
#include "hoplite/scoring.hpp"

namespace hoplite {

enum class CommitRule { max_mean, max_visits };

CommitRule parse_commit_rule(std::string_view name);

struct MctsConfig {
  std::size_t max_iterations = 200;  // per stage (one stage per beam)
  double exploration = std::numbers::sqrt2;
  bool pruning_enabled = false;
  std::size_t prune_width = 0;  // 0 means "the beam count"
  std::uint64_t rng_seed = 1;
  ScorerKind scorer = ScorerKind::sliding;
  CommitRule commit = CommitRule::max_mean;

  void validate() const;
};

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr CellId kNoCell = std::numeric_limits<CellId>::max();

struct SearchNode {
  CellId action = kNoCell;  // cell added on the edge into this node
  NodeId parent = kNoNode;
  NodeId first_child = kNoNode;
  std::uint32_t child_count = 0;
  std::uint32_t depth = 0;  // selected cells, fixed prefix included
  std::int64_t visit_count = 0;
  double score_sum = 0.0;
  bool expanded = false;

  double mean_score() const {
    return visit_count > 0 ? score_sum / static_cast<double>(visit_count) : 0.0;
  }
};

/// Search tree for one stage. The root holds the cells committed by earlier
/// stages; each edge adds one unselected cell.
class SearchTree {
 public:
  SearchTree(std::vector<CellId> fixed_prefix, std::size_t beams);

  NodeId root() const { return 0; }
  const SearchNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t beams() const { return beams_; }
  std::span<const CellId> fixed_prefix() const { return prefix_; }

  bool is_terminal(NodeId id) const { return node(id).depth >= beams_; }
  /// Ids of the children of `id`, in ascending action order.
  std::vector<NodeId> children(NodeId id) const;
  /// Fixed prefix followed by the actions on the root-to-node path.
  std::vector<CellId> selected_prefix(NodeId id) const;

  /// Creates one child per action (sorted ascending). No-op if already expanded.
  void expand(NodeId id, std::span<const CellId> actions);
  /// Adds `score` and one visit to every node from `leaf` up to the root.
  void backup(NodeId leaf, double score);

 private:
  std::vector<SearchNode> nodes_;
  std::vector<CellId> prefix_;
  std::size_t beams_;
};

/// argmax over children of mean + c sqrt(ln N_parent / N_child); unvisited
/// children win outright, ties go to the lower cell id. Throws Error if the
/// node has no children.
NodeId uct_select(const SearchTree& tree, NodeId node, double exploration);

/// Completes the node's prefix to K cells uniformly at random (without
/// replacement) and scores the result.
double simulate(const SearchTree& tree, NodeId node, PatternScorer& scorer, std::mt19937_64& rng);

struct SelectionNormalizers {
  double max_queue = 0.0;     // d_max
  double max_distance = 0.0;  // D_max
};

/// d_max = largest queue in the snapshot, D_max = grid diameter * |selected|.
SelectionNormalizers selection_normalizers(std::span<const double> queue_packets,
                                           const CellGrid& grid, std::size_t selected_count);

/// mu_i = d_i / d_max + sum_{j in selected} D_ij / D_max. Zero normalizers
/// drop their term. Throws Error if `cell` is already selected.
double selection_value(CellId cell, std::span<const CellId> selected,
                       std::span<const double> queue_packets, const CellGrid& grid,
                       const SelectionNormalizers& norms);

/// With pruning: the `prune_width` unselected cells of largest selection value
/// (descending, ties by lower id). Without: every unselected cell, ascending.
std::vector<CellId> pruned_actions(std::span<const CellId> selected,
                                   std::span<const double> queue_packets, const CellGrid& grid,
                                   std::size_t prune_width, bool pruning_enabled);

/// Best simulated score seen so far, per stage and iteration.
struct MctsTrace {
  std::vector<std::vector<double>> stage_best;

  /// Mean over stages of the running best at each iteration index.
  std::vector<double> aggregate() const;
};

/// Runs one MCTS per beam; each commits one cell. Throws Error if K > N.
IlluminationPattern compute_pattern_mcts(const ScoreContext& ctx, const MctsConfig& cfg,
                                         MctsTrace* trace = nullptr);

}  // namespace hoplite
