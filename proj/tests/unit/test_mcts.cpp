#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hoplite/mcts.hpp"
#include "oracles.hpp"

using namespace hoplite;

namespace {

struct Fixture {
  Fixture(CellGrid g, std::uint64_t seed, std::int64_t max_queue = 30000)
      : grid(std::move(g)), budget(grid, link) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> q(0, max_queue);
    queue.resize(grid.size());
    for (auto& v : queue) v = q(rng);
  }
  ScoreContext context(std::size_t beams) const {
    return ScoreContext::build(grid, budget, queue, beams, traffic, grid.cell_diameter_km());
  }
  std::vector<double> queue_d() const { return {queue.begin(), queue.end()}; }

  LinkParams link;
  TrafficParams traffic;
  CellGrid grid;
  LinkBudget budget;
  std::vector<std::int64_t> queue;
};

CellGrid small_grid() {
  const CellGrid full = CellGrid::generate(2, default_cell_diameter_km());
  std::vector<Cell> cells(full.cells().begin(), full.cells().begin() + 8);
  return CellGrid::from_cells(cells, full.cell_diameter_km());
}

}  // namespace

TEST_CASE("commit rule names") {
  CHECK(parse_commit_rule("max_mean") == CommitRule::max_mean);
  CHECK(parse_commit_rule("visits") == CommitRule::max_visits);
  CHECK_THROWS_AS(parse_commit_rule("best"), Error);
}

TEST_CASE("tree expansion, prefixes and backup") {
  SearchTree tree({4, 7}, 4);
  CHECK(tree.node(tree.root()).depth == 2);
  CHECK_FALSE(tree.is_terminal(tree.root()));
  const std::vector<CellId> actions{9, 1, 5};
  tree.expand(tree.root(), actions);
  const auto kids = tree.children(tree.root());
  REQUIRE(kids.size() == 3);
  CHECK(tree.node(kids[0]).action == 1);
  CHECK(tree.node(kids[1]).action == 5);
  CHECK(tree.node(kids[2]).action == 9);
  tree.expand(tree.root(), std::vector<CellId>{0});  // no-op once expanded
  CHECK(tree.children(tree.root()).size() == 3);

  const std::vector<CellId> next{2};
  tree.expand(kids[1], next);
  const NodeId leaf = tree.children(kids[1])[0];
  CHECK(tree.is_terminal(leaf));
  CHECK(tree.selected_prefix(leaf) == std::vector<CellId>{4, 7, 5, 2});
  CHECK_THROWS_AS(tree.expand(leaf, next), Error);

  tree.backup(leaf, 0.25);
  tree.backup(leaf, 0.5);
  tree.backup(kids[0], 1.0);
  CHECK(tree.node(leaf).visit_count == 2);
  CHECK(tree.node(leaf).score_sum == 0.75);
  CHECK(tree.node(kids[1]).visit_count == 2);
  CHECK(tree.node(tree.root()).visit_count == 3);
  CHECK(tree.node(tree.root()).score_sum == 1.75);
  CHECK(tree.node(tree.root()).mean_score() == doctest::Approx(1.75 / 3));
  CHECK_THROWS_AS(SearchTree({1, 2, 3}, 2), Error);
}

TEST_CASE("UCT selection matches the reference rule") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    SearchTree tree({}, 3);
    std::vector<CellId> actions(6);
    std::iota(actions.begin(), actions.end(), CellId{0});
    tree.expand(tree.root(), actions);
    const auto kids = tree.children(tree.root());
    std::uniform_real_distribution<double> sc(0.0, 1.0);
    std::uniform_int_distribution<int> vis(trial % 3 == 0 ? 0 : 1, 6);
    for (NodeId k : kids) {
      const int v = vis(rng);
      for (int i = 0; i < v; ++i) tree.backup(k, sc(rng));
    }
    const double c = 0.1 * (trial % 20);
    const NodeId got = uct_select(tree, tree.root(), c);

    NodeId want = kNoNode;
    double best = -1e300;
    const double n_parent = static_cast<double>(tree.node(tree.root()).visit_count);
    for (NodeId k : kids) {
      const SearchNode& s = tree.node(k);
      if (s.visit_count == 0) {
        want = k;
        break;
      }
      const double v = s.score_sum / s.visit_count +
                       c * std::sqrt(std::log(std::max(n_parent, 1.0)) / s.visit_count);
      if (v > best) {
        best = v;
        want = k;
      }
    }
    CHECK(got == want);
  }
  SearchTree empty({}, 2);
  CHECK_THROWS_AS(uct_select(empty, empty.root(), 1.0), Error);
}

TEST_CASE("selection value and pruned actions match direct evaluation") {
  const Fixture f(CellGrid::generate(3, default_cell_diameter_km()), 3);
  const auto q = f.queue_d();
  const std::vector<CellId> selected{0, 5, 17};
  const SelectionNormalizers norms = selection_normalizers(q, f.grid, selected.size());
  CHECK(norms.max_queue == *std::max_element(q.begin(), q.end()));
  CHECK(norms.max_distance == doctest::Approx(6 * f.grid.cell_diameter_km() * 3));

  std::vector<std::pair<double, CellId>> mu;
  for (CellId i = 0; i < 37; ++i) {
    if (std::find(selected.begin(), selected.end(), i) != selected.end()) {
      CHECK_THROWS_AS(selection_value(i, selected, q, f.grid, norms), Error);
      continue;
    }
    double dist = 0.0;
    for (CellId j : selected) {
      dist += std::hypot(f.grid.cell(i).x_km - f.grid.cell(j).x_km,
                         f.grid.cell(i).y_km - f.grid.cell(j).y_km);
    }
    const double want = q[i] / norms.max_queue + dist / norms.max_distance;
    const double got = selection_value(i, selected, q, f.grid, norms);
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    mu.emplace_back(-got, i);
  }
  std::sort(mu.begin(), mu.end());
  const auto top = pruned_actions(selected, q, f.grid, 9, true);
  REQUIRE(top.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(top[i] == mu[i].second);

  const auto all = pruned_actions(selected, q, f.grid, 9, false);
  CHECK(all.size() == 34);
  CHECK(std::is_sorted(all.begin(), all.end()));
  CHECK_THROWS_AS(pruned_actions(selected, q, f.grid, 0, true), Error);

  // Empty selection: distance term drops, queue order decides.
  const auto first = pruned_actions({}, q, f.grid, 3, true);
  std::vector<CellId> by_queue(37);
  std::iota(by_queue.begin(), by_queue.end(), CellId{0});
  std::stable_sort(by_queue.begin(), by_queue.end(), [&](CellId a, CellId b) { return q[a] > q[b]; });
  CHECK(first == std::vector<CellId>(by_queue.begin(), by_queue.begin() + 3));
}

TEST_CASE("a random rollout from the root is an unbiased estimate of the mean pattern score") {
  const Fixture f(small_grid(), 21);
  const ScoreContext ctx = f.context(3);
  PatternScorer scorer(ctx, ScorerKind::bruteforce);
  double sum = 0.0, sum2 = 0.0;
  int count = 0;
  oracle::for_each_subset(8, 3, [&](const std::vector<CellId>& s) {
    const double v = oracle::score(f.grid, s, f.queue_d(), f.link, 0.1, 12000.0);
    sum += v;
    sum2 += v * v;
    ++count;
  });
  CHECK(count == 56);
  const double mean = sum / count;
  const double sd = std::sqrt(sum2 / count - mean * mean);

  SearchTree tree({}, 3);
  std::mt19937_64 rng(5);
  const int draws = 4000;
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) acc += simulate(tree, tree.root(), scorer, rng);
  CHECK(std::abs(acc / draws - mean) < 4.0 * sd / std::sqrt(draws));

  // A full prefix is scored as is.
  SearchTree fixed({1, 4, 6}, 3);
  CHECK(simulate(fixed, fixed.root(), scorer, rng) ==
        doctest::Approx(oracle::score(f.grid, {1, 4, 6}, f.queue_d(), f.link, 0.1, 12000.0))
            .epsilon(1e-12));
}

TEST_CASE("MCTS returns K distinct cells, deterministically") {
  const Fixture f(CellGrid::generate(3, default_cell_diameter_km()), 4);
  const ScoreContext ctx = f.context(9);
  MctsConfig cfg;
  cfg.max_iterations = 60;
  for (bool prune : {false, true}) {
    cfg.pruning_enabled = prune;
    MctsTrace trace;
    const IlluminationPattern a = compute_pattern_mcts(ctx, cfg, &trace);
    const IlluminationPattern b = compute_pattern_mcts(ctx, cfg);
    CHECK(a == b);
    CHECK_NOTHROW(require_valid_pattern(a, 37, 9));
    REQUIRE(trace.stage_best.size() == 9);
    for (const auto& s : trace.stage_best) {
      CHECK(s.size() == 60);
      CHECK(std::is_sorted(s.begin(), s.end()));
    }
    const auto agg = trace.aggregate();
    CHECK(agg.size() == 60);
    CHECK(std::is_sorted(agg.begin(), agg.end()));
  }
  cfg.rng_seed = 99;
  cfg.pruning_enabled = false;
  // A different seed is allowed to agree, but the search must still be valid.
  CHECK_NOTHROW(require_valid_pattern(compute_pattern_mcts(ctx, cfg), 37, 9));
}

TEST_CASE("K = N lights every cell") {
  const Fixture f(small_grid(), 2);
  MctsConfig cfg;
  cfg.max_iterations = 5;
  const IlluminationPattern p = compute_pattern_mcts(f.context(8), cfg);
  CHECK(p == IlluminationPattern{0, 1, 2, 3, 4, 5, 6, 7});
}

TEST_CASE("more iterations do not hurt on average") {
  double few = 0.0, many = 0.0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Fixture f(CellGrid::generate(3, default_cell_diameter_km()), seed);
    const ScoreContext ctx = f.context(9);
    MctsConfig cfg;
    cfg.rng_seed = seed;
    cfg.max_iterations = 10;
    few += score_bruteforce(compute_pattern_mcts(ctx, cfg), ctx);
    cfg.max_iterations = 200;
    many += score_bruteforce(compute_pattern_mcts(ctx, cfg), ctx);
  }
  CHECK(many >= few);
}

TEST_CASE("scaling the normalizer and the exploration constant together changes nothing") {
  const Fixture f(CellGrid::generate(3, default_cell_diameter_km()), 6);
  const ScoreContext ctx = f.context(9);
  ScoreContext scaled = ctx;
  scaled.omega_max_bits *= 4.0;
  for (bool prune : {false, true}) {
    MctsConfig cfg;
    cfg.max_iterations = 80;
    cfg.pruning_enabled = prune;
    const IlluminationPattern a = compute_pattern_mcts(ctx, cfg);
    cfg.exploration /= 4.0;
    const IlluminationPattern b = compute_pattern_mcts(scaled, cfg);
    CHECK(a == b);
  }
}

TEST_CASE("MCTS contracts") {
  const Fixture f(small_grid(), 2);
  ScoreContext ctx = f.context(3);
  MctsConfig cfg;
  cfg.max_iterations = 0;
  CHECK_THROWS_AS(compute_pattern_mcts(ctx, cfg), Error);
  cfg = MctsConfig{};
  cfg.exploration = -1;
  CHECK_THROWS_AS(compute_pattern_mcts(ctx, cfg), Error);
  cfg = MctsConfig{};
  ctx.beams = 9;
  CHECK_THROWS_AS(compute_pattern_mcts(ctx, cfg), Error);
}
