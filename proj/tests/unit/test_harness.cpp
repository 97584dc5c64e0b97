#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hoplite/harness.hpp"

using namespace hoplite;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.rings = {2};
  c.loads = {0.8};
  c.seeds = {1, 2};
  c.slots = 8;
  c.settings.mcts.max_iterations = 20;
  c.settings.ga.population_size = 16;
  c.settings.ga.generations = 4;
  c.include_timing = false;
  return c;
}

std::string metrics_csv(const ExperimentConfig& c) {
  std::ostringstream out;
  write_metrics_csv(out, run_throughput_sweep(c), false);
  return out.str();
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hoplite_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("algorithm names round-trip") {
  for (Algorithm a : {Algorithm::random, Algorithm::periodic, Algorithm::greedy, Algorithm::ga,
                      Algorithm::mcts}) {
    CHECK(parse_algorithm(to_string(a)) == a);
  }
  CHECK_THROWS_AS(parse_algorithm("tabu"), Error);
}

TEST_CASE("config parsing") {
  const json j = json::parse(R"({
    "rings": [3, 4], "beams": 5, "loads": [0.5], "algorithms": ["greedy", "mcts"],
    "seeds": [7], "slots": 12, "hotspots": {"count": 2, "multiplier": 3.0},
    "interference_threshold_cells": 2,
    "mcts": {"iterations": 50, "exploration": 0.5, "pruning": true, "prune_width": 4,
             "commit": "visits", "scorer": "bruteforce"},
    "ga": {"population": 10, "generations": 3, "crossover": 0.5, "mutation": 0.1},
    "convergence": {"iterations": 30, "load": 1.1},
    "timing": {"rings": [3], "patterns": 2, "load": 0.9},
    "scoring_bench": {"rings": [3], "patterns": 5, "repeats": 2},
    "beta_sweep": {"betas": [2, 10], "load": 0.7},
    "ds_sweep": {"cells": [1, 2], "timing_rings": 3},
    "experiments": ["throughput", "grid"], "output_dir": "out", "include_timing": false
  })");
  const ExperimentConfig c = ExperimentConfig::from_json(j);
  CHECK(c.rings == std::vector<int>{3, 4});
  CHECK(c.beams == 5);
  CHECK(c.algorithms == std::vector<Algorithm>{Algorithm::greedy, Algorithm::mcts});
  CHECK(c.seeds == std::vector<std::uint64_t>{7});
  CHECK(c.slots == 12);
  CHECK(c.hotspot_count == 2);
  CHECK(c.hotspot_multiplier == 3.0);
  CHECK(c.interference_threshold_cells == 2.0);
  CHECK(c.settings.mcts.max_iterations == 50);
  CHECK(c.settings.mcts.exploration == 0.5);
  CHECK(c.settings.mcts.pruning_enabled);
  CHECK(c.settings.mcts.prune_width == 4);
  CHECK(c.settings.mcts.commit == CommitRule::max_visits);
  CHECK(c.settings.mcts.scorer == ScorerKind::bruteforce);
  CHECK(c.settings.ga.population_size == 10);
  CHECK(c.convergence_iterations == 30);
  CHECK(c.timing_patterns == 2);
  CHECK(c.bench_repeats == 2);
  CHECK(c.betas == std::vector<unsigned>{2, 10});
  CHECK(c.sweep_load == 0.7);
  CHECK(c.ds_cells == std::vector<double>{1, 2});
  CHECK(c.output_dir == "out");
  CHECK_FALSE(c.include_timing);
  CHECK(c.model(4).rings == 4);
  CHECK(c.model(4).beams == 5);

  const ExperimentConfig d = ExperimentConfig::from_json(json::object());
  CHECK(d.rings == std::vector<int>{3});
  CHECK(d.slots == 30);
}

TEST_CASE("config errors are reported") {
  auto bad = [](const char* text) { return ExperimentConfig::from_json(json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"ringz": [3]})"), Error);
  CHECK_THROWS_AS(bad(R"({"mcts": {"iters": 5}})"), Error);
  CHECK_THROWS_AS(bad(R"({"hotspots": {"count": 1, "extra": 2}})"), Error);
  CHECK_THROWS_AS(bad(R"({"seeds": []})"), Error);
  CHECK_THROWS_AS(bad(R"({"rings": [0]})"), Error);
  CHECK_THROWS_AS(bad(R"({"algorithms": ["tabu"]})"), Error);
  CHECK_THROWS_AS(bad(R"({"experiments": ["everything"]})"), Error);
  CHECK_THROWS_AS(bad(R"({"beta_sweep": {"betas": [0]}})"), Error);
  CHECK_THROWS_AS(bad(R"({"mcts": {"iterations": 0}})"), Error);
  CHECK_THROWS_AS(bad(R"({"loads": [-1]})"), Error);
  CHECK_THROWS_AS(bad(R"({"mcts": 3})"), Error);
  CHECK_THROWS(bad(R"({"slots": "many"})"));

  const auto dir = temp_dir("cfg");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK_THROWS_AS(ExperimentConfig::load(dir / "broken.json"), Error);
  CHECK_THROWS_AS(ExperimentConfig::load(dir / "missing.json"), Error);
  std::ofstream(dir / "ok.json") << R"({"slots": 3})";
  CHECK(ExperimentConfig::load(dir / "ok.json").slots == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("zero demand gives zero throughput for every algorithm") {
  ExperimentConfig c = small_config();
  c.loads = {0.0};
  for (const auto& r : run_throughput_sweep(c)) {
    CHECK(r.throughput_bits == 0.0);
    CHECK(r.served_packets == 0);
    CHECK(r.dropped_packets == 0);
  }
}

TEST_CASE("closed-loop runs conserve packets and replay exactly") {
  const SystemModel model(ModelConfig{});
  const auto demand = generate_demand(model.grid(), model.mean_rate_for_load(1.2), 4, 4.0, 3);
  AlgorithmSettings s;
  s.mcts.max_iterations = 15;
  s.ga.population_size = 12;
  s.ga.generations = 3;
  const auto arrivals = round_arrivals(demand);
  const std::int64_t per_slot = std::accumulate(arrivals.begin(), arrivals.end(), std::int64_t{0});
  for (Algorithm a : {Algorithm::random, Algorithm::periodic, Algorithm::greedy, Algorithm::ga,
                      Algorithm::mcts}) {
    const RunResult r = run_closed_loop(model, demand, 12, make_policy(a, model, s, 5));
    REQUIRE(r.slots.size() == 12);
    CHECK(r.bhtp.size() == 12);
    CHECK(check_bhtp(r.bhtp, 37, 9, "run").empty());
    CHECK(r.slots.front().queued_before == per_slot);
    double bits = 0.0;
    std::int64_t dropped = 0;
    for (std::size_t t = 0; t < r.slots.size(); ++t) {
      const SlotRecord& sr = r.slots[t];
      CHECK(sr.arrived_packets == per_slot);
      CHECK(sr.arrived_packets - sr.served_packets - sr.dropped_packets ==
            sr.queued_after - sr.queued_before);
      CHECK(sr.served_bits == static_cast<double>(sr.served_packets) * 12000.0);
      if (t > 0) CHECK(sr.queued_before == r.slots[t - 1].queued_after);
      CHECK(sr.pattern == r.bhtp[t]);
      bits += sr.served_bits;
      dropped += sr.dropped_packets;
    }
    CHECK(bits == r.total_served_bits);
    CHECK(dropped == r.total_dropped);

    const RunResult again = replay_bhtp(model, demand, r.bhtp);
    CHECK(again.total_served_bits == r.total_served_bits);
    CHECK(again.total_dropped == r.total_dropped);

    // Same seed, same plan.
    CHECK(run_closed_loop(model, demand, 12, make_policy(a, model, s, 5)).bhtp == r.bhtp);
  }
}

TEST_CASE("throughput never exceeds what was offered") {
  ExperimentConfig c = small_config();
  c.loads = {0.2, 1.2};
  for (const auto& r : run_throughput_sweep(c)) {
    const SystemModel model(c.model(2));
    const auto arrivals = round_arrivals(generate_demand(
        model.grid(), model.mean_rate_for_load(r.load), c.hotspot_count, c.hotspot_multiplier, r.seed));
    const double offered =
        static_cast<double>(std::accumulate(arrivals.begin(), arrivals.end(), std::int64_t{0})) *
        static_cast<double>(r.slots) * 12000.0;
    CHECK(r.throughput_bits <= offered);
    CHECK(r.throughput_bits > 0.0);
  }
}

TEST_CASE("load fraction scales the mean arrival rate") {
  const SystemModel model(ModelConfig{});
  CHECK(model.cells() == 37);
  CHECK(model.beams() == 9);
  CHECK(model.mean_rate_for_load(1.0) ==
        doctest::Approx(9.0 * model.beam_capacity_packets() / 37.0));
  CHECK(model.mean_rate_for_load(0.5) == doctest::Approx(0.5 * model.mean_rate_for_load(1.0)));
  CHECK(model.beam_capacity_packets() == doctest::Approx(9976).epsilon(2e-3));
  CHECK(default_beams(127) == 31);
  CHECK(default_beams(3) == 1);
  ModelConfig too_many;
  too_many.rings = 1;
  too_many.beams = 8;
  CHECK_THROWS_AS(SystemModel{too_many}, Error);
}

TEST_CASE("seeded metric CSVs are byte-identical across runs") {
  const ExperimentConfig c = small_config();
  const std::string a = metrics_csv(c);
  const std::string b = metrics_csv(c);
  CHECK(a == b);
  CHECK(a.rfind("algorithm,cells,beams,load,seed,slots,throughput_bits,served_packets,dropped_packets\n", 0) == 0);
  CHECK(a.find("mean_pattern_ms") == std::string::npos);
  ExperimentConfig other = c;
  other.seeds = {3};
  CHECK(metrics_csv(other) != a);
}

TEST_CASE("invariant checks flag corrupted records") {
  ExperimentConfig c = small_config();
  c.algorithms = {Algorithm::greedy};
  auto recs = run_throughput_sweep(c);
  CHECK(check_records(recs).empty());
  recs[0].throughput_bits += 1.0;
  recs[1].bhtp[0] = IlluminationPattern{0};
  CHECK(check_records(recs).size() == 2);
}

TEST_CASE("snapshot throughput is the per-cell sum") {
  const SystemModel model(ModelConfig{});
  std::vector<std::int64_t> q(37, 0);
  for (CellId i = 0; i < 37; ++i) q[i] = 400 * i;
  const IlluminationPattern p{0, 3, 6, 9, 12, 15, 20, 30, 36};
  const auto caps = pattern_capacities(p, model.budget());
  double want = 0.0;
  for (CellId c : p) want += std::min(caps[c] * 0.1, static_cast<double>(q[c]) * 12000.0);
  CHECK(snapshot_throughput_bits(model, q, p) == doctest::Approx(want).epsilon(1e-14));
  CHECK_THROWS_AS(snapshot_throughput_bits(model, q, IlluminationPattern{1, 2}), Error);
}

TEST_CASE("iterations to a fraction of the final value") {
  CHECK(iterations_to_fraction({}, 0.99) == 0);
  CHECK(iterations_to_fraction({1.0, 2.0, 3.0}, 1.0) == 3);
  CHECK(iterations_to_fraction({1.0, 2.0, 3.0}, 0.5) == 2);
  CHECK(iterations_to_fraction({5.0, 5.0}, 0.99) == 1);
}

TEST_CASE("beta sweep serves the repeat from the cache") {
  ExperimentConfig c = small_config();
  c.seeds = {1};
  c.betas = {2, 10};
  const auto rows = run_beta_sweep(c);
  REQUIRE(rows.size() == 3);
  int direct = 0;
  for (const auto& r : rows) {
    CHECK(r.bhtp.size() == c.slots);
    if (r.beta == 0) {
      ++direct;
    } else {
      CHECK(r.source == "cache");
    }
    CHECK(r.throughput_bits > 0.0);
  }
  CHECK(direct == 1);
}

TEST_CASE("run_experiments writes the requested outputs") {
  ExperimentConfig c = small_config();
  c.algorithms = {Algorithm::greedy, Algorithm::periodic};
  c.experiments = {"throughput", "grid", "scoring"};
  c.bench_rings = {2};
  c.bench_patterns = 5;
  c.bench_repeats = 1;
  c.output_dir = temp_dir("run").string();
  const RunSummary s = run_experiments(c);
  CHECK(s.violations.empty());
  for (const char* f : {"throughput.csv", "throughput.json", "scoring.csv"}) {
    CHECK(std::filesystem::exists(std::filesystem::path(c.output_dir) / f));
  }
  std::ifstream in(std::filesystem::path(c.output_dir) / "throughput.json");
  const json j = json::parse(in);
  CHECK(j.size() == 4);
  std::filesystem::remove_all(c.output_dir);
}

TEST_CASE("grid JSON lists every cell") {
  const CellGrid g = CellGrid::generate(2, 100.0);
  const json j = grid_json(g);
  CHECK(j.at("cells").size() == 19);
  CHECK(j.at("rings") == 2);
  CHECK(j.at("cells")[5].at("id") == 5);
}
