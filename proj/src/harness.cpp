#include "hoplite/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

namespace hoplite {

namespace {

using nlohmann::json;

constexpr std::size_t kWarmupSlots = 10;

const std::set<std::string> kExperiments{"throughput", "timing", "convergence",
                                         "scoring",    "beta",   "ds",
                                         "grid"};

void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                    const std::string& where) {
  if (!j.is_object()) throw Error(where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
      throw Error("unknown key '" + k + "' in " + where);
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Exact for integers up to 2^53; served bits are whole packets.
std::string bits(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> demand_for(const SystemModel& model, const ExperimentConfig& cfg, double load,
                               std::uint64_t seed) {
  return generate_demand(model.grid(), model.mean_rate_for_load(load),
                         std::min(cfg.hotspot_count, model.cells()), cfg.hotspot_multiplier, seed);
}

QueueState warm_queue(const SystemModel& model, std::span<const double> demand) {
  QueueState q = initial_queue(demand, model.traffic());
  for (std::size_t t = 0; t < kWarmupSlots; ++t) {
    const auto p = pattern_greedy(q.totals(), model.beams());
    const auto caps = pattern_capacities(p, model.budget());
    q = advance_slot(q, p, caps, model.traffic().slot_seconds, model.beams()).queue_after;
  }
  return q;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stdev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string pattern_string(const IlluminationPattern& p) {
  std::string s;
  for (CellId c : p) {
    if (!s.empty()) s += ' ';
    s += std::to_string(c);
  }
  return s;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  reject_unknown(j,
                 {"rings", "beams", "loads", "algorithms", "seeds", "slots", "hotspots",
                  "interference_threshold_cells", "scorer", "mcts", "ga", "convergence", "timing",
                  "scoring_bench", "beta_sweep", "ds_sweep", "experiments", "output_dir",
                  "include_timing"},
                 "config");
  ExperimentConfig c;
  read(j, "rings", c.rings);
  read(j, "beams", c.beams);
  read(j, "loads", c.loads);
  if (j.contains("algorithms")) {
    c.algorithms.clear();
    for (const auto& a : j.at("algorithms")) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
  }
  read(j, "seeds", c.seeds);
  read(j, "slots", c.slots);
  if (j.contains("hotspots")) {
    const auto& h = j.at("hotspots");
    reject_unknown(h, {"count", "multiplier"}, "hotspots");
    read(h, "count", c.hotspot_count);
    read(h, "multiplier", c.hotspot_multiplier);
  }
  read(j, "interference_threshold_cells", c.interference_threshold_cells);
  if (j.contains("scorer")) {
    c.settings.mcts.scorer = parse_scorer_kind(j.at("scorer").get<std::string>());
  }
  if (j.contains("mcts")) {
    const auto& m = j.at("mcts");
    reject_unknown(m, {"iterations", "exploration", "pruning", "prune_width", "commit", "scorer"},
                   "mcts");
    read(m, "iterations", c.settings.mcts.max_iterations);
    read(m, "exploration", c.settings.mcts.exploration);
    read(m, "pruning", c.settings.mcts.pruning_enabled);
    read(m, "prune_width", c.settings.mcts.prune_width);
    if (m.contains("commit")) c.settings.mcts.commit = parse_commit_rule(m.at("commit").get<std::string>());
    if (m.contains("scorer")) c.settings.mcts.scorer = parse_scorer_kind(m.at("scorer").get<std::string>());
  }
  if (j.contains("ga")) {
    const auto& g = j.at("ga");
    reject_unknown(g, {"population", "generations", "crossover", "mutation", "scorer"}, "ga");
    read(g, "population", c.settings.ga.population_size);
    read(g, "generations", c.settings.ga.generations);
    read(g, "crossover", c.settings.ga.crossover_rate);
    read(g, "mutation", c.settings.ga.mutation_rate);
    if (g.contains("scorer")) c.settings.ga.fitness_scorer = parse_scorer_kind(g.at("scorer").get<std::string>());
  }
  if (j.contains("convergence")) {
    const auto& v = j.at("convergence");
    reject_unknown(v, {"iterations", "load"}, "convergence");
    read(v, "iterations", c.convergence_iterations);
    read(v, "load", c.convergence_load);
  }
  if (j.contains("timing")) {
    const auto& v = j.at("timing");
    reject_unknown(v, {"rings", "patterns", "load"}, "timing");
    read(v, "rings", c.timing_rings);
    read(v, "patterns", c.timing_patterns);
    read(v, "load", c.timing_load);
  }
  if (j.contains("scoring_bench")) {
    const auto& v = j.at("scoring_bench");
    reject_unknown(v, {"rings", "patterns", "repeats"}, "scoring_bench");
    read(v, "rings", c.bench_rings);
    read(v, "patterns", c.bench_patterns);
    read(v, "repeats", c.bench_repeats);
  }
  if (j.contains("beta_sweep")) {
    const auto& v = j.at("beta_sweep");
    reject_unknown(v, {"betas", "load"}, "beta_sweep");
    read(v, "betas", c.betas);
    read(v, "load", c.sweep_load);
  }
  if (j.contains("ds_sweep")) {
    const auto& v = j.at("ds_sweep");
    reject_unknown(v, {"cells", "timing_rings"}, "ds_sweep");
    read(v, "cells", c.ds_cells);
    read(v, "timing_rings", c.ds_timing_rings);
  }
  read(j, "experiments", c.experiments);
  read(j, "output_dir", c.output_dir);
  read(j, "include_timing", c.include_timing);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const json::exception& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw Error("config needs at least one seed");
  if (rings.empty()) throw Error("config needs at least one grid size");
  for (int r : rings) {
    if (r < 1) throw Error("rings must be at least 1");
  }
  if (slots == 0) throw Error("slot count must be at least 1");
  if (algorithms.empty()) throw Error("config needs at least one algorithm");
  for (double l : loads) {
    if (!(l >= 0)) throw Error("load fractions must be nonnegative");
  }
  if (!(hotspot_multiplier >= 0)) throw Error("hotspot multiplier must be nonnegative");
  if (!(interference_threshold_cells >= 0)) throw Error("D_s must be nonnegative");
  for (unsigned b : betas) {
    if (b == 0) throw Error("beta must be at least 1");
  }
  if (bench_repeats == 0 || bench_patterns == 0) throw Error("scoring bench needs work to time");
  for (const auto& e : experiments) {
    if (!kExperiments.count(e)) throw Error("unknown experiment '" + e + "'");
  }
  settings.mcts.validate();
  settings.ga.validate();
}

ModelConfig ExperimentConfig::model(int r) const {
  ModelConfig m;
  m.rings = r;
  m.beams = beams;
  m.interference_threshold_cells = interference_threshold_cells;
  return m;
}

std::vector<MetricsRecord> run_throughput_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<MetricsRecord> out;
  for (int r : cfg.rings) {
    const SystemModel model(cfg.model(r));
    for (double load : cfg.loads) {
      for (std::uint64_t seed : cfg.seeds) {
        const auto demand = demand_for(model, cfg, load, seed);
        for (Algorithm alg : cfg.algorithms) {
          const auto res =
              run_closed_loop(model, demand, cfg.slots, make_policy(alg, model, cfg.settings, seed));
          MetricsRecord rec;
          rec.algorithm = std::string(to_string(alg));
          rec.cells = model.cells();
          rec.beams = model.beams();
          rec.load = load;
          rec.seed = seed;
          rec.slots = cfg.slots;
          rec.throughput_bits = res.total_served_bits;
          rec.dropped_packets = res.total_dropped;
          rec.packet_bits = model.traffic().packet_bits;
          double secs = 0.0;
          for (const auto& s : res.slots) {
            rec.served_packets += s.served_packets;
            secs += s.pattern_seconds;
          }
          rec.mean_pattern_ms = 1e3 * secs / static_cast<double>(res.slots.size());
          rec.bhtp = res.bhtp;
          out.push_back(std::move(rec));
        }
      }
    }
  }
  return out;
}

std::vector<TimingRow> run_timing_table(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Variant {
    std::string name;
    Algorithm alg;
    AlgorithmSettings settings;
  };
  std::vector<Variant> variants;
  for (Algorithm a : cfg.algorithms) {
    Variant v{std::string(to_string(a)), a, cfg.settings};
    if (a == Algorithm::mcts) {
      v.settings.mcts.scorer = ScorerKind::sliding;
      v.settings.mcts.pruning_enabled = true;
    }
    variants.push_back(v);
    if (a == Algorithm::mcts) {
      Variant u{"mcts_unoptimized", a, cfg.settings};
      u.settings.mcts.scorer = ScorerKind::bruteforce;
      u.settings.mcts.pruning_enabled = false;
      variants.push_back(u);
    }
  }

  std::vector<TimingRow> rows;
  const std::size_t patterns = std::max<std::size_t>(cfg.timing_patterns, 1);
  for (int r : cfg.timing_rings) {
    const SystemModel model(cfg.model(r));
    const auto demand = demand_for(model, cfg, cfg.timing_load, cfg.seeds.front());
    for (const auto& v : variants) {
      const auto res = run_closed_loop(model, demand, patterns,
                                       make_policy(v.alg, model, v.settings, cfg.seeds.front()));
      std::vector<double> ms;
      for (const auto& s : res.slots) ms.push_back(1e3 * s.pattern_seconds);
      rows.push_back({v.name, model.cells(), model.beams(), ms.size(), mean_of(ms), stdev_of(ms)});
    }
  }
  return rows;
}

std::size_t iterations_to_fraction(const std::vector<double>& trace, double fraction) {
  if (trace.empty()) return 0;
  const double target = fraction * trace.back();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i] >= target) return i + 1;
  }
  return trace.size();
}

double snapshot_throughput_bits(const SystemModel& model, std::span<const std::int64_t> queue,
                                const IlluminationPattern& pattern) {
  require_valid_pattern(pattern, model.cells(), model.beams());
  if (queue.size() != model.cells()) throw Error("queue snapshot does not match the grid");
  const auto caps = pattern_capacities(pattern, model.budget());
  double total = 0.0;
  for (CellId c : pattern) {
    total += throughput_for_cell(caps[c], static_cast<double>(queue[c]),
                                 model.traffic().slot_seconds, model.traffic().packet_bits);
  }
  return total;
}

std::vector<ConvergenceRecord> run_convergence_trace(const ExperimentConfig& cfg) {
  cfg.validate();
  const SystemModel model(cfg.model(cfg.rings.front()));
  std::vector<ConvergenceRecord> out;
  for (std::uint64_t seed : cfg.seeds) {
    const auto demand = demand_for(model, cfg, cfg.convergence_load, seed);
    const auto queue = warm_queue(model, demand).totals();
    const auto ctx = model.score_context(queue);
    for (bool pruned : {false, true}) {
      MctsConfig mc = cfg.settings.mcts;
      mc.max_iterations = cfg.convergence_iterations;
      mc.pruning_enabled = pruned;
      mc.rng_seed = seed;
      MctsTrace trace;
      ConvergenceRecord rec;
      rec.seed = seed;
      rec.cells = model.cells();
      rec.pruned = pruned;
      rec.pattern = compute_pattern_mcts(ctx, mc, &trace);
      rec.trace = trace.aggregate();
      rec.iterations_to_99 = iterations_to_fraction(rec.trace, 0.99);
      rec.pattern_throughput_bits = snapshot_throughput_bits(model, queue, rec.pattern);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

ScoringBenchRow bench_scoring(const SystemModel& model, double ds_km, std::size_t patterns,
                              std::size_t repeats, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double cmax = model.beam_capacity_packets();
  std::uniform_real_distribution<double> q(0.0, 2.0 * cmax);
  std::vector<std::int64_t> queue(model.cells());
  for (auto& v : queue) v = std::llround(q(rng));
  const auto ctx = model.score_context(queue, ds_km);

  std::vector<std::vector<CellId>> sets;
  for (std::size_t i = 0; i < patterns; ++i) {
    const auto p = pattern_random(model.cells(), model.beams(), rng);
    sets.emplace_back(p.begin(), p.end());
  }
  PatternScorer brute(ctx, ScorerKind::bruteforce);
  PatternScorer slide(ctx, ScorerKind::sliding);

  // Rounds alternate between scorers; the fastest round of each is kept.
  volatile double sink = 0.0;
  auto round = [&](PatternScorer& s) {
    const auto t0 = std::chrono::steady_clock::now();
    double acc = 0.0;
    for (const auto& c : sets) acc += s.score(std::span<const CellId>(c));
    sink = sink + acc;
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  };
  double best_brute = std::numeric_limits<double>::infinity();
  double best_slide = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < repeats; ++r) {
    best_brute = std::min(best_brute, round(brute));
    best_slide = std::min(best_slide, round(slide));
  }
  ScoringBenchRow row;
  row.cells = model.cells();
  row.beams = model.beams();
  row.ds_km = ds_km;
  row.bruteforce_us = best_brute / static_cast<double>(patterns);
  row.sliding_us = best_slide / static_cast<double>(patterns);
  return row;
}

std::vector<ScoringBenchRow> run_scoring_bench(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<ScoringBenchRow> rows;
  for (int r : cfg.bench_rings) {
    const SystemModel model(cfg.model(r));
    rows.push_back(bench_scoring(model, model.interference_threshold_km(), cfg.bench_patterns,
                                 cfg.bench_repeats, cfg.seeds.front()));
  }
  return rows;
}

std::vector<BetaRecord> run_beta_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const SystemModel model(cfg.model(cfg.rings.front()));
  std::vector<BetaRecord> out;
  for (std::uint64_t seed : cfg.seeds) {
    const auto demand = demand_for(model, cfg, cfg.sweep_load, seed);
    for (unsigned beta : cfg.betas) {
      TycheConfig tc;
      tc.beta = beta;
      tc.mcts = cfg.settings.mcts;
      tc.seed = seed;
      tc.low_priority_worker = false;
      Tyche tyche(model, tc);
      const TycheRequest req{demand, cfg.slots, seed};
      tyche.handle_request(req);
      tyche.wait_idle();
      TycheResponse second = tyche.handle_request(req);
      BetaRecord rec;
      rec.beta = beta;
      rec.seed = seed;
      rec.source = std::string(to_string(second.source));
      rec.throughput_bits = replay_bhtp(model, demand, second.bhtp).total_served_bits;
      rec.bhtp = std::move(second.bhtp);
      out.push_back(std::move(rec));
    }
    BetaRecord raw;
    raw.seed = seed;
    raw.source = "direct";
    auto res = run_closed_loop(model, demand, cfg.slots,
                               make_policy(Algorithm::mcts, model, cfg.settings, seed));
    raw.throughput_bits = res.total_served_bits;
    raw.bhtp = std::move(res.bhtp);
    out.push_back(std::move(raw));
  }
  return out;
}

std::vector<DsRecord> run_ds_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<DsRecord> out;
  for (double ds : cfg.ds_cells) {
    ExperimentConfig c = cfg;
    c.interference_threshold_cells = ds;
    const SystemModel model(c.model(cfg.rings.front()));
    const SystemModel timing_model(c.model(cfg.ds_timing_rings));
    const double score_us = bench_scoring(timing_model, timing_model.interference_threshold_km(),
                                          cfg.bench_patterns, cfg.bench_repeats, cfg.seeds.front())
                                .sliding_us;
    for (std::uint64_t seed : cfg.seeds) {
      const auto demand = demand_for(model, cfg, cfg.sweep_load, seed);
      auto res = run_closed_loop(model, demand, cfg.slots,
                                 make_policy(Algorithm::mcts, model, cfg.settings, seed));
      DsRecord rec;
      rec.ds_cells = ds;
      rec.seed = seed;
      rec.throughput_bits = res.total_served_bits;
      rec.score_us = score_us;
      rec.bhtp = std::move(res.bhtp);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

std::vector<std::string> check_bhtp(const Bhtp& bhtp, std::size_t cells, std::size_t beams,
                                    const std::string& label) {
  std::vector<std::string> v;
  for (std::size_t t = 0; t < bhtp.size(); ++t) {
    try {
      require_valid_pattern(bhtp[t], cells, beams);
    } catch (const std::exception& e) {
      v.push_back(label + " slot " + std::to_string(t) + ": " + e.what());
    }
  }
  return v;
}

std::vector<std::string> check_records(const std::vector<MetricsRecord>& records) {
  std::vector<std::string> v;
  for (const auto& r : records) {
    const std::string label =
        r.algorithm + " N=" + std::to_string(r.cells) + " load=" + num(r.load) +
        " seed=" + std::to_string(r.seed);
    auto bad = check_bhtp(r.bhtp, r.cells, r.beams, label);
    v.insert(v.end(), bad.begin(), bad.end());
    if (r.bhtp.size() != r.slots) v.push_back(label + ": BHTP length differs from slot count");
    if (r.throughput_bits != static_cast<double>(r.served_packets) * r.packet_bits) {
      v.push_back(label + ": served bits do not equal served packets times packet size");
    }
  }
  return v;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records,
                       bool include_timing) {
  out << "algorithm,cells,beams,load,seed,slots,throughput_bits,served_packets,dropped_packets";
  if (include_timing) out << ",mean_pattern_ms";
  out << '\n';
  for (const auto& r : records) {
    out << r.algorithm << ',' << r.cells << ',' << r.beams << ',' << num(r.load) << ',' << r.seed
        << ',' << r.slots << ',' << bits(r.throughput_bits) << ',' << r.served_packets << ','
        << r.dropped_packets;
    if (include_timing) out << ',' << num(r.mean_pattern_ms);
    out << '\n';
  }
}

json metrics_json(const std::vector<MetricsRecord>& records, bool include_timing) {
  json arr = json::array();
  for (const auto& r : records) {
    json o{{"algorithm", r.algorithm}, {"cells", r.cells},
           {"beams", r.beams},         {"load", r.load},
           {"seed", r.seed},           {"slots", r.slots},
           {"throughput_bits", r.throughput_bits},
           {"served_packets", r.served_packets},
           {"dropped_packets", r.dropped_packets}};
    if (include_timing) o["mean_pattern_ms"] = r.mean_pattern_ms;
    arr.push_back(std::move(o));
  }
  return arr;
}

void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
  out << "algorithm,cells,beams,patterns,mean_ms,stdev_ms\n";
  for (const auto& r : rows) {
    out << r.algorithm << ',' << r.cells << ',' << r.beams << ',' << r.patterns << ','
        << num(r.mean_ms) << ',' << num(r.stdev_ms) << '\n';
  }
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRecord>& records) {
  out << "seed,cells,pruned,iterations_to_99,final_best_score,pattern_throughput_bits,pattern\n";
  for (const auto& r : records) {
    out << r.seed << ',' << r.cells << ',' << (r.pruned ? 1 : 0) << ',' << r.iterations_to_99
        << ',' << bits(r.trace.empty() ? 0.0 : r.trace.back()) << ','
        << bits(r.pattern_throughput_bits) << ',' << pattern_string(r.pattern) << '\n';
  }
}

json convergence_json(const std::vector<ConvergenceRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    arr.push_back({{"seed", r.seed},
                   {"cells", r.cells},
                   {"pruned", r.pruned},
                   {"iterations_to_99", r.iterations_to_99},
                   {"trace", r.trace}});
  }
  return arr;
}

void write_scoring_csv(std::ostream& out, const std::vector<ScoringBenchRow>& rows) {
  out << "cells,beams,ds_km,bruteforce_us,sliding_us,speedup\n";
  for (const auto& r : rows) {
    out << r.cells << ',' << r.beams << ',' << num(r.ds_km) << ',' << num(r.bruteforce_us) << ','
        << num(r.sliding_us) << ',' << num(r.speedup()) << '\n';
  }
}

void write_beta_csv(std::ostream& out, const std::vector<BetaRecord>& records) {
  out << "beta,seed,source,throughput_bits\n";
  for (const auto& r : records) {
    out << (r.beta == 0 ? std::string("none") : std::to_string(r.beta)) << ',' << r.seed << ','
        << r.source << ',' << bits(r.throughput_bits) << '\n';
  }
}

void write_ds_csv(std::ostream& out, const std::vector<DsRecord>& records, bool include_timing) {
  out << "ds_cells,seed,throughput_bits";
  if (include_timing) out << ",score_us";
  out << '\n';
  for (const auto& r : records) {
    out << num(r.ds_cells) << ',' << r.seed << ',' << bits(r.throughput_bits);
    if (include_timing) out << ',' << num(r.score_us);
    out << '\n';
  }
}

json grid_json(const CellGrid& grid) {
  json cells = json::array();
  for (const auto& c : grid.cells()) {
    cells.push_back({{"id", c.id}, {"x", c.x_km}, {"y", c.y_km}, {"ring", c.ring}});
  }
  return {{"cell_diameter_km", grid.cell_diameter_km()}, {"rings", grid.rings()}, {"cells", cells}};
}

RunSummary run_experiments(const ExperimentConfig& cfg) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  RunSummary summary;

  auto open = [&](const std::string& name) {
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + p.string());
    summary.files.push_back(p);
    return f;
  };
  auto add = [&](std::vector<std::string> v) {
    summary.violations.insert(summary.violations.end(), v.begin(), v.end());
  };

  for (const auto& e : cfg.experiments) {
    if (e == "throughput") {
      const auto recs = run_throughput_sweep(cfg);
      add(check_records(recs));
      auto csv = open("throughput.csv");
      write_metrics_csv(csv, recs, cfg.include_timing);
      open("throughput.json") << metrics_json(recs, cfg.include_timing).dump(2) << '\n';
    } else if (e == "timing") {
      auto csv = open("timing.csv");
      write_timing_csv(csv, run_timing_table(cfg));
    } else if (e == "convergence") {
      const auto recs = run_convergence_trace(cfg);
      for (const auto& r : recs) {
        add(check_bhtp({r.pattern}, r.cells, SystemModel(cfg.model(cfg.rings.front())).beams(),
                       "convergence seed " + std::to_string(r.seed)));
      }
      auto csv = open("convergence.csv");
      write_convergence_csv(csv, recs);
      open("convergence.json") << convergence_json(recs).dump(2) << '\n';
    } else if (e == "scoring") {
      auto csv = open("scoring.csv");
      write_scoring_csv(csv, run_scoring_bench(cfg));
    } else if (e == "beta") {
      const auto recs = run_beta_sweep(cfg);
      const SystemModel model(cfg.model(cfg.rings.front()));
      for (const auto& r : recs) {
        add(check_bhtp(r.bhtp, model.cells(), model.beams(),
                       "beta " + std::to_string(r.beta) + " seed " + std::to_string(r.seed)));
        if (r.beta != 0 && r.source != "cache") {
          add({"beta " + std::to_string(r.beta) + " seed " + std::to_string(r.seed) +
               ": repeated request was not served from the cache"});
        }
      }
      auto csv = open("beta.csv");
      write_beta_csv(csv, recs);
    } else if (e == "ds") {
      const auto recs = run_ds_sweep(cfg);
      const SystemModel model(cfg.model(cfg.rings.front()));
      for (const auto& r : recs) {
        add(check_bhtp(r.bhtp, model.cells(), model.beams(), "ds " + num(r.ds_cells)));
      }
      auto csv = open("ds.csv");
      write_ds_csv(csv, recs, cfg.include_timing);
    } else if (e == "grid") {
      for (int r : cfg.rings) {
        const SystemModel model(cfg.model(r));
        open("grid_" + std::to_string(model.cells()) + ".json") << grid_json(model.grid()).dump(2)
                                                                << '\n';
      }
    }
  }
  return summary;
}

}  // namespace hoplite
