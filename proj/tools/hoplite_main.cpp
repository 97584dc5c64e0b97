#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hoplite/harness.hpp"

using namespace hoplite;

namespace {

std::vector<std::vector<double>> read_demands(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<std::vector<double>> out;
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream ss(line);
    std::vector<double> v;
    double x;
    while (ss >> x) v.push_back(x);
    if (!ss.eof()) throw Error("bad number in demand file line " + std::to_string(out.size() + 1));
    if (!v.empty()) out.push_back(std::move(v));
  }
  return out;
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  const RunSummary s = run_experiments(cfg);
  for (const auto& f : s.files) std::cout << "wrote " << f.string() << '\n';
  for (const auto& v : s.violations) std::cerr << "invariant violation: " << v << '\n';
  return s.violations.empty() ? 0 : 2;
}

int cmd_bench(const std::vector<int>& rings, double ds_cells, std::size_t patterns,
              std::size_t repeats) {
  std::vector<ScoringBenchRow> rows;
  for (int r : rings) {
    ModelConfig mc;
    mc.rings = r;
    mc.interference_threshold_cells = ds_cells;
    const SystemModel model(mc);
    rows.push_back(bench_scoring(model, model.interference_threshold_km(), patterns, repeats, 1));
  }
  write_scoring_csv(std::cout, rows);
  return 0;
}

int cmd_serve(const std::string& path, int rings, unsigned beta, std::size_t iterations,
              std::size_t horizon, bool drain) {
  ModelConfig mc;
  mc.rings = rings;
  const SystemModel model(mc);
  TycheConfig tc;
  tc.beta = beta;
  tc.mcts.max_iterations = iterations;
  tc.mcts.pruning_enabled = true;
  Tyche tyche(model, tc);

  int status = 0;
  std::cout << "request,source,latency_ms,throughput_bits\n";
  std::uint64_t id = 0;
  for (const auto& demand : read_demands(path)) {
    ++id;
    if (demand.size() != model.cells()) {
      std::cerr << "request " << id << ": expected " << model.cells() << " values, got "
                << demand.size() << '\n';
      status = 1;
      continue;
    }
    const TycheResponse r = tyche.handle_request({demand, horizon, id});
    if (!check_bhtp(r.bhtp, model.cells(), model.beams(), "request " + std::to_string(id)).empty() ||
        r.bhtp.size() != horizon) {
      std::cerr << "request " << id << ": malformed BHTP\n";
      status = 2;
    }
    const double bits = replay_bhtp(model, demand, r.bhtp).total_served_bits;
    std::cout << id << ',' << to_string(r.source) << ',' << r.latency.count() * 1e3 << ','
              << static_cast<long long>(bits) << '\n';
    if (drain) tyche.wait_idle();
  }
  tyche.wait_idle();
  const TycheStats st = tyche.stats();
  std::cerr << "requests " << st.requests << ", hits " << st.cache_hits << ", jobs "
            << st.jobs_completed << " done / " << st.jobs_coalesced << " coalesced / "
            << st.jobs_dropped << " dropped / " << st.jobs_failed << " failed\n";
  return status;
}

int cmd_dump_grid(int rings, double diameter) {
  const CellGrid grid =
      CellGrid::generate(rings, diameter > 0 ? diameter : default_cell_diameter_km());
  std::cout << grid_json(grid).dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GEO beam-hopping simulator and scheduler"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the experiments in a JSON config");
  std::string config_path, out_dir;
  run->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "override the config's output directory");

  auto* bench = app.add_subcommand("bench-scoring", "time brute-force vs sliding-window scoring");
  std::vector<int> bench_rings{3, 4, 5, 6};
  double bench_ds = 1.0;
  std::size_t bench_patterns = 200, bench_repeats = 20;
  bench->add_option("--rings", bench_rings, "grid sizes (hex rings)");
  bench->add_option("--ds", bench_ds, "interference threshold in cell diameters");
  bench->add_option("--patterns", bench_patterns, "random patterns per grid");
  bench->add_option("--repeats", bench_repeats, "timing rounds (fastest kept)");

  auto* serve = app.add_subcommand("serve-trace", "replay demand vectors through the orchestrator");
  std::string demands_path;
  int serve_rings = 3;
  unsigned serve_beta = 10;
  std::size_t serve_iters = 200, serve_horizon = 30;
  bool serve_drain = false;
  serve->add_option("demands", demands_path, "one demand vector per line (packets/slot)")
      ->required()
      ->check(CLI::ExistingFile);
  serve->add_option("--rings", serve_rings, "grid size (hex rings)");
  serve->add_option("--beta", serve_beta, "discretization factor");
  serve->add_option("--iterations", serve_iters, "MCTS iterations per stage");
  serve->add_option("--horizon", serve_horizon, "slots per BHTP");
  serve->add_flag("--drain", serve_drain, "wait for background work after every request");

  auto* dump = app.add_subcommand("dump-grid", "print cell coordinates as JSON");
  int dump_rings = 3;
  double dump_diameter = 0.0;
  dump->add_option("--rings", dump_rings, "hex rings")->required();
  dump->add_option("--diameter", dump_diameter, "cell diameter in km (default: beam footprint)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, out_dir);
    if (*bench) return cmd_bench(bench_rings, bench_ds, bench_patterns, bench_repeats);
    if (*serve) return cmd_serve(demands_path, serve_rings, serve_beta, serve_iters, serve_horizon, serve_drain);
    if (*dump) return cmd_dump_grid(dump_rings, dump_diameter);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
