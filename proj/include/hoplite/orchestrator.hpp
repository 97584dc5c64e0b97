#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "hoplite/cache.hpp"
#include "hoplite/simulation.hpp"

namespace hoplite {

struct TycheRequest {
  std::vector<double> demand;  // per-cell arrivals, packets per slot
  std::size_t horizon_slots = 30;
  std::uint64_t request_id = 0;
};

enum class ResponseSource { cache, online_greedy };

std::string_view to_string(ResponseSource s);

struct TycheResponse {
  Bhtp bhtp;
  ResponseSource source = ResponseSource::online_greedy;
  std::chrono::duration<double> latency{0};
  std::uint64_t request_id = 0;
};

/// Computes the background BHTP for a demand vector. The default runs MCTS
/// closed-loop over the horizon.
using BackgroundSolver = std::function<Bhtp(const SystemModel& model, std::span<const double> rates,
                                            std::size_t horizon, std::uint64_t seed)>;

BackgroundSolver mcts_solver(const MctsConfig& cfg);

struct TycheConfig {
  unsigned beta = 10;
  DiscretizeMode mode = DiscretizeMode::nearest;
  std::size_t cache_entries = 200000;
  KeyFunction key_fn = sha256_key;
  std::size_t queue_depth = 8;
  MctsConfig mcts;
  std::uint64_t seed = 1;
  bool low_priority_worker = true;
  BackgroundSolver solver;  // empty means mcts_solver(mcts)
  std::function<void(std::string_view)> log;  // empty means stderr
};

struct TycheStats {
  std::uint64_t requests = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t jobs_enqueued = 0;
  std::uint64_t jobs_coalesced = 0;
  std::uint64_t jobs_dropped = 0;  // pending jobs pushed out by a full queue
  std::uint64_t jobs_completed = 0;
  std::uint64_t jobs_failed = 0;
};

/// Online/offline BHTP service: answers from the cache when it can, otherwise
/// returns a greedy BHTP at once and has a background worker compute and
/// cache a searched BHTP for the same discretized demand.
class Tyche {
 public:
  Tyche(const SystemModel& model, TycheConfig cfg);
  ~Tyche();
  Tyche(const Tyche&) = delete;
  Tyche& operator=(const Tyche&) = delete;

  TycheResponse handle_request(const TycheRequest& req);

  /// Blocks until no job is pending or running.
  void wait_idle();

  TycheStats stats() const;
  BhtpCache& cache() { return cache_; }
  const BhtpCache& cache() const { return cache_; }
  const SystemModel& model() const { return model_; }

  /// Greedy closed-loop BHTP over `horizon` slots; the online answer.
  Bhtp greedy_bhtp(std::span<const double> demand, std::size_t horizon) const;

 private:
  struct Job {
    std::vector<float> key_vector;
    std::size_t horizon = 0;
  };

  void enqueue_locked(Job job);
  void worker_loop(std::stop_token stop);
  void run_job(const Job& job);
  void log(std::string_view msg) const;

  const SystemModel& model_;
  TycheConfig cfg_;
  BhtpCache cache_;

  mutable std::mutex mu_;
  std::condition_variable_any work_cv_;
  std::condition_variable idle_cv_;
  std::deque<Job> pending_;
  std::set<std::pair<std::vector<float>, std::size_t>> in_flight_;  // pending or running
  bool running_ = false;
  TycheStats stats_;
  std::jthread worker_;
};

}  // namespace hoplite
