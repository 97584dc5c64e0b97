#include "hoplite/orchestrator.hpp"

#include <sys/resource.h>
#include <sys/syscall.h>
#include <unistd.h>

#include <iostream>
#include <string>

namespace hoplite {

std::string_view to_string(ResponseSource s) {
  return s == ResponseSource::cache ? "cache" : "online_greedy";
}

BackgroundSolver mcts_solver(const MctsConfig& cfg) {
  return [cfg](const SystemModel& model, std::span<const double> rates, std::size_t horizon,
               std::uint64_t seed) {
    AlgorithmSettings settings;
    settings.mcts = cfg;
    auto policy = make_policy(Algorithm::mcts, model, settings, seed);
    return run_closed_loop(model, rates, horizon, policy).bhtp;
  };
}

Tyche::Tyche(const SystemModel& model, TycheConfig cfg)
    : model_(model),
      cfg_(std::move(cfg)),
      cache_(BhtpCache::Options{
          Discretization{model.beam_capacity_packets(), cfg_.beta, cfg_.mode},
          cfg_.cache_entries, cfg_.key_fn}) {
  if (cfg_.queue_depth == 0) throw Error("background queue depth must be at least 1");
  cfg_.mcts.validate();
  if (!cfg_.solver) cfg_.solver = mcts_solver(cfg_.mcts);
  worker_ = std::jthread([this](std::stop_token st) { worker_loop(st); });
}

Tyche::~Tyche() {
  worker_.request_stop();
  work_cv_.notify_all();
}

Bhtp Tyche::greedy_bhtp(std::span<const double> demand, std::size_t horizon) const {
  auto policy = make_policy(Algorithm::greedy, model_, AlgorithmSettings{}, 0);
  return run_closed_loop(model_, demand, horizon, policy).bhtp;
}

TycheResponse Tyche::handle_request(const TycheRequest& req) {
  const auto start = std::chrono::steady_clock::now();
  if (req.demand.size() != model_.cells()) throw Error("demand vector has wrong length");
  if (req.horizon_slots == 0) throw Error("horizon must be at least one slot");

  TycheResponse resp;
  resp.request_id = req.request_id;
  std::vector<float> key_vector = cache_.discretized(req.demand);
  std::optional<Bhtp> hit = cache_.lookup_discretized(key_vector);
  // A plan for a different horizon cannot answer this request.
  if (hit && hit->size() == req.horizon_slots) {
    resp.bhtp = std::move(*hit);
    resp.source = ResponseSource::cache;
  } else {
    resp.bhtp = greedy_bhtp(req.demand, req.horizon_slots);
    resp.source = ResponseSource::online_greedy;
  }

  {
    std::lock_guard lock(mu_);
    ++stats_.requests;
    if (resp.source == ResponseSource::cache) {
      ++stats_.cache_hits;
    } else {
      ++stats_.misses;
      enqueue_locked(Job{std::move(key_vector), req.horizon_slots});
    }
  }
  work_cv_.notify_one();
  resp.latency = std::chrono::steady_clock::now() - start;
  return resp;
}

void Tyche::enqueue_locked(Job job) {
  auto id = std::make_pair(job.key_vector, job.horizon);
  if (in_flight_.count(id)) {
    ++stats_.jobs_coalesced;
    return;
  }
  if (pending_.size() >= cfg_.queue_depth) {
    const Job& oldest = pending_.front();
    in_flight_.erase({oldest.key_vector, oldest.horizon});
    pending_.pop_front();
    ++stats_.jobs_dropped;
  }
  in_flight_.insert(std::move(id));
  pending_.push_back(std::move(job));
  ++stats_.jobs_enqueued;
}

void Tyche::worker_loop(std::stop_token stop) {
  if (cfg_.low_priority_worker) {
    // Per-thread nice value on Linux; failure only costs online latency.
    setpriority(PRIO_PROCESS, static_cast<id_t>(syscall(SYS_gettid)), 19);
  }
  while (true) {
    Job job;
    {
      std::unique_lock lock(mu_);
      if (!work_cv_.wait(lock, stop, [this] { return !pending_.empty(); })) return;
      job = std::move(pending_.front());
      pending_.pop_front();
      running_ = true;
    }
    run_job(job);
    {
      std::lock_guard lock(mu_);
      in_flight_.erase({job.key_vector, job.horizon});
      running_ = false;
    }
    idle_cv_.notify_all();
  }
}

void Tyche::run_job(const Job& job) {
  try {
    const std::vector<double> rates(job.key_vector.begin(), job.key_vector.end());
    const std::uint64_t seed = cfg_.seed ^ (std::uint64_t{cache_.key_of(job.key_vector)} << 16);
    Bhtp bhtp = cfg_.solver(model_, rates, job.horizon, seed);
    cache_.store_discretized(job.key_vector, std::move(bhtp));
    std::lock_guard lock(mu_);
    ++stats_.jobs_completed;
  } catch (const std::exception& e) {
    log(std::string("background job failed: ") + e.what());
    std::lock_guard lock(mu_);
    ++stats_.jobs_failed;
  }
}

void Tyche::wait_idle() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [this] { return pending_.empty() && !running_; });
}

TycheStats Tyche::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

void Tyche::log(std::string_view msg) const {
  if (cfg_.log) {
    cfg_.log(msg);
  } else {
    std::cerr << "tyche: " << msg << '\n';
  }
}

}  // namespace hoplite
