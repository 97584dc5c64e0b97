#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <list>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hoplite/pattern.hpp"

namespace hoplite {

using DemandVector = std::vector<double>;

enum class DiscretizeMode { nearest, floor };

DiscretizeMode parse_discretize_mode(std::string_view name);

/// Grid {k * C_max / beta : k = 0..beta} and the rule mapping values onto it.
struct Discretization {
  double c_max = 1.0;
  unsigned beta = 10;
  DiscretizeMode mode = DiscretizeMode::nearest;

  void validate() const;
  double step() const { return c_max / beta; }
};

/// Clamps each component to [0, C_max] and maps it to a grid point (nearest,
/// ties up; or floor). Throws Error if beta is 0.
DemandVector discretize(std::span<const double> demand, const Discretization& grid);

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes);

/// First four bytes (little-endian) of SHA-256 over the vector's float32
/// little-endian encoding.
std::uint32_t sha256_key(std::span<const float> vector);

using KeyFunction = std::function<std::uint32_t(std::span<const float>)>;

/// Bytes per entry: 4 (key) + T*K*4 (BHTP) + 4N (vector) + 8 (store overhead).
constexpr double entry_size_bytes(double cells, double beams, double slots) {
  return 4.0 + slots * beams * 4.0 + 4.0 * cells + 8.0;
}
std::size_t entry_size_bytes(std::size_t cells, std::size_t beams, std::size_t slots);

struct CacheEntry {
  std::uint32_t key = 0;
  std::vector<float> vector;  // discretized demand, kept for collision checks
  Bhtp bhtp;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t collisions = 0;
  std::uint64_t stores = 0;
  std::uint64_t evictions = 0;
};

/// BHTP store keyed by a truncated digest of the discretized demand. A key
/// hit whose stored vector differs from the probe is a collision and reads as
/// a miss. Least-recently-used entries are evicted past `max_entries`.
/// Thread-safe; each operation holds the lock for one entry.
class BhtpCache {
 public:
  struct Options {
    Discretization discretization;
    std::size_t max_entries = 200000;
    KeyFunction key_fn = sha256_key;
  };

  explicit BhtpCache(Options options);

  /// Discretized float32 form used for keys and verification.
  std::vector<float> discretized(std::span<const double> demand) const;
  std::vector<float> discretized(std::span<const double> demand, const Discretization& d) const;
  std::uint32_t key_of(std::span<const float> vector) const { return options_.key_fn(vector); }

  std::optional<Bhtp> lookup(std::span<const double> demand);
  std::optional<Bhtp> lookup(std::span<const double> demand, const Discretization& d);
  std::optional<Bhtp> lookup_discretized(std::span<const float> vector);

  void store(std::span<const double> demand, Bhtp bhtp);
  void store(std::span<const double> demand, Bhtp bhtp, const Discretization& d);
  void store_discretized(std::vector<float> vector, Bhtp bhtp);

  std::size_t size() const;
  CacheStats stats() const;
  std::size_t memory_bytes() const;
  const Options& options() const { return options_; }

  /// Entries from least to most recently used.
  std::vector<CacheEntry> entries() const;

  /// Writes every entry as a length-prefixed little-endian record, least
  /// recently used first, so a reload restores recency order.
  void save(const std::filesystem::path& path) const;
  /// Replaces the contents with the records in `path`.
  void load(const std::filesystem::path& path);

 private:
  using Lru = std::list<CacheEntry>;

  void insert_locked(CacheEntry entry);

  Options options_;
  mutable std::mutex mu_;
  Lru lru_;  // front = most recent
  std::unordered_map<std::uint32_t, Lru::iterator> index_;
  CacheStats stats_;
  std::size_t memory_bytes_ = 0;
};

}  // namespace hoplite
