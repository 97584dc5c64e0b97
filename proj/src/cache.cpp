#include "hoplite/cache.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

namespace hoplite {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<std::uint8_t> float_bytes(std::span<const float> v) {
  std::vector<std::uint8_t> out;
  out.reserve(v.size() * 4);
  for (float f : v) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

void validate_bhtp(const Bhtp& bhtp, std::size_t cell_count) {
  if (bhtp.empty()) throw Error("cannot store an empty BHTP");
  const std::size_t beams = bhtp.front().size();
  for (const auto& p : bhtp) require_valid_pattern(p, cell_count, beams);
}

bool read_exact(std::istream& in, std::uint8_t* buf, std::size_t n) {
  in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

}  // namespace

DiscretizeMode parse_discretize_mode(std::string_view name) {
  if (name == "nearest") return DiscretizeMode::nearest;
  if (name == "floor") return DiscretizeMode::floor;
  throw Error("unknown discretization mode '" + std::string(name) + "'");
}

void Discretization::validate() const {
  if (beta == 0) throw Error("discretization factor beta must be at least 1");
  if (!(c_max > 0)) throw Error("C_max must be positive");
}

DemandVector discretize(std::span<const double> demand, const Discretization& grid) {
  grid.validate();
  const double step = grid.step();
  DemandVector out(demand.size());
  for (std::size_t i = 0; i < demand.size(); ++i) {
    const double v = std::clamp(demand[i], 0.0, grid.c_max);
    // The small slack keeps grid points fixed under repeated discretization.
    double k = grid.mode == DiscretizeMode::nearest ? std::floor(v / step + 0.5)
                                                    : std::floor(v / step + 1e-9);
    k = std::clamp(k, 0.0, static_cast<double>(grid.beta));
    out[i] = k * step;
  }
  return out;
}

std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> bytes) {
  std::array<std::uint8_t, 32> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != digest.size()) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  return digest;
}

std::uint32_t sha256_key(std::span<const float> vector) {
  const auto digest = sha256(float_bytes(vector));
  return get_u32(digest.data());
}

std::size_t entry_size_bytes(std::size_t cells, std::size_t beams, std::size_t slots) {
  return 4 + slots * beams * 4 + 4 * cells + 8;
}

BhtpCache::BhtpCache(Options options) : options_(std::move(options)) {
  options_.discretization.validate();
  if (options_.max_entries == 0) throw Error("cache needs room for at least one entry");
  if (!options_.key_fn) throw Error("cache needs a key function");
}

std::vector<float> BhtpCache::discretized(std::span<const double> demand) const {
  return discretized(demand, options_.discretization);
}

std::vector<float> BhtpCache::discretized(std::span<const double> demand,
                                          const Discretization& d) const {
  const DemandVector grid = discretize(demand, d);
  return {grid.begin(), grid.end()};
}

std::optional<Bhtp> BhtpCache::lookup(std::span<const double> demand) {
  return lookup_discretized(discretized(demand));
}

std::optional<Bhtp> BhtpCache::lookup(std::span<const double> demand, const Discretization& d) {
  return lookup_discretized(discretized(demand, d));
}

std::optional<Bhtp> BhtpCache::lookup_discretized(std::span<const float> vector) {
  const std::uint32_t key = key_of(vector);
  std::lock_guard lock(mu_);
  const auto it = index_.find(key);
  if (it == index_.end()) {
    ++stats_.misses;
    return std::nullopt;
  }
  const CacheEntry& entry = *it->second;
  if (!std::equal(entry.vector.begin(), entry.vector.end(), vector.begin(), vector.end())) {
    ++stats_.collisions;
    ++stats_.misses;
    return std::nullopt;
  }
  lru_.splice(lru_.begin(), lru_, it->second);
  ++stats_.hits;
  return entry.bhtp;
}

void BhtpCache::store(std::span<const double> demand, Bhtp bhtp) {
  store_discretized(discretized(demand), std::move(bhtp));
}

void BhtpCache::store(std::span<const double> demand, Bhtp bhtp, const Discretization& d) {
  store_discretized(discretized(demand, d), std::move(bhtp));
}

void BhtpCache::store_discretized(std::vector<float> vector, Bhtp bhtp) {
  validate_bhtp(bhtp, vector.size());
  CacheEntry entry;
  entry.key = key_of(vector);
  entry.vector = std::move(vector);
  entry.bhtp = std::move(bhtp);
  std::lock_guard lock(mu_);
  insert_locked(std::move(entry));
  ++stats_.stores;
}

void BhtpCache::insert_locked(CacheEntry entry) {
  const auto size_of = [](const CacheEntry& e) {
    return entry_size_bytes(e.vector.size(), e.bhtp.front().size(), e.bhtp.size());
  };
  if (const auto it = index_.find(entry.key); it != index_.end()) {
    // Same key: either the same vector (overwrite) or a collision (replace).
    memory_bytes_ -= size_of(*it->second);
    lru_.erase(it->second);
    index_.erase(it);
  }
  while (lru_.size() >= options_.max_entries) {
    memory_bytes_ -= size_of(lru_.back());
    index_.erase(lru_.back().key);
    lru_.pop_back();
    ++stats_.evictions;
  }
  memory_bytes_ += size_of(entry);
  lru_.push_front(std::move(entry));
  index_[lru_.front().key] = lru_.begin();
}

std::size_t BhtpCache::size() const {
  std::lock_guard lock(mu_);
  return lru_.size();
}

CacheStats BhtpCache::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

std::size_t BhtpCache::memory_bytes() const {
  std::lock_guard lock(mu_);
  return memory_bytes_;
}

std::vector<CacheEntry> BhtpCache::entries() const {
  std::lock_guard lock(mu_);
  return {lru_.rbegin(), lru_.rend()};
}

void BhtpCache::save(const std::filesystem::path& path) const {
  const std::vector<CacheEntry> all = entries();
  std::vector<std::uint8_t> buf;
  for (const CacheEntry& e : all) {
    const auto cells = static_cast<std::uint32_t>(e.vector.size());
    const auto beams = static_cast<std::uint32_t>(e.bhtp.front().size());
    const auto slots = static_cast<std::uint32_t>(e.bhtp.size());
    put_u32(buf, e.key);
    put_u32(buf, cells);
    put_u32(buf, beams);
    put_u32(buf, slots);
    for (float f : e.vector) put_u32(buf, std::bit_cast<std::uint32_t>(f));
    for (const auto& p : e.bhtp) {
      for (CellId c : p) put_u32(buf, c);
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("failed writing " + path.string());
}

void BhtpCache::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<CacheEntry> loaded;
  std::uint8_t header[16];
  while (true) {
    in.read(reinterpret_cast<char*>(header), 1);
    if (in.gcount() == 0) break;
    if (!read_exact(in, header + 1, 15)) throw Error("truncated cache record header");
    CacheEntry e;
    e.key = get_u32(header);
    const std::uint32_t cells = get_u32(header + 4);
    const std::uint32_t beams = get_u32(header + 8);
    const std::uint32_t slots = get_u32(header + 12);
    std::vector<std::uint8_t> body((static_cast<std::size_t>(cells) +
                                    static_cast<std::size_t>(beams) * slots) * 4);
    if (!read_exact(in, body.data(), body.size())) throw Error("truncated cache record body");
    e.vector.resize(cells);
    for (std::uint32_t i = 0; i < cells; ++i) {
      e.vector[i] = std::bit_cast<float>(get_u32(body.data() + 4 * i));
    }
    const std::uint8_t* ids = body.data() + 4 * static_cast<std::size_t>(cells);
    for (std::uint32_t t = 0; t < slots; ++t) {
      std::vector<CellId> cellsv(beams);
      for (std::uint32_t k = 0; k < beams; ++k) {
        cellsv[k] = get_u32(ids + 4 * (static_cast<std::size_t>(t) * beams + k));
      }
      e.bhtp.emplace_back(std::move(cellsv));
    }
    validate_bhtp(e.bhtp, e.vector.size());
    if (key_of(e.vector) != e.key) throw Error("cache record key does not match its vector");
    loaded.push_back(std::move(e));
  }

  std::lock_guard lock(mu_);
  lru_.clear();
  index_.clear();
  memory_bytes_ = 0;
  for (auto& e : loaded) insert_locked(std::move(e));
}

}  // namespace hoplite
