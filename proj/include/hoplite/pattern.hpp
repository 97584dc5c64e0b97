#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hoplite {

using CellId = std::uint32_t;

/// Raised for contract violations on any public operation (bad ids, wrong
/// pattern cardinality, malformed config, ...).
class Error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The set of cells illuminated during one slot. Cells are kept sorted
/// ascending and distinct.
class IlluminationPattern {
 public:
  IlluminationPattern() = default;
  explicit IlluminationPattern(std::vector<CellId> cells);
  IlluminationPattern(std::initializer_list<CellId> cells)
      : IlluminationPattern(std::vector<CellId>(cells)) {}

  std::span<const CellId> cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool contains(CellId cell) const;

  auto begin() const { return cells_.begin(); }
  auto end() const { return cells_.end(); }

  friend bool operator==(const IlluminationPattern&, const IlluminationPattern&) = default;

 private:
  std::vector<CellId> cells_;
};

/// Beam hopping transmission plan: one pattern per slot of the horizon.
using Bhtp = std::vector<IlluminationPattern>;

/// Throws Error unless the pattern has exactly `beams` cells, all < cell_count.
void require_valid_pattern(const IlluminationPattern& pattern, std::size_t cell_count,
                           std::size_t beams);

std::string to_string(const IlluminationPattern& pattern);

}  // namespace hoplite
