#include "hoplite/pattern.hpp"

#include <algorithm>
#include <sstream>

namespace hoplite {

IlluminationPattern::IlluminationPattern(std::vector<CellId> cells) : cells_(std::move(cells)) {
  std::sort(cells_.begin(), cells_.end());
  if (std::adjacent_find(cells_.begin(), cells_.end()) != cells_.end()) {
    throw Error("illumination pattern contains a duplicate cell");
  }
}

bool IlluminationPattern::contains(CellId cell) const {
  return std::binary_search(cells_.begin(), cells_.end(), cell);
}

void require_valid_pattern(const IlluminationPattern& pattern, std::size_t cell_count,
                           std::size_t beams) {
  if (pattern.size() != beams) {
    throw Error("pattern has " + std::to_string(pattern.size()) + " cells, expected " +
                std::to_string(beams));
  }
  if (!pattern.cells().empty() && pattern.cells().back() >= cell_count) {
    throw Error("pattern references cell " + std::to_string(pattern.cells().back()) +
                " outside a grid of " + std::to_string(cell_count));
  }
}

std::string to_string(const IlluminationPattern& pattern) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (CellId c : pattern) {
    if (!first) out << ' ';
    out << c;
    first = false;
  }
  out << '}';
  return out.str();
}

}  // namespace hoplite
