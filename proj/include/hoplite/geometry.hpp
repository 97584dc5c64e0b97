#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hoplite/pattern.hpp"

namespace hoplite {

/// Diameter of the 3-dB footprint of a nadir beam: 2 * H * tan(theta / 2).
double footprint_diameter_km(double altitude_km, double beamwidth_deg);

/// 942.5 km: a 1.5 degree beam seen from GEO altitude.
double default_cell_diameter_km();

/// 1 + 3r(r+1)
std::size_t centered_hex_number(int rings);

struct Cell {
  CellId id = 0;
  double x_km = 0.0;
  double y_km = 0.0;
  int ring = 0;
  // Axial hex coordinates; only meaningful for generated grids.
  int q = 0;
  int r = 0;
};

/// Hexagonal cell layout in the projected plane. Immutable once built.
class CellGrid {
 public:
  /// Pointy-top axial hex grid centred at the origin with `rings` rings
  /// around the centre cell. Ids are assigned ring by ring.
  static CellGrid generate(int rings, double cell_diameter_km);

  /// Arbitrary layout (ids must be 0..n-1 in order). Used for small
  /// hand-built instances.
  static CellGrid from_cells(std::vector<Cell> cells, double cell_diameter_km);

  std::size_t size() const { return cells_.size(); }
  std::span<const Cell> cells() const { return cells_; }
  const Cell& cell(CellId id) const;
  double cell_diameter_km() const { return diameter_km_; }
  int rings() const { return rings_; }

  /// Cell ids ordered by ascending x, ties broken by id.
  std::span<const CellId> sorted_by_x() const { return sorted_by_x_; }

  /// Position of each cell in sorted_by_x.
  std::span<const std::uint32_t> x_rank() const { return x_rank_; }
  /// Coordinates listed in sorted_by_x order.
  std::span<const double> sorted_xs() const { return sorted_xs_; }
  std::span<const double> sorted_ys() const { return sorted_ys_; }

  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }

  /// Euclidean planar distance. Throws Error on an invalid id.
  double distance(CellId i, CellId j) const;
  /// Unchecked row of the precomputed distance matrix.
  const double* distance_row(CellId i) const { return distances_.data() + i * size(); }

  /// Largest pairwise centre distance.
  double max_pair_distance_km() const { return max_pair_distance_; }
  double x_span_km() const { return x_span_; }
  double y_span_km() const { return y_span_; }
  /// Diagonal of the bounding box; any D_s at least this large covers every pair.
  double diagonal_km() const;

 private:
  CellGrid(std::vector<Cell> cells, double diameter_km, int rings);

  std::vector<Cell> cells_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<CellId> sorted_by_x_;
  std::vector<std::uint32_t> x_rank_;
  std::vector<double> sorted_xs_;
  std::vector<double> sorted_ys_;
  std::vector<double> distances_;
  double diameter_km_ = 0.0;
  double max_pair_distance_ = 0.0;
  double x_span_ = 0.0;
  double y_span_ = 0.0;
  int rings_ = 0;
};

inline CellGrid generate_grid(int rings, double cell_diameter_km) {
  return CellGrid::generate(rings, cell_diameter_km);
}

inline double distance(const CellGrid& grid, CellId i, CellId j) { return grid.distance(i, j); }

}  // namespace hoplite
