#include "hoplite/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace hoplite {

namespace {

constexpr std::array<std::array<int, 2>, 6> kAxialDirections{{
    {1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}};

int hex_ring(int q, int r) { return (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2; }

}  // namespace

double footprint_diameter_km(double altitude_km, double beamwidth_deg) {
  const double half = beamwidth_deg * std::numbers::pi / 360.0;
  return 2.0 * altitude_km * std::tan(half);
}

double default_cell_diameter_km() { return footprint_diameter_km(36000.0, 1.5); }

std::size_t centered_hex_number(int rings) {
  const auto r = static_cast<std::size_t>(rings);
  return 1 + 3 * r * (r + 1);
}

CellGrid CellGrid::generate(int rings, double cell_diameter_km) {
  if (rings < 1) throw Error("grid needs at least one ring");
  if (!(cell_diameter_km > 0.0)) throw Error("cell diameter must be positive");

  std::vector<Cell> cells;
  cells.reserve(centered_hex_number(rings));
  auto emit = [&](int q, int r) {
    Cell c;
    c.id = static_cast<CellId>(cells.size());
    c.q = q;
    c.r = r;
    c.ring = hex_ring(q, r);
    c.x_km = cell_diameter_km * (q + 0.5 * r);
    c.y_km = cell_diameter_km * (std::numbers::sqrt3 / 2.0) * r;
    cells.push_back(c);
  };

  emit(0, 0);
  for (int k = 1; k <= rings; ++k) {
    int q = kAxialDirections[4][0] * k;
    int r = kAxialDirections[4][1] * k;
    for (const auto& dir : kAxialDirections) {
      for (int step = 0; step < k; ++step) {
        emit(q, r);
        q += dir[0];
        r += dir[1];
      }
    }
  }
  return CellGrid(std::move(cells), cell_diameter_km, rings);
}

CellGrid CellGrid::from_cells(std::vector<Cell> cells, double cell_diameter_km) {
  if (cells.empty()) throw Error("grid needs at least one cell");
  if (!(cell_diameter_km > 0.0)) throw Error("cell diameter must be positive");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].id != i) throw Error("cell ids must be dense and in order");
  }
  int rings = 0;
  for (const auto& c : cells) rings = std::max(rings, c.ring);
  return CellGrid(std::move(cells), cell_diameter_km, rings);
}

CellGrid::CellGrid(std::vector<Cell> cells, double diameter_km, int rings)
    : cells_(std::move(cells)), diameter_km_(diameter_km), rings_(rings) {
  const std::size_t n = cells_.size();
  xs_.resize(n);
  ys_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs_[i] = cells_[i].x_km;
    ys_[i] = cells_[i].y_km;
  }

  sorted_by_x_.resize(n);
  std::iota(sorted_by_x_.begin(), sorted_by_x_.end(), CellId{0});
  std::sort(sorted_by_x_.begin(), sorted_by_x_.end(), [this](CellId a, CellId b) {
    if (xs_[a] != xs_[b]) return xs_[a] < xs_[b];
    return a < b;
  });
  x_rank_.resize(n);
  sorted_xs_.resize(n);
  sorted_ys_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const CellId id = sorted_by_x_[k];
    x_rank_[id] = static_cast<std::uint32_t>(k);
    sorted_xs_[k] = xs_[id];
    sorted_ys_[k] = ys_[id];
  }

  distances_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::hypot(xs_[i] - xs_[j], ys_[i] - ys_[j]);
      distances_[i * n + j] = d;
      max_pair_distance_ = std::max(max_pair_distance_, d);
    }
  }
  const auto [xmin, xmax] = std::minmax_element(xs_.begin(), xs_.end());
  const auto [ymin, ymax] = std::minmax_element(ys_.begin(), ys_.end());
  x_span_ = *xmax - *xmin;
  y_span_ = *ymax - *ymin;
}

const Cell& CellGrid::cell(CellId id) const {
  if (id >= cells_.size()) throw Error("cell id " + std::to_string(id) + " out of range");
  return cells_[id];
}

double CellGrid::distance(CellId i, CellId j) const {
  if (i >= size() || j >= size()) throw Error("cell id out of range");
  return distances_[i * size() + j];
}

double CellGrid::diagonal_km() const { return std::hypot(x_span_, y_span_); }

}  // namespace hoplite
