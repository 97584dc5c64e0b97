#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hoplite/geometry.hpp"
#include "hoplite/pattern.hpp"

namespace hoplite {

/// Forward-link parameters. Defaults are the Ka-band GEO evaluation set;
/// bandwidth and receiver temperature are assumptions (500 MHz, 290 K).
struct LinkParams {
  double altitude_km = 36000.0;
  double carrier_freq_ghz = 20.0;
  double beam_power_dbw = 27.0;
  double max_tx_gain_dbi = 40.3;
  double rx_gain_dbi = 31.6;
  double beamwidth_3db_deg = 1.5;
  double bandwidth_hz = 500e6;
  double rx_noise_temp_k = 290.0;
  double boltzmann_j_per_k = 1.380649e-23;
  /// Floor of the transmit pattern relative to its peak, in dB (<= 0).
  double sidelobe_floor_db = -30.0;

  void validate() const;
  double wavelength_m() const;
  double beam_power_w() const;
  double noise_power_w() const;
};

double db_to_linear(double db);
double linear_to_db(double linear);

/// Root of 4 (J1(u)/u)^2 = 1/2, i.e. the Bessel argument at the -3 dB point.
double bessel_half_power_argument();

/// Transmit gain (linear) at `offaxis_deg` from boresight:
/// G_m * 4 |J1(u)/u|^2 with u scaled so that u(theta_b / 2) is the -3 dB root,
/// floored at `sidelobe_floor_db` relative to G_m.
double antenna_gain(double offaxis_deg, const LinkParams& params);

/// |h|^2 between a beam pointed at `beam_cell` and the user in `user_cell`.
/// Depends only on the planar offset between the two cells.
double channel_coefficient2(CellId beam_cell, CellId user_cell, const CellGrid& grid,
                            const LinkParams& params);

/// Precomputed |h|^2 for every (beam cell, user cell) pair of a grid.
class LinkBudget {
 public:
  LinkBudget(const CellGrid& grid, const LinkParams& params);

  std::size_t size() const { return n_; }
  const LinkParams& params() const { return params_; }

  double channel_gain2(CellId beam_cell, CellId user_cell) const;
  double noise_power_w() const { return noise_w_; }
  double beam_power_w() const { return beam_power_w_; }

  /// Received power (W) at the user of `user_cell` from each beam cell,
  /// contiguous over beam cells. Unchecked.
  const double* rx_power_row(CellId user_cell) const { return rx_by_user_.data() + user_cell * n_; }

  /// B log2(1 + SNR) for a served cell with no co-channel interference.
  double noise_limited_capacity_bps() const;

 private:
  LinkParams params_;
  std::size_t n_;
  double noise_w_;
  double beam_power_w_;
  std::vector<double> gain2_;      // [beam][user]
  std::vector<double> rx_by_user_; // [user][beam], already multiplied by P_k
};

/// P|h_nn|^2 / (k T B + sum_{l in interferers} P|h_ln|^2).
/// Throws Error when `user_cell` is not in the pattern or an interferer is
/// not a co-served cell.
double sinr(CellId user_cell, const IlluminationPattern& pattern, const LinkBudget& budget,
            std::span<const CellId> interferers);

/// B log2(1 + SINR); zero for a cell the pattern does not serve.
double capacity(CellId user_cell, const IlluminationPattern& pattern, const LinkBudget& budget,
                std::span<const CellId> interferers, const LinkParams& params);

/// Per-cell capacity (bits/s, length N) with every other served beam
/// interfering. Unserved cells get zero.
std::vector<double> pattern_capacities(const IlluminationPattern& pattern, const LinkBudget& budget);

}  // namespace hoplite
