#include "hoplite/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hoplite {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

double half_power_argument_newton() {
  // f(u) = 4 (J1(u)/u)^2 - 1/2, f'(u) = -8 J1(u) J2(u) / u^2.
  double u = 1.6;
  for (int i = 0; i < 50; ++i) {
    const double j1 = std::cyl_bessel_j(1.0, u);
    const double j2 = std::cyl_bessel_j(2.0, u);
    const double f = 4.0 * (j1 / u) * (j1 / u) - 0.5;
    const double df = -8.0 * j1 * j2 / (u * u);
    const double step = f / df;
    u -= step;
    if (std::abs(step) < 1e-15 * u) break;
  }
  return u;
}

}  // namespace

void LinkParams::validate() const {
  const bool ok = altitude_km > 0 && carrier_freq_ghz > 0 && beamwidth_3db_deg > 0 &&
                  bandwidth_hz > 0 && rx_noise_temp_k > 0 && boltzmann_j_per_k > 0 &&
                  sidelobe_floor_db <= 0 && std::isfinite(beam_power_dbw) &&
                  std::isfinite(max_tx_gain_dbi) && std::isfinite(rx_gain_dbi);
  if (!ok) throw Error("link parameters must be positive and finite");
}

double LinkParams::wavelength_m() const { return kSpeedOfLight / (carrier_freq_ghz * 1e9); }
double LinkParams::beam_power_w() const { return db_to_linear(beam_power_dbw); }
double LinkParams::noise_power_w() const {
  return boltzmann_j_per_k * rx_noise_temp_k * bandwidth_hz;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double bessel_half_power_argument() {
  static const double u = half_power_argument_newton();
  return u;
}

double antenna_gain(double offaxis_deg, const LinkParams& params) {
  if (offaxis_deg < 0) throw Error("off-axis angle must be nonnegative");
  const double peak = db_to_linear(params.max_tx_gain_dbi);
  if (offaxis_deg == 0.0) return peak;
  const double u = bessel_half_power_argument() * offaxis_deg / (params.beamwidth_3db_deg / 2.0);
  const double ratio = std::cyl_bessel_j(1.0, u) / u;
  const double pattern = 4.0 * ratio * ratio;
  return peak * std::max(pattern, db_to_linear(params.sidelobe_floor_db));
}

double channel_coefficient2(CellId beam_cell, CellId user_cell, const CellGrid& grid,
                            const LinkParams& params) {
  const double offset_km = grid.distance(beam_cell, user_cell);
  const double offaxis_deg = std::atan(offset_km / params.altitude_km) * 180.0 / std::numbers::pi;
  const double slant_m = std::hypot(params.altitude_km, offset_km) * 1e3;
  const double path = 4.0 * std::numbers::pi * slant_m / params.wavelength_m();
  return antenna_gain(offaxis_deg, params) * db_to_linear(params.rx_gain_dbi) / (path * path);
}

LinkBudget::LinkBudget(const CellGrid& grid, const LinkParams& params)
    : params_(params),
      n_(grid.size()),
      noise_w_(params.noise_power_w()),
      beam_power_w_(params.beam_power_w()),
      gain2_(n_ * n_),
      rx_by_user_(n_ * n_) {
  params_.validate();
  for (CellId k = 0; k < n_; ++k) {
    for (CellId n = 0; n < n_; ++n) {
      const double g = channel_coefficient2(k, n, grid, params_);
      gain2_[k * n_ + n] = g;
      rx_by_user_[n * n_ + k] = beam_power_w_ * g;
    }
  }
}

double LinkBudget::channel_gain2(CellId beam_cell, CellId user_cell) const {
  if (beam_cell >= n_ || user_cell >= n_) throw Error("cell id out of range");
  return gain2_[beam_cell * n_ + user_cell];
}

double LinkBudget::noise_limited_capacity_bps() const {
  const double snr = beam_power_w_ * gain2_[0] / noise_w_;
  return params_.bandwidth_hz * std::log2(1.0 + snr);
}

double sinr(CellId user_cell, const IlluminationPattern& pattern, const LinkBudget& budget,
            std::span<const CellId> interferers) {
  if (user_cell >= budget.size()) throw Error("cell id out of range");
  if (!pattern.contains(user_cell)) throw Error("SINR is undefined for an unserved cell");
  double interference = 0.0;
  for (CellId l : interferers) {
    if (l == user_cell || !pattern.contains(l)) {
      throw Error("interferer must be another served cell");
    }
    interference += budget.beam_power_w() * budget.channel_gain2(l, user_cell);
  }
  const double signal = budget.beam_power_w() * budget.channel_gain2(user_cell, user_cell);
  return signal / (budget.noise_power_w() + interference);
}

double capacity(CellId user_cell, const IlluminationPattern& pattern, const LinkBudget& budget,
                std::span<const CellId> interferers, const LinkParams& params) {
  if (!pattern.contains(user_cell)) return 0.0;
  return params.bandwidth_hz * std::log2(1.0 + sinr(user_cell, pattern, budget, interferers));
}

std::vector<double> pattern_capacities(const IlluminationPattern& pattern,
                                       const LinkBudget& budget) {
  std::vector<double> out(budget.size(), 0.0);
  const double bandwidth = budget.params().bandwidth_hz;
  for (CellId n : pattern) {
    if (n >= budget.size()) throw Error("cell id out of range");
    const double* rx = budget.rx_power_row(n);
    double interference = 0.0;
    for (CellId l : pattern) {
      if (l != n) interference += rx[l];
    }
    out[n] = bandwidth * std::log2(1.0 + rx[n] / (budget.noise_power_w() + interference));
  }
  return out;
}

}  // namespace hoplite
