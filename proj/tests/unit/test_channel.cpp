#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hoplite/channel.hpp"
#include "oracles.hpp"

using namespace hoplite;

namespace {

std::vector<CellId> random_subset(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<CellId> ids(n);
  std::iota(ids.begin(), ids.end(), CellId{0});
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

TEST_CASE("half-power Bessel argument matches a bisection on the series") {
  const double u = bessel_half_power_argument();
  CHECK(u == doctest::Approx(oracle::half_power_u()).epsilon(1e-13));
  CHECK(u == doctest::Approx(1.6163).epsilon(1e-4));
}

TEST_CASE("transmit gain: peak, half power at the beam edge, floor far out") {
  const LinkParams p;
  CHECK(antenna_gain(0.0, p) == doctest::Approx(db_to_linear(40.3)).epsilon(1e-14));
  const double edge_db = linear_to_db(antenna_gain(0.75, p));
  CHECK(edge_db == doctest::Approx(40.3 - 10 * std::log10(2.0)).epsilon(1e-12));
  CHECK(edge_db == doctest::Approx(37.3).epsilon(1e-3));
  CHECK(antenna_gain(10.0, p) == doctest::Approx(db_to_linear(40.3 - 30.0)).epsilon(1e-14));
  double prev = antenna_gain(0.0, p);
  for (double th = 0.05; th < 1.5; th += 0.05) {
    const double g = antenna_gain(th, p);
    CHECK(g < prev);
    prev = g;
  }
  CHECK_THROWS_AS(antenna_gain(-0.1, p), Error);
}

TEST_CASE("channel gains match the straight-line oracle on a 37-cell grid") {
  const LinkParams p;
  const CellGrid g = CellGrid::generate(3, default_cell_diameter_km());
  const LinkBudget lb(g, p);
  for (CellId k = 0; k < g.size(); ++k) {
    for (CellId n = 0; n < g.size(); ++n) {
      const double got = lb.channel_gain2(k, n);
      CHECK(got == doctest::Approx(oracle::gain2(g, k, n, p)).epsilon(1e-12));
      CHECK(got == lb.channel_gain2(n, k));
      CHECK(got == doctest::Approx(channel_coefficient2(k, n, g, p)).epsilon(1e-15));
      CHECK(lb.rx_power_row(n)[k] == doctest::Approx(lb.beam_power_w() * got).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(lb.channel_gain2(0, 37), Error);
}

TEST_CASE("boresight link budget") {
  const LinkParams p;
  const CellGrid g = CellGrid::generate(1, default_cell_diameter_km());
  const LinkBudget lb(g, p);
  const double snr_db = linear_to_db(lb.beam_power_w() * lb.channel_gain2(0, 0) / lb.noise_power_w());
  CHECK(snr_db == doctest::Approx(6.3).epsilon(0.01));
  const double c = lb.noise_limited_capacity_bps();
  CHECK(c == doctest::Approx(500e6 * std::log2(1 + std::pow(10.0, snr_db / 10))).epsilon(1e-12));
  CHECK(c * 0.1 / 12000.0 == doctest::Approx(9976).epsilon(2e-3));
  CHECK(p.noise_power_w() == doctest::Approx(1.380649e-23 * 290 * 500e6));
  CHECK(p.wavelength_m() == doctest::Approx(0.0149896229));
}

TEST_CASE("sinr and capacity agree with the oracle for random patterns") {
  const LinkParams p;
  const CellGrid g = CellGrid::generate(3, default_cell_diameter_km());
  const LinkBudget lb(g, p);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<CellId> served = random_subset(g.size(), 9, rng);
    const IlluminationPattern pat(served);
    const auto caps = pattern_capacities(pat, lb);
    for (CellId n = 0; n < g.size(); ++n) {
      if (!pat.contains(n)) {
        CHECK(caps[n] == 0.0);
        CHECK(capacity(n, pat, lb, {}, p) == 0.0);
        CHECK_THROWS_AS(sinr(n, pat, lb, {}), Error);
        continue;
      }
      std::vector<CellId> others;
      for (CellId l : served) {
        if (l != n) others.push_back(l);
      }
      const double s = sinr(n, pat, lb, others);
      CHECK(s == doctest::Approx(oracle::sinr(g, n, served, p)).epsilon(1e-12));
      const double c = capacity(n, pat, lb, others, p);
      CHECK(c == doctest::Approx(oracle::capacity(g, n, served, p)).epsilon(1e-12));
      CHECK(caps[n] == doctest::Approx(c).epsilon(1e-12));
      // Fewer interferers, more capacity.
      CHECK(capacity(n, pat, lb, {}, p) >= c);
    }
  }
}

TEST_CASE("interferer lists are checked") {
  const LinkParams p;
  const CellGrid g = CellGrid::generate(1, default_cell_diameter_km());
  const LinkBudget lb(g, p);
  const IlluminationPattern pat{0, 1};
  const std::vector<CellId> self{0};
  const std::vector<CellId> unserved{3};
  CHECK_THROWS_AS(sinr(0, pat, lb, self), Error);
  CHECK_THROWS_AS(sinr(0, pat, lb, unserved), Error);
}

TEST_CASE("link parameter validation") {
  LinkParams p;
  p.bandwidth_hz = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = LinkParams{};
  p.sidelobe_floor_db = 3;
  CHECK_THROWS_AS(p.validate(), Error);
  p = LinkParams{};
  CHECK_NOTHROW(p.validate());
  CHECK(db_to_linear(linear_to_db(123.0)) == doctest::Approx(123.0));
}
