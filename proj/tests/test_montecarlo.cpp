// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "lorasim/montecarlo.hpp"
#include "lorasim/theory.hpp"

using namespace lorasim;

namespace {

SimConfig small_config() {
  SimConfig cfg;
  cfg.spreading_factor = 7;
  cfg.num_antennas = 1;
  cfg.detector = DetectorKind::Noncoherent;
  cfg.channel = ChannelModel::Rayleigh;
  cfg.snr_db_grid = {-10.0};
  cfg.min_symbols = 5000;
  cfg.target_bit_errors = 50;
  cfg.max_symbols = 20000;
  cfg.seed = 31337;
  cfg.jobs = 1;
  return cfg;
}

bool points_identical(const BerPoint& a, const BerPoint& b) {
  const bool theory_equal = (std::isnan(a.theory_ber) && std::isnan(b.theory_ber)) ||
                            a.theory_ber == b.theory_ber;
  return a.snr_db == b.snr_db && a.symbols == b.symbols && a.symbol_errors == b.symbol_errors &&
         a.bit_errors == b.bit_errors && a.frames == b.frames && a.ser == b.ser &&
         a.ber == b.ber && a.ci95_low == b.ci95_low && a.ci95_high == b.ci95_high &&
         theory_equal && a.mean_iterations == b.mean_iterations &&
         a.ber_standard_error == b.ber_standard_error;
}

// Bisects the analytical curve for the SNR hitting a target BER.
double snr_at_theory_ber(TheoryDetector det, std::size_t m, int l, double target, double lo,
                         double hi) {
  auto ber_at = [&](double snr) {
    const double ratio = es_over_n0_from_snr_db(m, snr);
    const double ser = det == TheoryDetector::CoherentAwgn ? ser_coherent_awgn(m, l, ratio)
                                                           : ser_noncoherent_rayleigh(m, l, ratio);
    return ber_from_ser(ser, m);
  };
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (ber_at(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("noiseless points are error free for every detector") {
  for (const auto det :
       {DetectorKind::Coherent, DetectorKind::Noncoherent, DetectorKind::Semicoherent}) {
    SimConfig cfg = small_config();
    cfg.detector = det;
    cfg.channel = ChannelModel::Rayleigh;
    cfg.min_symbols = 1000;
    cfg.target_bit_errors = 0;
    const auto point =
        run_point(cfg, std::numeric_limits<double>::infinity(), 0);
    CHECK(point.symbol_errors == 0);
    CHECK(point.bit_errors == 0);
    CHECK(point.ser == 0.0);
    CHECK(point.ber == 0.0);
    if (det == DetectorKind::Semicoherent) {
      CHECK(point.mean_iterations == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("deep noise drives the bit error rate to one half") {
  SimConfig cfg = small_config();
  cfg.min_symbols = 100000;
  cfg.max_symbols = 100000;
  cfg.target_bit_errors = 100;
  const auto point = run_point(cfg, -60.0, 0);
  CHECK(point.symbols >= 100000);
  CHECK(point.ber > 0.48);
  CHECK(point.ber < 0.52);
  // Counted bit errors agree with the analytical symbol-to-bit conversion
  // when symbol errors are uniform over the alphabet.
  const double converted = ber_from_ser(point.ser, 128);
  CHECK(point.ber == doctest::Approx(converted).epsilon(0.02));
  CHECK(point.ci95_low <= point.ber);
  CHECK(point.ci95_high >= point.ber);
}

TEST_CASE("simulated noncoherent rayleigh ber tracks the analytical curve") {
  const std::size_t m = 1024;  // SF 10
  const double snr = snr_at_theory_ber(TheoryDetector::NoncoherentRayleigh, m, 2, 1e-2,
                                       -30.0, 10.0);
  SimConfig cfg;
  cfg.spreading_factor = 10;
  cfg.num_antennas = 2;
  cfg.detector = DetectorKind::Noncoherent;
  cfg.channel = ChannelModel::Rayleigh;
  cfg.snr_db_grid = {snr};
  cfg.min_symbols = 20000;
  cfg.target_bit_errors = 200;
  cfg.max_symbols = 60000;
  cfg.seed = 2718;
  cfg.jobs = 2;
  cfg.with_theory = true;
  const auto point = run_point(cfg, snr, 0);
  REQUIRE_FALSE(std::isnan(point.theory_ber));
  CHECK(point.theory_ber == doctest::Approx(1e-2).epsilon(0.05));
  CHECK(std::abs(point.ber - point.theory_ber) < 3.0 * point.ber_standard_error);
}

TEST_CASE("one point sweep equals run_point") {
  SimConfig cfg = small_config();
  const auto sweep = run_sweep(cfg);
  REQUIRE(sweep.points.size() == 1);
  const auto point = run_point(cfg, cfg.snr_db_grid[0], 0);
  CHECK(points_identical(sweep.points[0], point));
}

TEST_CASE("sweeps are deterministic and independent of the worker count") {
  SimConfig cfg = small_config();
  cfg.snr_db_grid = {-14.0, -10.0};
  cfg.detector = DetectorKind::Semicoherent;
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  SimConfig parallel = cfg;
  parallel.jobs = 3;
  const auto c = run_sweep(parallel);
  REQUIRE(a.points.size() == 2);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(points_identical(a.points[i], b.points[i]));
    CHECK(points_identical(a.points[i], c.points[i]));
  }
  // Distinct seeds must change the draw sequence.
  SimConfig reseeded = cfg;
  reseeded.seed = cfg.seed + 1;
  const auto d = run_sweep(reseeded);
  CHECK(d.points[0].bit_errors != a.points[0].bit_errors);
}

TEST_CASE("a detector that ignores the signal scores the uniform-guess rate") {
  SimConfig cfg = small_config();
  cfg.min_symbols = 50000;
  cfg.max_symbols = 50000;
  const FrameDetector rigged = [](std::span<const DemodGrid> grids, const ChannelRealization&,
                                  std::span<DetectionResult> out) {
    for (std::size_t i = 0; i < grids.size(); ++i) out[i] = {0, 0.0, 0};
  };
  const auto point = run_point_with_detector(cfg, -10.0, 0, rigged);
  const double expected = 127.0 / 128.0;
  const double se = std::sqrt(expected * (1.0 - expected) / static_cast<double>(point.symbols));
  CHECK(std::abs(point.ser - expected) < 3.0 * se);
}

TEST_CASE("stopping rule keeps running until the error target or the cap") {
  SimConfig cfg = small_config();
  cfg.min_symbols = 1000;
  cfg.target_bit_errors = 100000;  // unreachable before the cap
  cfg.max_symbols = 5000;
  const auto point = run_point(cfg, -10.0, 0);
  CHECK(point.symbols == 5000);

  cfg.target_bit_errors = 10;  // reached within the first wave
  const auto quick = run_point(cfg, -10.0, 0);
  CHECK(quick.symbols == 1000);
}

TEST_CASE("substreams are disjoint across points and frames") {
  std::unordered_set<std::uint64_t> seeds;
  for (std::uint64_t point = 0; point < 64; ++point) {
    for (std::uint64_t frame = 0; frame < 256; ++frame) {
      seeds.insert(RngStream::substream_seed(1234, point, frame));
    }
  }
  CHECK(seeds.size() == 64 * 256);
}

TEST_CASE("diversity order improves the measured ber") {
  // Monotone non-increasing in L with three-standard-error slack.
  SimConfig cfg = small_config();
  cfg.min_symbols = 20000;
  cfg.max_symbols = 20000;
  double prev_ber = 1.0;
  double prev_se = 0.0;
  for (const int l : {1, 2, 4}) {
    cfg.num_antennas = l;
    const auto point = run_point(cfg, -5.0, 0);
    const double slack = 3.0 * std::hypot(prev_se, point.ber_standard_error);
    CHECK(point.ber <= prev_ber + slack);
    prev_ber = point.ber;
    prev_se = point.ber_standard_error;
  }
}

TEST_CASE("genie csi dominates square-law combining") {
  SimConfig cfg = small_config();
  cfg.num_antennas = 2;
  cfg.min_symbols = 20000;
  cfg.max_symbols = 20000;
  cfg.detector = DetectorKind::Coherent;
  const auto coh = run_point(cfg, -8.0, 0);
  cfg.detector = DetectorKind::Noncoherent;
  const auto non = run_point(cfg, -8.0, 0);
  CHECK(coh.ber <= non.ber + 3.0 * std::hypot(coh.ber_standard_error, non.ber_standard_error));
}

TEST_CASE("semi-coherent bookkeeping fields") {
  SimConfig cfg = small_config();
  cfg.detector = DetectorKind::Semicoherent;
  cfg.tau_c = 10;
  cfg.n_max = 50;
  cfg.with_theory = true;  // no closed form for this detector
  const auto point = run_point(cfg, -12.0, 0);
  CHECK(point.mean_iterations >= 1.0);
  CHECK(point.mean_iterations <= 50.0);
  CHECK(std::isnan(point.theory_ber));
  CHECK(point.frames == point.symbols / 10);
}

TEST_CASE("bit labels") {
  CHECK(bit_label(11, BitMapping::NaturalBinary) == 11u);
  CHECK(bit_label(11, BitMapping::Gray) == (11u ^ 5u));
  CHECK(bit_label(0, BitMapping::Gray) == 0u);
}

TEST_CASE("config validation rejects bad setups") {
  SimConfig cfg = small_config();
  cfg.spreading_factor = 13;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.num_antennas = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.snr_db_grid.clear();
  CHECK_THROWS_AS(run_sweep(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.min_symbols = 5;
  cfg.tau_c = 10;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.max_symbols = cfg.min_symbols - 1;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.jobs = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}
