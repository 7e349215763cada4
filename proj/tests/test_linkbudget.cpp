// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "lorasim/linkbudget.hpp"
#include "lorasim/theory.hpp"

using namespace lorasim;

namespace {

std::vector<CurveSample> theory_samples(TheoryDetector det, std::size_t m, int l, double lo,
                                        double step, double hi) {
  std::vector<double> grid;
  for (double s = lo; s <= hi + 1e-9; s += step) grid.push_back(s);
  std::vector<CurveSample> out;
  for (const auto& p : theory_curve(det, m, l, grid)) out.push_back({p.snr_db, p.ber});
  return out;
}

}  // namespace

TEST_CASE("range factor basics") {
  const PathLossModel model{};
  CHECK(range_factor(0.0, model) == doctest::Approx(1.0));
  CHECK(range_factor(8.0, model) == doctest::Approx(2.5119).epsilon(1e-4));
  const double factor29 = range_factor(29.0, model);
  CHECK(factor29 == doctest::Approx(28.184).epsilon(1e-3));
  CHECK(factor29 > 25.0);
  CHECK(factor29 < 29.0);

  const PathLossModel steep{91.22, 4.0, 1.0};
  CHECK(range_factor(8.0, steep) == doctest::Approx(std::pow(10.0, 0.2)).epsilon(1e-6));
}

TEST_CASE("range factor is multiplicative in the gain") {
  const PathLossModel model{};
  for (const auto [a, b] : {std::pair{3.0, 5.0}, {0.5, 12.5}, {-4.0, 10.0}}) {
    CHECK(range_factor(a + b, model) ==
          doctest::Approx(range_factor(a, model) * range_factor(b, model)).epsilon(1e-12));
  }
}

TEST_CASE("snr_at_ber interpolates in log space") {
  const std::vector<CurveSample> curve{
      {-20.0, 1.0}, {-15.0, 1e-1}, {-10.0, 1e-2}, {-5.0, 1e-3}, {0.0, 1e-4}};
  CHECK(snr_at_ber(curve, 1e-2, "c") == doctest::Approx(-10.0));
  // Halfway between the 1e-2 and 1e-3 decades on the log axis.
  CHECK(snr_at_ber(curve, std::sqrt(1e-2 * 1e-3), "c") == doctest::Approx(-7.5));
  CHECK_THROWS_AS(snr_at_ber(curve, 1e-6, "c"), std::range_error);
  CHECK_THROWS_AS(snr_at_ber(curve, 0.0, "c"), std::invalid_argument);
}

TEST_CASE("zero ber samples are skipped on the log axis") {
  const std::vector<CurveSample> curve{{-20.0, 1e-1}, {-15.0, 1e-2}, {-10.0, 0.0}, {-5.0, 0.0}};
  CHECK(snr_at_ber(curve, 3e-2, "c") > -20.0);
  CHECK_THROWS_AS(snr_at_ber(curve, 1e-3, "c"), std::range_error);
}

TEST_CASE("unbracketed targets name the offending curve") {
  const std::vector<CurveSample> curve{{-20.0, 1e-1}, {-10.0, 1e-2}};
  try {
    snr_at_ber(curve, 1e-5, "left-curve");
    FAIL("expected range_error");
  } catch (const std::range_error& e) {
    CHECK(std::string(e.what()).find("left-curve") != std::string::npos);
  }
}

TEST_CASE("gap is zero for identical curves and antisymmetric under swap") {
  const auto curve = theory_samples(TheoryDetector::NoncoherentRayleigh, 128, 2, -4.0, 0.5, 4.0);
  CHECK(snr_gap_at_ber(curve, curve, 1e-3) == doctest::Approx(0.0));

  const auto other = theory_samples(TheoryDetector::NoncoherentRayleigh, 128, 4, -11.0, 0.5, -5.0);
  const double ab = snr_gap_at_ber(curve, other, 1e-3);
  const double ba = snr_gap_at_ber(other, curve, 1e-3);
  CHECK(ab == doctest::Approx(-ba).epsilon(1e-12));
  CHECK(ab > 0.0);  // more antennas reach the target at lower SNR
}

TEST_CASE("grid refinement moves the measured gap by less than 0.1 dB") {
  const auto a_coarse = theory_samples(TheoryDetector::NoncoherentRayleigh, 1024, 1, 13.0, 0.5, 18.0);
  const auto b_coarse = theory_samples(TheoryDetector::NoncoherentRayleigh, 1024, 4, -16.0, 0.5, -11.0);
  const auto a_fine = theory_samples(TheoryDetector::NoncoherentRayleigh, 1024, 1, 13.0, 0.25, 18.0);
  const auto b_fine = theory_samples(TheoryDetector::NoncoherentRayleigh, 1024, 4, -16.0, 0.25, -11.0);
  const double coarse = snr_gap_at_ber(a_coarse, b_coarse, 1e-4);
  const double fine = snr_gap_at_ber(a_fine, b_fine, 1e-4);
  CHECK(std::abs(coarse - fine) < 0.1);
}
