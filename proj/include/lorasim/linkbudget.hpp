// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

namespace lorasim {

// Free-space style path loss PL(d) = reference_loss_db + 10 n log10(d / d0).
struct PathLossModel {
  double reference_loss_db = 91.22;
  double exponent = 2.0;           // n
  double reference_distance_km = 1.0;  // d0
};

// Distance multiplier bought by an SNR gain at equal transmit power:
// 10^(snr_gain_db / (10 n)).
double range_factor(double snr_gain_db, const PathLossModel& model);

struct CurveSample {
  double snr_db;
  double ber;
};

// SNR at which a BER curve crosses `target_ber`, by linear interpolation in
// (snr_db, log10 ber) space. Samples with ber == 0 cannot be placed on the
// log axis and are skipped. Throws std::range_error naming `label` when the
// target is not bracketed by any adjacent pair.
double snr_at_ber(std::span<const CurveSample> curve, double target_ber,
                  const std::string& label);

// Horizontal distance between two curves at the target BER:
// snr_a(target) - snr_b(target). Positive when curve B reaches the target at
// lower SNR; antisymmetric under swapping the curves.
double snr_gap_at_ber(std::span<const CurveSample> curve_a, std::span<const CurveSample> curve_b,
                      double target_ber);

}  // namespace lorasim
