// SPDX-License-Identifier: Apache-2.0
#include "lorasim/linkbudget.hpp"

#include <cmath>
#include <stdexcept>

namespace lorasim {

double range_factor(double snr_gain_db, const PathLossModel& model) {
  if (!(model.exponent > 0.0) || !(model.reference_distance_km > 0.0)) {
    throw std::invalid_argument("range_factor: invalid path loss model");
  }
  if (!std::isfinite(snr_gain_db)) {
    throw std::invalid_argument("range_factor: gain must be finite");
  }
  return std::pow(10.0, snr_gain_db / (10.0 * model.exponent));
}

double snr_at_ber(std::span<const CurveSample> curve, double target_ber,
                  const std::string& label) {
  if (!(target_ber > 0.0)) {
    throw std::invalid_argument("snr_at_ber: target BER must be positive");
  }
  const double log_target = std::log10(target_ber);

  // Walk adjacent finite-log pairs from the low-SNR end and take the first
  // bracket. BER curves are near-linear in (snr, log10 ber), so interpolating
  // there keeps grid-refinement error small.
  bool have_prev = false;
  CurveSample prev{};
  for (const auto& s : curve) {
    if (!(s.ber > 0.0)) continue;  // log axis cannot hold zeros
    if (have_prev) {
      const double la = std::log10(prev.ber);
      const double lb = std::log10(s.ber);
      const bool brackets = (la - log_target) * (lb - log_target) <= 0.0;
      if (brackets) {
        if (la == lb) return prev.snr_db;
        const double t = (log_target - la) / (lb - la);
        return prev.snr_db + t * (s.snr_db - prev.snr_db);
      }
    }
    prev = s;
    have_prev = true;
  }
  throw std::range_error("snr_at_ber: curve '" + label + "' does not cross target BER");
}

double snr_gap_at_ber(std::span<const CurveSample> curve_a, std::span<const CurveSample> curve_b,
                      double target_ber) {
  return snr_at_ber(curve_a, target_ber, "A") - snr_at_ber(curve_b, target_ber, "B");
}

}  // namespace lorasim
