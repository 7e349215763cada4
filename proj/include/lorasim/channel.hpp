// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "lorasim/chirp.hpp"
#include "lorasim/rng.hpp"

namespace lorasim {

enum class ChannelModel { Awgn, Rayleigh };

// Per-antenna average SNR bookkeeping in the sampled bandwidth:
//   snr = A^2 / sigma^2,   Es/N0 = M * snr  (symbol duration in sample units).
// Noiseless propagation uses an explicit infinite-SNR sentinel so oracle tests
// stay exact instead of relying on a very large finite snr_db.
struct SnrSpec {
  double snr_db = 0.0;
  double snr_linear = 1.0;
  double noise_variance = 1.0;  // sigma^2 = A^2 / snr_linear
  double es_over_n0 = 0.0;      // M * snr_linear

  static SnrSpec from_db(double snr_db, const ModulationParams& params);
  static SnrSpec noiseless(const ModulationParams& params);

  bool is_noiseless() const { return noise_variance == 0.0; }
};

// Flat fading coefficients h_l = alpha_l exp(j theta_l), one per antenna,
// constant over one coherence block. AWGN is the degenerate all-ones case.
struct ChannelRealization {
  std::vector<cplx> coefficients;
  ChannelModel model = ChannelModel::Awgn;

  std::size_t num_antennas() const { return coefficients.size(); }
};

// The received L x M block for one symbol plus the transmitted index, which
// is carried only so the scorer can count errors.
struct ReceivedSymbol {
  std::vector<cplx> samples;  // row-major L x M
  std::size_t num_antennas = 0;
  std::size_t truth = 0;
  ModulationParams params;

  std::span<cplx> antenna(std::size_t l) {
    return {samples.data() + l * params.num_symbols, params.num_symbols};
  }
  std::span<const cplx> antenna(std::size_t l) const {
    return {samples.data() + l * params.num_symbols, params.num_symbols};
  }
};

// AWGN -> all-ones; Rayleigh -> i.i.d. CN(0,1) with unit average power gain.
ChannelRealization sample_channel(ChannelModel model, std::size_t num_antennas,
                                  RngStream& rng);

// y_l[n] = h_l x[n] + w_l[n] with w_l[n] i.i.d. CN(0, sigma^2), independent
// across antennas, samples and symbols.
ReceivedSymbol propagate(const ChirpWaveform& waveform, const ChannelRealization& channel,
                         const SnrSpec& snr, RngStream& rng);

// Hot-loop variant writing into a caller-owned row of length M.
void propagate_antenna_into(std::span<cplx> out, std::span<const cplx> tx, cplx coefficient,
                            const SnrSpec& snr, RngStream& rng);

}  // namespace lorasim
