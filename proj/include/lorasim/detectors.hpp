// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "lorasim/channel.hpp"
#include "lorasim/chirp.hpp"

namespace lorasim {

struct DetectionResult {
  std::size_t symbol = 0;
  double decision_metric = 0.0;
  int iterations_used = 0;  // semi-coherent only, 0 otherwise
};

// Decision-directed channel estimate averaged over a coherence frame.
struct ChannelEstimate {
  std::vector<cplx> per_antenna;
};

struct SemiCoherentConfig {
  int tau_c = 10;   // symbols per coherence frame
  int n_max = 50;   // iteration cap for the refinement loop
};

// Coherent detection with known (or estimated) per-antenna coefficients:
// maximal ratio combining of the FFT bins followed by removal of the
// bin-dependent chirp phase, decided on the real part. Bin k scores
//   Re{ (sum_l conj(w_l) V_l[k]) * exp(-j Psi_k) }.
// Ties break toward the lowest bin index.
DetectionResult detect_coherent(const DemodGrid& grid, std::span<const cplx> weights);
DetectionResult detect_coherent(const DemodGrid& grid, const ChannelRealization& channel);

// Square-law combining across antennas, no channel knowledge:
//   Z[k] = sum_l |V_l[k]|^2.
DetectionResult detect_noncoherent(const DemodGrid& grid);

// Per-antenna least-squares channel estimate from the detected bin. In grid
// units the noiseless bin value is h_l A sqrt(M) exp(j Psi_m), so the
// estimate divides by A sqrt(M) exp(j Psi_m) and equals h_l exactly when the
// decision is right and the input is noiseless.
std::vector<cplx> estimate_channel_single(const DemodGrid& grid, std::size_t detected_symbol);

// Arithmetic mean of per-symbol estimates; any positive rescaling of the
// result leaves the downstream argmax unchanged.
ChannelEstimate average_channel(const std::vector<std::vector<cplx>>& estimates);

// Iterative semi-coherent detection of one coherence frame:
//   stage 1: non-coherent decisions for all symbols;
//   stage 2: alternate decision-directed channel averaging and coherent
//            re-detection until the decision vector repeats or n_max
//            iterations have run.
// Frames shorter than cfg.tau_c (stream tail) are processed at their actual
// length. If the averaged estimate degenerates to exactly zero the frame
// falls back to the stage-1 non-coherent decisions.
std::vector<DetectionResult> detect_semicoherent_frame(std::span<const DemodGrid> grids,
                                                       const SemiCoherentConfig& cfg);

}  // namespace lorasim
