// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "lorasim/fft.hpp"

namespace lorasim {

using cplx = std::complex<double>;

// Modulation alphabet description. One symbol carries `spreading_factor` bits
// and occupies M = 2^spreading_factor baseband samples; the M cyclic shifts of
// the base up-chirp form an orthogonal alphabet of size M.
//
// Production front-ends restrict spreading_factor to 7..12. The type itself
// accepts 2..12 so exhaustive oracles stay cheap in tests.
struct ModulationParams {
  int spreading_factor = 7;
  std::size_t num_symbols = 128;  // M, samples per symbol and alphabet size
  double amplitude = 1.0;         // A, constant envelope magnitude

  static ModulationParams from_sf(int sf, double amplitude = 1.0);

  // Symbol energy with the symbol duration expressed in sample units, so that
  // symbol_energy() / noise_variance == M * snr.
  double symbol_energy() const {
    return amplitude * amplitude * static_cast<double>(num_symbols);
  }
};

// A block of M complex baseband samples representing one symbol.
struct ChirpWaveform {
  std::vector<cplx> samples;
  ModulationParams params;
};

// Post-FFT bin values for one received symbol, one row per antenna (L x M).
struct DemodGrid {
  std::vector<cplx> bins;  // row-major L x M
  std::size_t num_antennas = 0;
  ModulationParams params;

  std::size_t alphabet_size() const { return params.num_symbols; }
  cplx at(std::size_t antenna, std::size_t bin) const {
    return bins[antenna * params.num_symbols + bin];
  }
  std::span<cplx> row(std::size_t antenna) {
    return {bins.data() + antenna * params.num_symbols, params.num_symbols};
  }
  std::span<const cplx> row(std::size_t antenna) const {
    return {bins.data() + antenna * params.num_symbols, params.num_symbols};
  }
};

// Base up-chirp x0[n] = A exp(j 2 pi (n^2 / 2M - n / 2)), n = 0..M-1.
ChirpWaveform make_base_chirp(const ModulationParams& params);

// Symbol m as the cyclic shift x_m[n] = x0[(n + m) mod M].
ChirpWaveform modulate(std::size_t symbol, const ModulationParams& params);

// Allocation-free variant used by the simulation hot loop; `base` must be the
// base chirp for the same params and `out` must hold M samples.
void modulate_into(std::span<cplx> out, std::size_t symbol, const ChirpWaveform& base);

// Constant phase of the dechirped symbol m: Psi_m = 2 pi (m^2 / 2M - m / 2).
double symbol_phase(std::size_t symbol, const ModulationParams& params);

// exp(j Psi_m), evaluated from an exactly range-reduced phase.
cplx symbol_phase_rotor(std::size_t symbol, const ModulationParams& params);

// Multiplies by the conjugate base chirp over amplitude: z[n] = y[n] x0*[n] / A.
// A noiseless x_m input becomes the tone A exp(j Psi_m) exp(j 2 pi m n / M).
std::vector<cplx> dechirp(std::span<const cplx> received, const ModulationParams& params);

void dechirp_into(std::span<cplx> out, std::span<const cplx> received,
                  const ChirpWaveform& base);

// Unitary M-point DFT of each antenna's dechirped sequence (1/sqrt(M)
// scaling), stacked into a DemodGrid. A noiseless single-antenna symbol m
// yields |bin m| = A sqrt(M) and zero elsewhere.
DemodGrid demod_fft(const std::vector<std::vector<cplx>>& dechirped,
                    const ModulationParams& params);

// In-place variant: `grid` rows already hold dechirped samples; applies the
// plan and scaling row by row. `plan.size()` must equal M.
void demod_fft_inplace(DemodGrid& grid, const FftPlan& plan);

}  // namespace lorasim
