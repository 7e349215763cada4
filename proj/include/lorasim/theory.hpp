// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lorasim {

// Analytical symbol/bit error probabilities for M-ary orthogonal chirp
// signaling with L-antenna combining: coherent MRC in AWGN and non-coherent
// square-law combining in Rayleigh fading.
enum class TheoryDetector { CoherentAwgn, NoncoherentRayleigh };

struct TheoryPoint {
  TheoryDetector detector;
  std::size_t alphabet_size;  // M
  int num_antennas;           // L
  double snr_db;
  double ser;
  double ber;
};

struct QuadEval {
  double value = 0.0;
  double error_estimate = 0.0;  // quadrature error estimate (absolute)
  double tail_bound = 0.0;      // bound on the truncated tail (absolute)
};

// Single conversion point between per-antenna SNR in dB and the per-antenna
// symbol energy ratio Es/N0 = M * 10^(snr_db/10); simulation and theory share
// this so the two cannot disagree on conventions.
double es_over_n0_from_snr_db(std::size_t alphabet_size, double snr_db);

// Symbol error probability of coherent detection in AWGN with MRC over L
// antennas, each at Es/N0 = es_over_n0. Relative accuracy ~1e-8 for results
// down to 1e-12.
double ser_coherent_awgn(std::size_t alphabet_size, int num_antennas, double es_over_n0);
QuadEval ser_coherent_awgn_detailed(std::size_t alphabet_size, int num_antennas,
                                    double es_over_n0, double rel_tol = 1e-10);

// Symbol error probability of non-coherent square-law combining over L
// antennas in i.i.d. Rayleigh fading with average symbol SNR
// gamma_c = Es/N0 = M * snr per antenna. Relative accuracy ~1e-6.
double ser_noncoherent_rayleigh(std::size_t alphabet_size, int num_antennas, double gamma_c);
QuadEval ser_noncoherent_rayleigh_detailed(std::size_t alphabet_size, int num_antennas,
                                           double gamma_c, double rel_tol = 1e-9);

// P_b = P_s * M / (2 (M - 1)), clamped to [0, 1].
double ber_from_ser(double ser, std::size_t alphabet_size);

// Evaluates SER and BER over an ascending per-antenna SNR grid in dB.
std::vector<TheoryPoint> theory_curve(TheoryDetector detector, std::size_t alphabet_size,
                                      int num_antennas, std::span<const double> snr_db_grid);

}  // namespace lorasim
