// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lorasim/channel.hpp"
#include "lorasim/chirp.hpp"
#include "lorasim/detectors.hpp"

namespace lorasim {

enum class DetectorKind { Coherent, Noncoherent, Semicoherent };
enum class BitMapping { NaturalBinary, Gray };

struct SimConfig {
  int spreading_factor = 7;
  int num_antennas = 1;
  DetectorKind detector = DetectorKind::Noncoherent;
  ChannelModel channel = ChannelModel::Rayleigh;
  std::vector<double> snr_db_grid;

  // Stopping rule: run whole coherence frames until at least min_symbols
  // symbols AND target_bit_errors bit errors have been seen, capped at
  // max_symbols so low-BER points stay bounded.
  std::uint64_t min_symbols = 100000;
  std::uint64_t target_bit_errors = 100;
  std::uint64_t max_symbols = 10000000;

  int tau_c = 10;
  int n_max = 50;
  std::uint64_t seed = 1;
  int jobs = 1;  // worker threads; never affects numerical results
  BitMapping bit_mapping = BitMapping::NaturalBinary;
  bool with_theory = false;
  double amplitude = 1.0;
};

struct BerPoint {
  double snr_db = 0.0;
  std::uint64_t symbols = 0;
  std::uint64_t symbol_errors = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t frames = 0;
  double ser = 0.0;
  double ber = 0.0;
  double ci95_low = 0.0;   // Wilson 95% interval on the bit error rate
  double ci95_high = 0.0;
  double theory_ber = 0.0;       // NaN when no analytical reference applies
  double mean_iterations = 0.0;  // semi-coherent refinement iterations per symbol
  // Standard error of the BER estimate from the empirical variance of
  // per-frame bit error counts (frames are the i.i.d. unit in block fading).
  double ber_standard_error = 0.0;
};

struct BerCurve {
  SimConfig config;
  std::vector<BerPoint> points;
};

// Per-frame detection hook: writes one DetectionResult per grid. `channel` is
// the genie realization drawn for the frame. Used directly by tests to plug
// rigged detectors into the same harness.
using FrameDetector =
    std::function<void(std::span<const DemodGrid>, const ChannelRealization&,
                       std::span<DetectionResult>)>;

void validate(const SimConfig& cfg);

// Natural-binary or Gray label whose Hamming distance scores bit errors.
std::uint32_t bit_label(std::size_t symbol, BitMapping mapping);

BerPoint run_point(const SimConfig& cfg, double snr_db, std::size_t point_index);
BerPoint run_point_with_detector(const SimConfig& cfg, double snr_db, std::size_t point_index,
                                 const FrameDetector& detector);

// Runs every grid point in order. Identical (cfg, seed) always produce
// bit-identical curves regardless of cfg.jobs.
BerCurve run_sweep(const SimConfig& cfg);

}  // namespace lorasim
