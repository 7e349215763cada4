// SPDX-License-Identifier: Apache-2.0
#include "lorasim/detectors.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace lorasim {

namespace {

// exp(j Psi_k) for k = 0..M-1, shared across detections of the same alphabet.
// Detection runs once per symbol in the Monte Carlo hot loop, so lookups go
// through a thread-local pointer and only table construction takes the lock.
const std::vector<cplx>& phase_rotor_table(const ModulationParams& params) {
  thread_local const std::vector<cplx>* last_table = nullptr;
  thread_local std::size_t last_size = 0;
  if (last_table != nullptr && last_size == params.num_symbols) return *last_table;

  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<std::vector<cplx>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& entry = cache[params.num_symbols];
  if (!entry) {
    entry = std::make_unique<std::vector<cplx>>();
    entry->reserve(params.num_symbols);
    for (std::size_t k = 0; k < params.num_symbols; ++k) {
      entry->push_back(symbol_phase_rotor(k, params));
    }
  }
  last_table = entry.get();
  last_size = params.num_symbols;
  return *entry;
}

void check_grid(const DemodGrid& grid) {
  if (grid.num_antennas == 0 || grid.bins.size() != grid.num_antennas * grid.params.num_symbols) {
    throw std::invalid_argument("detector: malformed demod grid");
  }
}

struct ArgmaxState {
  std::size_t index = 0;
  double value = -std::numeric_limits<double>::infinity();

  void offer(std::size_t k, double metric) {
    if (metric > value) {
      value = metric;
      index = k;
    }
  }
};

// Shared core of coherent and semi-coherent detection: MRC with the given
// weights, bin-wise phase compensation, decision on the real part.
DetectionResult coherent_core(const DemodGrid& grid, std::span<const cplx> weights) {
  check_grid(grid);
  if (weights.size() != grid.num_antennas) {
    throw std::invalid_argument("detector: weight count must match antenna count");
  }
  const std::size_t m_alphabet = grid.params.num_symbols;
  const std::vector<cplx>& rotors = phase_rotor_table(grid.params);
  ArgmaxState best;
  for (std::size_t k = 0; k < m_alphabet; ++k) {
    cplx combined{0.0, 0.0};
    for (std::size_t l = 0; l < grid.num_antennas; ++l) {
      combined += std::conj(weights[l]) * grid.at(l, k);
    }
    best.offer(k, (combined * std::conj(rotors[k])).real());
  }
  return {best.index, best.value, 0};
}

bool all_zero(std::span<const cplx> values) {
  for (const auto& v : values) {
    if (v != cplx{0.0, 0.0}) return false;
  }
  return true;
}

}  // namespace

DetectionResult detect_coherent(const DemodGrid& grid, std::span<const cplx> weights) {
  return coherent_core(grid, weights);
}

DetectionResult detect_coherent(const DemodGrid& grid, const ChannelRealization& channel) {
  return coherent_core(grid, channel.coefficients);
}

DetectionResult detect_noncoherent(const DemodGrid& grid) {
  check_grid(grid);
  const std::size_t m_alphabet = grid.params.num_symbols;
  ArgmaxState best;
  for (std::size_t k = 0; k < m_alphabet; ++k) {
    double energy = 0.0;
    for (std::size_t l = 0; l < grid.num_antennas; ++l) {
      energy += std::norm(grid.at(l, k));
    }
    best.offer(k, energy);
  }
  return {best.index, best.value, 0};
}

std::vector<cplx> estimate_channel_single(const DemodGrid& grid, std::size_t detected_symbol) {
  check_grid(grid);
  if (detected_symbol >= grid.params.num_symbols) {
    throw std::out_of_range("estimate_channel_single: symbol index out of range");
  }
  const double bin_gain =
      grid.params.amplitude * std::sqrt(static_cast<double>(grid.params.num_symbols));
  const cplx derotate = std::conj(symbol_phase_rotor(detected_symbol, grid.params));
  std::vector<cplx> estimate(grid.num_antennas);
  for (std::size_t l = 0; l < grid.num_antennas; ++l) {
    estimate[l] = grid.at(l, detected_symbol) * derotate / bin_gain;
  }
  return estimate;
}

ChannelEstimate average_channel(const std::vector<std::vector<cplx>>& estimates) {
  if (estimates.empty()) {
    throw std::invalid_argument("average_channel: empty estimate list");
  }
  const std::size_t num_antennas = estimates.front().size();
  ChannelEstimate avg;
  avg.per_antenna.assign(num_antennas, {0.0, 0.0});
  for (const auto& e : estimates) {
    if (e.size() != num_antennas) {
      throw std::invalid_argument("average_channel: inconsistent antenna counts");
    }
    for (std::size_t l = 0; l < num_antennas; ++l) avg.per_antenna[l] += e[l];
  }
  const double inv = 1.0 / static_cast<double>(estimates.size());
  for (auto& v : avg.per_antenna) v *= inv;
  return avg;
}

std::vector<DetectionResult> detect_semicoherent_frame(std::span<const DemodGrid> grids,
                                                       const SemiCoherentConfig& cfg) {
  if (grids.empty()) {
    throw std::invalid_argument("detect_semicoherent_frame: empty frame");
  }
  if (cfg.tau_c < 1 || cfg.n_max < 1) {
    throw std::invalid_argument("detect_semicoherent_frame: invalid config");
  }
  const std::size_t frame_len = grids.size();
  const std::size_t num_antennas = grids.front().num_antennas;
  const std::size_t m_alphabet = grids.front().params.num_symbols;
  for (const auto& g : grids) {
    check_grid(g);
    if (g.num_antennas != num_antennas || g.params.num_symbols != m_alphabet) {
      throw std::invalid_argument("detect_semicoherent_frame: inconsistent grid shapes");
    }
  }

  // Stage 1: non-coherent decisions.
  std::vector<DetectionResult> stage1(frame_len);
  std::vector<std::size_t> decisions(frame_len);
  for (std::size_t i = 0; i < frame_len; ++i) {
    stage1[i] = detect_noncoherent(grids[i]);
    decisions[i] = stage1[i].symbol;
  }

  auto averaged_estimate = [&](const std::vector<std::size_t>& decided) {
    std::vector<std::vector<cplx>> per_symbol(frame_len);
    for (std::size_t i = 0; i < frame_len; ++i) {
      per_symbol[i] = estimate_channel_single(grids[i], decided[i]);
    }
    return average_channel(per_symbol);
  };

  ChannelEstimate avg = averaged_estimate(decisions);
  if (all_zero(avg.per_antenna)) {
    return stage1;  // degenerate input; keep the non-coherent decisions
  }

  // Stage 2: refine until the decision vector repeats or the cap is hit.
  std::vector<DetectionResult> results = stage1;
  std::vector<std::size_t> previous = decisions;
  int iterations = 0;
  while (iterations < cfg.n_max) {
    ++iterations;
    for (std::size_t i = 0; i < frame_len; ++i) {
      results[i] = detect_coherent(grids[i], avg.per_antenna);
      decisions[i] = results[i].symbol;
    }
    avg = averaged_estimate(decisions);
    if (all_zero(avg.per_antenna)) {
      return stage1;  // co-phasing weights vanished; revert to stage 1
    }
    const bool converged = (decisions == previous);
    previous = decisions;
    if (converged) break;
  }
  for (auto& r : results) r.iterations_used = iterations;
  return results;
}

}  // namespace lorasim
