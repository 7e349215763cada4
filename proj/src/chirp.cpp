// SPDX-License-Identifier: Apache-2.0
#include "lorasim/chirp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

// Discrete chirp construction. The quadratic phase argument
//   2 pi (n^2 / 2M - n / 2) = pi * n (n - M) / M
// is a dyadic rational multiple of pi (M is a power of two and n (n - M) is an
// exact integer well below 2^53), so it can be reduced modulo 2 exactly with
// fmod before the trig calls. That keeps the constant-envelope and cyclic
// orthogonality properties tight to machine precision even at M = 4096.

namespace lorasim {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// n (n - M) / M reduced modulo 2, result in (-2, 2).
double reduced_phase_over_pi(std::size_t n, std::size_t m_alphabet) {
  const double num = static_cast<double>(n) * (static_cast<double>(n) - static_cast<double>(m_alphabet));
  return std::fmod(num / static_cast<double>(m_alphabet), 2.0);
}

cplx unit_phasor(double phase_over_pi) {
  const double phase = std::numbers::pi * phase_over_pi;
  return {std::cos(phase), std::sin(phase)};
}

void check_symbol_range(std::size_t symbol, const ModulationParams& params) {
  if (symbol >= params.num_symbols) {
    throw std::out_of_range("symbol index out of range 0..M-1");
  }
}

}  // namespace

ModulationParams ModulationParams::from_sf(int sf, double amplitude) {
  if (sf < 2 || sf > 12) {
    throw std::invalid_argument("spreading factor out of supported range (2..12)");
  }
  if (!(amplitude > 0.0)) {
    throw std::invalid_argument("amplitude must be positive");
  }
  ModulationParams p;
  p.spreading_factor = sf;
  p.num_symbols = std::size_t{1} << sf;
  p.amplitude = amplitude;
  return p;
}

ChirpWaveform make_base_chirp(const ModulationParams& params) {
  if (!is_power_of_two(params.num_symbols)) {
    throw std::invalid_argument("M must be a power of two");
  }
  ChirpWaveform w;
  w.params = params;
  w.samples.resize(params.num_symbols);
  for (std::size_t n = 0; n < params.num_symbols; ++n) {
    w.samples[n] = params.amplitude * unit_phasor(reduced_phase_over_pi(n, params.num_symbols));
  }
  return w;
}

ChirpWaveform modulate(std::size_t symbol, const ModulationParams& params) {
  check_symbol_range(symbol, params);
  const ChirpWaveform base = make_base_chirp(params);
  ChirpWaveform w;
  w.params = params;
  w.samples.resize(params.num_symbols);
  modulate_into(w.samples, symbol, base);
  return w;
}

void modulate_into(std::span<cplx> out, std::size_t symbol, const ChirpWaveform& base) {
  const std::size_t m_alphabet = base.params.num_symbols;
  check_symbol_range(symbol, base.params);
  if (out.size() != m_alphabet || base.samples.size() != m_alphabet) {
    throw std::invalid_argument("modulate_into: buffer length must equal M");
  }
  // x_m[n] = x0[(n + m) mod M]; the wrap splits the copy in two.
  const std::size_t head = m_alphabet - symbol;
  for (std::size_t n = 0; n < head; ++n) out[n] = base.samples[n + symbol];
  for (std::size_t n = head; n < m_alphabet; ++n) out[n] = base.samples[n - head];
}

double symbol_phase(std::size_t symbol, const ModulationParams& params) {
  check_symbol_range(symbol, params);
  const double m = static_cast<double>(symbol);
  const double big_m = static_cast<double>(params.num_symbols);
  return 2.0 * std::numbers::pi * (m * m / (2.0 * big_m) - m / 2.0);
}

cplx symbol_phase_rotor(std::size_t symbol, const ModulationParams& params) {
  check_symbol_range(symbol, params);
  return unit_phasor(reduced_phase_over_pi(symbol, params.num_symbols));
}

std::vector<cplx> dechirp(std::span<const cplx> received, const ModulationParams& params) {
  const ChirpWaveform base = make_base_chirp(params);
  std::vector<cplx> out(params.num_symbols);
  dechirp_into(out, received, base);
  return out;
}

void dechirp_into(std::span<cplx> out, std::span<const cplx> received,
                  const ChirpWaveform& base) {
  const std::size_t m_alphabet = base.params.num_symbols;
  if (received.size() != m_alphabet || out.size() != m_alphabet) {
    throw std::invalid_argument("dechirp: input length must equal M");
  }
  const double inv_a = 1.0 / base.params.amplitude;
  for (std::size_t n = 0; n < m_alphabet; ++n) {
    out[n] = received[n] * std::conj(base.samples[n]) * inv_a;
  }
}

DemodGrid demod_fft(const std::vector<std::vector<cplx>>& dechirped,
                    const ModulationParams& params) {
  if (dechirped.empty()) {
    throw std::invalid_argument("demod_fft: need at least one antenna sequence");
  }
  DemodGrid grid;
  grid.params = params;
  grid.num_antennas = dechirped.size();
  grid.bins.resize(grid.num_antennas * params.num_symbols);
  for (std::size_t l = 0; l < grid.num_antennas; ++l) {
    if (dechirped[l].size() != params.num_symbols) {
      throw std::invalid_argument("demod_fft: sequence length must equal M");
    }
    auto row = grid.row(l);
    std::copy(dechirped[l].begin(), dechirped[l].end(), row.begin());
  }
  const FftPlan plan(params.num_symbols);
  demod_fft_inplace(grid, plan);
  return grid;
}

void demod_fft_inplace(DemodGrid& grid, const FftPlan& plan) {
  const std::size_t m_alphabet = grid.params.num_symbols;
  if (plan.size() != m_alphabet) {
    throw std::invalid_argument("demod_fft: plan size must equal M");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(m_alphabet));
  for (std::size_t l = 0; l < grid.num_antennas; ++l) {
    auto row = grid.row(l);
    plan.transform(row.data());
    for (auto& v : row) v *= scale;
  }
}

}  // namespace lorasim
