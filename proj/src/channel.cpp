// SPDX-License-Identifier: Apache-2.0
#include "lorasim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace lorasim {

SnrSpec SnrSpec::from_db(double snr_db, const ModulationParams& params) {
  SnrSpec s;
  s.snr_db = snr_db;
  if (std::isinf(snr_db) && snr_db > 0.0) {
    s.snr_linear = std::numeric_limits<double>::infinity();
    s.noise_variance = 0.0;
    s.es_over_n0 = std::numeric_limits<double>::infinity();
    return s;
  }
  s.snr_linear = std::pow(10.0, snr_db / 10.0);
  s.noise_variance = params.amplitude * params.amplitude / s.snr_linear;
  s.es_over_n0 = static_cast<double>(params.num_symbols) * s.snr_linear;
  return s;
}

SnrSpec SnrSpec::noiseless(const ModulationParams& params) {
  return from_db(std::numeric_limits<double>::infinity(), params);
}

ChannelRealization sample_channel(ChannelModel model, std::size_t num_antennas,
                                  RngStream& rng) {
  if (num_antennas < 1) {
    throw std::invalid_argument("sample_channel: need at least one antenna");
  }
  ChannelRealization h;
  h.model = model;
  h.coefficients.resize(num_antennas);
  if (model == ChannelModel::Awgn) {
    for (auto& c : h.coefficients) c = {1.0, 0.0};
  } else {
    // E{|h|^2} = 1: real and imaginary parts are N(0, 1/2).
    for (auto& c : h.coefficients) c = rng.circular_gaussian(1.0);
  }
  return h;
}

ReceivedSymbol propagate(const ChirpWaveform& waveform, const ChannelRealization& channel,
                         const SnrSpec& snr, RngStream& rng) {
  const std::size_t m_alphabet = waveform.params.num_symbols;
  if (waveform.samples.size() != m_alphabet) {
    throw std::invalid_argument("propagate: waveform length must equal M");
  }
  ReceivedSymbol rx;
  rx.params = waveform.params;
  rx.num_antennas = channel.num_antennas();
  rx.samples.resize(rx.num_antennas * m_alphabet);
  for (std::size_t l = 0; l < rx.num_antennas; ++l) {
    propagate_antenna_into(rx.antenna(l), waveform.samples, channel.coefficients[l], snr, rng);
  }
  return rx;
}

void propagate_antenna_into(std::span<cplx> out, std::span<const cplx> tx, cplx coefficient,
                            const SnrSpec& snr, RngStream& rng) {
  if (out.size() != tx.size()) {
    throw std::invalid_argument("propagate: buffer length mismatch");
  }
  if (snr.is_noiseless()) {
    for (std::size_t n = 0; n < tx.size(); ++n) out[n] = coefficient * tx[n];
    return;
  }
  for (std::size_t n = 0; n < tx.size(); ++n) {
    out[n] = coefficient * tx[n] + rng.circular_gaussian(snr.noise_variance);
  }
}

}  // namespace lorasim
