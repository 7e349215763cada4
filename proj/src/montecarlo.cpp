// SPDX-License-Identifier: Apache-2.0
#include "lorasim/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "lorasim/theory.hpp"

namespace lorasim {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

struct Tally {
  std::uint64_t symbols = 0;
  std::uint64_t symbol_errors = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t iterations = 0;
  std::uint64_t frames = 0;
  // Per-frame bit-error moments for the clustered standard error.
  std::uint64_t frame_bits_sum = 0;
  std::uint64_t frame_bits_sq_sum = 0;

  void absorb(const Tally& other) {
    symbols += other.symbols;
    symbol_errors += other.symbol_errors;
    bit_errors += other.bit_errors;
    iterations += other.iterations;
    frames += other.frames;
    frame_bits_sum += other.frame_bits_sum;
    frame_bits_sq_sum += other.frame_bits_sq_sum;
  }
};

// Everything a worker thread reuses across frames. The base chirp and FFT
// plan are shared read-only; buffers are thread-local.
struct Workspace {
  std::vector<cplx> tx;
  std::vector<DemodGrid> frame_grids;
  std::vector<std::size_t> truth;
  std::vector<DetectionResult> results;

  Workspace(const ModulationParams& params, std::size_t num_antennas, int tau_c) {
    tx.resize(params.num_symbols);
    frame_grids.resize(tau_c);
    for (auto& g : frame_grids) {
      g.params = params;
      g.num_antennas = num_antennas;
      g.bins.resize(num_antennas * params.num_symbols);
    }
    truth.resize(tau_c);
    results.resize(tau_c);
  }
};

void simulate_frame(std::uint64_t seed, std::size_t point_index, std::uint64_t frame_index,
                    const SimConfig& cfg, const SnrSpec& snr, const ChirpWaveform& base,
                    const FftPlan& plan, const FrameDetector& detector, Workspace& ws,
                    Tally& tally) {
  const std::size_t m_alphabet = base.params.num_symbols;
  const std::size_t frame_len = ws.frame_grids.size();
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m_alphabet));

  RngStream rng = RngStream::substream(seed, point_index, frame_index);
  const ChannelRealization channel = sample_channel(cfg.channel, cfg.num_antennas, rng);

  for (std::size_t i = 0; i < frame_len; ++i) {
    ws.truth[i] = rng.uniform_index(m_alphabet);
    modulate_into(ws.tx, ws.truth[i], base);
    DemodGrid& grid = ws.frame_grids[i];
    for (std::size_t l = 0; l < grid.num_antennas; ++l) {
      auto row = grid.row(l);
      propagate_antenna_into(row, ws.tx, channel.coefficients[l], snr, rng);
      dechirp_into(row, row, base);
      plan.transform(row.data());
      for (auto& v : row) v *= inv_sqrt_m;
    }
  }

  detector(std::span<const DemodGrid>(ws.frame_grids.data(), frame_len), channel,
           std::span<DetectionResult>(ws.results.data(), frame_len));

  std::uint64_t frame_bits = 0;
  for (std::size_t i = 0; i < frame_len; ++i) {
    const std::size_t detected = ws.results[i].symbol;
    if (detected != ws.truth[i]) ++tally.symbol_errors;
    frame_bits += std::popcount(bit_label(detected, cfg.bit_mapping) ^
                                bit_label(ws.truth[i], cfg.bit_mapping));
    tally.iterations += static_cast<std::uint64_t>(ws.results[i].iterations_used);
  }
  tally.symbols += frame_len;
  tally.bit_errors += frame_bits;
  tally.frames += 1;
  tally.frame_bits_sum += frame_bits;
  tally.frame_bits_sq_sum += frame_bits * frame_bits;
}

void wilson_interval(std::uint64_t errors, std::uint64_t trials, double& lo, double& hi) {
  if (trials == 0) {
    lo = hi = 0.0;
    return;
  }
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  lo = std::max(0.0, center - half);
  hi = std::min(1.0, center + half);
}

double attach_theory(const SimConfig& cfg, double snr_db) {
  const std::size_t m_alphabet = std::size_t{1} << cfg.spreading_factor;
  const double ratio = es_over_n0_from_snr_db(m_alphabet, snr_db);
  if (cfg.detector == DetectorKind::Coherent && cfg.channel == ChannelModel::Awgn) {
    return ber_from_ser(ser_coherent_awgn(m_alphabet, cfg.num_antennas, ratio), m_alphabet);
  }
  if (cfg.detector == DetectorKind::Noncoherent && cfg.channel == ChannelModel::Rayleigh) {
    return ber_from_ser(ser_noncoherent_rayleigh(m_alphabet, cfg.num_antennas, ratio),
                        m_alphabet);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

FrameDetector builtin_detector(const SimConfig& cfg) {
  if (cfg.detector == DetectorKind::Coherent) {
    return [](std::span<const DemodGrid> grids, const ChannelRealization& channel,
              std::span<DetectionResult> out) {
      for (std::size_t i = 0; i < grids.size(); ++i) {
        out[i] = detect_coherent(grids[i], channel);
      }
    };
  }
  if (cfg.detector == DetectorKind::Noncoherent) {
    return [](std::span<const DemodGrid> grids, const ChannelRealization&,
              std::span<DetectionResult> out) {
      for (std::size_t i = 0; i < grids.size(); ++i) {
        out[i] = detect_noncoherent(grids[i]);
      }
    };
  }
  const SemiCoherentConfig sc{cfg.tau_c, cfg.n_max};
  return [sc](std::span<const DemodGrid> grids, const ChannelRealization&,
              std::span<DetectionResult> out) {
    const auto results = detect_semicoherent_frame(grids, sc);
    std::copy(results.begin(), results.end(), out.begin());
  };
}

}  // namespace

void validate(const SimConfig& cfg) {
  if (cfg.spreading_factor < 2 || cfg.spreading_factor > 12) {
    throw std::invalid_argument("sim: spreading factor out of range 2..12");
  }
  if (cfg.num_antennas < 1) throw std::invalid_argument("sim: need at least one antenna");
  if (cfg.snr_db_grid.empty()) throw std::invalid_argument("sim: empty SNR grid");
  if (cfg.tau_c < 1) throw std::invalid_argument("sim: tau_c must be >= 1");
  if (cfg.n_max < 1) throw std::invalid_argument("sim: n_max must be >= 1");
  if (cfg.min_symbols < static_cast<std::uint64_t>(cfg.tau_c)) {
    throw std::invalid_argument("sim: trials must cover at least one coherence frame");
  }
  if (cfg.max_symbols < cfg.min_symbols) {
    throw std::invalid_argument("sim: max symbol cap below the trial minimum");
  }
  if (cfg.jobs < 1) throw std::invalid_argument("sim: jobs must be >= 1");
  if (!(cfg.amplitude > 0.0)) throw std::invalid_argument("sim: amplitude must be positive");
}

std::uint32_t bit_label(std::size_t symbol, BitMapping mapping) {
  const auto value = static_cast<std::uint32_t>(symbol);
  return mapping == BitMapping::Gray ? (value ^ (value >> 1)) : value;
}

BerPoint run_point_with_detector(const SimConfig& cfg, double snr_db, std::size_t point_index,
                                 const FrameDetector& detector) {
  validate(cfg);
  const ModulationParams params = ModulationParams::from_sf(cfg.spreading_factor, cfg.amplitude);
  const ChirpWaveform base = make_base_chirp(params);
  const FftPlan plan(params.num_symbols);
  const SnrSpec snr = SnrSpec::from_db(snr_db, params);
  const auto tau = static_cast<std::uint64_t>(cfg.tau_c);

  const std::uint64_t first_wave = ceil_div(cfg.min_symbols, tau);
  const std::uint64_t cap_frames = std::max<std::uint64_t>(1, cfg.max_symbols / tau);
  const std::uint64_t chunk = std::max<std::uint64_t>(256, first_wave / 8);

  const int jobs = std::max(1, cfg.jobs);
  std::vector<Workspace> workspaces;
  workspaces.reserve(jobs);
  for (int j = 0; j < jobs; ++j) workspaces.emplace_back(params, cfg.num_antennas, cfg.tau_c);

  Tally total;
  std::uint64_t frames_done = 0;

  // Waves have sizes that depend only on the accumulated integer counts, so
  // the set of simulated frames (and every per-frame random stream) is
  // independent of how many worker threads execute them.
  while (true) {
    std::uint64_t want = 0;
    if (frames_done < first_wave) {
      want = std::min(first_wave, cap_frames) - frames_done;
    } else if (total.bit_errors < cfg.target_bit_errors && frames_done < cap_frames) {
      want = std::min(chunk, cap_frames - frames_done);
    }
    if (want == 0) break;

    const int wave_jobs = static_cast<int>(std::min<std::uint64_t>(jobs, want));
    std::vector<Tally> partial(wave_jobs);
    std::vector<std::thread> threads;
    threads.reserve(wave_jobs);
    for (int j = 0; j < wave_jobs; ++j) {
      const std::uint64_t begin = frames_done + want * j / wave_jobs;
      const std::uint64_t end = frames_done + want * (j + 1) / wave_jobs;
      threads.emplace_back([&, j, begin, end] {
        for (std::uint64_t f = begin; f < end; ++f) {
          simulate_frame(cfg.seed, point_index, f, cfg, snr, base, plan, detector,
                         workspaces[j], partial[j]);
        }
      });
    }
    for (auto& t : threads) t.join();
    for (const auto& p : partial) total.absorb(p);
    frames_done += want;
  }

  BerPoint point;
  point.snr_db = snr_db;
  point.symbols = total.symbols;
  point.symbol_errors = total.symbol_errors;
  point.bit_errors = total.bit_errors;
  point.frames = total.frames;
  const double bits = static_cast<double>(total.symbols) * cfg.spreading_factor;
  point.ser = total.symbols ? static_cast<double>(total.symbol_errors) / total.symbols : 0.0;
  point.ber = total.symbols ? static_cast<double>(total.bit_errors) / bits : 0.0;
  wilson_interval(total.bit_errors, total.symbols * cfg.spreading_factor, point.ci95_low,
                  point.ci95_high);
  point.theory_ber = cfg.with_theory ? attach_theory(cfg, snr_db)
                                     : std::numeric_limits<double>::quiet_NaN();
  point.mean_iterations =
      total.symbols ? static_cast<double>(total.iterations) / total.symbols : 0.0;
  if (total.frames >= 2) {
    const double f = static_cast<double>(total.frames);
    const double mean = static_cast<double>(total.frame_bits_sum) / f;
    const double var =
        (static_cast<double>(total.frame_bits_sq_sum) - f * mean * mean) / (f - 1.0);
    const double frame_bits = static_cast<double>(tau) * cfg.spreading_factor;
    point.ber_standard_error = std::sqrt(std::max(0.0, var) / f) / frame_bits;
  }
  return point;
}

BerPoint run_point(const SimConfig& cfg, double snr_db, std::size_t point_index) {
  return run_point_with_detector(cfg, snr_db, point_index, builtin_detector(cfg));
}

BerCurve run_sweep(const SimConfig& cfg) {
  validate(cfg);
  const FrameDetector detector = builtin_detector(cfg);
  BerCurve curve;
  curve.config = cfg;
  curve.points.reserve(cfg.snr_db_grid.size());
  for (std::size_t i = 0; i < cfg.snr_db_grid.size(); ++i) {
    curve.points.push_back(run_point_with_detector(cfg, cfg.snr_db_grid[i], i, detector));
  }
  return curve;
}

}  // namespace lorasim
