// SPDX-License-Identifier: Apache-2.0
#include "lorasim/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lorasim/version.hpp"

namespace lorasim {

namespace {

using nlohmann::json;

double parse_double(const std::string& text) {
  std::size_t pos = 0;
  const double v = std::stod(text, &pos);
  if (pos != text.size()) {
    throw std::invalid_argument("malformed number: '" + text + "'");
  }
  return v;
}

json point_to_json(const BerPoint& p) {
  json j;
  j["snr_db"] = p.snr_db;
  j["symbols"] = p.symbols;
  j["sym_errs"] = p.symbol_errors;
  j["bit_errs"] = p.bit_errors;
  j["frames"] = p.frames;
  j["ser"] = p.ser;
  j["ber"] = p.ber;
  j["ci95_lo"] = p.ci95_low;
  j["ci95_hi"] = p.ci95_high;
  if (std::isnan(p.theory_ber)) {
    j["theory_ber"] = nullptr;
  } else {
    j["theory_ber"] = p.theory_ber;
  }
  j["mean_iters"] = p.mean_iterations;
  j["ber_se"] = p.ber_standard_error;
  return j;
}

json config_to_json(const SimConfig& cfg) {
  json j;
  j["detector"] = detector_name(cfg.detector);
  j["channel"] = channel_name(cfg.channel);
  j["sf"] = cfg.spreading_factor;
  j["l"] = cfg.num_antennas;
  j["snr_db"] = cfg.snr_db_grid;
  j["trials"] = cfg.min_symbols;
  j["target_errors"] = cfg.target_bit_errors;
  j["max_symbols"] = cfg.max_symbols;
  j["tau_c"] = cfg.tau_c;
  j["n_max"] = cfg.n_max;
  j["seed"] = cfg.seed;
  j["bit_mapping"] = bit_mapping_name(cfg.bit_mapping);
  j["with_theory"] = cfg.with_theory;
  j["amplitude"] = cfg.amplitude;
  return j;
}

}  // namespace

std::vector<double> parse_snr_grid(const std::string& text) {
  const auto first_colon = text.find(':');
  if (first_colon == std::string::npos) {
    return {parse_double(text)};
  }
  const auto second_colon = text.find(':', first_colon + 1);
  if (second_colon == std::string::npos) {
    throw std::invalid_argument("SNR grid must be a value or start:step:stop");
  }
  const double start = parse_double(text.substr(0, first_colon));
  const double step = parse_double(text.substr(first_colon + 1, second_colon - first_colon - 1));
  const double stop = parse_double(text.substr(second_colon + 1));
  if (!(step > 0.0)) throw std::invalid_argument("SNR grid step must be positive");
  if (stop < start - 1e-9) throw std::invalid_argument("SNR grid stop is below start");

  std::vector<double> grid;
  // Generate by index to avoid accumulating rounding; include the stop value
  // whenever start + k*step lands within 1e-9 of it.
  for (std::size_t k = 0;; ++k) {
    const double value = start + static_cast<double>(k) * step;
    if (value > stop + 1e-9) break;
    grid.push_back(value);
  }
  return grid;
}

std::string detector_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::Coherent: return "coh";
    case DetectorKind::Noncoherent: return "noncoh";
    case DetectorKind::Semicoherent: return "semicoh";
  }
  return "?";
}

std::string channel_name(ChannelModel model) {
  return model == ChannelModel::Awgn ? "awgn" : "rayleigh";
}

std::string theory_detector_name(TheoryDetector detector) {
  return detector == TheoryDetector::CoherentAwgn ? "coh-awgn" : "noncoh-rayleigh";
}

DetectorKind detector_from_name(const std::string& name) {
  if (name == "coh") return DetectorKind::Coherent;
  if (name == "noncoh") return DetectorKind::Noncoherent;
  if (name == "semicoh") return DetectorKind::Semicoherent;
  throw std::invalid_argument("unknown detector '" + name + "' (coh|noncoh|semicoh)");
}

ChannelModel channel_from_name(const std::string& name) {
  if (name == "awgn") return ChannelModel::Awgn;
  if (name == "rayleigh") return ChannelModel::Rayleigh;
  throw std::invalid_argument("unknown channel '" + name + "' (awgn|rayleigh)");
}

TheoryDetector theory_detector_from_name(const std::string& name) {
  if (name == "coh-awgn") return TheoryDetector::CoherentAwgn;
  if (name == "noncoh-rayleigh") return TheoryDetector::NoncoherentRayleigh;
  throw std::invalid_argument("unknown theory detector '" + name +
                              "' (coh-awgn|noncoh-rayleigh)");
}

BitMapping bit_mapping_from_name(const std::string& name) {
  if (name == "natural") return BitMapping::NaturalBinary;
  if (name == "gray") return BitMapping::Gray;
  throw std::invalid_argument("unknown bit mapping '" + name + "' (natural|gray)");
}

std::string bit_mapping_name(BitMapping mapping) {
  return mapping == BitMapping::Gray ? "gray" : "natural";
}

std::string format_double(double value) {
  if (std::isnan(value)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_simulate_csv(const BerCurve& curve) {
  std::ostringstream out;
  out << "detector,channel,sf,l,snr_db,symbols,sym_errs,bit_errs,ser,ber,"
         "ci95_lo,ci95_hi,theory_ber,mean_iters\n";
  const std::string det = detector_name(curve.config.detector);
  const std::string chan = channel_name(curve.config.channel);
  for (const auto& p : curve.points) {
    out << det << ',' << chan << ',' << curve.config.spreading_factor << ','
        << curve.config.num_antennas << ',' << format_double(p.snr_db) << ',' << p.symbols << ','
        << p.symbol_errors << ',' << p.bit_errors << ',' << format_double(p.ser) << ','
        << format_double(p.ber) << ',' << format_double(p.ci95_low) << ','
        << format_double(p.ci95_high) << ',' << format_double(p.theory_ber) << ','
        << format_double(p.mean_iterations) << '\n';
  }
  return out.str();
}

std::string format_theory_csv(const std::vector<TheoryPoint>& points) {
  std::ostringstream out;
  out << "detector,sf,l,snr_db,ser,ber\n";
  for (const auto& p : points) {
    int sf = 0;
    for (std::size_t m = p.alphabet_size; m > 1; m >>= 1) ++sf;
    out << theory_detector_name(p.detector) << ',' << sf << ',' << p.num_antennas << ','
        << format_double(p.snr_db) << ',' << format_double(p.ser) << ','
        << format_double(p.ber) << '\n';
  }
  return out.str();
}

std::string format_simulate_json(const BerCurve& curve) {
  json j;
  j["tool"] = std::string(kToolName);
  j["version"] = std::string(kToolVersion);
  j["config"] = config_to_json(curve.config);
  j["points"] = json::array();
  for (const auto& p : curve.points) j["points"].push_back(point_to_json(p));
  return j.dump(2) + "\n";
}

std::string format_theory_json(const std::vector<TheoryPoint>& points) {
  json j;
  j["tool"] = std::string(kToolName);
  j["version"] = std::string(kToolVersion);
  j["points"] = json::array();
  for (const auto& p : points) {
    int sf = 0;
    for (std::size_t m = p.alphabet_size; m > 1; m >>= 1) ++sf;
    json q;
    q["detector"] = theory_detector_name(p.detector);
    q["sf"] = sf;
    q["l"] = p.num_antennas;
    q["snr_db"] = p.snr_db;
    q["ser"] = p.ser;
    q["ber"] = p.ber;
    j["points"].push_back(q);
  }
  return j.dump(2) + "\n";
}

std::string format_manifest(const BerCurve& curve, const std::string& started_utc,
                            const std::string& finished_utc) {
  json j;
  j["tool"] = std::string(kToolName);
  j["version"] = std::string(kToolVersion);
  j["command"] = "simulate";
  j["config"] = config_to_json(curve.config);
  j["started_utc"] = started_utc;
  j["finished_utc"] = finished_utc;
  j["points"] = json::array();
  for (const auto& p : curve.points) j["points"].push_back(point_to_json(p));
  return j.dump(2) + "\n";
}

SimConfig config_from_manifest(const std::string& manifest_json) {
  const json j = json::parse(manifest_json);
  const json& c = j.at("config");
  SimConfig cfg;
  cfg.detector = detector_from_name(c.at("detector").get<std::string>());
  cfg.channel = channel_from_name(c.at("channel").get<std::string>());
  cfg.spreading_factor = c.at("sf").get<int>();
  cfg.num_antennas = c.at("l").get<int>();
  cfg.snr_db_grid = c.at("snr_db").get<std::vector<double>>();
  cfg.min_symbols = c.at("trials").get<std::uint64_t>();
  cfg.target_bit_errors = c.at("target_errors").get<std::uint64_t>();
  cfg.max_symbols = c.at("max_symbols").get<std::uint64_t>();
  cfg.tau_c = c.at("tau_c").get<int>();
  cfg.n_max = c.at("n_max").get<int>();
  cfg.seed = c.at("seed").get<std::uint64_t>();
  cfg.bit_mapping = bit_mapping_from_name(c.at("bit_mapping").get<std::string>());
  cfg.with_theory = c.at("with_theory").get<bool>();
  cfg.amplitude = c.at("amplitude").get<double>();
  return cfg;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<CurveSample> read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open curve file: " + path.string());
  }
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("empty curve file: " + path.string());
  }
  std::vector<std::string> columns;
  {
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) columns.push_back(col);
  }
  std::ptrdiff_t snr_idx = -1;
  std::ptrdiff_t ber_idx = -1;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == "snr_db") snr_idx = static_cast<std::ptrdiff_t>(i);
    if (columns[i] == "ber") ber_idx = static_cast<std::ptrdiff_t>(i);
  }
  if (snr_idx < 0 || ber_idx < 0) {
    throw std::runtime_error("curve file lacks snr_db/ber columns: " + path.string());
  }
  std::vector<CurveSample> samples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() <= static_cast<std::size_t>(std::max(snr_idx, ber_idx))) {
      throw std::runtime_error("short CSV row in " + path.string());
    }
    samples.push_back({parse_double(cells[snr_idx]), parse_double(cells[ber_idx])});
  }
  return samples;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace lorasim
