// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lorasim/linkbudget.hpp"
#include "lorasim/montecarlo.hpp"
#include "lorasim/theory.hpp"

namespace lorasim {

// "start:step:stop" (stop included when reachable within 1e-9) or a single
// value. Throws std::invalid_argument on malformed input.
std::vector<double> parse_snr_grid(const std::string& text);

std::string detector_name(DetectorKind kind);
std::string channel_name(ChannelModel model);
std::string theory_detector_name(TheoryDetector detector);
DetectorKind detector_from_name(const std::string& name);
ChannelModel channel_from_name(const std::string& name);
TheoryDetector theory_detector_from_name(const std::string& name);
BitMapping bit_mapping_from_name(const std::string& name);
std::string bit_mapping_name(BitMapping mapping);

// Curve serialization. Column order is stable and documented in the README:
//   simulate: detector,channel,sf,l,snr_db,symbols,sym_errs,bit_errs,ser,ber,
//             ci95_lo,ci95_hi,theory_ber,mean_iters
//   theory:   detector,sf,l,snr_db,ser,ber
// Doubles are written with shortest round-trip formatting, so identical runs
// serialize to identical bytes.
std::string format_simulate_csv(const BerCurve& curve);
std::string format_theory_csv(const std::vector<TheoryPoint>& points);
std::string format_simulate_json(const BerCurve& curve);
std::string format_theory_json(const std::vector<TheoryPoint>& points);

// Run manifest: tool version, fully resolved configuration and per-point
// results; enough to reproduce a run bit-exactly.
std::string format_manifest(const BerCurve& curve, const std::string& started_utc,
                            const std::string& finished_utc);
SimConfig config_from_manifest(const std::string& manifest_json);

std::string utc_timestamp();

// Reads snr_db/ber pairs from a curve CSV produced by either command (any
// file with snr_db and ber columns works).
std::vector<CurveSample> read_curve_csv(const std::filesystem::path& path);

// Writes via a temporary file and rename so failed runs leave no partial
// output behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string format_double(double value);

}  // namespace lorasim
