// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: `theory` evaluates the analytical BER curves,
// `simulate` runs Monte Carlo sweeps, `compare` measures the SNR gap between
// two curves at a target BER and the coverage factor it buys.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "lorasim/io.hpp"
#include "lorasim/linkbudget.hpp"
#include "lorasim/montecarlo.hpp"
#include "lorasim/theory.hpp"
#include "lorasim/version.hpp"

namespace {

using namespace lorasim;

std::filesystem::path resolve_output(const std::string& out) {
  std::filesystem::path path(out);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("LORASIM_OUT_DIR"); dir != nullptr && *dir != '\0') {
      path = std::filesystem::path(dir) / path;
    }
  }
  return path;
}

int default_jobs() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void check_production_sf(int sf) {
  if (sf < 7 || sf > 12) {
    throw CLI::ValidationError("--sf", "spreading factor must be in 7..12");
  }
}

struct TheoryArgs {
  std::string detector = "noncoh-rayleigh";
  int sf = 7;
  int l = 1;
  std::string snr;
  std::string out;
  std::string format = "csv";
};

int run_theory(const TheoryArgs& args) {
  check_production_sf(args.sf);
  const TheoryDetector detector = theory_detector_from_name(args.detector);
  const std::vector<double> grid = parse_snr_grid(args.snr);
  const std::size_t alphabet = std::size_t{1} << args.sf;
  const auto points = theory_curve(detector, alphabet, args.l, grid);
  const std::string body =
      args.format == "json" ? format_theory_json(points) : format_theory_csv(points);
  if (args.out.empty()) {
    std::cout << body;
  } else {
    write_file_atomic(resolve_output(args.out), body);
  }
  return 0;
}

struct SimulateArgs {
  std::string detector = "noncoh";
  std::string channel = "rayleigh";
  int sf = 7;
  int l = 1;
  std::string snr;
  std::uint64_t trials = 100000;
  std::uint64_t target_errors = 100;
  std::uint64_t max_symbols = 10000000;
  int tau_c = 10;
  int n_max = 50;
  std::uint64_t seed = 1;
  int jobs = default_jobs();
  bool with_theory = false;
  std::string bit_mapping = "natural";
  std::string out;
  std::string format = "csv";
  std::string from_manifest;
};

int run_simulate(const SimulateArgs& args) {
  SimConfig cfg;
  if (!args.from_manifest.empty()) {
    std::ifstream in(args.from_manifest);
    if (!in) throw std::runtime_error("cannot open manifest: " + args.from_manifest);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    cfg = config_from_manifest(text);
  } else {
    if (args.snr.empty()) {
      throw CLI::ValidationError("--snr", "an SNR grid is required");
    }
    cfg.detector = detector_from_name(args.detector);
    cfg.channel = channel_from_name(args.channel);
    cfg.spreading_factor = args.sf;
    cfg.num_antennas = args.l;
    cfg.snr_db_grid = parse_snr_grid(args.snr);
    cfg.min_symbols = args.trials;
    cfg.target_bit_errors = args.target_errors;
    cfg.max_symbols = std::max(args.max_symbols, args.trials);
    cfg.tau_c = args.tau_c;
    cfg.n_max = args.n_max;
    cfg.seed = args.seed;
    cfg.bit_mapping = bit_mapping_from_name(args.bit_mapping);
    cfg.with_theory = args.with_theory;
  }
  check_production_sf(cfg.spreading_factor);
  cfg.jobs = args.jobs;
  validate(cfg);

  if (cfg.with_theory && !(cfg.detector == DetectorKind::Coherent && cfg.channel == ChannelModel::Awgn) &&
      !(cfg.detector == DetectorKind::Noncoherent && cfg.channel == ChannelModel::Rayleigh)) {
    std::cerr << "warning: no analytical reference for " << detector_name(cfg.detector) << "/"
              << channel_name(cfg.channel) << "; theory_ber column left empty\n";
  }

  const std::string started = utc_timestamp();
  const BerCurve curve = run_sweep(cfg);
  const std::string finished = utc_timestamp();

  const std::string body =
      args.format == "json" ? format_simulate_json(curve) : format_simulate_csv(curve);
  if (args.out.empty()) {
    std::cout << body;
  } else {
    const std::filesystem::path out_path = resolve_output(args.out);
    write_file_atomic(out_path, body);
    const std::filesystem::path manifest_path = out_path.string() + ".manifest.json";
    write_file_atomic(manifest_path, format_manifest(curve, started, finished));
  }
  return 0;
}

struct CompareArgs {
  std::string curve_a;
  std::string curve_b;
  double target_ber = 1e-4;
  double pathloss_exponent = 2.0;
  double reference_loss_db = 91.22;
  double reference_distance_km = 1.0;
  std::string out;
};

// Curve inputs are either CSV paths or inline specs of the form
//   theory:<coh-awgn|noncoh-rayleigh>:sf=<n>:l=<n>:snr=<grid>
std::vector<CurveSample> load_curve(const std::string& spec) {
  if (spec.rfind("theory:", 0) != 0) {
    return read_curve_csv(spec);
  }
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  // "snr=a:b:c" itself contains colons; re-join everything after "snr=".
  std::string detector;
  int sf = -1;
  int l = -1;
  std::string snr;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (p.rfind("sf=", 0) == 0) {
      sf = std::stoi(p.substr(3));
    } else if (p.rfind("l=", 0) == 0) {
      l = std::stoi(p.substr(2));
    } else if (p.rfind("snr=", 0) == 0) {
      snr = p.substr(4);
      for (std::size_t k = i + 1; k < parts.size(); ++k) snr += ":" + parts[k];
      break;
    } else if (detector.empty()) {
      detector = p;
    } else {
      throw std::invalid_argument("bad inline curve spec: " + spec);
    }
  }
  if (detector.empty() || sf < 0 || l < 0 || snr.empty()) {
    throw std::invalid_argument(
        "inline spec needs theory:<detector>:sf=<n>:l=<n>:snr=<grid>, got: " + spec);
  }
  check_production_sf(sf);
  const auto points = theory_curve(theory_detector_from_name(detector), std::size_t{1} << sf, l,
                                   parse_snr_grid(snr));
  std::vector<CurveSample> samples;
  samples.reserve(points.size());
  for (const auto& p : points) samples.push_back({p.snr_db, p.ber});
  return samples;
}

int run_compare(const CompareArgs& args) {
  const auto a = load_curve(args.curve_a);
  const auto b = load_curve(args.curve_b);
  const double snr_a = snr_at_ber(a, args.target_ber, args.curve_a);
  const double snr_b = snr_at_ber(b, args.target_ber, args.curve_b);
  const double gap = snr_a - snr_b;
  const PathLossModel model{args.reference_loss_db, args.pathloss_exponent,
                            args.reference_distance_km};
  const double factor = range_factor(gap, model);

  char line[256];
  std::snprintf(line, sizeof(line),
                "gap = %.2f dB at BER %g (A: %.2f dB, B: %.2f dB), range factor x%.2f (n=%g)",
                gap, args.target_ber, snr_a, snr_b, factor, model.exponent);
  std::cout << line << "\n";

  if (!args.out.empty()) {
    std::ostringstream json;
    json << "{\n"
         << "  \"target_ber\": " << format_double(args.target_ber) << ",\n"
         << "  \"snr_a_db\": " << format_double(snr_a) << ",\n"
         << "  \"snr_b_db\": " << format_double(snr_b) << ",\n"
         << "  \"gap_db\": " << format_double(gap) << ",\n"
         << "  \"pathloss_exponent\": " << format_double(model.exponent) << ",\n"
         << "  \"range_factor\": " << format_double(factor) << "\n"
         << "}\n";
    write_file_atomic(resolve_output(args.out), json.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-antenna chirp spread spectrum link simulator"};
  app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));
  app.require_subcommand(1);

  TheoryArgs theory_args;
  CLI::App* theory_cmd = app.add_subcommand("theory", "Evaluate analytical SER/BER curves");
  theory_cmd->add_option("--detector", theory_args.detector, "coh-awgn|noncoh-rayleigh");
  theory_cmd->add_option("--sf", theory_args.sf, "spreading factor (7..12)");
  theory_cmd->add_option("--l", theory_args.l, "number of receive antennas");
  theory_cmd->add_option("--snr", theory_args.snr, "SNR in dB: value or start:step:stop")
      ->required();
  theory_cmd->add_option("--out", theory_args.out, "output path (default stdout)");
  theory_cmd->add_option("--format", theory_args.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo BER sweep");
  sim_cmd->add_option("--detector", sim_args.detector, "coh|noncoh|semicoh");
  sim_cmd->add_option("--channel", sim_args.channel, "awgn|rayleigh");
  sim_cmd->add_option("--sf", sim_args.sf, "spreading factor (7..12)");
  sim_cmd->add_option("--l", sim_args.l, "number of receive antennas");
  sim_cmd->add_option("--snr", sim_args.snr, "SNR in dB: value or start:step:stop");
  sim_cmd->add_option("--trials", sim_args.trials, "minimum symbols per SNR point");
  sim_cmd->add_option("--target-errors", sim_args.target_errors,
                      "keep running until this many bit errors (after --trials)");
  sim_cmd->add_option("--max-symbols", sim_args.max_symbols, "hard cap on symbols per point");
  sim_cmd->add_option("--tau-c", sim_args.tau_c, "symbols per fading coherence frame");
  sim_cmd->add_option("--n-max", sim_args.n_max, "semi-coherent iteration cap");
  sim_cmd->add_option("--seed", sim_args.seed, "RNG seed");
  sim_cmd->add_option("--jobs", sim_args.jobs, "worker threads (does not affect results)");
  sim_cmd->add_flag("--with-theory", sim_args.with_theory,
                    "attach analytical BER where defined");
  sim_cmd->add_option("--bit-mapping", sim_args.bit_mapping, "natural|gray symbol labels");
  sim_cmd->add_option("--out", sim_args.out,
                      "output path (default stdout); also writes <out>.manifest.json");
  sim_cmd->add_option("--format", sim_args.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  sim_cmd->add_option("--from-manifest", sim_args.from_manifest,
                      "re-run the exact configuration of a previous run's manifest");

  CompareArgs cmp_args;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "SNR gap and coverage factor of two curves");
  cmp_cmd->add_option("--a", cmp_args.curve_a, "curve CSV or inline theory:... spec")->required();
  cmp_cmd->add_option("--b", cmp_args.curve_b, "curve CSV or inline theory:... spec")->required();
  cmp_cmd->add_option("--target-ber", cmp_args.target_ber, "BER at which to measure the gap");
  cmp_cmd->add_option("--n", cmp_args.pathloss_exponent, "path loss exponent");
  cmp_cmd->add_option("--ref-loss", cmp_args.reference_loss_db, "reference path loss in dB");
  cmp_cmd->add_option("--d0", cmp_args.reference_distance_km, "reference distance in km");
  cmp_cmd->add_option("--out", cmp_args.out, "write a JSON report here");

  try {
    app.parse(argc, argv);
    if (theory_cmd->parsed()) return run_theory(theory_args);
    if (sim_cmd->parsed()) return run_simulate(sim_args);
    if (cmp_cmd->parsed()) return run_compare(cmp_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
