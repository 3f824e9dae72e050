#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtqw/emulator.hpp"
#include "dtqw/sweep.hpp"
#include "dtqw/walk.hpp"

namespace dtqw::cli {

/// Where and how a resolved command runs. An empty `out` means stdout only
/// (thresholds); every other command writes into `out`.
struct RunContext {
  std::filesystem::path out;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct ThresholdsConfig {
  std::string csv;
  Quantity quantity = Quantity::s_e;
  double threshold = 0.95;
  Direction direction = Direction::above;
};

struct EmulateConfig {
  std::vector<double> theta{37.0, 48.0, 59.0};
  std::vector<double> gamma{0.0};
  double phi = 0.0;
  int steps = 16;
  LoopConfig loop;
  unsigned repeats = 10;
  ImChiRule im_chi = ImChiRule::oracle;
};

// Each parser accepts a partially filled document, applies defaults and
// validates; the matching to_json gives the canonical resolved form.
WalkParams evolve_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const WalkParams& params);

/// Named grids: theta-phi (full theta x phi map at gamma = 0), loss-phi0 and
/// loss-phi-pi4 (gamma in {0, 0.1, 0.2} rows at phi = 0 and phi = pi/4).
nlohmann::json sweep_preset(std::string_view name);

ThresholdsConfig thresholds_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ThresholdsConfig& cfg);

EmulateConfig emulate_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const EmulateConfig& cfg);

/// Resolves `config` for `command`, runs it, writes artifacts and the
/// manifest. Reports go to `report`, warnings to `warn`.
void run_command(std::string_view command, const nlohmann::json& config,
                 const RunContext& ctx, std::ostream& report, std::ostream& warn);

// Byte-level renderers, shared with tests.
std::string distribution_csv(const PositionDistribution& dist);
std::string summary_csv(const Observables& obs);
std::string tomography_csv(std::span<const EmulationRun> runs);
std::string thresholds_report(const SweepTable& table, const ThresholdsConfig& cfg);

}  // namespace dtqw::cli
