// dtqw: evolve | sweep | thresholds | emulate | replay
//
// Exit status: 0 success, 1 usage or configuration error, 2 runtime or
// numerical failure.

#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"
#include "dtqw/error.hpp"
#include "manifest.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace dtqw;
using namespace dtqw::cli;

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

struct CommonFlags {
  std::string config;
  std::string out;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App& sub, CommonFlags& f, std::string default_out) {
  f.out = std::move(default_out);
  sub.add_option("--config", f.config, "JSON config file (or a manifest.json to replay)")
      ->check(CLI::ExistingFile);
  f.out_opt = sub.add_option("--out", f.out, "Output directory");
  f.seed_opt = sub.add_option("--seed", f.seed, "Base RNG seed");
  f.threads_opt = sub.add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

// Loads --config; a manifest must belong to the same command.
ConfigDocument base_document(const CommonFlags& f, std::string_view command) {
  if (f.config.empty()) return {};
  auto doc = load_config(f.config);
  if (doc.command && *doc.command != command) {
    throw ConfigError(fmt::format("manifest '{}' was written by '{}', not '{}'", f.config,
                                  *doc.command, command));
  }
  return doc;
}

RunContext context(const CommonFlags& f, const ConfigDocument& doc) {
  RunContext ctx;
  ctx.out = f.out;
  ctx.seed = f.seed_opt->count() || !doc.seed ? f.seed : *doc.seed;
  ctx.threads = f.threads_opt->count() || !doc.threads ? f.threads : *doc.threads;
  return ctx;
}

/// Flag values override config values key by key.
struct Overrides {
  json values = json::object();
  std::vector<std::pair<CLI::Option*, std::string>> erase_when_set;

  void apply(json& doc) const {
    for (const auto& [opt, key] : erase_when_set) {
      if (opt->count()) doc.erase(key);
    }
    for (const auto& [key, value] : values.items()) doc[key] = value;
  }
};

template <typename T>
void collect(Overrides& o, CLI::Option* opt, const char* key, const T& value) {
  if (opt->count()) o.values[key] = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lossy discrete-time quantum walk: evolution, sweeps, thresholds, emulation"};
  app.require_subcommand(1);

  // evolve
  CommonFlags evolve_flags;
  double theta = 45.0, phi = 0.0, phi_over_pi = 0.0, gamma = 0.0;
  int steps = 16;
  auto* evolve_cmd = app.add_subcommand("evolve", "Evolve one walk and write its distribution");
  add_common(*evolve_cmd, evolve_flags, "out");
  auto* theta_opt = evolve_cmd->add_option("--theta", theta, "Coin angle in degrees");
  auto* phi_opt = evolve_cmd->add_option("--phi", phi, "Initial-state angle in radians");
  auto* phi_pi_opt =
      evolve_cmd->add_option("--phi-over-pi", phi_over_pi, "Initial-state angle / pi")
          ->excludes(phi_opt);
  auto* gamma_opt = evolve_cmd->add_option("--gamma", gamma, "Loss parameter");
  auto* steps_opt = evolve_cmd->add_option("--steps", steps, "Number of steps");

  // sweep
  CommonFlags sweep_flags;
  std::string preset;
  int sweep_steps = 16;
  double sweep_phi = 0.0, sweep_phi_pi = 0.0, sweep_gamma = 0.0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate S_E, IPR and survival over a grid");
  add_common(*sweep_cmd, sweep_flags, "out");
  sweep_cmd->add_option("--preset", preset, "theta-phi | loss-phi0 | loss-phi-pi4")
      ->check(CLI::IsMember({"theta-phi", "loss-phi0", "loss-phi-pi4"}));
  auto* sweep_steps_opt = sweep_cmd->add_option("--steps", sweep_steps, "Number of steps");
  auto* sweep_phi_opt = sweep_cmd->add_option("--phi", sweep_phi, "Fixed phi (radians)");
  auto* sweep_phi_pi_opt =
      sweep_cmd->add_option("--phi-over-pi", sweep_phi_pi, "Fixed phi / pi")->excludes(sweep_phi_opt);
  auto* sweep_gamma_opt = sweep_cmd->add_option("--gamma", sweep_gamma, "Fixed gamma");

  // thresholds
  CommonFlags thr_flags;
  std::string csv_path, quantity, direction;
  double threshold = 0.0;
  auto* thr_cmd = app.add_subcommand("thresholds", "Report theta intervals clearing a threshold");
  add_common(*thr_cmd, thr_flags, "");
  auto* csv_opt = thr_cmd->add_option("csv", csv_path, "Sweep CSV")->check(CLI::ExistingFile);
  auto* quantity_opt = thr_cmd->add_option("--quantity", quantity, "s_e | ipr");
  auto* threshold_opt = thr_cmd->add_option("--threshold", threshold, "Threshold value");
  auto* direction_opt = thr_cmd->add_option("--direction", direction, "above | below");

  // emulate
  CommonFlags emu_flags;
  std::vector<double> emu_theta, emu_gamma;
  double emu_phi = 0.0, emu_phi_pi = 0.0;
  int emu_steps = 16;
  std::uint64_t n0 = 0;
  unsigned repeats = 10;
  std::string im_chi;
  auto* emu_cmd = app.add_subcommand("emulate", "Simulate detector counts and reconstruct");
  add_common(*emu_cmd, emu_flags, "out");
  auto* emu_theta_opt = emu_cmd->add_option("--theta", emu_theta, "Coin angle(s) in degrees");
  auto* emu_gamma_opt = emu_cmd->add_option("--gamma", emu_gamma, "Loss parameter(s)");
  auto* emu_phi_opt = emu_cmd->add_option("--phi", emu_phi, "Initial-state angle in radians");
  auto* emu_phi_pi_opt =
      emu_cmd->add_option("--phi-over-pi", emu_phi_pi, "Initial-state angle / pi")->excludes(emu_phi_opt);
  auto* emu_steps_opt = emu_cmd->add_option("--steps", emu_steps, "Number of steps");
  auto* n0_opt = emu_cmd->add_option("--n0", n0, "Photons entering the measured round trip");
  auto* repeats_opt = emu_cmd->add_option("--repeats", repeats, "Bootstrap redraws per run");
  auto* im_chi_opt = emu_cmd->add_option("--im-chi", im_chi, "oracle-im | zero-im");

  // replay
  std::string manifest_path, replay_out = "replay";
  unsigned replay_threads = 0;
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest.json");
  replay_cmd->add_option("manifest", manifest_path, "manifest.json")
      ->required()
      ->check(CLI::ExistingFile);
  replay_cmd->add_option("--out", replay_out, "Output directory");
  auto* replay_threads_opt = replay_cmd->add_option("--threads", replay_threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  try {
    std::string command;
    json config;
    RunContext ctx;

    if (*evolve_cmd) {
      command = "evolve";
      auto doc = base_document(evolve_flags, command);
      Overrides o;
      collect(o, theta_opt, "theta", theta);
      collect(o, phi_opt, "phi", phi);
      collect(o, phi_pi_opt, "phi", phi_over_pi * std::numbers::pi);
      collect(o, gamma_opt, "gamma", gamma);
      collect(o, steps_opt, "steps", steps);
      o.erase_when_set = {{phi_opt, "phi_over_pi"}, {phi_pi_opt, "phi_over_pi"}};
      config = std::move(doc.config);
      o.apply(config);
      ctx = context(evolve_flags, doc);
    } else if (*sweep_cmd) {
      command = "sweep";
      auto doc = base_document(sweep_flags, command);
      config = preset.empty() ? json::object() : sweep_preset(preset);
      config.update(doc.config);
      if (sweep_steps_opt->count()) config["steps"] = sweep_steps;
      if (sweep_phi_opt->count() || sweep_phi_pi_opt->count() || sweep_gamma_opt->count()) {
        auto& fixed = config["fixed"];
        if (!fixed.is_object()) fixed = json::object();
        if (sweep_phi_opt->count() || sweep_phi_pi_opt->count()) {
          fixed.erase("phi_over_pi");
          fixed["phi"] = sweep_phi_opt->count() ? sweep_phi : sweep_phi_pi * std::numbers::pi;
        }
        if (sweep_gamma_opt->count()) fixed["gamma"] = sweep_gamma;
      }
      ctx = context(sweep_flags, doc);
    } else if (*thr_cmd) {
      command = "thresholds";
      auto doc = base_document(thr_flags, command);
      Overrides o;
      if (csv_opt->count()) o.values["csv"] = fs::absolute(csv_path).lexically_normal().string();
      collect(o, quantity_opt, "quantity", quantity);
      collect(o, threshold_opt, "threshold", threshold);
      collect(o, direction_opt, "direction", direction);
      config = std::move(doc.config);
      o.apply(config);
      ctx = context(thr_flags, doc);
    } else if (*emu_cmd) {
      command = "emulate";
      auto doc = base_document(emu_flags, command);
      Overrides o;
      collect(o, emu_theta_opt, "theta", emu_theta);
      collect(o, emu_gamma_opt, "gamma", emu_gamma);
      collect(o, emu_phi_opt, "phi", emu_phi);
      collect(o, emu_phi_pi_opt, "phi", emu_phi_pi * std::numbers::pi);
      collect(o, emu_steps_opt, "steps", emu_steps);
      collect(o, repeats_opt, "repeats", repeats);
      collect(o, im_chi_opt, "im_chi", im_chi);
      o.erase_when_set = {{emu_phi_opt, "phi_over_pi"}, {emu_phi_pi_opt, "phi_over_pi"}};
      config = std::move(doc.config);
      o.apply(config);
      if (n0_opt->count()) {
        config.erase("n0");
        if (!config.contains("loop") || !config["loop"].is_object()) config["loop"] = json::object();
        config["loop"]["n0"] = n0;
      }
      ctx = context(emu_flags, doc);
    } else {
      auto doc = load_config(manifest_path);
      if (!doc.command) throw ConfigError(fmt::format("'{}' is not a manifest", manifest_path));
      command = *doc.command;
      config = std::move(doc.config);
      ctx.out = replay_out;
      ctx.seed = doc.seed.value_or(ctx.seed);
      ctx.threads = replay_threads_opt->count() ? replay_threads : doc.threads.value_or(0);
      if (command == "thresholds" && ctx.out.empty()) ctx.out = replay_out;
    }

    run_command(command, config, ctx, std::cout, std::cerr);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
