#include "commands.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "charts.hpp"
#include "dtqw/error.hpp"
#include "dtqw/observables.hpp"
#include "manifest.hpp"

namespace dtqw::cli {

namespace {

using nlohmann::json;

void require_object(const json& doc, std::string_view what) {
  if (!doc.is_object()) throw ConfigError(fmt::format("{} config must be a JSON object", what));
}

void reject_unknown(const json& doc, std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : doc.items()) {
    bool found = false;
    for (auto k : known) found = found || key == k;
    if (!found) throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

double number(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number()) throw ConfigError(fmt::format("'{}' must be a number", key));
  return doc[key].get<double>();
}

int integer(const json& doc, const char* key, int fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc[key].is_number_integer()) throw ConfigError(fmt::format("'{}' must be an integer", key));
  return doc[key].get<int>();
}

std::vector<double> number_list(const json& doc, const char* key, std::vector<double> fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& node = doc[key];
  if (node.is_number()) return {node.get<double>()};
  if (!node.is_array() || node.empty()) {
    throw ConfigError(fmt::format("'{}' must be a number or a non-empty array", key));
  }
  std::vector<double> out;
  for (const auto& v : node) {
    if (!v.is_number()) throw ConfigError(fmt::format("'{}' entries must be numbers", key));
    out.push_back(v.get<double>());
  }
  return out;
}

// phi may be given in radians or as a multiple of pi, not both.
double phi_of(const json& doc) {
  if (doc.contains("phi") && doc.contains("phi_over_pi")) {
    throw ConfigError("give either 'phi' or 'phi_over_pi', not both");
  }
  if (doc.contains("phi_over_pi")) return number(doc, "phi_over_pi", 0.0) * std::numbers::pi;
  return number(doc, "phi", 0.0);
}

template <typename F>
auto as_config_error(F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

std::string fmt_value(double v) { return fmt::format("{:.12g}", v); }

/// Runs body(i) for i in [0, n) on up to `threads` workers; the lowest
/// failing index's exception is rethrown.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t failed_at = n;
  std::exception_ptr failure;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (i < failed_at) {
              failed_at = i;
              failure = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void run_evolve(const WalkParams& params, const RunContext& ctx, ArtifactWriter& files) {
  (void)ctx;
  const auto obs = measure(evolve(params));
  files.write("distribution.csv", distribution_csv(obs.distribution));
  files.write("summary.csv", summary_csv(obs));
  files.write("distribution.svg", plot::distribution_chart(obs.distribution, params));
}

void run_sweep(const SweepGrid& grid, const RunContext& ctx, ArtifactWriter& files) {
  const auto result = dtqw::run_sweep(grid, ctx.threads);
  std::ostringstream csv;
  write_csv(result, csv);
  files.write("sweep.csv", csv.str());
  if (grid.rows() <= 8) {
    files.write("curves.svg", plot::curves_chart(result));
  } else {
    files.write("heatmap.svg", plot::heatmap_chart(result));
  }
}

void run_emulate(const EmulateConfig& cfg, const RunContext& ctx, ArtifactWriter& files,
                 std::ostream& warn) {
  if (cfg.repeats == 1) {
    warn << "warning: repeats = 1, error bars are reported as 0\n";
  }
  ReconstructOptions options;
  options.im_chi_rule = cfg.im_chi;
  options.n_repeats = cfg.repeats;

  const std::size_t n = cfg.theta.size() * cfg.gamma.size();
  std::vector<EmulationRun> runs(n);
  parallel_for(n, ctx.threads, [&](std::size_t i) {
    const std::size_t ti = i / cfg.gamma.size();
    const std::size_t gi = i % cfg.gamma.size();
    const WalkParams params{cfg.theta[ti], cfg.phi, cfg.gamma[gi], cfg.steps};
    runs[i] = emulate(params, cfg.loop, options, derive_seed(ctx.seed, ti, gi));
  });

  for (const auto& run : runs) {
    for (const auto* table : {&run.hv, &run.da}) {
      std::ostringstream csv;
      write_counts_csv(*table, csv);
      files.write(fmt::format("counts_theta{:g}_gamma{:g}_{}.csv", run.params.theta_deg,
                              run.params.gamma, to_string(table->basis)),
                  csv.str());
    }
  }
  files.write("tomography.csv", tomography_csv(runs));
  if (cfg.gamma.size() > 1) files.write("fig7.svg", plot::tomography_chart(runs));
}

}  // namespace

WalkParams evolve_from_json(const json& doc) {
  require_object(doc, "evolve");
  reject_unknown(doc, {"theta", "phi", "phi_over_pi", "gamma", "steps"});
  WalkParams p;
  p.theta_deg = number(doc, "theta", 45.0);
  p.phi = phi_of(doc);
  p.gamma = number(doc, "gamma", 0.0);
  p.steps = integer(doc, "steps", 16);
  as_config_error([&] {
    p.validate();
    return 0;
  });
  return p;
}

json to_json(const WalkParams& p) {
  return json{{"theta", p.theta_deg}, {"phi", p.phi}, {"gamma", p.gamma}, {"steps", p.steps}};
}

json sweep_preset(std::string_view name) {
  const json theta_axis{{"start", 0.1}, {"stop", 89.9}, {"pitch", 0.2}};
  const json gammas = json::array({0.0, 0.1, 0.2});
  if (name == "theta-phi") {
    return json{{"theta_axis", theta_axis},
                {"second_axis_kind", "phi"},
                {"second_axis", {{"start", 0.0}, {"stop", 1.0}, {"pitch", 0.0025}, {"times_pi", true}}},
                {"steps", 16},
                {"fixed", {{"gamma", 0.0}}}};
  }
  if (name == "loss-phi0" || name == "loss-phi-pi4") {
    const double phi_over_pi = name == "loss-phi0" ? 0.0 : 0.25;
    return json{{"theta_axis", theta_axis},
                {"second_axis_kind", "gamma"},
                {"second_axis", gammas},
                {"steps", 16},
                {"fixed", {{"phi_over_pi", phi_over_pi}}}};
  }
  throw ConfigError(fmt::format("unknown preset '{}'", name));
}

ThresholdsConfig thresholds_from_json(const json& doc) {
  require_object(doc, "thresholds");
  reject_unknown(doc, {"csv", "quantity", "threshold", "direction"});
  ThresholdsConfig cfg;
  if (!doc.contains("csv") || !doc["csv"].is_string()) {
    throw ConfigError("missing or non-string key 'csv'");
  }
  cfg.csv = doc["csv"].get<std::string>();
  if (doc.contains("quantity")) {
    if (!doc["quantity"].is_string()) throw ConfigError("'quantity' must be a string");
    cfg.quantity = as_config_error([&] { return quantity_from_string(doc["quantity"].get<std::string>()); });
  }
  cfg.threshold = number(doc, "threshold", cfg.quantity == Quantity::s_e ? 0.95 : 0.18);
  cfg.direction = cfg.quantity == Quantity::s_e ? Direction::above : Direction::below;
  if (doc.contains("direction")) {
    if (!doc["direction"].is_string()) throw ConfigError("'direction' must be a string");
    cfg.direction = as_config_error([&] { return direction_from_string(doc["direction"].get<std::string>()); });
  }
  return cfg;
}

json to_json(const ThresholdsConfig& cfg) {
  return json{{"csv", cfg.csv},
              {"quantity", to_string(cfg.quantity)},
              {"threshold", cfg.threshold},
              {"direction", cfg.direction == Direction::above ? "above" : "below"}};
}

EmulateConfig emulate_from_json(const json& doc) {
  require_object(doc, "emulate");
  reject_unknown(doc, {"theta", "gamma", "phi", "phi_over_pi", "steps", "n0", "repeats",
                       "im_chi", "loop"});
  EmulateConfig cfg;
  cfg.theta = number_list(doc, "theta", cfg.theta);
  cfg.gamma = number_list(doc, "gamma", cfg.gamma);
  cfg.phi = phi_of(doc);
  cfg.steps = integer(doc, "steps", cfg.steps);
  if (doc.contains("loop")) cfg.loop = loop_from_json(doc["loop"]);
  if (doc.contains("n0")) {
    if (!doc["n0"].is_number_unsigned() || doc["n0"].get<std::uint64_t>() == 0) {
      throw ConfigError("'n0' must be a positive integer");
    }
    cfg.loop.n0 = doc["n0"].get<std::uint64_t>();
  }
  if (doc.contains("repeats")) {
    if (!doc["repeats"].is_number_unsigned() || doc["repeats"].get<unsigned>() == 0) {
      throw ConfigError("'repeats' must be a positive integer");
    }
    cfg.repeats = doc["repeats"].get<unsigned>();
  }
  if (doc.contains("im_chi")) {
    if (!doc["im_chi"].is_string()) throw ConfigError("'im_chi' must be a string");
    cfg.im_chi = as_config_error([&] { return im_chi_rule_from_string(doc["im_chi"].get<std::string>()); });
  }
  std::set<std::pair<double, double>> seen;
  for (double theta : cfg.theta) {
    for (double gamma : cfg.gamma) {
      if (!seen.emplace(theta, gamma).second) {
        throw ConfigError(fmt::format("duplicate run theta = {:g}, gamma = {:g}", theta, gamma));
      }
      as_config_error([&] {
        const WalkParams p{theta, cfg.phi, gamma, cfg.steps};
        p.validate();
        if (p.steps < 1) throw DomainError("'steps' must be at least 1 for emulation");
        return cfg.loop.effective_gamma(gamma);
      });
    }
  }
  return cfg;
}

json to_json(const EmulateConfig& cfg) {
  return json{{"theta", cfg.theta},   {"gamma", cfg.gamma},
              {"phi", cfg.phi},       {"steps", cfg.steps},
              {"repeats", cfg.repeats}, {"im_chi", to_string(cfg.im_chi)},
              {"loop", loop_to_json(cfg.loop)}};
}

std::string distribution_csv(const PositionDistribution& dist) {
  std::string out = "x,p_h,p_v,p_total\n";
  for (int x = dist.first_position; x <= dist.last_position(); ++x) {
    out += fmt::format("{},{},{},{}\n", x, fmt_value(dist.h_at(x)), fmt_value(dist.v_at(x)),
                       fmt_value(dist.total_at(x)));
  }
  return out;
}

std::string summary_csv(const Observables& obs) {
  return fmt::format("s_e,ipr,survival,lambda1,lambda2\n{},{},{},{},{}\n",
                     fmt_value(obs.entropy.s_e), fmt_value(obs.ipr), fmt_value(obs.survival),
                     fmt_value(obs.entropy.lambda1), fmt_value(obs.entropy.lambda2));
}

std::string tomography_csv(std::span<const EmulationRun> runs) {
  std::string out = "gamma,theta,s_e_est,s_e_err,ipr_est,ipr_err\n";
  for (const auto& run : runs) {
    const auto& t = run.tomography;
    out += fmt::format("{},{},{},{},{},{}\n", fmt_value(run.params.gamma),
                       fmt_value(run.params.theta_deg), fmt_value(t.s_e_est),
                       fmt_value(t.s_e_err), fmt_value(t.ipr_est), fmt_value(t.ipr_err));
  }
  return out;
}

std::string thresholds_report(const SweepTable& table, const ThresholdsConfig& cfg) {
  std::string out;
  for (std::size_t r = 0; r < table.row_labels.size(); ++r) {
    out += table.row_labels[r] + ":";
    for (const auto& iv :
         threshold_intervals(table.theta[r], table.values[r], cfg.threshold, cfg.direction)) {
      out += fmt::format(" [{:g}, {:g}]", iv.lo, iv.hi);
    }
    out += '\n';
  }
  return out;
}

void run_command(std::string_view command, const json& config, const RunContext& ctx,
                 std::ostream& report, std::ostream& warn) {
  if (command == "evolve") {
    const auto params = evolve_from_json(config);
    ArtifactWriter files(ctx.out);
    run_evolve(params, ctx, files);
    files.write_manifest(command, to_json(params), ctx.seed, ctx.threads);
  } else if (command == "sweep") {
    const auto grid = grid_from_json(config);
    ArtifactWriter files(ctx.out);
    run_sweep(grid, ctx, files);
    files.write_manifest(command, grid_to_json(grid), ctx.seed, ctx.threads);
  } else if (command == "thresholds") {
    const auto cfg = thresholds_from_json(config);
    std::ifstream in(cfg.csv);
    if (!in) throw ConfigError(fmt::format("cannot open sweep CSV '{}'", cfg.csv));
    const auto table = read_sweep_csv(in, to_string(cfg.quantity));
    const auto text = thresholds_report(table, cfg);
    report << text;
    if (!ctx.out.empty()) {
      ArtifactWriter files(ctx.out);
      files.write("thresholds.txt", text);
      files.write_manifest(command, to_json(cfg), ctx.seed, ctx.threads);
    }
  } else if (command == "emulate") {
    const auto cfg = emulate_from_json(config);
    ArtifactWriter files(ctx.out);
    run_emulate(cfg, ctx, files, warn);
    files.write_manifest(command, to_json(cfg), ctx.seed, ctx.threads);
  } else {
    throw ConfigError(fmt::format("unknown command '{}'", command));
  }
}

}  // namespace dtqw::cli
