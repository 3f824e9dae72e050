#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtqw/observables.hpp"
#include "dtqw/walk.hpp"

namespace dtqw {

/// Fiber-loop setup: two delay lines, per-round-trip survival and the
/// out-coupled fraction that reaches the detectors.
struct LoopConfig {
  double survival_h = 0.58;       // H, long loop, per round trip
  double survival_v_base = 0.58;  // V, short loop, before the tunable loss
  double outcoupling = 0.10;
  std::uint64_t n0 = 100'000'000;  // photons entering the measured round trip
  double long_delay_ns = 155.0;
  double short_delay_ns = 150.0;
  double rep_rate_khz = 125.0;

  void validate() const;
  double period_ns() const { return 1e6 / rep_rate_khz; }
  /// survival_v_base * exp(-2 gamma).
  double survival_v(double gamma) const;
  /// Loss parameter that reproduces survival_v(gamma) / survival_h per step.
  double effective_gamma(double gamma) const;
};

LoopConfig loop_from_json(const nlohmann::json& node);
nlohmann::json loop_to_json(const LoopConfig& cfg);

/// Arrival time of position `position` after `step` round trips: every
/// trip costs short_delay, each long-loop (H) pass adds the difference.
double time_bin_of(int position, int step, const LoopConfig& cfg);

/// HV measures |H>,|V>; DA measures (|H> +- |V>)/sqrt(2).
enum class Basis { hv, da };

std::string_view to_string(Basis basis);
Basis basis_from_string(std::string_view name);
/// "H"/"V" for HV, "D"/"A" for DA; outcome 0 or 1.
std::string_view outcome_label(Basis basis, int outcome);

struct CountsTable {
  int step = 0;
  Basis basis = Basis::hv;
  std::uint64_t seed = 0;
  std::vector<std::array<std::uint64_t, 2>> counts;  // index x + step

  explicit CountsTable(int step_ = 0, Basis basis_ = Basis::hv, std::uint64_t seed_ = 0);

  std::uint64_t count(int position, int outcome) const;
  std::uint64_t& count(int position, int outcome);
  std::uint64_t outcome_total(int outcome) const;
  std::uint64_t total() const;

  bool operator==(const CountsTable&) const = default;
};

/// Mixes a base seed with run coordinates into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

/// Expected detector counts per (position, outcome) before sampling.
std::vector<std::array<double, 2>> expected_counts(const WalkParams& params,
                                                   const LoopConfig& cfg, Basis basis);

/// Samples one measurement run: n0 photons are distributed multinomially over
/// the (position, outcome) cells and an implicit "lost" cell.
CountsTable simulate_counts(const WalkParams& params, const LoopConfig& cfg, Basis basis,
                            std::uint64_t seed);

/// HV tables only; per-site empirical frequencies normalized to one.
PositionDistribution distribution_from_counts(const CountsTable& table);

/// How Im(chi) is filled in, since HV and DA data only fix Re(chi).
enum class ImChiRule { oracle, zero };

std::string_view to_string(ImChiRule rule);
ImChiRule im_chi_rule_from_string(std::string_view name);

struct ReconstructOptions {
  ImChiRule im_chi_rule = ImChiRule::oracle;
  double oracle_im_chi = 0.0;  // used by ImChiRule::oracle
  unsigned n_repeats = 10;
  std::uint64_t seed = 0;  // bootstrap stream
};

struct TomographyResult {
  ReducedDensityMatrix rho_est;
  double s_e_est = 0.0;
  double s_e_err = 0.0;
  double ipr_est = 0.0;
  double ipr_err = 0.0;
  unsigned n_repeats = 0;
};

/// Nearest physical state: trace rescaled to one, Bloch vector clipped to
/// the unit ball (negative eigenvalue clamped to zero).
ReducedDensityMatrix project_to_physical(double alpha, double beta, std::complex<double> chi);

/// Point estimate from the pooled HV and DA tables. Error bars are the
/// standard deviation over n_repeats bootstrap redraws of the same counts.
/// Throws StatisticsError when either basis has fewer than 100 counts.
TomographyResult reconstruct(std::span<const CountsTable> tables,
                             const ReconstructOptions& options = {});

inline constexpr std::string_view kCountsCsvHeader = "step,basis,position,outcome,count,seed";

/// One row per parity-allowed position and outcome, ascending position.
void write_counts_csv(const CountsTable& table, std::ostream& out);
CountsTable read_counts_csv(std::istream& in);

/// Everything one emulated measurement produces.
struct EmulationRun {
  WalkParams params;
  Observables exact;
  CountsTable hv;
  CountsTable da;
  TomographyResult tomography;
};

/// Simulates HV and DA runs with seeds derived from `seed` and reconstructs.
EmulationRun emulate(const WalkParams& params, const LoopConfig& cfg,
                     const ReconstructOptions& options, std::uint64_t seed);

}  // namespace dtqw
