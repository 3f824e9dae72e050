#include "dtqw/emulator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "dtqw/error.hpp"

namespace dtqw {

namespace {

constexpr std::uint64_t kMinCounts = 100;
constexpr double kNegligibleExpectation = 1e-12;

bool is_probability(double p) { return p > 0.0 && p <= 1.0; }

std::size_t slot(int position, int step) {
  if (step < 0 || position < -step || position > step) {
    throw DomainError(fmt::format("position {} outside [-{}, {}]", position, step, step));
  }
  return static_cast<std::size_t>(position + step);
}

/// Multinomial draw of `n` trials over `probs` (whose sum may be < 1; the
/// remainder is an unobserved cell). Sequential conditional binomials.
template <typename Rng>
std::vector<std::uint64_t> multinomial(std::uint64_t n, std::span<const double> probs, Rng& rng) {
  std::vector<std::uint64_t> out(probs.size(), 0);
  double remaining_mass = 1.0;
  std::uint64_t remaining = n;
  for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
    const double p = probs[i];
    if (p * static_cast<double>(n) < kNegligibleExpectation) continue;
    const double conditional = remaining_mass > 0.0 ? std::min(1.0, p / remaining_mass) : 1.0;
    std::binomial_distribution<std::uint64_t> draw(remaining, conditional);
    out[i] = draw(rng);
    remaining -= out[i];
    remaining_mass -= p;
  }
  return out;
}

struct Estimate {
  ReducedDensityMatrix rho;
  double s_e = 0.0;
  double ipr = 0.0;
};

/// Flattened (position, outcome) counts for one basis.
struct PooledCounts {
  int step = 0;
  std::vector<std::uint64_t> cells;  // 2 * slot + outcome

  std::uint64_t total() const { return std::accumulate(cells.begin(), cells.end(), std::uint64_t{0}); }
  std::uint64_t outcome_total(int o) const {
    std::uint64_t sum = 0;
    for (std::size_t i = static_cast<std::size_t>(o); i < cells.size(); i += 2) sum += cells[i];
    return sum;
  }
};

PooledCounts pool(std::span<const CountsTable> tables, Basis basis, int step) {
  PooledCounts pooled{step, std::vector<std::uint64_t>(2 * static_cast<std::size_t>(2 * step + 1), 0)};
  for (const auto& t : tables) {
    if (t.basis != basis) continue;
    for (std::size_t s = 0; s < t.counts.size(); ++s) {
      pooled.cells[2 * s] += t.counts[s][0];
      pooled.cells[2 * s + 1] += t.counts[s][1];
    }
  }
  return pooled;
}

Estimate estimate(const PooledCounts& hv, const PooledCounts& da, const ReconstructOptions& opt) {
  const double n_hv = static_cast<double>(hv.total());
  const double n_da = static_cast<double>(da.total());
  const double alpha = static_cast<double>(hv.outcome_total(0)) / n_hv;
  const double re_chi =
      (static_cast<double>(da.outcome_total(0)) - static_cast<double>(da.outcome_total(1))) /
      (2.0 * n_da);
  const double im_chi = opt.im_chi_rule == ImChiRule::oracle ? opt.oracle_im_chi : 0.0;

  Estimate e;
  e.rho = project_to_physical(alpha, 1.0 - alpha, {re_chi, im_chi});
  e.s_e = entanglement_entropy(e.rho).s_e;
  for (std::size_t s = 0; 2 * s < hv.cells.size(); ++s) {
    const double p = static_cast<double>(hv.cells[2 * s] + hv.cells[2 * s + 1]) / n_hv;
    e.ipr += p * p;
  }
  return e;
}

template <typename Rng>
PooledCounts redraw(const PooledCounts& observed, Rng& rng) {
  const auto n = observed.total();
  std::vector<double> freq(observed.cells.size());
  for (std::size_t i = 0; i < freq.size(); ++i) {
    freq[i] = static_cast<double>(observed.cells[i]) / static_cast<double>(n);
  }
  return PooledCounts{observed.step, multinomial(n, freq, rng)};
}

double sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

void LoopConfig::validate() const {
  if (!is_probability(survival_h) || !is_probability(survival_v_base) ||
      !is_probability(outcoupling)) {
    throw DomainError("loop survival and out-coupling probabilities must lie in (0, 1]");
  }
  if (n0 < 1) throw DomainError("n0 must be at least 1");
  if (!(long_delay_ns > short_delay_ns) || !(short_delay_ns > 0.0)) {
    throw DomainError("need long_delay_ns > short_delay_ns > 0");
  }
  if (!(rep_rate_khz > 0.0)) throw DomainError("rep_rate_khz must be positive");
}

double LoopConfig::survival_v(double gamma) const {
  return survival_v_base * std::exp(-2.0 * gamma);
}

double LoopConfig::effective_gamma(double gamma) const {
  // Amplitude ratio per step is sqrt(survival_v / survival_h) = exp(-gamma_eff).
  const double g = gamma + 0.5 * std::log(survival_h / survival_v_base);
  if (g < 0.0) {
    throw DomainError(fmt::format(
        "V survival {} exceeds H survival {}: net V gain is not a loss channel",
        survival_v(gamma), survival_h));
  }
  return g;
}

LoopConfig loop_from_json(const nlohmann::json& node) {
  if (!node.is_object()) throw ConfigError("'loop' must be an object");
  LoopConfig cfg;
  for (const auto& [key, value] : node.items()) {
    if (!value.is_number()) throw ConfigError(fmt::format("loop.{} must be a number", key));
    if (key == "survival_h") {
      cfg.survival_h = value.get<double>();
    } else if (key == "survival_v_base") {
      cfg.survival_v_base = value.get<double>();
    } else if (key == "outcoupling") {
      cfg.outcoupling = value.get<double>();
    } else if (key == "n0") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() > 0)) {
        throw ConfigError("loop.n0 must be a positive integer");
      }
      cfg.n0 = value.get<std::uint64_t>();
    } else if (key == "long_delay_ns") {
      cfg.long_delay_ns = value.get<double>();
    } else if (key == "short_delay_ns") {
      cfg.short_delay_ns = value.get<double>();
    } else if (key == "rep_rate_khz") {
      cfg.rep_rate_khz = value.get<double>();
    } else {
      throw ConfigError(fmt::format("unknown key 'loop.{}'", key));
    }
  }
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ConfigError(fmt::format("loop: {}", e.what()));
  }
  return cfg;
}

nlohmann::json loop_to_json(const LoopConfig& cfg) {
  return nlohmann::json{{"survival_h", cfg.survival_h},
                        {"survival_v_base", cfg.survival_v_base},
                        {"outcoupling", cfg.outcoupling},
                        {"n0", cfg.n0},
                        {"long_delay_ns", cfg.long_delay_ns},
                        {"short_delay_ns", cfg.short_delay_ns},
                        {"rep_rate_khz", cfg.rep_rate_khz}};
}

double time_bin_of(int position, int step, const LoopConfig& cfg) {
  if (step < 0 || std::abs(position) > step || (step + position) % 2 != 0) {
    throw DomainError(fmt::format("position {} is not reachable after {} steps", position, step));
  }
  const int long_passes = (step + position) / 2;
  return step * cfg.short_delay_ns + long_passes * (cfg.long_delay_ns - cfg.short_delay_ns);
}

std::string_view to_string(Basis basis) { return basis == Basis::hv ? "HV" : "DA"; }

Basis basis_from_string(std::string_view name) {
  if (name == "HV") return Basis::hv;
  if (name == "DA") return Basis::da;
  throw ConfigError(fmt::format("unknown basis '{}'", name));
}

std::string_view outcome_label(Basis basis, int outcome) {
  static constexpr std::string_view hv[] = {"H", "V"};
  static constexpr std::string_view da[] = {"D", "A"};
  if (outcome != 0 && outcome != 1) throw DomainError("outcome must be 0 or 1");
  return basis == Basis::hv ? hv[outcome] : da[outcome];
}

CountsTable::CountsTable(int step_, Basis basis_, std::uint64_t seed_)
    : step(step_), basis(basis_), seed(seed_), counts(static_cast<std::size_t>(2 * step_ + 1)) {
  if (step_ < 0) throw DomainError("step must be non-negative");
}

std::uint64_t CountsTable::count(int position, int outcome) const {
  return counts[slot(position, step)].at(static_cast<std::size_t>(outcome));
}

std::uint64_t& CountsTable::count(int position, int outcome) {
  return counts[slot(position, step)].at(static_cast<std::size_t>(outcome));
}

std::uint64_t CountsTable::outcome_total(int outcome) const {
  std::uint64_t sum = 0;
  for (const auto& c : counts) sum += c.at(static_cast<std::size_t>(outcome));
  return sum;
}

std::uint64_t CountsTable::total() const { return outcome_total(0) + outcome_total(1); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::vector<std::array<double, 2>> expected_counts(const WalkParams& params,
                                                   const LoopConfig& cfg, Basis basis) {
  params.validate();
  cfg.validate();
  WalkParams effective = params;
  effective.gamma = cfg.effective_gamma(params.gamma);
  const WalkerState state = evolve(effective);

  // The walk norm already carries the V attenuation; the balanced part of the
  // final round trip and the out-coupling scale both outcomes alike.
  const double scale = static_cast<double>(cfg.n0) * cfg.survival_h * cfg.outcoupling;
  const int t = params.steps;
  std::vector<std::array<double, 2>> out(static_cast<std::size_t>(2 * t + 1));
  for (int x = -t; x <= t; ++x) {
    const Amplitude a = state.h(x);
    const Amplitude b = state.v(x);
    auto& cell = out[static_cast<std::size_t>(x + t)];
    if (basis == Basis::hv) {
      cell = {scale * std::norm(a), scale * std::norm(b)};
    } else {
      cell = {scale * 0.5 * std::norm(a + b), scale * 0.5 * std::norm(a - b)};
    }
  }
  return out;
}

CountsTable simulate_counts(const WalkParams& params, const LoopConfig& cfg, Basis basis,
                            std::uint64_t seed) {
  const auto expected = expected_counts(params, cfg, basis);
  std::vector<double> probs;
  probs.reserve(2 * expected.size());
  const double n0 = static_cast<double>(cfg.n0);
  for (const auto& cell : expected) {
    probs.push_back(cell[0] / n0);
    probs.push_back(cell[1] / n0);
  }
  std::mt19937_64 rng(seed);
  const auto drawn = multinomial(cfg.n0, probs, rng);

  CountsTable table(params.steps, basis, seed);
  for (std::size_t s = 0; s < table.counts.size(); ++s) {
    table.counts[s] = {drawn[2 * s], drawn[2 * s + 1]};
  }
  return table;
}

PositionDistribution distribution_from_counts(const CountsTable& table) {
  if (table.basis != Basis::hv) {
    throw DomainError("position distribution needs an HV-basis table");
  }
  const std::uint64_t total = table.total();
  if (total == 0) throw StatisticsError("counts table is empty");
  PositionDistribution dist;
  dist.step = table.step;
  dist.first_position = -table.step;
  const double n = static_cast<double>(total);
  for (const auto& c : table.counts) {
    dist.p_h.push_back(static_cast<double>(c[0]) / n);
    dist.p_v.push_back(static_cast<double>(c[1]) / n);
    dist.p_total.push_back(dist.p_h.back() + dist.p_v.back());
  }
  return dist;
}

std::string_view to_string(ImChiRule rule) {
  return rule == ImChiRule::oracle ? "oracle-im" : "zero-im";
}

ImChiRule im_chi_rule_from_string(std::string_view name) {
  if (name == "oracle-im") return ImChiRule::oracle;
  if (name == "zero-im") return ImChiRule::zero;
  throw ConfigError(fmt::format("im_chi rule must be 'oracle-im' or 'zero-im', got '{}'", name));
}

ReducedDensityMatrix project_to_physical(double alpha, double beta, std::complex<double> chi) {
  const double trace = alpha + beta;
  if (!(trace > 0.0) || !std::isfinite(trace) || !std::isfinite(chi.real()) ||
      !std::isfinite(chi.imag())) {
    throw NumericalError(fmt::format("cannot project matrix with trace {}", trace));
  }
  // Bloch vector of the trace-normalized matrix; |r| > 1 means a negative
  // eigenvalue, and clipping |r| to 1 clamps it at zero.
  const double z = (alpha - beta) / trace;
  std::complex<double> transverse = 2.0 * chi / trace;
  double length = std::sqrt(z * z + std::norm(transverse));
  double scale = length > 1.0 ? 1.0 / length : 1.0;
  const double zc = z * scale;
  transverse *= scale;
  return ReducedDensityMatrix{(1.0 + zc) / 2.0, (1.0 - zc) / 2.0, transverse / 2.0};
}

TomographyResult reconstruct(std::span<const CountsTable> tables,
                             const ReconstructOptions& options) {
  const auto has = [&](Basis b) {
    return std::any_of(tables.begin(), tables.end(), [b](const auto& t) { return t.basis == b; });
  };
  if (!has(Basis::hv) || !has(Basis::da)) {
    throw DomainError("reconstruction needs at least one HV and one DA table");
  }
  const int step = tables.front().step;
  for (const auto& t : tables) {
    if (t.step != step) throw DomainError("all tables must share the same step");
  }

  const PooledCounts hv = pool(tables, Basis::hv, step);
  const PooledCounts da = pool(tables, Basis::da, step);
  if (hv.total() < kMinCounts || da.total() < kMinCounts) {
    throw StatisticsError(fmt::format("too few counts for tomography (HV {}, DA {}; need {})",
                                      hv.total(), da.total(), kMinCounts));
  }

  const Estimate point = estimate(hv, da, options);
  TomographyResult out;
  out.rho_est = point.rho;
  out.s_e_est = point.s_e;
  out.ipr_est = point.ipr;
  out.n_repeats = options.n_repeats;

  std::vector<double> s_samples;
  std::vector<double> ipr_samples;
  for (unsigned k = 0; k < options.n_repeats; ++k) {
    std::mt19937_64 rng(derive_seed(options.seed, k));
    const Estimate e = estimate(redraw(hv, rng), redraw(da, rng), options);
    s_samples.push_back(e.s_e);
    ipr_samples.push_back(e.ipr);
  }
  out.s_e_err = sample_stddev(s_samples);
  out.ipr_err = sample_stddev(ipr_samples);
  return out;
}

void write_counts_csv(const CountsTable& table, std::ostream& out) {
  out << kCountsCsvHeader << '\n';
  for (int x = -table.step; x <= table.step; x += 2) {
    for (int o = 0; o < 2; ++o) {
      out << fmt::format("{},{},{},{},{},{}\n", table.step, to_string(table.basis), x,
                         outcome_label(table.basis, o), table.count(x, o), table.seed);
    }
  }
}

CountsTable read_counts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCountsCsvHeader) {
    throw ConfigError(fmt::format("counts CSV must start with '{}'", kCountsCsvHeader));
  }
  std::optional<CountsTable> table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string step_s, basis_s, pos_s, outcome_s, count_s, seed_s;
    std::getline(row, step_s, ',');
    std::getline(row, basis_s, ',');
    std::getline(row, pos_s, ',');
    std::getline(row, outcome_s, ',');
    std::getline(row, count_s, ',');
    std::getline(row, seed_s, ',');
    try {
      const int step = std::stoi(step_s);
      const Basis basis = basis_from_string(basis_s);
      const std::uint64_t seed = std::stoull(seed_s);
      if (!table) table.emplace(step, basis, seed);
      if (table->step != step || table->basis != basis || table->seed != seed) {
        throw ConfigError("mixed step/basis/seed within one table");
      }
      const int outcome = outcome_s == outcome_label(basis, 0) ? 0
                          : outcome_s == outcome_label(basis, 1)
                              ? 1
                              : throw ConfigError(fmt::format("bad outcome '{}'", outcome_s));
      const int position = std::stoi(pos_s);
      if ((position + step) % 2 != 0) throw ConfigError("count at parity-forbidden position");
      table->count(position, outcome) = std::stoull(count_s);
    } catch (const std::logic_error& e) {
      throw ConfigError(fmt::format("counts CSV line {}: {}", line_no, e.what()));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("counts CSV line {}: {}", line_no, e.what()));
    }
  }
  if (!table) throw ConfigError("counts CSV has no data rows");
  return *table;
}

EmulationRun emulate(const WalkParams& params, const LoopConfig& cfg,
                     const ReconstructOptions& options, std::uint64_t seed) {
  WalkParams effective = params;
  effective.gamma = cfg.effective_gamma(params.gamma);
  EmulationRun run{params, measure(evolve(effective)),
                   simulate_counts(params, cfg, Basis::hv, derive_seed(seed, 0)),
                   simulate_counts(params, cfg, Basis::da, derive_seed(seed, 1)), {}};
  ReconstructOptions opt = options;
  opt.oracle_im_chi = run.exact.rho.chi.imag();
  opt.seed = derive_seed(seed, 2);
  const std::array tables{run.hv, run.da};
  run.tomography = reconstruct(tables, opt);
  return run;
}

}  // namespace dtqw
