#include "dtqw/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "dtqw/error.hpp"
#include "dtqw/observables.hpp"

namespace dtqw {

namespace {

void require_increasing(const std::vector<double>& axis, std::string_view name) {
  if (axis.empty()) throw DomainError(fmt::format("{} is empty", name));
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw DomainError(fmt::format("{} is not strictly increasing at index {}", name, i));
    }
  }
}

struct CellFailure {
  std::size_t index;
  std::string message;
};

}  // namespace

std::string_view to_string(SecondAxis kind) {
  return kind == SecondAxis::phi ? "phi" : "gamma";
}

SecondAxis second_axis_from_string(std::string_view name) {
  if (name == "phi") return SecondAxis::phi;
  if (name == "gamma") return SecondAxis::gamma;
  throw ConfigError(fmt::format("second_axis_kind must be 'phi' or 'gamma', got '{}'", name));
}

std::string_view to_string(Quantity q) { return q == Quantity::s_e ? "s_e" : "ipr"; }

Quantity quantity_from_string(std::string_view name) {
  if (name == "s_e") return Quantity::s_e;
  if (name == "ipr") return Quantity::ipr;
  throw ConfigError(fmt::format("quantity must be 's_e' or 'ipr', got '{}'", name));
}

Direction direction_from_string(std::string_view name) {
  if (name == "above") return Direction::above;
  if (name == "below") return Direction::below;
  throw ConfigError(fmt::format("direction must be 'above' or 'below', got '{}'", name));
}

void SweepGrid::validate() const {
  require_increasing(theta_axis, "theta_axis");
  require_increasing(second_axis, "second_axis");
  if (steps < 0) throw DomainError("steps must be non-negative");
  // Corners bound every cell since both ranges are intervals.
  for (std::size_t r : {std::size_t{0}, rows() - 1}) {
    for (std::size_t c : {std::size_t{0}, cols() - 1}) params_at(r, c).validate();
  }
}

WalkParams SweepGrid::params_at(std::size_t row, std::size_t col) const {
  WalkParams p = fixed;
  p.theta_deg = theta_axis.at(col);
  p.steps = steps;
  if (second_axis_kind == SecondAxis::phi) {
    p.phi = second_axis.at(row);
  } else {
    p.gamma = second_axis.at(row);
  }
  return p;
}

std::vector<double> pitched_axis(double lo, double hi, double pitch) {
  if (!(pitch > 0.0) || !(hi >= lo)) {
    throw DomainError(fmt::format("bad axis range [{}, {}] with pitch {}", lo, hi, pitch));
  }
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / pitch + 1e-6)) + 1;
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) axis[i] = lo + static_cast<double>(i) * pitch;
  return axis;
}

std::vector<double> default_theta_axis() { return pitched_axis(0.1, 89.9, 0.2); }

std::vector<double> default_phi_axis() {
  std::vector<double> axis(401);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    axis[i] = std::numbers::pi * static_cast<double>(i) / 400.0;
  }
  return axis;
}

SweepResult run_sweep(const SweepGrid& grid, unsigned threads) {
  grid.validate();
  SweepResult result{grid, Table2D(grid.rows(), grid.cols()), Table2D(grid.rows(), grid.cols()),
                     Table2D(grid.rows(), grid.cols())};
  const std::size_t cells = grid.rows() * grid.cols();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(cells, 1)));

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::optional<CellFailure> failure;

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < cells; i = next.fetch_add(1)) {
      const std::size_t r = i / grid.cols();
      const std::size_t c = i % grid.cols();
      const WalkParams params = grid.params_at(r, c);
      try {
        const Observables obs = measure(evolve(params));
        result.s_e.at(r, c) = obs.entropy.s_e;
        result.ipr.at(r, c) = obs.ipr;
        result.survival.at(r, c) = obs.survival;
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        // Keep the lowest index so the reported cell is scheduling-independent.
        if (!failure || i < failure->index) {
          failure = CellFailure{
              i, fmt::format("sweep cell (theta = {} deg, {} = {}) failed: {}",
                             params.theta_deg, to_string(grid.second_axis_kind),
                             grid.second_axis[r], e.what())};
        }
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) throw DegenerateStateError(failure->message);
  return result;
}

std::vector<Interval> threshold_intervals(std::span<const double> axis,
                                          std::span<const double> values, double threshold,
                                          Direction direction) {
  if (axis.size() != values.size()) {
    throw DomainError("threshold_intervals: axis and values differ in length");
  }
  auto passes = [&](std::size_t i) {
    return direction == Direction::above ? values[i] > threshold : values[i] < threshold;
  };
  std::vector<Interval> out;
  const std::size_t n = axis.size();
  std::size_t i = 0;
  while (i < n) {
    if (!passes(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && passes(j + 1)) ++j;
    const double lo = i == 0 ? axis[0] : 0.5 * (axis[i - 1] + axis[i]);
    const double hi = j + 1 == n ? axis[j] : 0.5 * (axis[j] + axis[j + 1]);
    out.push_back({lo, hi});
    i = j + 1;
  }
  return out;
}

std::vector<RowIntervals> threshold_regions(const SweepResult& result, Quantity quantity,
                                            double threshold, Direction direction) {
  const Table2D& table = quantity == Quantity::s_e ? result.s_e : result.ipr;
  std::vector<RowIntervals> out;
  out.reserve(table.rows);
  for (std::size_t r = 0; r < table.rows; ++r) {
    out.push_back({result.grid.second_axis[r],
                   threshold_intervals(result.grid.theta_axis, table.row(r), threshold,
                                       direction)});
  }
  return out;
}

}  // namespace dtqw
