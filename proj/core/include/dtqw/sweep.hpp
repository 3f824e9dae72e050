#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dtqw/walk.hpp"

namespace dtqw {

enum class SecondAxis { phi, gamma };

std::string_view to_string(SecondAxis kind);
SecondAxis second_axis_from_string(std::string_view name);

/// A rectangular (theta x phi) or (theta x gamma) grid of walks.
struct SweepGrid {
  std::vector<double> theta_axis;  // degrees, strictly increasing
  SecondAxis second_axis_kind = SecondAxis::phi;
  std::vector<double> second_axis;  // strictly increasing
  int steps = 16;
  WalkParams fixed;  // supplies whichever of phi/gamma is not swept

  void validate() const;
  WalkParams params_at(std::size_t row, std::size_t col) const;
  std::size_t rows() const { return second_axis.size(); }
  std::size_t cols() const { return theta_axis.size(); }
};

/// Samples lo, lo+pitch, ... up to hi (inclusive within pitch/1e6).
std::vector<double> pitched_axis(double lo, double hi, double pitch);

/// 0.1, 0.3, ..., 89.9 degrees: the open interval (0, 90) at 0.2 pitch.
std::vector<double> default_theta_axis();

/// [0, pi] at pi/400 pitch.
std::vector<double> default_phi_axis();

/// Row-major table, one row per second-axis value.
struct Table2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Table2D() = default;
  Table2D(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c) {}
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols, cols);
  }
  bool operator==(const Table2D&) const = default;
};

struct SweepResult {
  SweepGrid grid;
  Table2D s_e;
  Table2D ipr;
  Table2D survival;
};

/// Evaluates every grid cell; `threads` = 0 uses the hardware concurrency.
/// Cell values do not depend on the thread count.
SweepResult run_sweep(const SweepGrid& grid, unsigned threads = 0);

enum class Quantity { s_e, ipr };
enum class Direction { above, below };

std::string_view to_string(Quantity q);
Quantity quantity_from_string(std::string_view name);
Direction direction_from_string(std::string_view name);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

struct RowIntervals {
  double second_axis_value = 0.0;
  std::vector<Interval> intervals;
};

/// Maximal runs of samples strictly clearing `threshold`. Interior endpoints
/// sit midway between the last failing and first passing sample; a run that
/// touches the end of the axis ends at that sample.
std::vector<Interval> threshold_intervals(std::span<const double> axis,
                                          std::span<const double> values,
                                          double threshold, Direction direction);

std::vector<RowIntervals> threshold_regions(const SweepResult& result, Quantity quantity,
                                            double threshold, Direction direction);

inline constexpr std::string_view kSweepCsvHeader =
    "theta_deg,second_axis_name,second_axis_value,steps,s_e,ipr,survival";

void write_csv(const SweepResult& result, std::ostream& out);

/// Writes write_csv output to `path`; throws IoError naming the path.
void export_csv(const SweepResult& result, const std::filesystem::path& path);

/// A sweep CSV read back for threshold analysis.
struct SweepTable {
  std::string second_axis_name;
  std::vector<std::string> row_labels;  // second-axis value as written
  std::vector<double> row_values;
  std::vector<std::vector<double>> theta;   // per row, ascending
  std::vector<std::vector<double>> values;  // per row, the requested column
};

/// Parses a sweep CSV and extracts `column`; throws ConfigError when the
/// header lacks a required column.
SweepTable read_sweep_csv(std::istream& in, std::string_view column);

/// Reads a grid from a JSON document with keys theta_axis, second_axis_kind,
/// second_axis, steps and fixed. Axes are either explicit arrays or
/// {"start", "stop", "pitch"} objects (optional "times_pi": true).
SweepGrid grid_from_json(const nlohmann::json& doc);
nlohmann::json grid_to_json(const SweepGrid& grid);

}  // namespace dtqw
