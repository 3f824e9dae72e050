#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "dtqw/error.hpp"
#include "dtqw/sweep.hpp"

namespace dtqw {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(fmt::format("line {}: '{}' is not a number", line_no, text));
  }
  return value;
}

std::vector<double> axis_from_json(const nlohmann::json& node, std::string_view key) {
  if (node.is_array()) {
    std::vector<double> axis;
    for (const auto& v : node) {
      if (!v.is_number()) throw ConfigError(fmt::format("{}: entries must be numbers", key));
      axis.push_back(v.get<double>());
    }
    return axis;
  }
  if (node.is_object()) {
    for (const char* field : {"start", "stop", "pitch"}) {
      if (!node.contains(field) || !node[field].is_number()) {
        throw ConfigError(fmt::format("{}: range object needs numeric '{}'", key, field));
      }
    }
    const double scale = node.value("times_pi", false) ? std::numbers::pi : 1.0;
    try {
      auto axis = pitched_axis(node["start"].get<double>(), node["stop"].get<double>(),
                               node["pitch"].get<double>());
      for (auto& x : axis) x *= scale;
      return axis;
    } catch (const DomainError& e) {
      throw ConfigError(fmt::format("{}: {}", key, e.what()));
    }
  }
  throw ConfigError(fmt::format("{}: expected an array or a range object", key));
}

}  // namespace

void write_csv(const SweepResult& result, std::ostream& out) {
  const SweepGrid& g = result.grid;
  out << kSweepCsvHeader << '\n';
  for (std::size_t r = 0; r < g.rows(); ++r) {
    for (std::size_t c = 0; c < g.cols(); ++c) {
      out << fmt::format("{:.12g},{},{:.12g},{},{:.12g},{:.12g},{:.12g}\n", g.theta_axis[c],
                         to_string(g.second_axis_kind), g.second_axis[r], g.steps,
                         result.s_e.at(r, c), result.ipr.at(r, c), result.survival.at(r, c));
    }
  }
}

void export_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  write_csv(result, out);
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

SweepTable read_sweep_csv(std::istream& in, std::string_view column) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("sweep CSV is empty");
  const auto header = split_csv_line(line);
  auto find = [&](std::string_view name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ConfigError(fmt::format("sweep CSV has no '{}' column", name));
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t theta_col = find("theta_deg");
  const std::size_t name_col = find("second_axis_name");
  const std::size_t value_col = find("second_axis_value");
  const std::size_t data_col = find(column);

  SweepTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ConfigError(fmt::format("line {}: expected {} fields, got {}", line_no,
                                    header.size(), fields.size()));
    }
    if (table.second_axis_name.empty()) table.second_axis_name = fields[name_col];
    const std::string& label = fields[value_col];
    auto row = std::find(table.row_labels.begin(), table.row_labels.end(), label);
    std::size_t r = static_cast<std::size_t>(row - table.row_labels.begin());
    if (row == table.row_labels.end()) {
      table.row_labels.push_back(label);
      table.row_values.push_back(parse_double(label, line_no));
      table.theta.emplace_back();
      table.values.emplace_back();
    }
    table.theta[r].push_back(parse_double(fields[theta_col], line_no));
    table.values[r].push_back(parse_double(fields[data_col], line_no));
  }

  for (std::size_t r = 0; r < table.theta.size(); ++r) {
    std::vector<std::size_t> order(table.theta[r].size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return table.theta[r][a] < table.theta[r][b];
    });
    std::vector<double> theta, values;
    for (std::size_t i : order) {
      theta.push_back(table.theta[r][i]);
      values.push_back(table.values[r][i]);
    }
    table.theta[r] = std::move(theta);
    table.values[r] = std::move(values);
  }
  return table;
}

SweepGrid grid_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("sweep config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "theta_axis" && key != "second_axis_kind" && key != "second_axis" &&
        key != "steps" && key != "fixed") {
      throw ConfigError(fmt::format("unknown key '{}'", key));
    }
  }
  SweepGrid grid;
  if (!doc.contains("theta_axis")) throw ConfigError("missing key 'theta_axis'");
  grid.theta_axis = axis_from_json(doc["theta_axis"], "theta_axis");
  if (!doc.contains("second_axis_kind") || !doc["second_axis_kind"].is_string()) {
    throw ConfigError("missing or non-string key 'second_axis_kind'");
  }
  grid.second_axis_kind = second_axis_from_string(doc["second_axis_kind"].get<std::string>());
  if (!doc.contains("second_axis")) throw ConfigError("missing key 'second_axis'");
  grid.second_axis = axis_from_json(doc["second_axis"], "second_axis");
  if (doc.contains("steps")) {
    if (!doc["steps"].is_number_integer()) throw ConfigError("'steps' must be an integer");
    grid.steps = doc["steps"].get<int>();
  }
  if (doc.contains("fixed")) {
    const auto& fixed = doc["fixed"];
    if (!fixed.is_object()) throw ConfigError("'fixed' must be an object");
    for (const auto& [key, value] : fixed.items()) {
      if (!value.is_number()) throw ConfigError(fmt::format("fixed.{} must be a number", key));
      if (key == "phi") {
        grid.fixed.phi = value.get<double>();
      } else if (key == "phi_over_pi") {
        grid.fixed.phi = value.get<double>() * std::numbers::pi;
      } else if (key == "gamma") {
        grid.fixed.gamma = value.get<double>();
      } else if (key == "theta") {
        grid.fixed.theta_deg = value.get<double>();
      } else {
        throw ConfigError(fmt::format("unknown key 'fixed.{}'", key));
      }
    }
  }
  try {
    grid.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return grid;
}

nlohmann::json grid_to_json(const SweepGrid& grid) {
  return nlohmann::json{
      {"theta_axis", grid.theta_axis},
      {"second_axis_kind", std::string(to_string(grid.second_axis_kind))},
      {"second_axis", grid.second_axis},
      {"steps", grid.steps},
      {"fixed", {{"phi", grid.fixed.phi}, {"gamma", grid.fixed.gamma}}},
  };
}

}  // namespace dtqw
