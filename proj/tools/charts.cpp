#include "charts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "svg.hpp"

namespace dtqw::plot {

namespace {

constexpr std::array<const char*, 8> kPalette{
    "#c0392b", "#2e5cb8", "#7b1e3a", "#27ae60", "#e67e22", "#8e44ad", "#16a085", "#555555",
};

std::string axis_value_label(SecondAxis kind, double v) {
  if (kind == SecondAxis::phi) return fmt::format("phi = {:.4g} pi", v / std::numbers::pi);
  return fmt::format("gamma = {:.4g}", v);
}

double max_of(std::span<const double> v) {
  return v.empty() ? 1.0 : *std::max_element(v.begin(), v.end());
}

// Two stacked panels sharing the x range.
std::pair<Panel, Panel> stacked(double x_min, double x_max) {
  Panel top;
  top.top = 40;
  top.height = 210;
  top.x_min = x_min;
  top.x_max = x_max;
  Panel bottom = top;
  bottom.top = 320;
  return {top, bottom};
}

}  // namespace

std::string distribution_chart(const PositionDistribution& dist, const WalkParams& params) {
  Panel p;
  p.x_min = dist.first_position - 1.0;
  p.x_max = dist.last_position() + 1.0;
  p.y_max = std::max(0.05, std::ceil(dist.max() * 20.0) / 20.0);
  p.title = fmt::format("theta = {:g} deg, phi = {:.4g} pi, gamma = {:g}, t = {}",
                        params.theta_deg, params.phi / std::numbers::pi, params.gamma,
                        params.steps);
  p.x_label = "position x";
  p.y_label = "probability";

  Canvas c;
  c.frame(p, std::max(1, static_cast<int>(p.x_max - p.x_min) / 4));
  for (std::size_t i = 0; i < dist.sites(); ++i) {
    const double x = dist.first_position + static_cast<double>(i);
    if (dist.p_h[i] > 0) c.bar(p, x - 0.2, 0.2, dist.p_h[i], kPalette[0]);
    if (dist.p_v[i] > 0) c.bar(p, x + 0.2, 0.2, dist.p_v[i], kPalette[1]);
  }
  c.legend(p, {{"H", kPalette[0]}, {"V", kPalette[1]}});
  return c.str();
}

std::string curves_chart(const SweepResult& result) {
  const auto& grid = result.grid;
  auto [top, bottom] = stacked(grid.theta_axis.front(), grid.theta_axis.back());
  top.y_max = 1.0;
  top.y_label = "S_E";
  top.title = fmt::format("t = {}", grid.steps);
  bottom.y_max = std::max(0.05, std::ceil(max_of(result.ipr.values) * 10.0) / 10.0);
  bottom.y_label = "IPR";
  bottom.x_label = "theta (deg)";

  Canvas c;
  c.frame(top);
  c.frame(bottom);
  std::vector<std::pair<std::string, std::string>> legend;
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    const std::string color = kPalette[r % kPalette.size()];
    Series s{axis_value_label(grid.second_axis_kind, grid.second_axis[r]), color,
             grid.theta_axis, {}, {}};
    s.y.assign(result.s_e.row(r).begin(), result.s_e.row(r).end());
    c.line(top, s);
    s.y.assign(result.ipr.row(r).begin(), result.ipr.row(r).end());
    c.line(bottom, s);
    legend.emplace_back(s.label, color);
  }
  c.legend(top, legend);
  return c.str();
}

std::string heatmap_chart(const SweepResult& result) {
  const auto& grid = result.grid;
  const bool phi_axis = grid.second_axis_kind == SecondAxis::phi;
  const double scale = phi_axis ? 1.0 / std::numbers::pi : 1.0;

  Panel left;
  left.left = 60;
  left.width = 290;
  left.top = 60;
  left.height = 460;
  left.x_min = grid.theta_axis.front();
  left.x_max = grid.theta_axis.back();
  left.y_min = grid.second_axis.front() * scale;
  left.y_max = grid.second_axis.back() * scale;
  if (left.y_max <= left.y_min) left.y_max = left.y_min + 1.0;
  left.x_label = "theta (deg)";
  left.y_label = phi_axis ? "phi / pi" : "gamma";
  Panel right = left;
  right.left = 450;
  right.y_label.clear();
  left.title = "S_E";
  right.title = "IPR";

  // Keep the file small: at most ~100 drawn cells per axis.
  const std::size_t col_stride = std::max<std::size_t>(1, (grid.cols() + 99) / 100);
  const std::size_t row_stride = std::max<std::size_t>(1, (grid.rows() + 99) / 100);

  Canvas c;
  for (auto [panel, table] : {std::pair{&left, &result.s_e}, std::pair{&right, &result.ipr}}) {
    const auto [lo_it, hi_it] = std::minmax_element(table->values.begin(), table->values.end());
    const double lo = *lo_it;
    const double hi = *hi_it > lo ? *hi_it : lo + 1.0;
    const auto edge = [](const std::vector<double>& axis, std::size_t i, double s) {
      if (axis.size() == 1) return axis[0] * s + (i == 0 ? -0.5 : 0.5);
      if (i == 0) return axis[0] * s;
      if (i >= axis.size()) return axis.back() * s;
      return 0.5 * (axis[i - 1] + axis[i]) * s;
    };
    for (std::size_t r = 0; r < grid.rows(); r += row_stride) {
      const std::size_t r_end = std::min(r + row_stride, grid.rows());
      for (std::size_t col = 0; col < grid.cols(); col += col_stride) {
        const std::size_t c_end = std::min(col + col_stride, grid.cols());
        const double v = table->at(r, col);
        c.cell(*panel, edge(grid.theta_axis, col, 1.0), edge(grid.theta_axis, c_end, 1.0),
               edge(grid.second_axis, r, scale), edge(grid.second_axis, r_end, scale),
               ramp_color((v - lo) / (hi - lo)));
      }
    }
    c.frame(*panel, 4, 4);
    c.colorbar(*panel, lo, hi);
  }
  return c.str();
}

std::string tomography_chart(std::span<const EmulationRun> runs) {
  std::vector<double> thetas;
  double g_lo = runs.empty() ? 0.0 : runs.front().params.gamma;
  double g_hi = g_lo;
  double ipr_max = 0.0;
  for (const auto& run : runs) {
    thetas.push_back(run.params.theta_deg);
    g_lo = std::min(g_lo, run.params.gamma);
    g_hi = std::max(g_hi, run.params.gamma);
    ipr_max = std::max({ipr_max, run.tomography.ipr_est + run.tomography.ipr_err, run.exact.ipr});
  }
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
  if (g_hi <= g_lo) g_hi = g_lo + 1.0;
  const double pad = 0.05 * (g_hi - g_lo);

  auto [top, bottom] = stacked(g_lo - pad, g_hi + pad);
  top.y_label = "S_E";
  top.y_max = 1.0;
  top.title = "reconstructed (markers) and exact (lines)";
  bottom.y_label = "IPR";
  bottom.x_label = "gamma";
  bottom.y_max = std::max(0.05, std::ceil(ipr_max * 10.0) / 10.0);

  Canvas c;
  c.frame(top);
  c.frame(bottom);
  std::vector<std::pair<std::string, std::string>> legend;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const std::string color = kPalette[k % kPalette.size()];
    Series s_e{"", color, {}, {}, {}};
    Series s_ipr = s_e;
    Series x_e = s_e;
    Series x_ipr = s_e;
    for (const auto& run : runs) {
      if (run.params.theta_deg != thetas[k]) continue;
      const double g = run.params.gamma;
      s_e.x.push_back(g);
      s_e.y.push_back(run.tomography.s_e_est);
      s_e.err.push_back(run.tomography.s_e_err);
      s_ipr.x.push_back(g);
      s_ipr.y.push_back(run.tomography.ipr_est);
      s_ipr.err.push_back(run.tomography.ipr_err);
      x_e.x.push_back(g);
      x_e.y.push_back(run.exact.entropy.s_e);
      x_ipr.x.push_back(g);
      x_ipr.y.push_back(run.exact.ipr);
    }
    c.line(top, x_e);
    c.line(bottom, x_ipr);
    c.markers(top, s_e);
    c.markers(bottom, s_ipr);
    legend.emplace_back(fmt::format("theta = {:g} deg", thetas[k]), color);
  }
  c.legend(top, legend);
  return c.str();
}

}  // namespace dtqw::plot
