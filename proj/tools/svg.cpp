#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

namespace dtqw::plot {

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void Canvas::frame(const Panel& p, int x_ticks, int y_ticks) {
  body_ += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      p.left, p.top, p.width, p.height);
  for (int i = 0; i <= x_ticks; ++i) {
    const double v = p.x_min + (p.x_max - p.x_min) * i / x_ticks;
    const double x = p.px(v);
    body_ += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", x,
        p.top + p.height, x, p.top + p.height + 5);
    text(x, p.top + p.height + 20, fmt::format("{:.4g}", v), 12);
  }
  for (int i = 0; i <= y_ticks; ++i) {
    const double v = p.y_min + (p.y_max - p.y_min) * i / y_ticks;
    const double y = p.py(v);
    body_ += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n",
        p.left - 5, y, p.left, y);
    text(p.left - 8, y + 4, fmt::format("{:.3g}", v), 12, "end");
  }
  if (!p.title.empty()) text(p.left + p.width / 2, p.top - 12, p.title, 16);
  if (!p.x_label.empty()) text(p.left + p.width / 2, p.top + p.height + 40, p.x_label);
  if (!p.y_label.empty()) {
    const double x = p.left - 50;
    const double y = p.top + p.height / 2;
    body_ += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"14\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 {:.2f} {:.2f})\">{}</text>\n",
        x, y, x, y, escape(p.y_label));
  }
}

void Canvas::bar(const Panel& p, double x, double half_width, double y, std::string_view color) {
  const double x0 = p.px(x - half_width);
  const double x1 = p.px(x + half_width);
  const double y0 = p.py(std::max(y, p.y_min));
  const double base = p.py(p.y_min);
  body_ += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" "
      "fill-opacity=\"0.8\"/>\n",
      x0, y0, x1 - x0, base - y0, color);
}

void Canvas::line(const Panel& p, const Series& s) {
  std::string points;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    points += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", p.px(s.x[i]), p.py(s.y[i]));
  }
  body_ += fmt::format(
      "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", points,
      s.color);
}

void Canvas::markers(const Panel& p, const Series& s) {
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const double x = p.px(s.x[i]);
    if (i < s.err.size() && s.err[i] > 0) {
      body_ += fmt::format(
          "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\"/>\n", x,
          p.py(s.y[i] - s.err[i]), x, p.py(s.y[i] + s.err[i]), s.color);
    }
    body_ += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"{}\"/>\n", x,
                         p.py(s.y[i]), s.color);
  }
}

void Canvas::cell(const Panel& p, double x0, double x1, double y0, double y1,
                  std::string_view color) {
  const double left = p.px(x0);
  const double right = p.px(x1);
  const double top = p.py(y1);
  const double bottom = p.py(y0);
  body_ += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", left,
      top, right - left, bottom - top, color);
}

void Canvas::legend(const Panel& p,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  double y = p.top + 16;
  for (const auto& [label, color] : entries) {
    const double x = p.left + p.width - 150;
    body_ += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"14\" height=\"10\" fill=\"{}\"/>\n", x, y - 9,
        color);
    text(x + 20, y, label, 12, "start");
    y += 16;
  }
}

void Canvas::colorbar(const Panel& p, double lo, double hi) {
  const double x = p.left + p.width + 10;
  constexpr int kSteps = 32;
  for (int i = 0; i < kSteps; ++i) {
    const double h = p.height / kSteps;
    body_ += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"12\" height=\"{:.2f}\" fill=\"{}\"/>\n", x,
        p.top + p.height - (i + 1) * h, h + 0.5, ramp_color((i + 0.5) / kSteps));
  }
  text(x + 16, p.top + p.height, fmt::format("{:.3g}", lo), 10, "start");
  text(x + 16, p.top + 8, fmt::format("{:.3g}", hi), 10, "start");
}

void Canvas::text(double x, double y, std::string_view s, int size, std::string_view anchor) {
  body_ += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"{}\" text-anchor=\"{}\">{}</text>\n", x, y,
      size, anchor, escape(s));
}

std::string Canvas::str() const {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{2}</svg>\n",
      kWidth, kHeight, body_);
}

std::string ramp_color(double t) {
  static constexpr std::array<std::array<double, 3>, 5> anchors{{
      {68, 1, 84},
      {59, 82, 139},
      {33, 145, 140},
      {94, 201, 98},
      {253, 231, 37},
  }};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const double pos = t * (anchors.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), anchors.size() - 2);
  const double f = pos - static_cast<double>(i);
  std::array<int, 3> rgb{};
  for (std::size_t k = 0; k < 3; ++k) {
    rgb[k] = static_cast<int>(std::lround(anchors[i][k] + f * (anchors[i + 1][k] - anchors[i][k])));
  }
  return fmt::format("#{:02x}{:02x}{:02x}", rgb[0], rgb[1], rgb[2]);
}

}  // namespace dtqw::plot
