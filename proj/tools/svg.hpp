#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dtqw::plot {

inline constexpr double kWidth = 800.0;
inline constexpr double kHeight = 600.0;

/// Rectangle of the canvas a chart is drawn into, with data ranges.
struct Panel {
  double left = 70, top = 40, width = 690, height = 480;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  std::string title;
  std::string x_label;
  std::string y_label;

  double px(double x) const { return left + (x - x_min) / (x_max - x_min) * width; }
  double py(double y) const { return top + height - (y - y_min) / (y_max - y_min) * height; }
};

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional error bars, same length as y
};

/// Accumulates SVG elements; output is byte-stable for identical input.
class Canvas {
 public:
  void frame(const Panel& p, int x_ticks = 5, int y_ticks = 5);
  void bar(const Panel& p, double x, double half_width, double y, std::string_view color);
  void line(const Panel& p, const Series& s);
  void markers(const Panel& p, const Series& s);
  void cell(const Panel& p, double x0, double x1, double y0, double y1, std::string_view color);
  void legend(const Panel& p, const std::vector<std::pair<std::string, std::string>>& entries);
  void colorbar(const Panel& p, double lo, double hi);
  void text(double x, double y, std::string_view s, int size = 14,
            std::string_view anchor = "middle");

  std::string str() const;

 private:
  std::string body_;
};

/// Perceptually ordered blue-green-yellow ramp for t in [0, 1].
std::string ramp_color(double t);

}  // namespace dtqw::plot
