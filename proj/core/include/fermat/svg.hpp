#pragma once

#include <filesystem>
#include <sstream>
#include <string>

#include "fermat/curve_metric.hpp"

namespace fermat {

/// Minimal static SVG canvas with a data-space viewport mapping.
/// Good enough for ratio-vs-n plots, ball overlays, and geodesics.
class SvgCanvas {
 public:
  SvgCanvas(double data_x0, double data_y0, double data_x1, double data_y1,
            int width_px = 640, int height_px = 480, int margin_px = 48);

  void polyline(const Polyline& pts, const std::string& stroke, double width = 1.5,
                const std::string& dash = "");
  void band(const Polyline& upper, const Polyline& lower, const std::string& fill,
            double opacity = 0.25);
  void circle(double x, double y, double radius_px, const std::string& fill);
  void rect_px(double x, double y, double w_px, double h_px, const std::string& fill);
  void text(double x, double y, const std::string& label, int font_px = 12,
            const std::string& anchor = "start");
  void axes(const std::string& x_label, const std::string& y_label);

  void save(const std::filesystem::path& path) const;

 private:
  double map_x(double x) const;
  double map_y(double y) const;

  double x0_, y0_, x1_, y1_;
  int width_, height_, margin_;
  std::ostringstream body_;
};

}  // namespace fermat
