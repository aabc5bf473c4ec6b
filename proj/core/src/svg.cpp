#include "fermat/svg.hpp"

#include <fstream>

#include "fermat/csvio.hpp"
#include "fermat/errors.hpp"

namespace fermat {

SvgCanvas::SvgCanvas(double data_x0, double data_y0, double data_x1, double data_y1,
                     int width_px, int height_px, int margin_px)
    : x0_(data_x0), y0_(data_y0), x1_(data_x1), y1_(data_y1),
      width_(width_px), height_(height_px), margin_(margin_px) {
  if (!(x1_ > x0_) || !(y1_ > y0_)) throw ValidationError("SvgCanvas: empty data range");
}

double SvgCanvas::map_x(double x) const {
  return margin_ + (x - x0_) / (x1_ - x0_) * (width_ - 2 * margin_);
}

double SvgCanvas::map_y(double y) const {
  return height_ - margin_ - (y - y0_) / (y1_ - y0_) * (height_ - 2 * margin_);
}

void SvgCanvas::polyline(const Polyline& pts, const std::string& stroke, double width,
                         const std::string& dash) {
  if (pts.empty()) return;
  body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
        << format_double(width) << "\"";
  if (!dash.empty()) body_ << " stroke-dasharray=\"" << dash << "\"";
  body_ << " points=\"";
  for (const auto& p : pts) {
    body_ << format_double(map_x(p[0])) << ',' << format_double(map_y(p[1])) << ' ';
  }
  body_ << "\"/>\n";
}

void SvgCanvas::band(const Polyline& upper, const Polyline& lower, const std::string& fill,
                     double opacity) {
  if (upper.empty() || lower.empty()) return;
  body_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << format_double(opacity)
        << "\" stroke=\"none\" points=\"";
  for (const auto& p : upper) {
    body_ << format_double(map_x(p[0])) << ',' << format_double(map_y(p[1])) << ' ';
  }
  for (auto it = lower.rbegin(); it != lower.rend(); ++it) {
    body_ << format_double(map_x((*it)[0])) << ',' << format_double(map_y((*it)[1])) << ' ';
  }
  body_ << "\"/>\n";
}

void SvgCanvas::circle(double x, double y, double radius_px, const std::string& fill) {
  body_ << "<circle cx=\"" << format_double(map_x(x)) << "\" cy=\"" << format_double(map_y(y))
        << "\" r=\"" << format_double(radius_px) << "\" fill=\"" << fill << "\"/>\n";
}

void SvgCanvas::rect_px(double x, double y, double w_px, double h_px, const std::string& fill) {
  body_ << "<rect x=\"" << format_double(map_x(x) - 0.5 * w_px) << "\" y=\""
        << format_double(map_y(y) - 0.5 * h_px) << "\" width=\"" << format_double(w_px)
        << "\" height=\"" << format_double(h_px) << "\" fill=\"" << fill << "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& label, int font_px,
                     const std::string& anchor) {
  body_ << "<text x=\"" << format_double(map_x(x)) << "\" y=\"" << format_double(map_y(y))
        << "\" font-size=\"" << font_px << "\" font-family=\"sans-serif\" text-anchor=\""
        << anchor << "\">" << label << "</text>\n";
}

void SvgCanvas::axes(const std::string& x_label, const std::string& y_label) {
  body_ << "<line x1=\"" << margin_ << "\" y1=\"" << height_ - margin_ << "\" x2=\""
        << width_ - margin_ << "\" y2=\"" << height_ - margin_
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  body_ << "<line x1=\"" << margin_ << "\" y1=\"" << height_ - margin_ << "\" x2=\"" << margin_
        << "\" y2=\"" << margin_ << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  body_ << "<text x=\"" << width_ / 2 << "\" y=\"" << height_ - 8
        << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\">" << x_label
        << "</text>\n";
  body_ << "<text x=\"14\" y=\"" << height_ / 2
        << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 14 "
        << height_ / 2 << ")\">" << y_label << "</text>\n";
}

void SvgCanvas::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write SVG file: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
      << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
}

}  // namespace fermat
