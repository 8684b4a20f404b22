#include "crashforge/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "crashforge/textio.hpp"

namespace crashforge::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 60.0;

struct Range {
  double lo = 0.0, hi = 1.0;
  void expand(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi <= lo) hi = lo + 1.0;
    double w = hi - lo;
    lo -= 0.05 * w;
    hi += 0.05 * w;
  }
};

double map_x(double v, const Range& r) {
  return kMargin + (v - r.lo) / (r.hi - r.lo) * (kWidth - 2 * kMargin);
}

double map_y(double v, const Range& r) {
  return kHeight - kMargin - (v - r.lo) / (r.hi - r.lo) * (kHeight - 2 * kMargin);
}

std::string num(double v) { return fmt_sig(v, 6); }

void open_figure(std::ostringstream& ss, const std::string& title) {
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
     << kHeight << "\">\n";
  ss << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  ss << "<text x=\"" << kWidth / 2
     << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">"
     << title << "</text>\n";
}

void axes(std::ostringstream& ss, const Range& rx, const Range& ry) {
  ss << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
     << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
    double fy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
    ss << "<text x=\"" << map_x(fx, rx) << "\" y=\"" << kHeight - kMargin + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << num(fx) << "</text>\n";
    ss << "<text x=\"" << kMargin - 8 << "\" y=\"" << map_y(fy, ry) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << num(fy) << "</text>\n";
  }
}

const char* series_color(std::size_t i) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#ff7f0e", "#9467bd", "#8c564b"};
  return kColors[i % 6];
}

}  // namespace

std::string parity_plot(const std::string& title, const Series& points,
                        const std::string& annotation) {
  Range r;
  bool first = true;
  for (std::size_t i = 0; i < points.x.size(); ++i) {
    if (first) {
      r.lo = r.hi = points.x[i];
      first = false;
    }
    r.expand(points.x[i]);
    r.expand(points.y[i]);
  }
  r.pad();

  std::ostringstream ss;
  open_figure(ss, title);
  axes(ss, r, r);
  ss << "<line x1=\"" << map_x(r.lo, r) << "\" y1=\"" << map_y(r.lo, r)
     << "\" x2=\"" << map_x(r.hi, r) << "\" y2=\"" << map_y(r.hi, r)
     << "\" stroke=\"gray\" stroke-dasharray=\"4,3\"/>\n";
  for (std::size_t i = 0; i < points.x.size(); ++i) {
    ss << "<circle cx=\"" << map_x(points.x[i], r) << "\" cy=\""
       << map_y(points.y[i], r)
       << "\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.7\"/>\n";
  }
  ss << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin + 18
     << "\" font-family=\"sans-serif\" font-size=\"14\">" << annotation
     << "</text>\n";
  ss << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">true</text>\n";
  ss << "<text x=\"16\" y=\"" << kHeight / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\" transform=\"rotate(-90 16 "
     << kHeight / 2 << ")\">predicted</text>\n";
  ss << "</svg>\n";
  return ss.str();
}

std::string bar_chart(const std::string& title,
                      const std::vector<std::string>& labels,
                      const std::vector<double>& values) {
  std::ostringstream ss;
  open_figure(ss, title);
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, v);
  if (vmax <= 0.0) vmax = 1.0;
  double band = (kHeight - 2 * kMargin) / std::max<std::size_t>(1, labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double w = values[i] / vmax * (kWidth - 2 * kMargin - 80.0);
    double y = kMargin + band * i + band * 0.15;
    ss << "<rect x=\"" << kMargin + 80.0 << "\" y=\"" << y << "\" width=\""
       << std::max(0.0, w) << "\" height=\"" << band * 0.7
       << "\" fill=\"#1f77b4\"/>\n";
    ss << "<text x=\"" << kMargin + 74.0 << "\" y=\"" << y + band * 0.5
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << labels[i] << "</text>\n";
    ss << "<text x=\"" << kMargin + 84.0 + std::max(0.0, w) << "\" y=\""
       << y + band * 0.5
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << num(values[i])
       << "</text>\n";
  }
  ss << "</svg>\n";
  return ss.str();
}

std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::vector<Series>& series) {
  Range rx, ry;
  bool first = true;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        rx.lo = rx.hi = s.x[i];
        ry.lo = ry.hi = s.y[i];
        first = false;
      }
      rx.expand(s.x[i]);
      ry.expand(s.y[i]);
    }
  }
  rx.pad();
  ry.pad();

  std::ostringstream ss;
  open_figure(ss, title);
  axes(ss, rx, ry);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    ss << "<polyline fill=\"none\" stroke=\"" << series_color(k)
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      ss << num(map_x(s.x[i], rx)) << ',' << num(map_y(s.y[i], ry)) << ' ';
    }
    ss << "\"/>\n";
    ss << "<text x=\"" << kWidth - kMargin - 10 << "\" y=\""
       << kMargin + 18 + 16 * k << "\" text-anchor=\"end\" fill=\""
       << series_color(k)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
       << "</text>\n";
  }
  ss << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">"
     << x_label << "</text>\n";
  ss << "</svg>\n";
  return ss.str();
}

std::string front_plot(const std::string& title, const Series& front) {
  Range rx, ry;
  bool first = true;
  for (std::size_t i = 0; i < front.x.size(); ++i) {
    if (first) {
      rx.lo = rx.hi = front.x[i];
      ry.lo = ry.hi = front.y[i];
      first = false;
    }
    rx.expand(front.x[i]);
    ry.expand(front.y[i]);
  }
  rx.pad();
  ry.pad();

  std::ostringstream ss;
  open_figure(ss, title);
  axes(ss, rx, ry);
  ss << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" "
        "points=\"";
  for (std::size_t i = 0; i < front.x.size(); ++i) {
    ss << num(map_x(front.x[i], rx)) << ',' << num(map_y(front.y[i], ry))
       << ' ';
  }
  ss << "\"/>\n";
  for (std::size_t i = 0; i < front.x.size(); ++i) {
    ss << "<circle cx=\"" << map_x(front.x[i], rx) << "\" cy=\""
       << map_y(front.y[i], ry) << "\" r=\"4\" fill=\"#d62728\"/>\n";
  }
  ss << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">complexity</text>\n";
  ss << "</svg>\n";
  return ss.str();
}

}  // namespace crashforge::svg
