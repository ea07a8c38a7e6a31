#include "nnfit/plot.hpp"

#include <cstdio>

#include "nnfit/error.hpp"

namespace nnfit {

namespace {

constexpr double kPanel = 400.0;
constexpr double kMargin = 40.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct Panel {
  double left;
  double lo;
  double hi;

  double sx(double x) const { return left + kMargin + (x - lo) / (hi - lo) * kPanel; }
  double sy(double y) const { return kMargin + (hi - y) / (hi - lo) * kPanel; }
};

void frame(std::string& svg, const Panel& p, const std::string& title, bool disc) {
  const double x0 = p.sx(p.lo), x1 = p.sx(p.hi), y0 = p.sy(p.hi), y1 = p.sy(p.lo);
  svg += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) + "\" width=\"" + fmt(x1 - x0) +
         "\" height=\"" + fmt(y1 - y0) + "\" fill=\"none\" stroke=\"black\"/>\n";
  if (disc) {
    svg += "<circle cx=\"" + fmt(p.sx(0.0)) + "\" cy=\"" + fmt(p.sy(0.0)) + "\" r=\"" +
           fmt(kPanel / 2.0) + "\" fill=\"none\" stroke=\"gray\"/>\n";
  }
  const double mid = 0.5 * (p.lo + p.hi);
  for (double t : {p.lo, mid, p.hi}) {
    char label[16];
    std::snprintf(label, sizeof label, "%g", t);
    const double x = p.sx(t), y = p.sy(t);
    svg += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x) + "\" y2=\"" +
           fmt(y1 + 6) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y1 + 20) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + label + "</text>\n";
    svg += "<line x1=\"" + fmt(x0 - 6) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(x0) + "\" y2=\"" +
           fmt(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(x0 - 10) + "\" y=\"" + fmt(y + 4) +
           "\" text-anchor=\"end\" font-size=\"12\">" + label + "</text>\n";
  }
  if (!title.empty()) {
    svg += "<text x=\"" + fmt(0.5 * (x0 + x1)) + "\" y=\"" + fmt(y0 - 10) +
           "\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
  }
}

void marker(std::string& svg, const Panel& p, double x, double y) {
  svg += "<circle cx=\"" + fmt(p.sx(x)) + "\" cy=\"" + fmt(p.sy(y)) + "\" r=\"2\"/>\n";
}

}  // namespace

std::string scatter_svg(std::span<const Point> points, int dimension) {
  if (points.empty()) throw InvalidInput("no points to plot");
  if (dimension != 2 && dimension != 3) throw InvalidInput("plot needs 2 or 3 columns");

  const int panels = dimension == 3 ? 2 : 1;
  const double width = panels * (kPanel + 2 * kMargin);
  const double height = kPanel + 2 * kMargin;
  std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(width) +
         "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) +
         "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (dimension == 2) {
    bool unit = true;
    for (const auto& x : points) {
      unit = unit && x[0] >= 0.0 && x[0] <= 1.0 && x[1] >= 0.0 && x[1] <= 1.0;
    }
    const Panel p{0.0, unit ? 0.0 : -1.0, 1.0};
    frame(svg, p, "", !unit);
    for (const auto& x : points) marker(svg, p, x[0], x[1]);
  } else {
    const Panel upper{0.0, -1.0, 1.0};
    const Panel lower{kPanel + 2 * kMargin, -1.0, 1.0};
    frame(svg, upper, "z &gt;= 0", true);
    frame(svg, lower, "z &lt; 0", true);
    for (const auto& x : points) marker(svg, x[2] >= 0.0 ? upper : lower, x[0], x[1]);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace nnfit
