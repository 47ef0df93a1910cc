#include "ddsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddsim/csvio.hpp"

namespace ddsim {

namespace {

struct Rgb {
  double r, g, b;
};

// viridis, 20 evenly spaced anchors
constexpr Rgb viridis_anchors[] = {
    {0x44, 0x01, 0x54}, {0x48, 0x15, 0x67}, {0x48, 0x26, 0x77},
    {0x45, 0x37, 0x81}, {0x40, 0x47, 0x88}, {0x39, 0x56, 0x8C},
    {0x33, 0x63, 0x8D}, {0x2D, 0x70, 0x8E}, {0x28, 0x7D, 0x8E},
    {0x23, 0x8A, 0x8D}, {0x1F, 0x96, 0x8B}, {0x20, 0xA3, 0x87},
    {0x29, 0xAF, 0x7F}, {0x3C, 0xBB, 0x75}, {0x55, 0xC6, 0x67},
    {0x73, 0xD0, 0x55}, {0x95, 0xD8, 0x40}, {0xB8, 0xDE, 0x29},
    {0xDC, 0xE3, 0x19}, {0xFD, 0xE7, 0x25}};

// blue-white-red diverging map (5-class RdBu, reversed to blue->red)
constexpr Rgb diverging_anchors[] = {{0x05, 0x71, 0xB0},
                                     {0x92, 0xC5, 0xDE},
                                     {0xF7, 0xF7, 0xF7},
                                     {0xF4, 0xA5, 0x82},
                                     {0xCA, 0x00, 0x20}};

Rgb sample_map(const Rgb* anchors, int n, double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double x = t * (n - 1);
  const int k = std::min(n - 2, static_cast<int>(x));
  const double f = x - k;
  return Rgb{anchors[k].r + f * (anchors[k + 1].r - anchors[k].r),
             anchors[k].g + f * (anchors[k + 1].g - anchors[k].g),
             anchors[k].b + f * (anchors[k + 1].b - anchors[k].b)};
}

std::string hex_color(const Rgb& c) {
  static const char digits[] = "0123456789abcdef";
  std::string s = "#......";
  const double ch[3] = {c.r, c.g, c.b};
  for (int i = 0; i < 3; ++i) {
    const int v =
        std::clamp(static_cast<int>(std::lround(ch[i])), 0, 255);
    s[1 + 2 * i] = digits[v >> 4];
    s[2 + 2 * i] = digits[v & 15];
  }
  return s;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// tick label: 4 significant digits, shortest form
std::string format_tick(double v) {
  if (v == 0.0 || !std::isfinite(v)) return "0";
  const double mag = std::pow(10.0, 3 - std::floor(std::log10(std::fabs(v))));
  return format_double(std::round(v * mag) / mag);
}

std::string num(double v) {
  // SVG coordinates, 2 decimals is plenty
  const double r = std::round(v * 100.0) / 100.0;
  return format_double(r);
}

struct ClipRange {
  double lo, hi;
};

ClipRange resolve_clip(const ScanResult& scan, const PlotOptions& opts) {
  if (opts.clip_min && opts.clip_max && *opts.clip_max > *opts.clip_min)
    return {*opts.clip_min, *opts.clip_max};
  if (opts.diverging) {
    double m = 0.0;
    for (double v : scan.values)
      if (std::isfinite(v)) m = std::max(m, std::fabs(v));
    if (m == 0.0) m = 1.0;  // constant zero map: any symmetric range works
    return {-m, m};
  }
  if (opts.clip_min && !opts.clip_max) return {*opts.clip_min, 1.0};
  if (!opts.clip_min && opts.clip_max) return {0.0, *opts.clip_max};
  return {0.9, 1.0};
}

void axis_tick_indices(std::size_t n, int want, std::vector<std::size_t>& out) {
  out.clear();
  const int count = std::min<std::size_t>(want, n);
  for (int k = 0; k < count; ++k)
    out.push_back((n - 1) * k / std::max(1, count - 1));
}

std::string render_heatmap(const ScanResult& scan, const PlotOptions& opts) {
  const std::size_t nx = scan.axis1.size();
  const std::size_t ny = scan.axis2.size();
  const ClipRange clip = resolve_clip(scan, opts);
  const Rgb* anchors = opts.diverging ? diverging_anchors : viridis_anchors;
  const int n_anchors = opts.diverging ? 5 : 20;

  const double width = 700, height = 560;
  const double left = 95, top = 56, right = 150, bottom = 84;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double cw = plot_w / nx;
  const double ch = plot_h / ny;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opts.title.empty())
    svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"30\" "
        << "text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << escape_xml(opts.title) << "</text>\n";

  // axis1 on x, axis2 on y (upward)
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double v = scan.values[i * ny + j];
      std::string fill = "white";  // out of range or non-finite
      if (std::isfinite(v) && v >= clip.lo && v <= clip.hi)
        fill = hex_color(sample_map(
            anchors, n_anchors, (v - clip.lo) / (clip.hi - clip.lo)));
      const double x = left + i * cw;
      const double y = top + plot_h - (j + 1) * ch;
      svg << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
          << num(cw + 0.35) << "\" height=\"" << num(ch + 0.35)
          << "\" fill=\"" << fill << "\"/>\n";
    }
  }
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
      << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  std::vector<std::size_t> ticks;
  axis_tick_indices(nx, 5, ticks);
  for (std::size_t idx : ticks) {
    const double x = left + (idx + 0.5) * cw;
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + plot_h)
        << "\" x2=\"" << num(x) << "\" y2=\"" << num(top + plot_h + 6)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(x) << "\" y=\"" << num(top + plot_h + 22)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"12\">" << format_tick(scan.axis1[idx]) << "</text>\n";
  }
  axis_tick_indices(ny, 5, ticks);
  for (std::size_t idx : ticks) {
    const double y = top + plot_h - (idx + 0.5) * ch;
    svg << "<line x1=\"" << num(left - 6) << "\" y1=\"" << num(y)
        << "\" x2=\"" << num(left) << "\" y2=\"" << num(y)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(left - 10) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"12\">" << format_tick(scan.axis2[idx]) << "</text>\n";
  }
  svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\""
      << num(height - 36)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << escape_xml(scan.axis1_label) << "</text>\n";
  svg << "<text x=\"24\" y=\"" << num(top + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\" transform=\"rotate(-90 24 " << num(top + plot_h / 2)
      << ")\">" << escape_xml(scan.axis2_label) << "</text>\n";

  // colorbar with gradient stops at the anchor points
  const double bar_x = width - right + 34, bar_w = 20;
  svg << "<defs><linearGradient id=\"cbar\" x1=\"0\" y1=\"1\" x2=\"0\" "
         "y2=\"0\">\n";
  for (int k = 0; k < n_anchors; ++k) {
    const double t = static_cast<double>(k) / (n_anchors - 1);
    svg << "<stop offset=\"" << num(100.0 * t) << "%\" stop-color=\""
        << hex_color(anchors[k]) << "\"/>\n";
  }
  svg << "</linearGradient></defs>\n";
  svg << "<rect x=\"" << num(bar_x) << "\" y=\"" << num(top) << "\" width=\""
      << num(bar_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"url(#cbar)\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double t = k / 4.0;
    const double y = top + plot_h * (1.0 - t);
    svg << "<text x=\"" << num(bar_x + bar_w + 6) << "\" y=\"" << num(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << format_tick(clip.lo + t * (clip.hi - clip.lo)) << "</text>\n";
  }
  svg << "<text x=\"" << num(bar_x + bar_w + 6) << "\" y=\""
      << num(top + plot_h + 22)
      << "\" font-family=\"sans-serif\" font-size=\"10\">white = out of "
         "range</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::string render_line_plot(const ScanResult& scan, const PlotOptions& opts) {
  const std::size_t n = scan.axis1.size();
  const bool has_ideal = scan.ideal.size() == n;

  double ymin = INFINITY, ymax = -INFINITY;
  auto take = [&](const std::vector<double>& v) {
    for (double y : v)
      if (std::isfinite(y)) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
  };
  take(scan.values);
  if (has_ideal) take(scan.ideal);
  if (!(ymax > ymin)) {  // constant trace
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  if (opts.clip_min) ymin = *opts.clip_min;
  if (opts.clip_max) ymax = *opts.clip_max;

  const double xmin = scan.axis1.front(), xmax = scan.axis1.back();
  const double width = 700, height = 430;
  const double left = 90, top = 52, right = 30, bottom = 70;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
  auto sy = [&](double y) {
    return top + plot_h - (y - ymin) / (ymax - ymin) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opts.title.empty())
    svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"28\" "
        << "text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << escape_xml(opts.title) << "</text>\n";
  svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
      << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  auto polyline = [&](const std::vector<double>& ys, const char* style) {
    svg << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t k = 0; k < n; ++k) {
      if (k) svg << ' ';
      svg << num(sx(scan.axis1[k])) << ','
          << num(sy(std::clamp(ys[k], ymin, ymax)));
    }
    svg << "\"/>\n";
  };
  if (has_ideal)
    polyline(scan.ideal,
             "stroke=\"#2ca02c\" stroke-width=\"1.5\" "
             "stroke-dasharray=\"7,4\"");
  polyline(scan.values, "stroke=\"#d62728\" stroke-width=\"1.5\"");

  for (int k = 0; k <= 4; ++k) {
    const double x = xmin + (xmax - xmin) * k / 4.0;
    svg << "<line x1=\"" << num(sx(x)) << "\" y1=\"" << num(top + plot_h)
        << "\" x2=\"" << num(sx(x)) << "\" y2=\"" << num(top + plot_h + 6)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(sx(x)) << "\" y=\"" << num(top + plot_h + 22)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"12\">" << format_tick(x) << "</text>\n";
    const double y = ymin + (ymax - ymin) * k / 4.0;
    svg << "<line x1=\"" << num(left - 6) << "\" y1=\"" << num(sy(y))
        << "\" x2=\"" << num(left) << "\" y2=\"" << num(sy(y))
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(left - 10) << "\" y=\"" << num(sy(y) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"12\">" << format_tick(y) << "</text>\n";
  }
  svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\""
      << num(height - 24)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << escape_xml(scan.axis1_label) << "</text>\n";
  svg << "<text x=\"24\" y=\"" << num(top + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\" transform=\"rotate(-90 24 " << num(top + plot_h / 2)
      << ")\">" << escape_xml(scan.value_name) << "</text>\n";

  if (has_ideal) {
    svg << "<line x1=\"" << num(left + plot_w - 170) << "\" y1=\""
        << num(top + 14) << "\" x2=\"" << num(left + plot_w - 140)
        << "\" y2=\"" << num(top + 14)
        << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    svg << "<text x=\"" << num(left + plot_w - 134) << "\" y=\""
        << num(top + 18)
        << "\" font-family=\"sans-serif\" font-size=\"12\">signal</text>\n";
    svg << "<line x1=\"" << num(left + plot_w - 170) << "\" y1=\""
        << num(top + 32) << "\" x2=\"" << num(left + plot_w - 140)
        << "\" y2=\"" << num(top + 32)
        << "\" stroke=\"#2ca02c\" stroke-width=\"1.5\" "
           "stroke-dasharray=\"7,4\"/>\n";
    svg << "<text x=\"" << num(left + plot_w - 134) << "\" y=\""
        << num(top + 36)
        << "\" font-family=\"sans-serif\" font-size=\"12\">ideal</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::string render_scan_svg(const ScanResult& scan, const PlotOptions& opts) {
  if (!scan.axis2.empty()) {
    if (scan.axis1.size() < 2 || scan.axis2.size() < 2) return {};
    if (scan.values.size() != scan.axis1.size() * scan.axis2.size()) return {};
    return render_heatmap(scan, opts);
  }
  if (scan.axis1.size() < 2 || scan.values.size() != scan.axis1.size())
    return {};
  if (scan.axis1.front() == scan.axis1.back()) return {};
  return render_line_plot(scan, opts);
}

}  // namespace ddsim
